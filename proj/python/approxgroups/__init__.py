"""Approximate subgroups of R^d and the Heisenberg group."""

from ._core import (
    ConfigError,
    DegenerateForm,
    HeisPointSet,
    NotApproximateSubgroup,
    PointSet,
    WindowTooSmall,
    analyze,
    analyze_heis,
    check_center_density,
    check_inclusion,
    check_meyer,
    check_projection_discreteness,
    find_translation_set,
    gen_cut_project,
    gen_heis_coset_lattice,
    gen_heis_line,
    gen_lattice,
    gen_meyer_extension,
    gen_perturbed,
    gen_strip,
    heis_commutator,
    heis_dist,
    heis_mul,
    min_pairwise_gap,
    pi_V,
    preset,
    preset_names,
    restrict_to_strip,
    run,
    thickening_radius,
)


def summary_lines(result):
    """Parses the machine summary of a run() result into dicts."""
    out = []
    for line in result["summary"].splitlines():
        out.append(dict(tok.split("=", 1) for tok in line.split()))
    return out


__all__ = [name for name in dir() if not name.startswith("_")]
