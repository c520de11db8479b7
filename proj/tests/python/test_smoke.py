import math

import numpy as np
import pytest

import approxgroups as ag


def test_lattice_count_matches_brute_force():
    ps = ag.gen_lattice(np.eye(2), 2.5)
    brute = sum(1 for m in range(-3, 4) for n in range(-3, 4) if m * m + n * n <= 6.25)
    assert len(ps) == brute == 21
    assert ps.points().shape == (21, 2)


def test_strip_membership():
    ps = ag.gen_strip(np.eye(2), [np.array([1.0, math.sqrt(3)])], 1.0, 10.0)
    pts = {tuple(map(round, p)) for p in ps.points()}
    # (0, 2) sits exactly at distance 1: the strip is closed
    for q in [(0, 0), (1, 1), (1, 2), (2, 3), (0, 2)]:
        assert q in pts
    assert (0, 3) not in pts
    for m, n in pts:
        assert abs(math.sqrt(3) * m - n) / 2 <= 1 + 1e-9


def test_translation_set_and_inclusion():
    ps = ag.gen_lattice(np.eye(2), 12.0, 3.0)
    tr = ag.find_translation_set(ps)
    assert tr["F"].shape == (1, 2)
    assert tr["K"] == 0
    ok, failures = ag.check_inclusion(ps, list(tr["F"]))
    assert ok and failures == 0


def test_perturbed_is_rejected():
    ps = ag.gen_perturbed(ag.gen_lattice(np.eye(2), 20.0, 5.0), 0.3, 7)
    with pytest.raises(ag.NotApproximateSubgroup):
        ag.find_translation_set(ps)


def test_point_text_round_trip():
    ps = ag.preset("example-2.6", window=20.0)
    back = ag.PointSet.from_text(ps.to_text())
    assert np.array_equal(back.points(), ps.points())
    assert back.radius == 20.0


def test_heisenberg_commutator():
    v, z = ag.heis_commutator(np.array([1.0, 0.0]), 5.0, np.array([0.0, 1.0]), -3.0)
    assert np.allclose(v, 0) and z == pytest.approx(1.0)
    assert ag.heis_dist(np.zeros(2), 0.0, np.zeros(2), 1.0) == pytest.approx(2.0)


def test_dichotomy_routes():
    assert ag.analyze_heis(ag.gen_heis_coset_lattice(10.0, 2.5))["route"] == "symplectic"
    assert ag.analyze_heis(ag.gen_heis_line(30.0, 7.5))["route"] == "lagrangian"
    with pytest.raises(ag.DegenerateForm):
        ag.check_center_density(ag.gen_heis_line(10.0, 2.0), 1.0)


def test_run_exit_codes_and_summary():
    r = ag.run("verify", preset="zd", window=10.0)
    assert r["exit_code"] == 0
    checks = ag.summary_lines(r)
    assert {c["check"] for c in checks} >= {"translation_set", "inclusion"}
    assert all(c["verdict"] == "pass" for c in checks)
    assert ag.run("verify", preset="perturbed")["exit_code"] == 1
    bad = ag.run("verify", preset="no-such-preset")
    assert bad["exit_code"] == 2 and "unknown preset" in bad["error"]


def test_run_is_deterministic():
    a = ag.run("report", preset="perturbed", seed=5)
    b = ag.run("report", preset="perturbed", seed=5)
    assert a["summary"] == b["summary"] and a["json"] == b["json"]
