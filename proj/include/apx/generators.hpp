#pragma once

#include <cstdint>
#include <limits>

#include "apx/geometry.hpp"

namespace apx {

/// Lattice spanned by the columns of `basis` (d x d, nondegenerate).
struct LatticeSpec {
  Matrix basis;

  static LatticeSpec cubic(int dim, double spacing = 1.0);
  int dim() const { return static_cast<int>(basis.rows()); }
  /// Throws unless square and |det| > tol.
  void validate(double tol = 1e-12) const;
};

/// Model set: lattice points whose internal projection lies in a ball,
/// reported in physical coordinates (the physical subspace's basis).
struct CutProjectSpec {
  LatticeSpec lattice;
  Subspace physical;
  double internal_window_radius = 1.0;  // may be +inf

  void validate() const;
};

/// Every lattice point of norm <= window radius. Coefficient ranges come from
/// the dual basis, so nothing is missed.
PointSet gen_lattice(const LatticeSpec& spec, Window window);

/// Lattice points within `width` of L (closed; boundary within `tol`).
PointSet gen_strip(const LatticeSpec& lattice, const Subspace& L, double width, Window window,
                   double tol = Tolerances{}.exact);

PointSet gen_cut_project(const CutProjectSpec& spec, Window window);

/// Windowed sample of ps + 4R * Z^(d-k) with the cubic lattice placed in L-perp
/// through its orthonormal basis. Only points of `ps` inside its own window are
/// used, so completeness at radius r needs ps.window >= sqrt(r^2 + t^2) with t
/// the thickening of ps around L.
PointSet gen_meyer_extension(const PointSet& ps, const Subspace& L, double R, Window window);

/// Each point displaced by a seeded vector of norm <= amplitude. The window
/// grows by the amplitude so every displaced point stays inside.
PointSet gen_perturbed(const PointSet& ps, double amplitude, std::uint64_t seed);

}  // namespace apx
