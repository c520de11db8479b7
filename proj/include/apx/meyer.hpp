#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "apx/geometry.hpp"
#include "apx/verify.hpp"

namespace apx {

struct MeyerReport {
  bool discrete = false;
  double gap = 0;       // min gap at the full window
  double gap_half = 0;  // min gap on the half-radius window
  bool relatively_dense = false;
  double radius = 0;        // covering radius of the interior ball grid
  double density_bound = 0;  // largest radius accepted as "relatively dense"
  bool approx_subgroup = false;
  std::optional<TranslationSet> F;
  bool verdict = false;
  std::vector<std::string> notes;
};

struct MeyerOptions {
  double gap_threshold = Tolerances{}.geom;
  // Discreteness also requires gap(W) >= gap_trend * gap(W/2).
  double gap_trend = 0.9;
  double density_bound = 0;  // <= 0: interior radius / 4
  double spacing = 0;        // <= 0: 0.1, coarsened to fit max_targets
  std::size_t max_targets = 200'000;
  TranslationOptions translation{};
  bool verify_inclusion = true;
};

/// Discreteness (with a window-halving trend), covering of the interior ball,
/// and a translation set; the verdict is their conjunction.
MeyerReport check_meyer(const PointSet& ps, const MeyerOptions& opt = {});

struct StripRestriction {
  PointSet ps;
  std::optional<std::string> warning;
};

/// Points of `meyer` within R of L, same window. When `check_precondition`
/// is set and `meyer` is not a Meyer set with covering radius <= R/2, the
/// restriction is still returned with a warning.
StripRestriction restrict_to_strip(const PointSet& meyer, const Subspace& L, double R,
                                   bool check_precondition = true, const MeyerOptions& opt = {});

struct ProjectionReport {
  PointSet projected;  // Λ_L in coordinates of L's basis
  MeyerReport meyer;
  double R = 0;  // thickening radius of ps around L
  bool contained = false;  // Λ ⊂ Λ_L + B_R
  double containment_slack = 0;  // max over p of dist(p, Λ_L) − R
  std::optional<bool> F_inherited;  // Λ_L − Λ_L ⊂ Λ_L + π(F)
};

/// Projects ps onto L and analyses the image inside L. The projected window
/// keeps the radius and widens the margin by twice the thickening (capped at
/// half the radius).
ProjectionReport check_projection_meyer(const PointSet& ps, const Subspace& L, const MeyerOptions& opt = {});

struct TransversalReport {
  bool supported = false;
  std::size_t count = 0;       // distinct perpendicular values at W
  std::size_t count_half = 0;  // at W/2
  double growth = 0;
};

/// Distinct values of the projection onto L-perp (merged at tol), at the
/// window and at half of it. Supported iff count > max_F and the count grows
/// by at least `min_growth`. Only points within `strip_radius` of L count.
TransversalReport check_no_finite_transversal(const PointSet& ps, const Subspace& L, std::size_t max_F,
                                              double strip_radius = std::numeric_limits<double>::infinity(),
                                              double min_growth = 1.5, double tol = Tolerances{}.geom);

}  // namespace apx
