#pragma once

#include <optional>
#include <string>
#include <vector>

#include "apx/geometry.hpp"

namespace apx {

/// Finite F certifying Λ − Λ ⊂ Λ + F; K is its diameter.
class TranslationSet {
 public:
  TranslationSet(int dim, std::vector<Vector> translates);

  int dim() const { return dim_; }
  const std::vector<Vector>& translates() const { return translates_; }
  std::size_t size() const { return translates_.size(); }
  double K() const { return K_; }

  TranslationSet scaled(double c) const;
  /// Image under a linear map (e.g. projection onto a subspace's coordinates).
  TranslationSet mapped(const Matrix& A) const;
  /// Union with extra translates.
  TranslationSet merged(const std::vector<Vector>& extra) const;

 private:
  int dim_;
  std::vector<Vector> translates_;
  double K_;
};

double diameter(const std::vector<Vector>& pts);

struct Counterexample {
  Vector a;
  Vector b;
  std::string reason;
};

struct VerificationReport {
  bool passed = true;
  double delta = std::numeric_limits<double>::quiet_NaN();
  std::optional<TranslationSet> F;
  std::vector<Counterexample> counterexamples;
  std::size_t tested_pairs = 0;
  std::vector<std::string> notes;
  std::size_t failures = 0;
  std::size_t witness_cap = 64;

  /// Records a failure. Only the `witness_cap` witnesses with the smallest ‖a‖
  /// survive finalize().
  void fail(Counterexample c);
  void finalize();
};

/// Translates ps so its point nearest the origin sits at 0, shrinking the
/// window by the shift. Returns the input unchanged when 0 is already a point.
struct Normalized {
  PointSet ps;
  Vector shift;
};
Normalized normalize_origin(const PointSet& ps);

struct Discreteness {
  bool passed;
  double gap;
};
Discreteness check_uniform_discreteness(const PointSet& ps, double threshold = Tolerances{}.geom);

struct TranslationOptions {
  double tol = Tolerances{}.geom;
  std::size_t k_nearest = 8;
  double k_max_fraction = 0.25;  // K_max = fraction * W
  std::size_t pair_budget = 4'000'000;
  std::size_t max_candidates = 1u << 18;
  std::size_t max_translates = 256;
};

struct TranslationResult {
  TranslationSet F;
  std::size_t tested_pairs = 0;
  std::size_t distinct_differences = 0;
  std::size_t candidates = 0;
  std::size_t stride = 1;
  Vector shift;
};

/// Greedy set cover over candidate translates f = x − λ (λ among the k nearest
/// points of each difference x). Throws NotApproximateSubgroup when a
/// difference has no point within K_max, when candidates exceed the cap, or
/// when the greedy cover needs more than max_translates.
TranslationResult find_translation_set_detailed(const PointSet& ps, const TranslationOptions& opt = {});
TranslationSet find_translation_set(const PointSet& ps, const TranslationOptions& opt = {});

/// Λ − Λ ⊂ Λ + F over all pairs with ‖p − q‖ <= W − m (deterministic stride
/// beyond `pair_budget`).
VerificationReport check_inclusion(const PointSet& ps, const TranslationSet& F, double tol = Tolerances{}.geom,
                                   std::size_t pair_budget = 20'000'000);

/// For every interior ℓ some point lies within K of −ℓ.
VerificationReport check_property_A(const PointSet& ps, double K, double tol = Tolerances{}.exact);

/// For every interior pair with ‖ℓ₁ + ℓ₂‖ <= W − m some point lies within 2K of the sum.
VerificationReport check_property_B(const PointSet& ps, double K, double tol = Tolerances{}.exact,
                                    std::size_t pair_budget = 20'000'000);

struct DensityAround {
  bool passed;
  double R_witness;
  double thickening;
  double covering;
  std::size_t targets;
};

/// Both bullets of relative density around L at radius R on the window
/// interior. `spacing` <= 0 picks min(R/2, 0.1), coarsened to stay under
/// `max_targets` grid points.
DensityAround check_relative_density_around(const PointSet& ps, const Subspace& L, double R,
                                            double spacing = 0.0, std::size_t max_targets = 1'000'000);

/// Grid on L inside the ball of `radius`, spacing coarsened if needed.
std::vector<Vector> density_targets(const Subspace& L, double radius, double spacing, std::size_t max_targets);

}  // namespace apx
