#pragma once

#include <optional>
#include <string>
#include <vector>

#include "apx/geometry.hpp"

namespace apx {

struct DirectionSet {
  std::vector<Vector> dirs;
  double r_min;
  double cluster_tol;
};

/// Normalized far points (‖p‖ >= r_min) clustered greedily by angle in
/// canonical point order; each cluster is represented by its normalized mean.
DirectionSet asymptotic_directions(const PointSet& ps, double r_min, double cluster_tol);

/// Span of the directions; rank counts singular values >= rank_tol * largest.
Subspace span_of_directions(const DirectionSet& dirs, double rank_tol = 0.1);

/// max over points of dist(p, L).
double thickening_radius(const PointSet& ps, const Subspace& L);

/// x != 0 and <x/‖x‖, u> >= 1 − epsilon.
bool cone_contains(const Vector& x, const Vector& u, double epsilon);

/// 1 − ε = sqrt(‖ℓ‖² − 5K²) / ‖ℓ‖, the cone aperture used to thicken L.
double cone_constant(double ell_norm, double K);

struct WellSpreadSystem {
  std::vector<Vector> ell;
  std::vector<Vector> ell_reflected;
  double epsilon = 0;
  double M = 0;
  double K = 0;
  double T = 0;

  /// ell followed by ell_reflected.
  std::vector<Vector> family() const;
};

/// Smallest angle between v and the span of `others` (π/2 when others is empty).
double angle_to_span(const Vector& v, const std::vector<Vector>& others);

struct SystemOptions {
  double tol = Tolerances{}.geom;
  int perturbation_samples = 256;
  std::uint64_t seed = 0x5eed;
};

/// Greedy selection of rank(L) long vectors with reflected partners; ε is the
/// realized minimum angle over sampled B_{2K} perturbations.
WellSpreadSystem find_well_spread_system(const PointSet& ps, const Subspace& L, double M, double K,
                                         const SystemOptions& opt = {});

/// min over unit z in L of max over the family of |<z, ℓ/‖ℓ‖>|: deterministic
/// sphere samples followed by local refinement of the best few.
double delta_of_system(const WellSpreadSystem& sys, const Subspace& L, int n_samples = 10'000);

struct DescentStep {
  Vector ell;
  double decrease;  // ‖x‖ − (‖x − ℓ‖ + K)
};

/// Chooses ℓ in the family maximizing <x, ℓ>/‖ℓ‖ and asserts the worst-case
/// decrease over B_K(ℓ) is at least δM/4. Throws DescentFailure otherwise.
DescentStep descent_step(const Vector& x, const WellSpreadSystem& sys, double delta, double K);

/// ‖x‖ beyond which the descent guarantee is proved: max(T, T²/δ).
double descent_threshold(const WellSpreadSystem& sys, double delta);

struct Chain {
  Vector target;
  std::vector<Vector> points;    // ps points, each strictly closer to target
  std::vector<double> distances;  // ‖point − target‖
  bool ok = true;
  std::string failure;
};

struct Certification {
  bool passed = false;
  double R_prime = 0;    // grid-measured covering radius over the targets
  double threshold = 0;  // max(T, T²/δ)
  double delta = 0;
  std::size_t targets = 0;
  std::size_t max_chain_length = 0;
  std::vector<Chain> chains;
  std::optional<Chain> stall;
};

struct CertifyOptions {
  double spacing = 0;  // <= 0: R / 2
  std::size_t max_targets = 20'000;
  int delta_samples = 10'000;
  double tol = Tolerances{}.geom;
  bool keep_chains = true;
};

/// Iterated descent from far points of ps to every grid target of L in the
/// window interior.
Certification certify_density(const PointSet& ps, const Subspace& L, const WellSpreadSystem& sys, double R,
                              const CertifyOptions& opt = {});

}  // namespace apx
