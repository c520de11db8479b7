#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "apx/analysis.hpp"
#include "apx/geometry.hpp"
#include "apx/verify.hpp"

namespace apx {

/// Antisymmetric nondegenerate bilinear form on R^(2n).
class SymplecticForm {
 public:
  /// ω(v, u) = Σ_i v_i u_{n+i} − v_{n+i} u_i; the determinant when n = 1.
  static SymplecticForm standard(int n);
  /// Validates antisymmetry (tol_exact) and |det| > tol.
  static SymplecticForm from_matrix(Matrix J, double tol = 1e-12);

  int n() const { return static_cast<int>(J_.rows()) / 2; }
  const Matrix& matrix() const { return J_; }
  double operator()(const Eigen::Ref<const Vector>& v, const Eigen::Ref<const Vector>& u) const;
  /// Max |ω(q_i, q_j)| over the orthonormal columns of Q.
  double restriction_norm(const Matrix& Q) const;

 private:
  explicit SymplecticForm(Matrix J) : J_(std::move(J)) {}
  Matrix J_;
};

struct HeisPoint {
  Vector v;
  double z = 0;

  static HeisPoint identity(int n) { return {Vector::Zero(2 * n), 0.0}; }
  /// Packs (v, z) as a vector of length 2n + 1.
  Vector flat() const;
  static HeisPoint from_flat(const Eigen::Ref<const Vector>& x);
};

HeisPoint heis_mul(const HeisPoint& a, const HeisPoint& b, const SymplecticForm& form);
HeisPoint heis_inverse(const HeisPoint& a);
/// a⁻¹b⁻¹ab through the group law; throws std::logic_error unless it equals
/// (0, ω(v_a, v_b)) within tol_exact (relative to the magnitudes involved).
HeisPoint heis_commutator(const HeisPoint& a, const HeisPoint& b, const SymplecticForm& form);
/// Homogeneous gauge (‖v‖⁴ + 16 z²)^(1/4).
double heis_gauge(const HeisPoint& a);
/// Left-invariant distance N(a⁻¹b).
double heis_dist(const HeisPoint& a, const HeisPoint& b, const SymplecticForm& form);
/// Right-invariant distance N(a b⁻¹).
double heis_dist_right(const HeisPoint& a, const HeisPoint& b, const SymplecticForm& form);

class HeisIndex;

/// Windowed sample of a subset of the Heisenberg group. The window is a ball
/// of the gauge distance around the identity. Points are kept in canonical
/// lexicographic order of (v, z).
class HeisPointSet {
 public:
  HeisPointSet(SymplecticForm form, std::vector<double> flat, Window window, std::string label = {});
  static HeisPointSet from_points(SymplecticForm form, const std::vector<HeisPoint>& pts, Window window,
                                  std::string label = {});

  int n() const { return form_.n(); }
  int stride() const { return 2 * form_.n() + 1; }
  const SymplecticForm& form() const { return form_; }
  std::size_t size() const { return coords_->size() / static_cast<std::size_t>(stride()); }
  HeisPoint point(std::size_t i) const;
  double z(std::size_t i) const { return (*coords_)[(i + 1) * stride() - 1]; }
  Eigen::Map<const Vector> v(std::size_t i) const {
    return Eigen::Map<const Vector>(coords_->data() + i * stride(), 2 * n());
  }
  std::span<const double> coords() const { return *coords_; }
  const Window& window() const { return window_; }
  const std::string& label() const { return label_; }
  bool interior(std::size_t i) const;
  HeisPointSet restrict(Window window) const;
  HeisPointSet with_label(std::string label) const;
  const HeisIndex& index() const { return *index_; }

 private:
  friend class HeisIndex;
  SymplecticForm form_;
  std::shared_ptr<const std::vector<double>> coords_;
  Window window_;
  std::string label_;
  std::shared_ptr<const HeisIndex> index_;
};

struct HeisNeighbor {
  std::size_t index;
  double distance;
};

/// Points grouped by identical v with z sorted inside each group, plus a
/// Euclidean index over the distinct v's. A gauge ball of radius r around x
/// meets only groups with ‖u − v_x‖ <= r, and inside a group only a z-interval.
class HeisIndex {
 public:
  enum class Side { Left, Right };

  /// Expects the canonical order of HeisPointSet.
  explicit HeisIndex(const HeisPointSet& ps);

  std::size_t groups() const { return begin_.size() - 1; }
  const PointSet& distinct_v() const { return vs_; }
  std::size_t group_begin(std::size_t g) const { return begin_[g]; }
  std::size_t group_end(std::size_t g) const { return begin_[g + 1]; }

  /// Points within distance r of x: N(x⁻¹λ) for Left, N(xλ⁻¹) for Right.
  std::vector<HeisNeighbor> within(const HeisPoint& x, double r, Side side = Side::Left) const;
  std::optional<HeisNeighbor> nearest(const HeisPoint& x, Side side = Side::Left,
                                      double max_r = std::numeric_limits<double>::infinity()) const;
  std::vector<HeisNeighbor> k_nearest(const HeisPoint& x, std::size_t k, double max_r, Side side = Side::Left) const;
  bool contains(const HeisPoint& x, double tol) const;

 private:
  std::shared_ptr<const std::vector<double>> coords_;
  int stride_;
  SymplecticForm form_;
  PointSet vs_;
  std::vector<std::size_t> begin_;
  double reach_ = 0;  // largest gauge in the set

  void scan_group(std::size_t g, const HeisPoint& x, double r, Side side, std::vector<HeisNeighbor>& out) const;
};

/// Projection onto V with near-duplicates merged; Euclidean window of the
/// same radius and margin (‖v‖ <= gauge).
PointSet pi_V(const HeisPointSet& ps, double tol = Tolerances{}.geom);

struct HeisTranslationSet {
  std::vector<HeisPoint> F;
  double K = 0;  // max gauge distance between members
};

struct HeisApproxReport {
  VerificationReport report;
  std::optional<HeisTranslationSet> F;
  bool has_identity = false;
  bool symmetric = false;
  std::size_t sampled_pairs = 0;
  bool exhaustive = false;
};

struct HeisApproxOptions {
  double tol = Tolerances{}.geom;
  std::size_t pair_budget = 200'000;
  std::size_t point_budget = 1'000'000;  // symmetry checks beyond this use a stride
  std::size_t k_nearest = 8;
  double k_max_fraction = 0.25;
  std::size_t max_candidates = 1u << 16;
  std::size_t max_translates = 256;
  std::uint64_t seed = 0x9e15;
};

/// Greedy search for F with λ₁⁻¹λ₂ ∈ FΛ over interior pairs whose product
/// lies in the interior; pairs are exhaustive within the budget and sampled
/// with a seeded generator beyond it. Also checks e ∈ Λ and Λ⁻¹ = Λ.
HeisApproxReport check_heis_approx_subgroup(const HeisPointSet& ps, const HeisApproxOptions& opt = {});

/// All products a·b·c over members.
HeisTranslationSet heis_triple_product(const HeisTranslationSet& F, const SymplecticForm& form,
                                       double tol = Tolerances{}.geom);

struct CenterDensity {
  bool passed = false;
  double max_gap = 0;      // in z units over [−Z, Z]
  double range = 0;        // Z: half-width of the interior central range
  std::size_t values = 0;  // distinct commutator values in range
  std::size_t pairs = 0;
};

/// z-values ω(v, u) of commutators over interior pairs of distinct v's whose
/// commutator lies in the interior; passes when consecutive values (and the
/// range ends) are at most 2R apart. Throws DegenerateForm when every pair
/// commutes.
CenterDensity check_center_density(const HeisPointSet& ps, double R, std::size_t pair_budget = 20'000'000,
                                   double tol = Tolerances{}.geom);

struct HeisDensity {
  bool passed = false;
  double R_witness = 0;
  double thickening = 0;  // max over interior points of dist(v, L)
  double covering = 0;    // max over targets of the distance to the nearest point
  std::size_t targets = 0;
};

/// Relative density around H' = {(v, z) : v ∈ L} in the gauge distance on
/// the window interior. Targets are a grid on H' (spacing coarsened to fit).
HeisDensity check_density_around_subgroup(const HeisPointSet& ps, const Subspace& L, double R,
                                          double spacing = 0.5, std::size_t max_targets = 200'000);

struct ProjectionDiscreteness {
  bool passed = false;
  double gap = 0;       // π_V at the window
  double gap_half = 0;  // π_V of the half-radius window
};

ProjectionDiscreteness check_projection_discreteness(const HeisPointSet& ps,
                                                     double threshold = Tolerances{}.geom, double trend = 0.9);

enum class HeisCase { Central, Lagrangian, Symplectic };
std::string to_string(HeisCase c);

struct HeisAnalysisOptions {
  double r_min_fraction = 0.5;
  double cluster_tol = 0.05;
  double rank_tol = 0.1;
  double R = 0;  // <= 0: chosen from the data
  double tol = Tolerances{}.geom;
  AnalysisOptions flat{};
};

/// The dichotomy: fit L for π_V(Λ), then route to the central case (L = 0),
/// the Lagrangian case (ω vanishes on π_V(Λ)) or the symplectic case.
struct HeisAnalysis {
  HeisCase route = HeisCase::Central;
  Subspace L = Subspace::zero(2);
  double omega_max = 0;  // max |ω| over interior pairs of π_V(Λ)
  ProjectionDiscreteness projection;
  // Lagrangian case: L' containing π_V(Λ) and the abelian analysis of the
  // flattened set in L' × Z coordinates.
  std::optional<Subspace> L_prime;
  std::optional<Analysis> flat;
  // Symplectic and central cases.
  std::optional<CenterDensity> center;
  std::optional<HeisDensity> density;
  bool approximate_lattice = false;  // π_V dense in V plus dense commutators
  bool passed = false;
  std::vector<std::string> notes;
};

HeisAnalysis analyze_heis(const HeisPointSet& ps, const HeisAnalysisOptions& opt = {});

/// Points (L'-coordinates of v, z) in R^(k+1) with Euclidean window radius
/// min(W, W²/4); points whose flattened norm exceeds it are dropped.
PointSet flatten_lagrangian(const HeisPointSet& ps, const Subspace& L_prime);

// Generators. Windows are gauge balls.

/// {((mα + nβ, 0), m)} in H_3 with the determinant form.
HeisPointSet gen_heis_line(Window window, double alpha = std::sqrt(5.0), double beta = std::sqrt(3.0));
/// {((m, n), mα + j/2)} in H_3 with the determinant form.
HeisPointSet gen_heis_coset_lattice(Window window, double alpha = std::sqrt(5.0));
/// {((0, 0), k spacing)}.
HeisPointSet gen_heis_central(Window window, int n = 1, double spacing = 1.0);

// I/O: the point format with dim = 2n + 1, plus a `form=` line carrying the
// 2n x 2n matrix row-major right after the header.
void write_heis_points(std::ostream& out, const HeisPointSet& ps);
HeisPointSet read_heis_points(std::istream& in);

}  // namespace apx
