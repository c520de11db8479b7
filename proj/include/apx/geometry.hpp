#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace apx {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using PointRef = Eigen::Map<const Eigen::VectorXd>;

/// Absolute tolerances. `exact` is used for algebraic identities, `geom` for
/// fitted or merged quantities.
struct Tolerances {
  double exact = 1e-9;
  double geom = 1e-6;
};

/// Finite truncation of an infinite set: points live in the closed ball of
/// `radius`; universal claims are only made on the interior ball of radius
/// `radius - margin`.
class Window {
 public:
  Window(double radius, double margin = 0.0);

  double radius() const { return radius_; }
  double margin() const { return margin_; }
  double interior() const { return radius_ - margin_; }

  bool contains_norm(double norm) const;
  bool interior_norm(double norm) const;

  Window scaled(double c) const { return Window(radius_ * c, margin_ * c); }

 private:
  double radius_;
  double margin_;
};

/// Linear subspace of R^d with an orthonormal basis stored as matrix columns.
class Subspace {
 public:
  /// Validates orthonormality of the columns within `tol`.
  static Subspace from_orthonormal(Matrix basis, double tol = 1e-9);
  /// Span of arbitrary generators; rank decided by singular values relative
  /// to the largest one.
  static Subspace span(const std::vector<Vector>& generators, int ambient_dim,
                       double rank_tol = 1e-9);
  static Subspace full(int ambient_dim);
  static Subspace zero(int ambient_dim);

  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  int rank() const { return static_cast<int>(basis_.cols()); }
  bool is_full() const { return rank() == ambient_dim(); }
  const Matrix& basis() const { return basis_; }

  Subspace complement() const;

  Vector project(const Eigen::Ref<const Vector>& x) const;
  Vector coordinates(const Eigen::Ref<const Vector>& x) const;
  Vector embed(const Eigen::Ref<const Vector>& coords) const;
  double distance(const Eigen::Ref<const Vector>& x) const;

 private:
  explicit Subspace(Matrix basis) : basis_(std::move(basis)) {}
  Matrix basis_;
};

/// Largest principal angle between two subspaces of equal rank (radians).
double principal_angle(const Subspace& a, const Subspace& b);

class NeighborIndex;

/// Windowed finite sample of a subset of R^d. Points are stored contiguously
/// in canonical lexicographic order; copies share storage.
class PointSet {
 public:
  PointSet(int dim, std::vector<double> coords, Window window, std::string label = {});

  static PointSet from_points(const std::vector<Vector>& points, Window window,
                              std::string label = {});

  int dim() const { return dim_; }
  std::size_t size() const { return coords_->size() / static_cast<std::size_t>(dim_); }
  bool empty() const { return coords_->empty(); }
  PointRef point(std::size_t i) const {
    return PointRef(coords_->data() + i * static_cast<std::size_t>(dim_), dim_);
  }
  std::span<const double> coords() const { return *coords_; }
  std::vector<Vector> points() const;
  const Window& window() const { return window_; }
  const std::string& label() const { return label_; }
  const NeighborIndex& index() const { return *index_; }

  PointSet with_label(std::string label) const;
  /// Points satisfying `keep`, with a new window.
  PointSet filter(const std::function<bool(const PointRef&)>& keep, Window window) const;
  /// Restriction to a smaller window (points outside are dropped).
  PointSet restrict(Window window) const;
  PointSet scaled(double c) const;
  PointSet translated(const Vector& shift, Window window) const;

 private:
  int dim_;
  std::shared_ptr<const std::vector<double>> coords_;
  Window window_;
  std::string label_;
  std::shared_ptr<const NeighborIndex> index_;
};

struct Neighbor {
  std::size_t index;
  double distance;
};

/// Grid-bucket spatial hash over a point set. Falls back to exhaustive scans
/// for small sets and for queries whose cell footprint exceeds the set size.
class NeighborIndex {
 public:
  static constexpr std::size_t kExhaustiveBelow = 1000;
  static constexpr int kMaxGridDim = 8;

  NeighborIndex(int dim, std::shared_ptr<const std::vector<double>> coords);

  std::size_t size() const { return n_; }
  double cell_size() const { return cell_; }
  bool uses_grid() const { return grid_; }

  /// Nearest point; ties resolve to the lower index (lexicographically smaller
  /// point, given canonical order). Requires a nonempty set.
  Neighbor nearest(const Eigen::Ref<const Vector>& q) const;
  /// Up to `k` nearest points with distance <= max_dist, sorted by (distance, index).
  std::vector<Neighbor> k_nearest(const Eigen::Ref<const Vector>& q, std::size_t k,
                                  double max_dist = std::numeric_limits<double>::infinity()) const;
  /// All points with distance <= r, sorted by index.
  std::vector<std::size_t> within(const Eigen::Ref<const Vector>& q, double r) const;
  bool any_within(const Eigen::Ref<const Vector>& q, double r) const;

 private:
  struct Key {
    std::array<std::int32_t, kMaxGridDim> c{};
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };

  Key key_of(const double* p) const;
  double dist2(std::size_t i, const double* q) const;
  template <class Visit>
  void visit_ring(const Key& center, int r, Visit&& visit) const;
  template <class Visit>
  void visit_cube(const Key& center, int r, Visit&& visit) const;
  std::vector<Neighbor> brute_k(const double* q, std::size_t k, double max_dist) const;

  int dim_;
  std::size_t n_;
  std::shared_ptr<const std::vector<double>> coords_;
  bool grid_ = false;
  double cell_ = 1.0;
  Key lo_{}, hi_{};
  std::vector<std::uint32_t> order_;
  std::unordered_map<Key, std::pair<std::uint32_t, std::uint32_t>, KeyHash> cells_;
};

struct NearestResult {
  Vector point;
  double distance;
};

NearestResult nearest_neighbor(const PointSet& ps, const Eigen::Ref<const Vector>& q);

/// Minimum distance over distinct pairs. Requires at least two points.
double min_pairwise_gap(const PointSet& ps);

/// Orthogonal projection onto L in ambient coordinates, near-duplicates merged
/// at `tol` with the lexicographically smallest representative kept.
PointSet project(const PointSet& ps, const Subspace& L, double tol = Tolerances{}.geom);

/// Projection onto L expressed in the coordinates of L's basis (rank-k set).
PointSet to_subspace_coordinates(const PointSet& ps, const Subspace& L,
                                 double tol = Tolerances{}.geom);

/// Max over targets of the distance to the nearest point of ps.
double covering_radius(const PointSet& ps, const std::vector<Vector>& targets);

/// Cubic grid of spacing `spacing` restricted to the ball of radius `radius`.
std::vector<Vector> grid_in_ball(int dim, double radius, double spacing);
/// Grid on L (in L's basis) restricted to the ball of radius `radius`.
std::vector<Vector> grid_on_subspace(const Subspace& L, double radius, double spacing);

/// Rows of a flat row-major array merged at `tol`; result lexicographic.
std::vector<double> merge_near_duplicates(std::span<const double> coords, int dim, double tol);

/// Lexicographic ordering on flat points.
bool lex_less(const double* a, const double* b, int dim);

}  // namespace apx
