#include "apx/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <unordered_set>

namespace apx {

namespace {

double slack(double r) { return 1e-9 * std::max(1.0, r); }

// SVD columns can be an ulp off unit length; one Gram-Schmidt pass makes
// axis-aligned bases exact, so distances to them are exactly zero.
void canonical_signs(Matrix& basis) {
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    for (Eigen::Index k = 0; k < j; ++k) basis.col(j) -= basis.col(k).dot(basis.col(j)) * basis.col(k);
    basis.col(j).normalize();
  }
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    for (Eigen::Index i = 0; i < basis.rows(); ++i) {
      if (std::abs(basis(i, j)) > 1e-12) {
        if (basis(i, j) < 0) basis.col(j) *= -1.0;
        break;
      }
    }
  }
}

std::uint64_t mix(std::uint64_t h) {
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ULL;
  h ^= h >> 33;
  return h;
}

}  // namespace

bool lex_less(const double* a, const double* b, int dim) {
  for (int i = 0; i < dim; ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

// ---------------------------------------------------------------- Window

Window::Window(double radius, double margin) : radius_(radius), margin_(margin) {
  if (!std::isfinite(radius) || radius <= 0) throw std::invalid_argument("window radius must be positive");
  if (!std::isfinite(margin) || margin < 0) throw std::invalid_argument("window margin must be nonnegative");
  if (margin >= radius) throw std::invalid_argument("window margin must be smaller than the radius");
}

bool Window::contains_norm(double norm) const { return norm <= radius_ + slack(radius_); }

bool Window::interior_norm(double norm) const { return norm <= interior() + slack(radius_); }

// -------------------------------------------------------------- Subspace

Subspace Subspace::from_orthonormal(Matrix basis, double tol) {
  if (basis.rows() < 1) throw std::invalid_argument("subspace ambient dimension must be positive");
  if (basis.cols() > basis.rows()) throw std::invalid_argument("subspace rank exceeds ambient dimension");
  if (basis.cols() > 0) {
    const Matrix gram = basis.transpose() * basis;
    const double err = (gram - Matrix::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
    if (err > tol) throw std::invalid_argument("subspace basis is not orthonormal");
  }
  return Subspace(std::move(basis));
}

Subspace Subspace::full(int ambient_dim) {
  if (ambient_dim < 1) throw std::invalid_argument("subspace ambient dimension must be positive");
  return Subspace(Matrix::Identity(ambient_dim, ambient_dim));
}

Subspace Subspace::zero(int ambient_dim) {
  if (ambient_dim < 1) throw std::invalid_argument("subspace ambient dimension must be positive");
  return Subspace(Matrix(ambient_dim, 0));
}

Subspace Subspace::span(const std::vector<Vector>& generators, int ambient_dim, double rank_tol) {
  if (ambient_dim < 1) throw std::invalid_argument("subspace ambient dimension must be positive");
  if (generators.empty()) return zero(ambient_dim);
  Matrix g(ambient_dim, static_cast<Eigen::Index>(generators.size()));
  for (std::size_t j = 0; j < generators.size(); ++j) {
    if (generators[j].size() != ambient_dim) throw std::invalid_argument("generator dimension mismatch");
    g.col(static_cast<Eigen::Index>(j)) = generators[j];
  }
  Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) <= 0) return zero(ambient_dim);
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rank_tol * s(0)) ++rank;
  if (rank == ambient_dim) return full(ambient_dim);
  Matrix basis = svd.matrixU().leftCols(rank);
  canonical_signs(basis);
  return Subspace(std::move(basis));
}

Subspace Subspace::complement() const {
  const int d = ambient_dim();
  const int k = rank();
  if (k == 0) return full(d);
  if (k == d) return zero(d);
  Eigen::JacobiSVD<Matrix> svd(basis_, Eigen::ComputeFullU);
  Matrix c = svd.matrixU().rightCols(d - k);
  canonical_signs(c);
  return Subspace(std::move(c));
}

Vector Subspace::project(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != ambient_dim()) throw std::invalid_argument("dimension mismatch");
  if (rank() == 0) return Vector::Zero(ambient_dim());
  return basis_ * (basis_.transpose() * x);
}

Vector Subspace::coordinates(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != ambient_dim()) throw std::invalid_argument("dimension mismatch");
  return basis_.transpose() * x;
}

Vector Subspace::embed(const Eigen::Ref<const Vector>& coords) const {
  if (coords.size() != rank()) throw std::invalid_argument("coordinate rank mismatch");
  if (rank() == 0) return Vector::Zero(ambient_dim());
  return basis_ * coords;
}

double Subspace::distance(const Eigen::Ref<const Vector>& x) const { return (x - project(x)).norm(); }

double principal_angle(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim() || a.rank() != b.rank())
    throw std::invalid_argument("principal angle needs subspaces of equal rank");
  if (a.rank() == 0) return 0.0;
  // sin of the largest angle is the norm of b's basis with a's part removed;
  // asin stays accurate near zero where acos of the cosine does not.
  const Matrix resid = b.basis() - a.basis() * (a.basis().transpose() * b.basis());
  Eigen::JacobiSVD<Matrix> svd(resid);
  const double smax = svd.singularValues().maxCoeff();
  if (smax <= std::sqrt(0.5)) return std::asin(smax);
  const Matrix m = a.basis().transpose() * b.basis();
  Eigen::JacobiSVD<Matrix> svd2(m);
  return std::acos(std::clamp(svd2.singularValues().minCoeff(), -1.0, 1.0));
}

// -------------------------------------------------------------- PointSet

PointSet::PointSet(int dim, std::vector<double> coords, Window window, std::string label)
    : dim_(dim), window_(window), label_(std::move(label)) {
  if (dim < 1) throw std::invalid_argument("point dimension must be positive");
  if (coords.size() % static_cast<std::size_t>(dim) != 0)
    throw std::invalid_argument("coordinate count is not a multiple of the dimension");
  const std::size_t n = coords.size() / static_cast<std::size_t>(dim);
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = coords.data() + i * dim;
    double s = 0;
    for (int a = 0; a < dim; ++a) {
      if (!std::isfinite(p[a])) throw std::invalid_argument("non-finite coordinate");
      s += p[a] * p[a];
    }
    if (!window_.contains_norm(std::sqrt(s))) throw std::invalid_argument("point outside window");
  }
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  const double* base = coords.data();
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return lex_less(base + a * dim, base + b * dim, dim);
  });
  std::vector<double> sorted(coords.size());
  for (std::size_t i = 0; i < n; ++i)
    std::copy_n(base + order[i] * dim, dim, sorted.data() + i * dim);
  for (std::size_t i = 1; i < n; ++i) {
    if (std::equal(sorted.data() + (i - 1) * dim, sorted.data() + i * dim, sorted.data() + i * dim))
      throw std::invalid_argument("duplicate point");
  }
  coords_ = std::make_shared<const std::vector<double>>(std::move(sorted));
  index_ = std::make_shared<const NeighborIndex>(dim_, coords_);
}

PointSet PointSet::from_points(const std::vector<Vector>& points, Window window, std::string label) {
  if (points.empty()) throw std::invalid_argument("cannot infer dimension of an empty point list");
  const int dim = static_cast<int>(points.front().size());
  std::vector<double> flat;
  flat.reserve(points.size() * dim);
  for (const auto& p : points) {
    if (p.size() != dim) throw std::invalid_argument("dimension mismatch");
    flat.insert(flat.end(), p.data(), p.data() + dim);
  }
  return PointSet(dim, std::move(flat), window, std::move(label));
}

std::vector<Vector> PointSet::points() const {
  std::vector<Vector> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.emplace_back(point(i));
  return out;
}

PointSet PointSet::with_label(std::string label) const {
  PointSet copy = *this;
  copy.label_ = std::move(label);
  return copy;
}

PointSet PointSet::filter(const std::function<bool(const PointRef&)>& keep, Window window) const {
  std::vector<double> flat;
  for (std::size_t i = 0; i < size(); ++i) {
    const PointRef p = point(i);
    if (keep(p)) flat.insert(flat.end(), p.data(), p.data() + dim_);
  }
  return PointSet(dim_, std::move(flat), window, label_);
}

PointSet PointSet::restrict(Window window) const {
  return filter([&](const PointRef& p) { return window.contains_norm(p.norm()); }, window);
}

PointSet PointSet::scaled(double c) const {
  if (!(c > 0)) throw std::invalid_argument("scale factor must be positive");
  std::vector<double> flat(coords_->begin(), coords_->end());
  for (double& x : flat) x *= c;
  return PointSet(dim_, std::move(flat), window_.scaled(c), label_);
}

PointSet PointSet::translated(const Vector& shift, Window window) const {
  if (shift.size() != dim_) throw std::invalid_argument("dimension mismatch");
  std::vector<double> flat;
  for (std::size_t i = 0; i < size(); ++i) {
    const Vector p = point(i) + shift;
    if (window.contains_norm(p.norm())) flat.insert(flat.end(), p.data(), p.data() + dim_);
  }
  return PointSet(dim_, std::move(flat), window, label_);
}

// --------------------------------------------------------- NeighborIndex

std::size_t NeighborIndex::KeyHash::operator()(const Key& k) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (std::int32_t c : k.c) h = mix(h ^ static_cast<std::uint32_t>(c)) + 0x9e3779b97f4a7c15ULL;
  return static_cast<std::size_t>(h);
}

NeighborIndex::NeighborIndex(int dim, std::shared_ptr<const std::vector<double>> coords)
    : dim_(dim), n_(coords->size() / static_cast<std::size_t>(dim)), coords_(std::move(coords)) {
  if (n_ < kExhaustiveBelow || dim_ > kMaxGridDim) return;
  const double* data = coords_->data();
  Vector lo = Vector::Constant(dim_, std::numeric_limits<double>::infinity());
  Vector hi = -lo;
  for (std::size_t i = 0; i < n_; ++i)
    for (int a = 0; a < dim_; ++a) {
      lo(a) = std::min(lo(a), data[i * dim_ + a]);
      hi(a) = std::max(hi(a), data[i * dim_ + a]);
    }
  const Vector extent = hi - lo;
  const double emax = extent.maxCoeff();
  if (!(emax > 0)) return;
  double log_vol = 0;
  int deff = 0;
  for (int a = 0; a < dim_; ++a) {
    if (extent(a) > 1e-9 * emax) {
      log_vol += std::log(extent(a));
      ++deff;
    }
  }
  // Mean spacing of a Delone-like set: (volume / count)^(1/d_eff).
  cell_ = std::exp((log_vol - std::log(static_cast<double>(n_))) / deff);
  cell_ = std::max(cell_, emax * 1e-6);
  const double reach = std::max(lo.cwiseAbs().maxCoeff(), hi.cwiseAbs().maxCoeff());
  if (reach / cell_ > 1e9) return;
  grid_ = true;

  std::vector<Key> keys(n_);
  for (std::size_t i = 0; i < n_; ++i) keys[i] = key_of(data + i * dim_);
  lo_ = keys[0];
  hi_ = keys[0];
  for (const Key& k : keys)
    for (int a = 0; a < dim_; ++a) {
      lo_.c[a] = std::min(lo_.c[a], k.c[a]);
      hi_.c[a] = std::max(hi_.c[a], k.c[a]);
    }
  order_.resize(n_);
  std::iota(order_.begin(), order_.end(), 0u);
  std::sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (keys[a].c != keys[b].c) return keys[a].c < keys[b].c;
    return a < b;
  });
  cells_.reserve(n_);
  std::uint32_t start = 0;
  for (std::uint32_t i = 1; i <= n_; ++i) {
    if (i == n_ || !(keys[order_[i]] == keys[order_[start]])) {
      cells_.emplace(keys[order_[start]], std::make_pair(start, i));
      start = i;
    }
  }
}

NeighborIndex::Key NeighborIndex::key_of(const double* p) const {
  Key k;
  for (int a = 0; a < dim_; ++a) {
    const double c = std::floor(p[a] / cell_);
    k.c[a] = static_cast<std::int32_t>(std::clamp(c, -2.0e9, 2.0e9));
  }
  return k;
}

double NeighborIndex::dist2(std::size_t i, const double* q) const {
  const double* p = coords_->data() + i * dim_;
  double s = 0;
  for (int a = 0; a < dim_; ++a) {
    const double t = p[a] - q[a];
    s += t * t;
  }
  return s;
}

template <class Visit>
void NeighborIndex::visit_ring(const Key& center, int r, Visit&& visit) const {
  Key cur = center;
  auto rec = [&](auto&& self, int axis, bool boundary) -> void {
    if (axis == dim_) {
      if (boundary || r == 0) {
        auto it = cells_.find(cur);
        if (it != cells_.end()) visit(it->second);
      }
      return;
    }
    const std::int64_t c = center.c[axis];
    const std::int64_t from = std::max<std::int64_t>(c - r, lo_.c[axis]);
    const std::int64_t to = std::min<std::int64_t>(c + r, hi_.c[axis]);
    if (from > to) return;
    if (axis == dim_ - 1 && !boundary && r > 0) {
      for (std::int64_t v : {c - r, c + r}) {
        if (v < from || v > to) continue;
        cur.c[axis] = static_cast<std::int32_t>(v);
        self(self, axis + 1, true);
      }
      return;
    }
    for (std::int64_t v = from; v <= to; ++v) {
      cur.c[axis] = static_cast<std::int32_t>(v);
      self(self, axis + 1, boundary || v == c - r || v == c + r);
    }
  };
  rec(rec, 0, false);
}

template <class Visit>
void NeighborIndex::visit_cube(const Key& center, int r, Visit&& visit) const {
  Key cur = center;
  auto rec = [&](auto&& self, int axis) -> void {
    if (axis == dim_) {
      auto it = cells_.find(cur);
      if (it != cells_.end()) visit(it->second);
      return;
    }
    const std::int64_t c = center.c[axis];
    const std::int64_t from = std::max<std::int64_t>(c - r, lo_.c[axis]);
    const std::int64_t to = std::min<std::int64_t>(c + r, hi_.c[axis]);
    for (std::int64_t v = from; v <= to; ++v) {
      cur.c[axis] = static_cast<std::int32_t>(v);
      self(self, axis + 1);
    }
  };
  rec(rec, 0);
}

std::vector<Neighbor> NeighborIndex::brute_k(const double* q, std::size_t k, double max_dist) const {
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry> heap;
  const double lim = max_dist * max_dist;
  for (std::size_t i = 0; i < n_; ++i) {
    const double d2 = dist2(i, q);
    if (d2 > lim) continue;
    const Entry e{d2, i};
    if (heap.size() < k) {
      heap.push(e);
    } else if (e < heap.top()) {
      heap.pop();
      heap.push(e);
    }
  }
  std::vector<Neighbor> out(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = {heap.top().second, std::sqrt(heap.top().first)};
    heap.pop();
  }
  return out;
}

std::vector<Neighbor> NeighborIndex::k_nearest(const Eigen::Ref<const Vector>& q, std::size_t k,
                                               double max_dist) const {
  if (q.size() != dim_) throw std::invalid_argument("dimension mismatch");
  if (k == 0 || n_ == 0) return {};
  const double* qd = q.data();
  if (!grid_) return brute_k(qd, k, max_dist);

  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry> heap;
  const double lim = max_dist * max_dist;
  const Key center = key_of(qd);
  int rmax = 0;
  for (int a = 0; a < dim_; ++a)
    rmax = std::max({rmax, std::abs(center.c[a] - lo_.c[a]), std::abs(center.c[a] - hi_.c[a])});
  std::size_t touched = 0;
  for (int r = 0; r <= rmax; ++r) {
    visit_ring(center, r, [&](const std::pair<std::uint32_t, std::uint32_t>& range) {
      for (std::uint32_t j = range.first; j < range.second; ++j) {
        const std::size_t i = order_[j];
        const double d2 = dist2(i, qd);
        ++touched;
        if (d2 > lim) continue;
        const Entry e{d2, i};
        if (heap.size() < k) {
          heap.push(e);
        } else if (e < heap.top()) {
          heap.pop();
          heap.push(e);
        }
      }
    });
    const double bound = r * cell_;
    if (heap.size() == k && heap.top().first <= bound * bound) break;
    if (bound > max_dist) break;
    if (touched > n_ / 2 || std::pow(2.0 * r + 3.0, dim_) > 4.0 * static_cast<double>(n_))
      return brute_k(qd, k, max_dist);
  }
  std::vector<Neighbor> out(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = {heap.top().second, std::sqrt(heap.top().first)};
    heap.pop();
  }
  return out;
}

Neighbor NeighborIndex::nearest(const Eigen::Ref<const Vector>& q) const {
  if (n_ == 0) throw std::invalid_argument("empty set");
  return k_nearest(q, 1).front();
}

std::vector<std::size_t> NeighborIndex::within(const Eigen::Ref<const Vector>& q, double r) const {
  if (q.size() != dim_) throw std::invalid_argument("dimension mismatch");
  std::vector<std::size_t> out;
  if (n_ == 0 || r < 0) return out;
  const double* qd = q.data();
  const double lim = r * r;
  const double cells_needed = std::pow(2.0 * std::ceil(r / cell_) + 1.0, dim_);
  if (!grid_ || cells_needed > static_cast<double>(n_)) {
    for (std::size_t i = 0; i < n_; ++i)
      if (dist2(i, qd) <= lim) out.push_back(i);
    return out;
  }
  const Key center = key_of(qd);
  visit_cube(center, static_cast<int>(std::ceil(r / cell_)),
             [&](const std::pair<std::uint32_t, std::uint32_t>& range) {
               for (std::uint32_t j = range.first; j < range.second; ++j) {
                 const std::size_t i = order_[j];
                 if (dist2(i, qd) <= lim) out.push_back(i);
               }
             });
  std::sort(out.begin(), out.end());
  return out;
}

bool NeighborIndex::any_within(const Eigen::Ref<const Vector>& q, double r) const {
  return !k_nearest(q, 1, r).empty();
}

// ------------------------------------------------------------ operations

NearestResult nearest_neighbor(const PointSet& ps, const Eigen::Ref<const Vector>& q) {
  if (ps.empty()) throw std::invalid_argument("empty set");
  if (q.size() != ps.dim()) throw std::invalid_argument("dimension mismatch");
  const Neighbor nb = ps.index().nearest(q);
  return {Vector(ps.point(nb.index)), nb.distance};
}

double min_pairwise_gap(const PointSet& ps) {
  if (ps.size() < 2) throw std::invalid_argument("min_pairwise_gap needs at least two points");
  double best = std::numeric_limits<double>::infinity();
  if (ps.dim() == 1) {
    // canonical order is sorted on the line
    for (std::size_t i = 1; i < ps.size(); ++i) best = std::min(best, ps.point(i)(0) - ps.point(i - 1)(0));
    return best;
  }
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto nbrs = ps.index().k_nearest(ps.point(i), 2);
    for (const auto& nb : nbrs)
      if (nb.index != i) best = std::min(best, nb.distance);
  }
  return best;
}

std::vector<double> merge_near_duplicates(std::span<const double> coords, int dim, double tol) {
  if (dim < 1) throw std::invalid_argument("dimension must be positive");
  const std::size_t n = coords.size() / static_cast<std::size_t>(dim);

  // Collapse exact duplicates first; projections of large sets are mostly exact repeats.
  struct RowHash {
    const double* base;
    int dim;
    std::size_t operator()(std::uint32_t i) const noexcept {
      std::uint64_t h = 0x51ed27;
      for (int a = 0; a < dim; ++a) {
        double v = base[i * dim + a];
        if (v == 0.0) v = 0.0;  // fold -0
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        h = mix(h ^ bits) + 0x9e3779b97f4a7c15ULL;
      }
      return static_cast<std::size_t>(h);
    }
  };
  struct RowEq {
    const double* base;
    int dim;
    bool operator()(std::uint32_t a, std::uint32_t b) const noexcept {
      for (int k = 0; k < dim; ++k)
        if (base[a * dim + k] != base[b * dim + k]) return false;
      return true;
    }
  };
  std::unordered_set<std::uint32_t, RowHash, RowEq> unique(n / 4 + 16, RowHash{coords.data(), dim},
                                                           RowEq{coords.data(), dim});
  for (std::uint32_t i = 0; i < n; ++i) unique.insert(i);
  std::vector<std::uint32_t> order(unique.begin(), unique.end());
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return lex_less(coords.data() + a * dim, coords.data() + b * dim, dim);
  });

  std::vector<double> out;
  if (!(tol > 0)) {
    out.reserve(order.size() * dim);
    for (std::uint32_t i : order) out.insert(out.end(), coords.data() + i * dim, coords.data() + (i + 1) * dim);
    return out;
  }

  using QKey = std::array<std::int64_t, NeighborIndex::kMaxGridDim>;
  struct QHash {
    std::size_t operator()(const QKey& k) const noexcept {
      std::uint64_t h = 0x2545f491;
      for (std::int64_t c : k) h = mix(h ^ static_cast<std::uint64_t>(c)) + 0x9e3779b97f4a7c15ULL;
      return static_cast<std::size_t>(h);
    }
  };
  const bool gridded = dim <= NeighborIndex::kMaxGridDim;
  std::unordered_map<QKey, std::vector<std::uint32_t>, QHash> kept_cells;
  std::vector<std::uint32_t> kept;
  const double tol2 = tol * tol;
  auto close = [&](std::uint32_t a, std::uint32_t b) {
    double s = 0;
    for (int k = 0; k < dim; ++k) {
      const double t = coords[a * dim + k] - coords[b * dim + k];
      s += t * t;
    }
    return s <= tol2;
  };
  for (std::uint32_t i : order) {
    bool dup = false;
    if (gridded) {
      QKey key{};
      for (int a = 0; a < dim; ++a) key[a] = static_cast<std::int64_t>(std::floor(coords[i * dim + a] / tol));
      QKey probe = key;
      auto rec = [&](auto&& self, int axis) -> void {
        if (dup) return;
        if (axis == dim) {
          auto it = kept_cells.find(probe);
          if (it == kept_cells.end()) return;
          for (std::uint32_t j : it->second)
            if (close(i, j)) {
              dup = true;
              return;
            }
          return;
        }
        for (std::int64_t o = -1; o <= 1; ++o) {
          probe[axis] = key[axis] + o;
          self(self, axis + 1);
        }
        probe[axis] = key[axis];
      };
      rec(rec, 0);
      if (!dup) kept_cells[key].push_back(i);
    } else {
      for (std::uint32_t j : kept)
        if (close(i, j)) {
          dup = true;
          break;
        }
    }
    if (!dup) {
      kept.push_back(i);
      out.insert(out.end(), coords.data() + i * dim, coords.data() + (i + 1) * dim);
    }
  }
  return out;
}

PointSet project(const PointSet& ps, const Subspace& L, double tol) {
  if (L.ambient_dim() != ps.dim()) throw std::invalid_argument("dimension mismatch");
  const int d = ps.dim();
  std::vector<double> flat(ps.size() * d);
  const Matrix P = L.rank() == 0 ? Matrix::Zero(d, d) : Matrix(L.basis() * L.basis().transpose());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    Eigen::Map<Vector>(flat.data() + i * d, d) = P * ps.point(i);
  }
  return PointSet(d, merge_near_duplicates(flat, d, tol), ps.window(), ps.label());
}

PointSet to_subspace_coordinates(const PointSet& ps, const Subspace& L, double tol) {
  if (L.ambient_dim() != ps.dim()) throw std::invalid_argument("dimension mismatch");
  const int k = L.rank();
  if (k == 0) throw std::invalid_argument("cannot express a set in coordinates of the zero subspace");
  std::vector<double> flat(ps.size() * k);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    Eigen::Map<Vector>(flat.data() + i * k, k) = L.basis().transpose() * ps.point(i);
  }
  return PointSet(k, merge_near_duplicates(flat, k, tol), ps.window(), ps.label());
}

double covering_radius(const PointSet& ps, const std::vector<Vector>& targets) {
  if (ps.empty() || targets.empty()) throw std::invalid_argument("empty set");
  double worst = 0;
  for (const auto& t : targets) {
    if (t.size() != ps.dim()) throw std::invalid_argument("dimension mismatch");
    if (!ps.window().interior_norm(t.norm())) throw std::invalid_argument("target outside window interior");
    worst = std::max(worst, ps.index().nearest(t).distance);
  }
  return worst;
}

std::vector<Vector> grid_in_ball(int dim, double radius, double spacing) {
  if (dim < 0) throw std::invalid_argument("dimension must be nonnegative");
  if (!(spacing > 0) || !(radius >= 0)) throw std::invalid_argument("grid spacing must be positive");
  if (dim == 0) return {Vector(0)};
  const auto n = static_cast<std::int64_t>(std::floor(radius / spacing + 1e-9));
  const double total = std::pow(2.0 * n + 1.0, dim);
  if (total > 5e7) throw std::invalid_argument("grid too large; increase the spacing");
  std::vector<Vector> out;
  std::vector<std::int64_t> idx(dim, -n);
  const double lim = radius + slack(radius);
  while (true) {
    Vector v(dim);
    for (int a = 0; a < dim; ++a) v(a) = static_cast<double>(idx[a]) * spacing;
    if (v.norm() <= lim) out.push_back(std::move(v));
    int a = dim - 1;
    while (a >= 0 && idx[a] == n) idx[a--] = -n;
    if (a < 0) break;
    ++idx[a];
  }
  return out;
}

std::vector<Vector> grid_on_subspace(const Subspace& L, double radius, double spacing) {
  std::vector<Vector> out;
  for (const auto& c : grid_in_ball(L.rank(), radius, spacing)) out.push_back(L.embed(c));
  return out;
}

}  // namespace apx
