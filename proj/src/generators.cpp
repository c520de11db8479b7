#include "apx/generators.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace apx {

namespace {

constexpr double kMaxEnumeration = 2e8;

// Calls visit(x) for every lattice point with ||x|| <= radius.
template <class Visit>
void enumerate_ball(const Matrix& B, double radius, Visit&& visit) {
  const int d = static_cast<int>(B.rows());
  const Matrix dual = B.inverse();  // rows are the dual basis
  std::vector<std::int64_t> lo(d), hi(d), c(d);
  double total = 1;
  for (int i = 0; i < d; ++i) {
    const double bound = dual.row(i).norm() * radius;
    hi[i] = static_cast<std::int64_t>(std::floor(bound + 1e-9));
    lo[i] = -hi[i];
    total *= static_cast<double>(hi[i] - lo[i] + 1);
  }
  if (total > kMaxEnumeration) throw std::invalid_argument("lattice enumeration too large for this window");
  const double lim2 = std::pow(radius + 1e-9 * std::max(1.0, radius), 2);
  c = lo;
  Vector x(d);
  while (true) {
    x.setZero();
    for (int i = 0; i < d; ++i) x.noalias() += static_cast<double>(c[i]) * B.col(i);
    if (x.squaredNorm() <= lim2) visit(x);
    int i = d - 1;
    while (i >= 0 && c[i] == hi[i]) {
      c[i] = lo[i];
      --i;
    }
    if (i < 0) break;
    ++c[i];
  }
}

}  // namespace

LatticeSpec LatticeSpec::cubic(int dim, double spacing) {
  if (dim < 1) throw std::invalid_argument("lattice dimension must be positive");
  if (!(spacing > 0)) throw std::invalid_argument("lattice spacing must be positive");
  return {Matrix::Identity(dim, dim) * spacing};
}

void LatticeSpec::validate(double tol) const {
  if (basis.rows() < 1 || basis.rows() != basis.cols()) throw std::invalid_argument("lattice basis must be square");
  if (!basis.allFinite()) throw std::invalid_argument("lattice basis must be finite");
  if (!(std::abs(basis.determinant()) > tol)) throw std::invalid_argument("degenerate lattice basis");
}

void CutProjectSpec::validate() const {
  lattice.validate();
  if (physical.ambient_dim() != lattice.dim()) throw std::invalid_argument("physical subspace dimension mismatch");
  if (physical.rank() < 1 || physical.is_full())
    throw std::invalid_argument("physical subspace must be proper and nonzero");
  if (!(internal_window_radius > 0)) throw std::invalid_argument("internal window radius must be positive");
}

PointSet gen_lattice(const LatticeSpec& spec, Window window) {
  spec.validate();
  std::vector<double> flat;
  enumerate_ball(spec.basis, window.radius(), [&](const Vector& x) { flat.insert(flat.end(), x.data(), x.data() + x.size()); });
  return PointSet(spec.dim(), std::move(flat), window, "lattice");
}

PointSet gen_strip(const LatticeSpec& lattice, const Subspace& L, double width, Window window, double tol) {
  lattice.validate();
  if (L.ambient_dim() != lattice.dim()) throw std::invalid_argument("dimension mismatch");
  if (!(width >= 0) || !std::isfinite(width)) throw std::invalid_argument("strip width must be nonnegative");
  const Subspace perp = L.complement();
  std::vector<double> flat;
  enumerate_ball(lattice.basis, window.radius(), [&](const Vector& x) {
    const double dist = perp.rank() == 0 ? 0.0 : (perp.basis().transpose() * x).norm();
    if (dist <= width + tol) flat.insert(flat.end(), x.data(), x.data() + x.size());
  });
  return PointSet(lattice.dim(), std::move(flat), window, "strip");
}

PointSet gen_cut_project(const CutProjectSpec& spec, Window window) {
  spec.validate();
  const Subspace internal = spec.physical.complement();
  double r_int = spec.internal_window_radius;
  if (!std::isfinite(r_int)) {
    // ten times a bound on the lattice covering radius
    double cover = 0;
    for (int i = 0; i < spec.lattice.dim(); ++i) cover += 0.5 * spec.lattice.basis.col(i).norm();
    r_int = 10.0 * cover;
  }
  const int k = spec.physical.rank();
  const double slack_w = 1e-9 * std::max(1.0, window.radius());
  const double slack_i = 1e-9 * std::max(1.0, r_int);
  std::vector<double> flat;
  enumerate_ball(spec.lattice.basis, std::hypot(window.radius(), r_int), [&](const Vector& x) {
    if ((internal.basis().transpose() * x).norm() > r_int + slack_i) return;
    const Vector y = spec.physical.basis().transpose() * x;
    if (y.norm() > window.radius() + slack_w) return;
    flat.insert(flat.end(), y.data(), y.data() + k);
  });
  return PointSet(k, merge_near_duplicates(flat, k, 0.0), window, "cut-project");
}

PointSet gen_meyer_extension(const PointSet& ps, const Subspace& L, double R, Window window) {
  if (!(R > 0) || !std::isfinite(R)) throw std::invalid_argument("extension radius must be positive");
  if (L.ambient_dim() != ps.dim()) throw std::invalid_argument("dimension mismatch");
  if (L.is_full()) return ps.restrict(window);
  const Subspace perp = L.complement();
  std::vector<Vector> gammas;
  enumerate_ball(Matrix::Identity(perp.rank(), perp.rank()) * (4.0 * R),
                 window.radius() + ps.window().radius(),
                 [&](const Vector& c) { gammas.push_back(perp.basis() * c); });
  const double lim = window.radius() + 1e-9 * std::max(1.0, window.radius());
  std::vector<double> flat;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const Vector p = ps.point(i);
    for (const auto& g : gammas) {
      const Vector x = p + g;
      if (x.norm() <= lim) flat.insert(flat.end(), x.data(), x.data() + x.size());
    }
  }
  return PointSet(ps.dim(), std::move(flat), window, ps.label() + "+gamma");
}

PointSet gen_perturbed(const PointSet& ps, double amplitude, std::uint64_t seed) {
  if (!(amplitude >= 0) || !std::isfinite(amplitude)) throw std::invalid_argument("amplitude must be nonnegative");
  if (amplitude == 0) return ps;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int d = ps.dim();
  std::vector<double> flat(ps.coords().begin(), ps.coords().end());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    Vector dir(d);
    for (int a = 0; a < d; ++a) dir(a) = gauss(rng);
    const double n = dir.norm();
    if (n == 0) continue;
    const double r = amplitude * std::pow(unif(rng), 1.0 / d);
    for (int a = 0; a < d; ++a) flat[i * d + a] += dir(a) / n * r;
  }
  const Window w(ps.window().radius() + amplitude, ps.window().margin());
  return PointSet(d, merge_near_duplicates(flat, d, 0.0), w, ps.label() + "~perturbed");
}

}  // namespace apx
