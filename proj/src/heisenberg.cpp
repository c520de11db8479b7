#include "apx/heisenberg.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "apx/errors.hpp"
#include "apx/pointset_io.hpp"
#include "apx/schreiber.hpp"
#include "dedup.hpp"
#include "greedy_cover.hpp"

namespace apx {

// ------------------------------------------------------------------- form

SymplecticForm SymplecticForm::standard(int n) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  Matrix J = Matrix::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    J(i, n + i) = 1;
    J(n + i, i) = -1;
  }
  return SymplecticForm(std::move(J));
}

SymplecticForm SymplecticForm::from_matrix(Matrix J, double tol) {
  if (J.rows() != J.cols() || J.rows() < 2 || J.rows() % 2 != 0)
    throw std::invalid_argument("symplectic form needs a square matrix of even size");
  if (!J.allFinite()) throw std::invalid_argument("symplectic form has non-finite entries");
  if ((J + J.transpose()).cwiseAbs().maxCoeff() > Tolerances{}.exact)
    throw std::invalid_argument("symplectic form is not antisymmetric");
  if (!(std::abs(J.determinant()) > tol)) throw std::invalid_argument("symplectic form is degenerate");
  return SymplecticForm(std::move(J));
}

double SymplecticForm::operator()(const Eigen::Ref<const Vector>& v, const Eigen::Ref<const Vector>& u) const {
  const Eigen::Index d = J_.rows();
  if (v.size() != d || u.size() != d) throw std::invalid_argument("dimension mismatch");
  if (d == 2) return J_(0, 1) * v(0) * u(1) + J_(1, 0) * v(1) * u(0);
  double s = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (v(i) == 0) continue;
    double row = 0;
    for (Eigen::Index j = 0; j < d; ++j) row += J_(i, j) * u(j);
    s += v(i) * row;
  }
  return s;
}

double SymplecticForm::restriction_norm(const Matrix& Q) const {
  if (Q.rows() != J_.rows()) throw std::invalid_argument("dimension mismatch");
  if (Q.cols() == 0) return 0;
  return (Q.transpose() * J_ * Q).cwiseAbs().maxCoeff();
}

// ------------------------------------------------------------------ group

Vector HeisPoint::flat() const {
  Vector x(v.size() + 1);
  x.head(v.size()) = v;
  x(v.size()) = z;
  return x;
}

HeisPoint HeisPoint::from_flat(const Eigen::Ref<const Vector>& x) {
  if (x.size() < 3 || x.size() % 2 == 0) throw std::invalid_argument("a Heisenberg point has 2n + 1 coordinates");
  return {x.head(x.size() - 1), x(x.size() - 1)};
}

namespace {

void same_n(const HeisPoint& a, const HeisPoint& b, const SymplecticForm& form) {
  if (a.v.size() != form.matrix().rows() || b.v.size() != form.matrix().rows())
    throw std::invalid_argument("dimension mismatch");
}

double gauge_of(double v2, double z) { return std::sqrt(std::hypot(v2, 4.0 * z)); }

}  // namespace

HeisPoint heis_mul(const HeisPoint& a, const HeisPoint& b, const SymplecticForm& form) {
  same_n(a, b, form);
  return {a.v + b.v, a.z + b.z + 0.5 * form(a.v, b.v)};
}

HeisPoint heis_inverse(const HeisPoint& a) { return {-a.v, -a.z}; }

HeisPoint heis_commutator(const HeisPoint& a, const HeisPoint& b, const SymplecticForm& form) {
  same_n(a, b, form);
  const HeisPoint c = heis_mul(heis_mul(heis_mul(heis_inverse(a), heis_inverse(b), form), a, form), b, form);
  const double w = form(a.v, b.v);
  const double scale = std::max({1.0, std::abs(a.z) + std::abs(b.z), a.v.norm() * b.v.norm() *
                                                                          form.matrix().cwiseAbs().maxCoeff()});
  const double tol = Tolerances{}.exact * scale;
  if (c.v.cwiseAbs().maxCoeff() > tol || std::abs(c.z - w) > tol)
    throw std::logic_error("commutator differs from (0, ω(v_a, v_b))");
  return c;
}

double heis_gauge(const HeisPoint& a) { return gauge_of(a.v.squaredNorm(), a.z); }

double heis_dist(const HeisPoint& a, const HeisPoint& b, const SymplecticForm& form) {
  return heis_gauge(heis_mul(heis_inverse(a), b, form));
}

double heis_dist_right(const HeisPoint& a, const HeisPoint& b, const SymplecticForm& form) {
  return heis_gauge(heis_mul(a, heis_inverse(b), form));
}

// ------------------------------------------------------------- point set

HeisPointSet::HeisPointSet(SymplecticForm form, std::vector<double> flat, Window window, std::string label)
    : form_(std::move(form)), window_(window), label_(std::move(label)) {
  const int D = stride();
  if (flat.size() % static_cast<std::size_t>(D) != 0)
    throw std::invalid_argument("coordinate count is not a multiple of 2n + 1");
  const std::size_t n = flat.size() / static_cast<std::size_t>(D);
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = flat.data() + i * D;
    double v2 = 0;
    for (int a = 0; a < D; ++a)
      if (!std::isfinite(p[a])) throw std::invalid_argument("non-finite coordinate");
    for (int a = 0; a + 1 < D; ++a) v2 += p[a] * p[a];
    if (!window_.contains_norm(gauge_of(v2, p[D - 1]))) throw std::invalid_argument("point outside window");
  }
  const double* base = flat.data();
  bool sorted = true;
  for (std::size_t i = 1; i < n && sorted; ++i) sorted = lex_less(base + (i - 1) * D, base + i * D, D);
  if (!sorted) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return lex_less(base + a * D, base + b * D, D); });
    std::vector<double> out(flat.size());
    for (std::size_t i = 0; i < n; ++i) std::copy_n(base + order[i] * D, D, out.data() + i * D);
    flat.swap(out);
    for (std::size_t i = 1; i < n; ++i)
      if (std::equal(flat.data() + (i - 1) * D, flat.data() + i * D, flat.data() + i * D))
        throw std::invalid_argument("duplicate point");
  }
  coords_ = std::make_shared<const std::vector<double>>(std::move(flat));
  index_ = std::make_shared<const HeisIndex>(*this);
}

HeisPointSet HeisPointSet::from_points(SymplecticForm form, const std::vector<HeisPoint>& pts, Window window,
                                       std::string label) {
  const int D = 2 * form.n() + 1;
  std::vector<double> flat;
  flat.reserve(pts.size() * D);
  for (const auto& p : pts) {
    if (p.v.size() != D - 1) throw std::invalid_argument("dimension mismatch");
    flat.insert(flat.end(), p.v.data(), p.v.data() + D - 1);
    flat.push_back(p.z);
  }
  return HeisPointSet(std::move(form), std::move(flat), window, std::move(label));
}

HeisPoint HeisPointSet::point(std::size_t i) const { return {v(i), z(i)}; }

bool HeisPointSet::interior(std::size_t i) const {
  return window_.interior_norm(gauge_of(v(i).squaredNorm(), z(i)));
}

HeisPointSet HeisPointSet::restrict(Window window) const {
  const int D = stride();
  std::vector<double> flat;
  for (std::size_t i = 0; i < size(); ++i)
    if (window.contains_norm(gauge_of(v(i).squaredNorm(), z(i))))
      flat.insert(flat.end(), coords_->data() + i * D, coords_->data() + (i + 1) * D);
  return HeisPointSet(form_, std::move(flat), window, label_);
}

HeisPointSet HeisPointSet::with_label(std::string label) const {
  HeisPointSet out(*this);
  out.label_ = std::move(label);
  return out;
}

// ------------------------------------------------------------------ index

namespace {

std::vector<double> distinct_vs(std::span<const double> coords, int D) {
  const int d = D - 1;
  std::vector<double> out;
  const std::size_t n = coords.size() / static_cast<std::size_t>(D);
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = coords.data() + i * D;
    if (i > 0 && std::equal(p, p + d, p - D)) continue;
    out.insert(out.end(), p, p + d);
  }
  return out;
}

}  // namespace

HeisIndex::HeisIndex(const HeisPointSet& ps)
    : coords_(ps.coords_),
      stride_(ps.stride()),
      form_(ps.form()),
      vs_(ps.stride() - 1, distinct_vs(*ps.coords_, ps.stride()), ps.window()) {
  const int d = stride_ - 1;
  const std::size_t n = ps.size();
  begin_.reserve(vs_.size() + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = coords_->data() + i * stride_;
    if (i == 0 || !std::equal(p, p + d, p - stride_)) begin_.push_back(i);
  }
  begin_.push_back(n);
  if (begin_.size() != vs_.size() + 1) throw std::logic_error("group count mismatch");
  for (std::size_t g = 0; g < vs_.size(); ++g)
    if (!std::equal(vs_.point(g).data(), vs_.point(g).data() + d, coords_->data() + begin_[g] * stride_))
      throw std::logic_error("group order mismatch");
  reach_ = ps.window().radius();
}

void HeisIndex::scan_group(std::size_t g, const HeisPoint& x, double r, Side side,
                           std::vector<HeisNeighbor>& out) const {
  const auto u = vs_.point(g);
  const double a2 = (u - x.v).squaredNorm();
  if (a2 > r * r) return;
  const double w = 0.5 * form_(x.v, u);
  const double zt = side == Side::Left ? x.z + w : x.z - w;
  const double r2 = r * r;
  const double dz = std::sqrt(std::max(0.0, (r2 - a2) * (r2 + a2))) / 4.0;
  auto zat = [&](std::size_t i) { return (*coords_)[(i + 1) * stride_ - 1]; };
  std::size_t lo = begin_[g], hi = begin_[g + 1];
  const double zlo = zt - dz;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (zat(mid) < zlo) lo = mid + 1;
    else hi = mid;
  }
  for (std::size_t i = lo; i < begin_[g + 1]; ++i) {
    const double z = zat(i);
    if (z > zt + dz) break;
    const double dist = gauge_of(a2, z - zt);
    if (dist <= r) out.push_back({i, dist});
  }
}

std::vector<HeisNeighbor> HeisIndex::within(const HeisPoint& x, double r, Side side) const {
  if (x.v.size() != stride_ - 1) throw std::invalid_argument("dimension mismatch");
  std::vector<HeisNeighbor> out;
  if (!(r >= 0) || vs_.empty()) return out;
  for (std::size_t g : vs_.index().within(x.v, r)) scan_group(g, x, r, side, out);
  std::sort(out.begin(), out.end(), [](const HeisNeighbor& a, const HeisNeighbor& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
  });
  return out;
}

std::vector<HeisNeighbor> HeisIndex::k_nearest(const HeisPoint& x, std::size_t k, double max_r, Side side) const {
  if (vs_.empty() || k == 0) return {};
  // every point lies within N(x) + W of x in either distance
  const double cap = std::min(max_r, heis_gauge(x) + reach_);
  double r = std::max(vs_.index().nearest(x.v).distance, 1e-9);
  while (true) {
    const double rr = std::min(r, cap);
    auto got = within(x, rr, side);
    if (got.size() >= k || rr >= cap) {
      if (got.size() > k) got.resize(k);
      return got;
    }
    r *= 2;
  }
}

std::optional<HeisNeighbor> HeisIndex::nearest(const HeisPoint& x, Side side, double max_r) const {
  const auto got = k_nearest(x, 1, max_r, side);
  if (got.empty()) return std::nullopt;
  return got.front();
}

bool HeisIndex::contains(const HeisPoint& x, double tol) const { return !within(x, tol).empty(); }

PointSet pi_V(const HeisPointSet& ps, double tol) {
  const auto& vs = ps.index().distinct_v();
  return PointSet(vs.dim(), merge_near_duplicates(vs.coords(), vs.dim(), tol), ps.window(), ps.label());
}

// ------------------------------------------------------ approximate subgroup

namespace {

std::vector<std::size_t> interior_indices(const HeisPointSet& ps) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (ps.interior(i)) out.push_back(i);
  return out;
}

double gauge_diameter(const std::vector<HeisPoint>& F, const SymplecticForm& form) {
  double K = 0;
  for (std::size_t i = 0; i < F.size(); ++i)
    for (std::size_t j = i + 1; j < F.size(); ++j) K = std::max(K, heis_dist(F[i], F[j], form));
  return K;
}

}  // namespace

HeisApproxReport check_heis_approx_subgroup(const HeisPointSet& ps, const HeisApproxOptions& opt) {
  HeisApproxReport out;
  auto& rep = out.report;
  const auto& form = ps.form();
  const auto& idx = ps.index();
  const int D = ps.stride();
  const double interior = ps.window().interior();
  const auto inner = interior_indices(ps);
  if (inner.empty()) throw WindowTooSmall("no interior points");

  const HeisPoint e = HeisPoint::identity(ps.n());
  out.has_identity = idx.contains(e, opt.tol);
  if (!out.has_identity) rep.fail({e.flat(), e.flat(), "identity missing"});

  out.symmetric = true;
  const std::size_t sym_stride = std::max<std::size_t>(1, (inner.size() + opt.point_budget - 1) / opt.point_budget);
  for (std::size_t k = 0; k < inner.size(); k += sym_stride) {
    const HeisPoint p = ps.point(inner[k]);
    const HeisPoint q = heis_inverse(p);
    if (!idx.contains(q, opt.tol)) {
      out.symmetric = false;
      rep.fail({p.flat(), q.flat(), "inverse missing"});
    }
  }

  // distinct products λ_i⁻¹λ_j inside the interior, each expanded into
  // candidate left translates f = xλ⁻¹ over the right-nearest λ
  const double k_max = opt.k_max_fraction * ps.window().radius();
  detail::VectorDedup prods(D, opt.tol), cands(D, opt.tol);
  std::vector<std::pair<std::size_t, std::size_t>> origin;
  std::vector<std::uint32_t> list_start{0}, list;
  std::size_t tested = 0;
  std::optional<Counterexample> abort;
  auto visit = [&](std::size_t i, std::size_t j) {
    const HeisPoint x = heis_mul(heis_inverse(ps.point(i)), ps.point(j), form);
    if (heis_gauge(x) > interior) return;
    ++tested;
    const Vector xf = x.flat();
    if (!prods.insert(xf.data()).second) return;
    origin.push_back({i, j});
    const auto nbrs = idx.k_nearest(x, opt.k_nearest, k_max, HeisIndex::Side::Right);
    if (nbrs.empty()) {
      abort = Counterexample{ps.point(i).flat(), ps.point(j).flat(), "product has no point within K_max"};
      return;
    }
    const std::size_t begin = list.size();
    for (const auto& nb : nbrs) {
      const Vector f = heis_mul(x, heis_inverse(ps.point(nb.index)), form).flat();
      const std::uint32_t id = cands.insert(f.data()).first;
      if (std::find(list.begin() + static_cast<std::ptrdiff_t>(begin), list.end(), id) == list.end())
        list.push_back(id);
    }
    list_start.push_back(static_cast<std::uint32_t>(list.size()));
    if (cands.size() > opt.max_candidates)
      abort = Counterexample{ps.point(i).flat(), ps.point(j).flat(), "candidate translates exceed the cap"};
  };
  const double total = static_cast<double>(inner.size()) * static_cast<double>(inner.size());
  out.exhaustive = total <= static_cast<double>(opt.pair_budget);
  if (out.exhaustive) {
    for (std::size_t a = 0; a < inner.size() && !abort; ++a)
      for (std::size_t b = 0; b < inner.size() && !abort; ++b) visit(inner[a], inner[b]);
  } else {
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<std::size_t> pick(0, inner.size() - 1);
    for (std::size_t s = 0; s < opt.pair_budget && !abort; ++s) {
      const std::size_t a = pick(rng);
      const std::size_t b = pick(rng);
      visit(inner[a], inner[b]);
    }
    rep.notes.push_back("products sampled: " + std::to_string(opt.pair_budget) + " of " +
                        format_real(total) + " interior pairs");
  }
  out.sampled_pairs = tested;
  rep.tested_pairs = tested;
  if (abort) {
    rep.fail(*abort);
    rep.finalize();
    return out;
  }

  const std::size_t np = prods.size(), nc = cands.size();
  std::vector<double> cg(nc);
  for (std::size_t c = 0; c < nc; ++c)
    cg[c] = heis_gauge(HeisPoint::from_flat(Eigen::Map<const Vector>(cands.at(static_cast<std::uint32_t>(c)), D)));
  auto better = [&](std::uint32_t a, std::uint32_t b) {
    if (cg[a] != cg[b]) return cg[a] < cg[b];
    return lex_less(cands.at(a), cands.at(b), D);
  };
  const auto cover = detail::greedy_cover(np, nc, list_start, list, better, opt.max_translates);
  if (!cover.complete) {
    const auto [i, j] = origin[cover.uncovered];
    rep.fail({ps.point(i).flat(), ps.point(j).flat(), "greedy cover exceeds the translate cap"});
    rep.finalize();
    return out;
  }
  HeisTranslationSet F;
  std::vector<Vector> flatF;
  for (std::uint32_t id : cover.chosen) {
    flatF.emplace_back(Eigen::Map<const Vector>(cands.at(id), D));
    F.F.push_back(HeisPoint::from_flat(flatF.back()));
  }
  F.K = gauge_diameter(F.F, form);

  // independent confirmation: every tested product is f·λ for some f ∈ F
  for (std::size_t p = 0; p < np; ++p) {
    const HeisPoint x = HeisPoint::from_flat(Eigen::Map<const Vector>(prods.at(static_cast<std::uint32_t>(p)), D));
    bool ok = false;
    for (const auto& f : F.F)
      if (idx.contains(heis_mul(heis_inverse(f), x, form), opt.tol)) {
        ok = true;
        break;
      }
    if (!ok) {
      const auto [i, j] = origin[p];
      rep.fail({ps.point(i).flat(), ps.point(j).flat(), "product not in FΛ"});
    }
  }
  rep.F = TranslationSet(D, flatF);
  out.F = std::move(F);
  rep.finalize();
  return out;
}

HeisTranslationSet heis_triple_product(const HeisTranslationSet& F, const SymplecticForm& form, double tol) {
  if (F.F.empty()) throw std::invalid_argument("empty translation set");
  const int D = static_cast<int>(F.F.front().v.size()) + 1;
  detail::VectorDedup seen(D, tol);
  HeisTranslationSet out;
  for (const auto& a : F.F)
    for (const auto& b : F.F) {
      const HeisPoint ab = heis_mul(a, b, form);
      for (const auto& c : F.F) {
        const HeisPoint abc = heis_mul(ab, c, form);
        const Vector x = abc.flat();
        if (seen.insert(x.data()).second) out.F.push_back(abc);
      }
    }
  out.K = gauge_diameter(out.F, form);
  return out;
}

// ---------------------------------------------------------- center density

namespace {

/// Distinct v's of interior points, in canonical order.
std::vector<Vector> interior_vs(const HeisPointSet& ps) {
  const auto& idx = ps.index();
  std::vector<Vector> out;
  for (std::size_t g = 0; g < idx.groups(); ++g)
    for (std::size_t i = idx.group_begin(g); i < idx.group_end(g); ++i)
      if (ps.interior(i)) {
        out.emplace_back(ps.v(i));
        break;
      }
  return out;
}

void sort_merge(std::vector<double>& xs, double tol) {
  std::sort(xs.begin(), xs.end());
  std::size_t w = 0;
  for (std::size_t r = 0; r < xs.size(); ++r)
    if (w == 0 || xs[r] - xs[w - 1] > tol) xs[w++] = xs[r];
  xs.resize(w);
}

/// Calls visit(i, j) on pairs i < j, striding the outer index to respect
/// the budget.
template <class Visit>
std::size_t for_pairs(std::size_t n, std::size_t budget, Visit&& visit) {
  const double total = 0.5 * static_cast<double>(n) * static_cast<double>(n);
  const auto stride = static_cast<std::size_t>(std::max(1.0, std::ceil(total / static_cast<double>(budget))));
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; i += stride)
    for (std::size_t j = i + 1; j < n; ++j) {
      visit(i, j);
      ++count;
    }
  return count;
}

}  // namespace

CenterDensity check_center_density(const HeisPointSet& ps, double R, std::size_t pair_budget, double tol) {
  if (!(R > 0)) throw std::invalid_argument("density radius must be positive");
  const auto vs = interior_vs(ps);
  const auto& form = ps.form();
  CenterDensity out;
  const double inner = ps.window().interior();
  // (0, ω) has gauge 2 sqrt|ω|
  out.range = inner * inner / 4;
  std::vector<double> vals{0.0};
  bool noncentral = false;
  out.pairs = for_pairs(vs.size(), pair_budget, [&](std::size_t i, std::size_t j) {
    const double w = form(vs[i], vs[j]);
    if (std::abs(w) > tol) noncentral = true;
    if (std::abs(w) <= out.range) {
      vals.push_back(w);
      vals.push_back(-w);
      if (vals.size() > (1u << 22)) sort_merge(vals, tol);
    }
  });
  if (!noncentral) throw DegenerateForm("ω(Λ_V, Λ_V) = 0: every pair of interior points commutes");
  sort_merge(vals, tol);
  out.values = vals.size();
  double gap = std::max(vals.front() + out.range, out.range - vals.back());
  for (std::size_t i = 1; i < vals.size(); ++i) gap = std::max(gap, vals[i] - vals[i - 1]);
  out.max_gap = gap;
  out.passed = gap <= 2 * R;
  return out;
}

// -------------------------------------------------- density around H' = LZ

HeisDensity check_density_around_subgroup(const HeisPointSet& ps, const Subspace& L, double R, double spacing,
                                          std::size_t max_targets) {
  if (L.ambient_dim() != 2 * ps.n()) throw std::invalid_argument("dimension mismatch");
  if (!(R > 0) || !(spacing > 0)) throw std::invalid_argument("radius and spacing must be positive");
  HeisDensity out;
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (ps.interior(i)) out.thickening = std::max(out.thickening, L.distance(ps.v(i)));

  const double rad = ps.window().interior();
  auto zmax = [&](double w) { return std::sqrt(std::max(0.0, (rad * rad - w * w) * (rad * rad + w * w))) / 4.0; };
  std::vector<Vector> base;
  double s = spacing;
  while (true) {
    base = L.rank() == 0 ? std::vector<Vector>{Vector::Zero(L.ambient_dim())} : grid_on_subspace(L, rad, s);
    double count = 0;
    for (const auto& w : base) count += 2 * std::floor(zmax(w.norm()) / s) + 1;
    if (count <= static_cast<double>(max_targets)) break;
    s *= 1.25;
  }
  const auto& idx = ps.index();
  for (const auto& w : base) {
    const double zm = zmax(w.norm());
    const auto kmax = static_cast<long long>(std::floor(zm / s));
    for (long long k = -kmax; k <= kmax; ++k) {
      const HeisPoint t{w, static_cast<double>(k) * s};
      const auto nb = idx.nearest(t);
      if (!nb) throw WindowTooSmall("empty set");
      out.covering = std::max(out.covering, nb->distance);
      ++out.targets;
    }
  }
  out.R_witness = std::max(out.thickening, out.covering);
  out.passed = out.R_witness <= R + Tolerances{}.exact * std::max(1.0, R);
  return out;
}

ProjectionDiscreteness check_projection_discreteness(const HeisPointSet& ps, double threshold, double trend) {
  const Window& w = ps.window();
  const auto full = pi_V(ps);
  const auto half = pi_V(ps.restrict(Window(w.radius() / 2, w.margin() / 2)));
  // fewer than two projected points: finite, hence discrete
  constexpr double none = std::numeric_limits<double>::infinity();
  ProjectionDiscreteness out;
  out.gap = full.size() < 2 ? none : min_pairwise_gap(full);
  out.gap_half = half.size() < 2 ? none : min_pairwise_gap(half);
  out.passed = out.gap > threshold && out.gap_half > threshold &&
               (std::isinf(out.gap_half) || out.gap >= trend * out.gap_half);
  return out;
}

// -------------------------------------------------------------- dichotomy

std::string to_string(HeisCase c) {
  switch (c) {
    case HeisCase::Central: return "central";
    case HeisCase::Lagrangian: return "lagrangian";
    case HeisCase::Symplectic: return "symplectic";
  }
  return "?";
}

PointSet flatten_lagrangian(const HeisPointSet& ps, const Subspace& Lp) {
  if (Lp.ambient_dim() != 2 * ps.n()) throw std::invalid_argument("dimension mismatch");
  const int k = Lp.rank();
  const double W = ps.window().radius();
  const double rho = std::min(W, W * W / 4);
  const double margin = ps.window().margin() * rho / W;
  std::vector<double> flat;
  const double tol = Tolerances{}.geom * std::max(1.0, W);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto v = ps.v(i);
    if (Lp.distance(v) > tol) throw std::invalid_argument("point outside the Lagrangian subspace");
    Vector x(k + 1);
    x.head(k) = Lp.coordinates(v);
    x(k) = ps.z(i);
    if (x.norm() <= rho) flat.insert(flat.end(), x.data(), x.data() + k + 1);
  }
  return PointSet(k + 1, std::move(flat), Window(rho, margin), ps.label());
}

HeisAnalysis analyze_heis(const HeisPointSet& ps, const HeisAnalysisOptions& opt) {
  HeisAnalysis a;
  const int d = 2 * ps.n();
  const double inner = ps.window().interior();
  const double R = opt.R > 0 ? opt.R : inner / 4;
  const auto P = pi_V(ps, opt.tol);

  a.L = Subspace::zero(d);
  try {
    a.L = span_of_directions(asymptotic_directions(P, opt.r_min_fraction * inner, opt.cluster_tol), opt.rank_tol);
  } catch (const WindowTooSmall&) {
    a.notes.push_back("no far points in the projection: L = {0}");
  }

  const auto vs = interior_vs(ps);
  for_pairs(vs.size(), 20'000'000, [&](std::size_t i, std::size_t j) {
    a.omega_max = std::max(a.omega_max, std::abs(ps.form()(vs[i], vs[j])));
  });
  try {
    a.projection = check_projection_discreteness(ps);
  } catch (const WindowTooSmall& e) {
    a.notes.push_back(e.what());
  }

  if (a.L.rank() == 0) {
    a.route = HeisCase::Central;
    a.density = check_density_around_subgroup(ps, a.L, R);
    a.passed = a.density->passed;
  } else if (a.omega_max <= opt.tol) {
    a.route = HeisCase::Lagrangian;
    a.L_prime = Subspace::span(vs, d);
    const double iso = ps.form().restriction_norm(a.L_prime->basis());
    if (iso > opt.tol) a.notes.push_back("span of π_V(Λ) is not isotropic to tolerance: " + format_real(iso));
    AnalysisOptions fo = opt.flat;
    a.flat = analyze(flatten_lagrangian(ps, *a.L_prime), fo);
    a.passed = a.flat->passed;
  } else {
    a.route = HeisCase::Symplectic;
    a.center = check_center_density(ps, R);
    a.density = check_density_around_subgroup(ps, a.L, R);
    const bool v_dense = a.L.is_full() && check_relative_density_around(P, a.L, R).passed;
    a.approximate_lattice = v_dense && a.center->passed && a.density->passed;
    a.passed = a.center->passed && a.projection.passed && a.density->passed;
  }
  return a;
}

// ------------------------------------------------------------- generators

HeisPointSet gen_heis_line(Window window, double alpha, double beta) {
  if (!(beta != 0)) throw std::invalid_argument("beta must be nonzero");
  const double W = window.radius();
  const auto mmax = static_cast<long long>(std::floor(W * W / 4));
  std::vector<double> flat;
  for (long long m = -mmax; m <= mmax; ++m) {
    const double X = std::sqrt(std::sqrt(std::max(0.0, (W * W - 4.0 * m) * (W * W + 4.0 * m))));
    double lo = (-X - static_cast<double>(m) * alpha) / beta, hi = (X - static_cast<double>(m) * alpha) / beta;
    if (lo > hi) std::swap(lo, hi);
    for (auto n = static_cast<long long>(std::ceil(lo)) - 1; n <= static_cast<long long>(std::floor(hi)) + 1; ++n) {
      const double x = static_cast<double>(m) * alpha + static_cast<double>(n) * beta;
      const double z = static_cast<double>(m);
      if (!window.contains_norm(gauge_of(x * x, z))) continue;
      flat.insert(flat.end(), {x, 0.0, z});
    }
  }
  return HeisPointSet(SymplecticForm::standard(1), std::move(flat), window);
}

HeisPointSet gen_heis_coset_lattice(Window window, double alpha) {
  const double W = window.radius();
  const auto b = static_cast<long long>(std::floor(W));
  std::vector<double> flat;
  for (long long m = -b; m <= b; ++m)
    for (long long n = -b; n <= b; ++n) {
      const double v2 = static_cast<double>(m * m + n * n);
      if (v2 > W * W) continue;
      const double zm = std::sqrt(std::max(0.0, (W * W - v2) * (W * W + v2))) / 4.0;
      const double c = static_cast<double>(m) * alpha;
      const auto jlo = static_cast<long long>(std::ceil(2 * (-zm - c))) - 1;
      const auto jhi = static_cast<long long>(std::floor(2 * (zm - c))) + 1;
      for (long long j = jlo; j <= jhi; ++j) {
        const double z = c + 0.5 * static_cast<double>(j);
        if (!window.contains_norm(gauge_of(v2, z))) continue;
        flat.insert(flat.end(), {static_cast<double>(m), static_cast<double>(n), z});
      }
    }
  return HeisPointSet(SymplecticForm::standard(1), std::move(flat), window);
}

HeisPointSet gen_heis_central(Window window, int n, double spacing) {
  if (!(spacing > 0)) throw std::invalid_argument("spacing must be positive");
  const double W = window.radius();
  const auto kmax = static_cast<long long>(std::floor(W * W / 4 / spacing));
  std::vector<double> flat;
  for (long long k = -kmax; k <= kmax; ++k) {
    const double z = static_cast<double>(k) * spacing;
    if (!window.contains_norm(gauge_of(0, z))) continue;
    flat.insert(flat.end(), static_cast<std::size_t>(2 * n), 0.0);
    flat.push_back(z);
  }
  return HeisPointSet(SymplecticForm::standard(n), std::move(flat), window);
}

// -------------------------------------------------------------------- I/O

void write_heis_points(std::ostream& out, const HeisPointSet& ps) {
  const int D = ps.stride();
  out << "dim=" << D << " window=" << format_real(ps.window().radius())
      << " margin=" << format_real(ps.window().margin()) << " label=" << ps.label() << '\n';
  const Matrix& J = ps.form().matrix();
  out << "form=";
  for (Eigen::Index i = 0; i < J.rows(); ++i)
    for (Eigen::Index j = 0; j < J.cols(); ++j) out << (i || j ? " " : "") << format_real(J(i, j));
  out << '\n';
  const auto c = ps.coords();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (int a = 0; a < D; ++a) out << (a ? " " : "") << format_real(c[i * D + a]);
    out << '\n';
  }
}

HeisPointSet read_heis_points(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto next = [&]() {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
      return true;
    }
    return false;
  };
  if (!next()) throw ConfigError("point file has no header");
  const int header_line = line_no;
  auto kv = parse_header(line, line_no);
  auto real_of = [&](const std::string& key, bool required, double dflt) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      if (required) throw ConfigError("header is missing '" + key + "'", header_line);
      return dflt;
    }
    return parse_reals(it->second, header_line, 1)[0];
  };
  const double dim_real = real_of("dim", true, 0);
  const int D = static_cast<int>(dim_real);
  if (D != dim_real || D < 3 || D % 2 == 0) throw ConfigError("dim must be 2n + 1 with n >= 1", header_line);
  const double radius = real_of("window", true, 0);
  const double margin = real_of("margin", false, 0);
  const int d = D - 1;

  if (!next() || line.rfind("form=", 0) != 0) throw ConfigError("expected a form= line after the header", line_no);
  const auto entries = parse_reals(line.substr(5), line_no, d * d);
  Matrix J(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) J(i, j) = entries[static_cast<std::size_t>(i * d + j)];
  std::optional<SymplecticForm> form;
  try {
    form = SymplecticForm::from_matrix(J);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), line_no);
  }

  std::vector<double> flat;
  while (next()) {
    const auto xs = parse_reals(line, line_no, D);
    flat.insert(flat.end(), xs.begin(), xs.end());
  }
  try {
    return HeisPointSet(*form, std::move(flat), Window(radius, margin), kv.count("label") ? kv["label"] : "");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace apx
