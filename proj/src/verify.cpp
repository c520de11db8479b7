#include "apx/verify.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "apx/errors.hpp"
#include "apx/pointset_io.hpp"
#include "dedup.hpp"
#include "greedy_cover.hpp"

namespace apx {

namespace {

double pad(double r) { return 1e-9 * std::max(1.0, r); }

std::string vec_text(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_real(v(i));
  return s + ")";
}

// Visits (i, j) with ‖p_i − p_j‖ <= radius for a stride-subsampled set of i.
// The stride is chosen so the estimated pair count stays within budget.
template <class Visit>
std::pair<std::size_t, std::size_t> for_each_pair_within(const PointSet& ps, double radius, std::size_t budget,
                                                         Visit&& visit) {
  const std::size_t n = ps.size();
  if (n == 0) return {0, 1};
  const std::size_t probes = std::min<std::size_t>(n, 64);
  double sampled = 0;
  for (std::size_t s = 0; s < probes; ++s) {
    const std::size_t i = s * n / probes;
    sampled += static_cast<double>(ps.index().within(ps.point(i), radius).size());
  }
  const double estimate = sampled / static_cast<double>(probes) * static_cast<double>(n);
  const std::size_t stride =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(estimate / static_cast<double>(budget))));
  std::size_t tested = 0;
  for (std::size_t i = 0; i < n; i += stride) {
    for (std::size_t j : ps.index().within(ps.point(i), radius)) {
      visit(i, j);
      ++tested;
    }
  }
  return {tested, stride};
}

void note_shift(VerificationReport& rep, const Normalized& norm) {
  if (norm.shift.norm() > 0)
    rep.notes.push_back("re-centered by " + vec_text(norm.shift) + "; window shrunk to " +
                        format_real(norm.ps.window().radius()));
}

void note_stride(VerificationReport& rep, std::size_t stride) {
  if (stride > 1) rep.notes.push_back("pair enumeration subsampled with stride " + std::to_string(stride));
}

}  // namespace

// ----------------------------------------------------------- TranslationSet

double diameter(const std::vector<Vector>& pts) {
  double d = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
  return d;
}

TranslationSet::TranslationSet(int dim, std::vector<Vector> translates)
    : dim_(dim), translates_(std::move(translates)) {
  if (translates_.empty()) throw std::invalid_argument("translation set must be nonempty");
  for (const auto& f : translates_) {
    if (f.size() != dim_) throw std::invalid_argument("translate dimension mismatch");
    if (!f.allFinite()) throw std::invalid_argument("non-finite translate");
  }
  K_ = diameter(translates_);
}

TranslationSet TranslationSet::scaled(double c) const {
  std::vector<Vector> out;
  for (const auto& f : translates_) out.push_back(f * c);
  return TranslationSet(dim_, std::move(out));
}

TranslationSet TranslationSet::mapped(const Matrix& A) const {
  if (A.cols() != dim_) throw std::invalid_argument("map dimension mismatch");
  detail::VectorDedup seen(static_cast<int>(A.rows()), 1e-12);
  std::vector<Vector> out;
  for (const auto& f : translates_) {
    Vector g = A * f;
    if (seen.insert(g.data()).second) out.push_back(std::move(g));
  }
  return TranslationSet(static_cast<int>(A.rows()), std::move(out));
}

TranslationSet TranslationSet::merged(const std::vector<Vector>& extra) const {
  std::vector<Vector> out = translates_;
  out.insert(out.end(), extra.begin(), extra.end());
  return TranslationSet(dim_, std::move(out));
}

// ------------------------------------------------------- VerificationReport

void VerificationReport::fail(Counterexample c) {
  passed = false;
  ++failures;
  counterexamples.push_back(std::move(c));
  if (counterexamples.size() >= 4 * witness_cap + 16) finalize();
}

void VerificationReport::finalize() {
  std::stable_sort(counterexamples.begin(), counterexamples.end(), [](const auto& x, const auto& y) {
    const double nx = x.a.norm(), ny = y.a.norm();
    if (nx != ny) return nx < ny;
    return lex_less(x.a.data(), y.a.data(), static_cast<int>(x.a.size()));
  });
  if (counterexamples.size() > witness_cap) counterexamples.resize(witness_cap);
  if (!counterexamples.empty()) passed = false;
}

// ------------------------------------------------------------ normalization

Normalized normalize_origin(const PointSet& ps) {
  if (ps.empty()) throw std::invalid_argument("empty set");
  const Vector zero = Vector::Zero(ps.dim());
  const auto nn = nearest_neighbor(ps, zero);
  if (nn.distance == 0) return {ps, zero};
  const double radius = ps.window().radius() - nn.distance;
  if (radius <= ps.window().margin())
    throw WindowTooSmall("re-centering leaves no window interior (shift " + format_real(nn.distance) + ")");
  const Vector shift = -nn.point;
  return {ps.translated(shift, Window(radius, ps.window().margin())), shift};
}

// -------------------------------------------------------------- discreteness

Discreteness check_uniform_discreteness(const PointSet& ps, double threshold) {
  const double gap = min_pairwise_gap(ps);
  return {gap > threshold, gap};
}

// --------------------------------------------------------- translation set

TranslationResult find_translation_set_detailed(const PointSet& input, const TranslationOptions& opt) {
  const auto norm = normalize_origin(input);
  const PointSet& ps = norm.ps;
  const int d = ps.dim();
  const double interior = ps.window().interior();
  const double k_max = opt.k_max_fraction * ps.window().radius();

  // Distinct differences, each expanded into candidate translates as soon as
  // it appears so a runaway candidate count aborts early. Candidate lists are
  // kept per difference in CSR form.
  detail::VectorDedup diffs(d, opt.tol);
  detail::VectorDedup cands(d, opt.tol);
  std::vector<std::uint32_t> list_start{0}, list;
  Vector x(d), f(d);
  auto expand = [&](const Vector& xd) {
    const auto nbrs = ps.index().k_nearest(xd, opt.k_nearest, k_max);
    if (nbrs.empty())
      throw NotApproximateSubgroup("not an approximate subgroup at this window: difference " + vec_text(xd) +
                                       " has no point within K_max = " + format_real(k_max),
                                   xd);
    const std::size_t begin = list.size();
    for (const auto& nb : nbrs) {
      f = xd - ps.point(nb.index);
      const std::uint32_t id = cands.insert(f.data()).first;
      if (std::find(list.begin() + static_cast<std::ptrdiff_t>(begin), list.end(), id) == list.end()) list.push_back(id);
    }
    list_start.push_back(static_cast<std::uint32_t>(list.size()));
    if (cands.size() > opt.max_candidates)
      throw NotApproximateSubgroup("not an approximate subgroup at this window: candidate translates exceed " +
                                       std::to_string(opt.max_candidates) + " (at difference " + vec_text(xd) + ")",
                                   xd);
  };
  const auto [tested, stride] = for_each_pair_within(ps, interior, opt.pair_budget, [&](std::size_t i, std::size_t j) {
    x = ps.point(i) - ps.point(j);
    if (diffs.insert(x.data()).second) expand(x);
  });
  const std::size_t nd = diffs.size();
  const std::size_t nc = cands.size();

  std::vector<double> cnorm(nc);
  for (std::size_t c = 0; c < nc; ++c) cnorm[c] = Eigen::Map<const Vector>(cands.at(static_cast<std::uint32_t>(c)), d).norm();
  // ties: shorter, then lexicographically smaller
  auto better = [&](std::uint32_t a, std::uint32_t b) {
    if (cnorm[a] != cnorm[b]) return cnorm[a] < cnorm[b];
    return lex_less(cands.at(a), cands.at(b), d);
  };
  const auto cover = detail::greedy_cover(nd, nc, list_start, list, better, opt.max_translates);
  if (!cover.complete) {
    const Eigen::Map<const Vector> w(diffs.at(cover.uncovered), d);
    throw NotApproximateSubgroup("not an approximate subgroup at this window: greedy cover exceeds " +
                                     std::to_string(opt.max_translates) + " translates",
                                 w);
  }
  std::vector<Vector> chosen;
  for (std::uint32_t id : cover.chosen) chosen.emplace_back(Eigen::Map<const Vector>(cands.at(id), d));

  TranslationResult res{TranslationSet(d, std::move(chosen)), 0, 0, 0, 1, Vector()};
  res.tested_pairs = tested;
  res.distinct_differences = nd;
  res.candidates = nc;
  res.stride = stride;
  res.shift = norm.shift;
  return res;
}

TranslationSet find_translation_set(const PointSet& ps, const TranslationOptions& opt) {
  return find_translation_set_detailed(ps, opt).F;
}

// ------------------------------------------------------------------ checks

VerificationReport check_inclusion(const PointSet& input, const TranslationSet& F, double tol,
                                   std::size_t pair_budget) {
  if (F.dim() != input.dim()) throw std::invalid_argument("dimension mismatch");
  VerificationReport rep;
  const auto norm = normalize_origin(input);
  const PointSet& ps = norm.ps;
  note_shift(rep, norm);
  const int d = ps.dim();
  detail::VectorDedup seen(d, 0.0);
  Vector x(d), y(d);
  const auto [tested, stride] =
      for_each_pair_within(ps, ps.window().interior(), pair_budget, [&](std::size_t i, std::size_t j) {
        x = ps.point(i) - ps.point(j);
        if (!seen.insert(x.data()).second) return;
        for (const auto& f : F.translates()) {
          y = x - f;
          if (ps.index().any_within(y, tol)) return;
        }
        rep.fail({x, Vector(ps.point(i)), "difference not in Λ + F"});
      });
  rep.tested_pairs = tested;
  rep.F = F;
  note_stride(rep, stride);
  rep.finalize();
  return rep;
}

VerificationReport check_property_A(const PointSet& input, double K, double tol) {
  VerificationReport rep;
  const auto norm = normalize_origin(input);
  const PointSet& ps = norm.ps;
  note_shift(rep, norm);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const Vector l = ps.point(i);
    if (!ps.window().interior_norm(l.norm())) continue;
    ++rep.tested_pairs;
    if (!ps.index().any_within(-l, K + tol)) rep.fail({l, -l, "no point within K of -l"});
  }
  rep.finalize();
  return rep;
}

VerificationReport check_property_B(const PointSet& input, double K, double tol, std::size_t pair_budget) {
  VerificationReport rep;
  const auto norm = normalize_origin(input);
  const PointSet& ps = norm.ps;
  note_shift(rep, norm);
  const double interior = ps.window().interior();
  const int d = ps.dim();
  std::vector<char> inside(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) inside[i] = ps.window().interior_norm(ps.point(i).norm());
  detail::VectorDedup seen(d, 0.0);
  const std::size_t n = ps.size();
  std::size_t inner = 0;
  for (char c : inside) inner += c;
  // sums s = l1 + l2 with ‖s‖ <= interior: l2 ranges over within(-l1, interior)
  const double est = static_cast<double>(inner) * static_cast<double>(inner);
  const std::size_t stride =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(est / static_cast<double>(pair_budget))));
  Vector s(d);
  std::size_t tested = 0, seen_inner = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!inside[i]) continue;
    if (seen_inner++ % stride != 0) continue;
    const Vector l1 = ps.point(i);
    for (std::size_t j : ps.index().within(-l1, interior)) {
      if (!inside[j]) continue;
      ++tested;
      s = l1 + ps.point(j);
      if (!seen.insert(s.data()).second) continue;
      if (!ps.index().any_within(s, 2 * K + tol)) rep.fail({l1, Vector(ps.point(j)), "no point within 2K of l1+l2"});
    }
  }
  rep.tested_pairs = tested;
  note_stride(rep, stride);
  rep.finalize();
  return rep;
}

std::vector<Vector> density_targets(const Subspace& L, double radius, double spacing, std::size_t max_targets) {
  if (L.rank() == 0) return {Vector::Zero(L.ambient_dim())};
  if (!(spacing > 0)) throw std::invalid_argument("grid spacing must be positive");
  const int k = L.rank();
  auto count = [&](double s) { return std::pow(2.0 * std::floor(radius / s) + 1.0, k); };
  while (count(spacing) > static_cast<double>(max_targets)) spacing *= 1.25;
  return grid_on_subspace(L, radius, spacing);
}

DensityAround check_relative_density_around(const PointSet& input, const Subspace& L, double R, double spacing,
                                            std::size_t max_targets) {
  if (L.ambient_dim() != input.dim()) throw std::invalid_argument("dimension mismatch");
  if (!(R > 0)) throw std::invalid_argument("density radius must be positive");
  const auto norm = normalize_origin(input);
  const PointSet& ps = norm.ps;
  const double interior = ps.window().interior();
  double thick = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto p = ps.point(i);
    if (ps.window().interior_norm(p.norm())) thick = std::max(thick, L.distance(p));
  }
  if (!(spacing > 0)) spacing = std::min(R / 2, 0.1);
  const auto targets = density_targets(L, interior, spacing, max_targets);
  const double cover = covering_radius(ps, targets);
  const double slack = pad(R);
  return {thick <= R + slack && cover <= R + slack, std::max(thick, cover), thick, cover, targets.size()};
}

}  // namespace apx
