#include "apx/meyer.hpp"

#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>

#include "apx/errors.hpp"
#include "apx/schreiber.hpp"

namespace apx {

namespace {

struct GapPart {
  bool passed;
  double gap, gap_half;
};

GapPart discreteness_part(const PointSet& ps, const MeyerOptions& opt) {
  const double gap = check_uniform_discreteness(ps, opt.gap_threshold).gap;
  const Window& w = ps.window();
  const auto half = ps.restrict(Window(w.radius() / 2, w.margin() / 2));
  const double gap_half = half.size() >= 2 ? min_pairwise_gap(half) : gap;
  return {gap > opt.gap_threshold && gap >= opt.gap_trend * gap_half, gap, gap_half};
}

struct DensityPart {
  bool passed;
  double radius, bound;
};

DensityPart density_part(const PointSet& ps, const MeyerOptions& opt) {
  const double interior = ps.window().interior();
  const double bound = opt.density_bound > 0 ? opt.density_bound : interior / 4;
  const double spacing = opt.spacing > 0 ? opt.spacing : 0.1;
  const auto targets = density_targets(Subspace::full(ps.dim()), interior, spacing, opt.max_targets);
  const double radius = covering_radius(ps, targets);
  return {radius <= bound, radius, bound};
}

struct SubgroupPart {
  bool passed;
  std::optional<TranslationSet> F;
  std::string note;
};

SubgroupPart subgroup_part(const PointSet& ps, const MeyerOptions& opt) {
  try {
    auto F = find_translation_set(ps, opt.translation);
    if (opt.verify_inclusion) {
      const auto incl = check_inclusion(ps, F, opt.translation.tol);
      if (!incl.passed) return {false, F, "translation set fails the inclusion check"};
    }
    return {true, std::move(F), {}};
  } catch (const NotApproximateSubgroup& e) {
    return {false, std::nullopt, e.what()};
  }
}

}  // namespace

MeyerReport check_meyer(const PointSet& ps, const MeyerOptions& opt) {
  if (ps.size() < 2) throw std::invalid_argument("Meyer check needs at least two points");
  auto gap_f = std::async(std::launch::async, [&] { return discreteness_part(ps, opt); });
  auto dens_f = std::async(std::launch::async, [&] { return density_part(ps, opt); });
  const auto sub = subgroup_part(ps, opt);
  const auto gap = gap_f.get();
  const auto dens = dens_f.get();

  MeyerReport r;
  r.discrete = gap.passed;
  r.gap = gap.gap;
  r.gap_half = gap.gap_half;
  r.relatively_dense = dens.passed;
  r.radius = dens.radius;
  r.density_bound = dens.bound;
  r.approx_subgroup = sub.passed;
  r.F = sub.F;
  if (!sub.note.empty()) r.notes.push_back(sub.note);
  if (sub.F && ps.window().margin() < sub.F->K()) {
    std::ostringstream os;
    os << "window margin " << ps.window().margin() << " is below K = " << sub.F->K();
    r.notes.push_back(os.str());
  }
  r.verdict = r.discrete && r.relatively_dense && r.approx_subgroup;
  return r;
}

StripRestriction restrict_to_strip(const PointSet& meyer, const Subspace& L, double R, bool check_precondition,
                                   const MeyerOptions& opt) {
  if (!(R > 0)) throw std::invalid_argument("strip radius must be positive");
  if (L.ambient_dim() != meyer.dim()) throw std::invalid_argument("dimension mismatch");
  const double slack = Tolerances{}.exact * std::max(1.0, R);
  StripRestriction out{meyer.filter([&](const PointRef& p) { return L.distance(p) <= R + slack; }, meyer.window()),
                       std::nullopt};
  if (check_precondition) {
    const auto rep = check_meyer(meyer, opt);
    std::ostringstream os;
    if (!rep.verdict) {
      os << "input is not a verified Meyer set";
    } else if (rep.radius > R / 2) {
      os << "covering radius " << rep.radius << " exceeds R/2 = " << R / 2;
    }
    if (!os.str().empty()) out.warning = os.str();
  }
  return out;
}

ProjectionReport check_projection_meyer(const PointSet& ps, const Subspace& L, const MeyerOptions& opt) {
  if (L.ambient_dim() != ps.dim()) throw std::invalid_argument("dimension mismatch");
  if (L.rank() == 0) throw std::invalid_argument("projection onto the zero subspace");
  const double tol = opt.translation.tol;
  const double R = thickening_radius(ps, L);
  const Window& w = ps.window();
  const Window pw(w.radius(), std::min(w.radius() / 2, w.margin() + 2 * R));
  const auto coords = to_subspace_coordinates(ps, L, tol);
  PointSet projected(L.rank(), std::vector<double>(coords.coords().begin(), coords.coords().end()), pw,
                     ps.label());

  ProjectionReport out{projected, {}, R, false, 0, std::nullopt};
  double worst = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto p = ps.point(i);
    const double d = (projected.index().nearest(L.coordinates(p)).distance);
    // dist(p, Λ_L) in ambient space: the L⊥ part adds in quadrature
    const double perp = L.distance(p);
    worst = std::max(worst, std::sqrt(d * d + perp * perp) - R);
  }
  out.containment_slack = worst;
  out.contained = worst <= tol;

  out.meyer = check_meyer(projected, opt);
  // The trend compares images of Λ ∩ B_W and Λ ∩ B_{W/2}; restricting the
  // image instead would keep far points whose projections land nearby.
  const auto half = to_subspace_coordinates(ps.restrict(Window(w.radius() / 2, w.margin() / 2)), L, tol);
  if (half.size() >= 2) {
    auto& m = out.meyer;
    m.gap_half = min_pairwise_gap(half);
    m.discrete = m.gap > opt.gap_threshold && m.gap >= opt.gap_trend * m.gap_half;
    m.verdict = m.discrete && m.relatively_dense && m.approx_subgroup;
  }
  try {
    const auto F = find_translation_set(ps, opt.translation);
    const auto FL = F.mapped(L.basis().transpose());
    out.F_inherited = check_inclusion(projected, FL, tol).passed;
  } catch (const NotApproximateSubgroup& e) {
    out.meyer.notes.push_back(std::string("no translation set for the ambient set: ") + e.what());
  }
  return out;
}

TransversalReport check_no_finite_transversal(const PointSet& ps, const Subspace& L, std::size_t max_F,
                                              double strip_radius, double min_growth, double tol) {
  if (L.ambient_dim() != ps.dim()) throw std::invalid_argument("dimension mismatch");
  const Subspace Lp = L.complement();
  TransversalReport out;
  if (Lp.rank() == 0) {
    out.count = out.count_half = ps.empty() ? 0 : 1;
    out.growth = 1;
    return out;
  }
  const int k = Lp.rank();
  const double half = ps.window().radius() / 2;
  auto count = [&](double radius) {
    std::vector<double> flat;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const auto p = ps.point(i);
      if (p.norm() > radius || L.distance(p) > strip_radius) continue;
      const Vector c = Lp.coordinates(p);
      flat.insert(flat.end(), c.data(), c.data() + k);
    }
    return merge_near_duplicates(flat, k, tol).size() / static_cast<std::size_t>(k);
  };
  out.count = count(ps.window().radius());
  out.count_half = count(half);
  out.growth = out.count_half == 0 ? 0.0 : static_cast<double>(out.count) / static_cast<double>(out.count_half);
  out.supported = out.count > max_F && out.growth >= min_growth;
  return out;
}

}  // namespace apx
