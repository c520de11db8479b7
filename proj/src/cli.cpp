#include "apx/cli.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "apx/analysis.hpp"
#include "apx/errors.hpp"
#include "apx/generators.hpp"
#include "apx/heisenberg.hpp"
#include "apx/meyer.hpp"
#include "apx/pointset_io.hpp"
#include "apx/schreiber.hpp"
#include "apx/spec_file.hpp"
#include "apx/verify.hpp"

namespace apx {

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"generate", "verify", "analyze", "meyer", "heis", "report"};
  return names;
}

namespace {

struct Context {
  const RunConfig& cfg;
  Report& rep;
  Instance inst;
  std::ostringstream chains;
  std::optional<Plot> plot;
};

TranslationOptions translation_options(const RunConfig& c) {
  TranslationOptions t;
  t.tol = c.tol.geom;
  return t;
}

MeyerOptions meyer_options(const RunConfig& c) {
  MeyerOptions m;
  m.gap_threshold = c.tol.geom;
  m.translation = translation_options(c);
  return m;
}

AnalysisOptions analysis_options(const RunConfig& c) {
  AnalysisOptions a;
  a.translation = translation_options(c);
  a.certify.tol = c.tol.geom;
  a.certify.keep_chains = c.emit_chains.has_value();
  a.system.tol = c.tol.geom;
  a.system.seed = c.seed;
  return a;
}

std::string join_vectors(const std::vector<Vector>& vs, std::size_t cap = 32) {
  std::string s;
  for (std::size_t i = 0; i < vs.size() && i < cap; ++i) s += (i ? " " : "") + fmt_vector(vs[i]);
  if (vs.size() > cap) s += " ...";
  return s;
}

std::string basis_text(const Subspace& L) {
  std::vector<Vector> cols;
  for (int j = 0; j < L.rank(); ++j) cols.push_back(L.basis().col(j));
  return cols.empty() ? "{0}" : join_vectors(cols);
}

std::string counterexample_text(const VerificationReport& r) {
  if (r.counterexamples.empty()) return {};
  const auto& c = r.counterexamples.front();
  return fmt_vector(c.a) + "-" + fmt_vector(c.b);
}

// Points of `a` in the ball of `radius` without a partner in `b` within tol, and vice versa.
std::size_t set_mismatch(const PointSet& a, const PointSet& b, double radius, double tol, std::string& witness) {
  std::size_t bad = 0;
  auto one_way = [&](const PointSet& x, const PointSet& y) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto p = x.point(i);
      if (p.norm() > radius) continue;
      if (y.empty() || !y.index().any_within(p, tol)) {
        if (witness.empty()) witness = fmt_vector(p);
        ++bad;
      }
    }
  };
  one_way(a, b);
  one_way(b, a);
  return bad;
}

Plot flat_plot(const PointSet& ps, const std::optional<Subspace>& L) {
  Plot p;
  p.title = ps.label().empty() ? "point set" : ps.label();
  const int d = ps.dim();
  p.points.reserve(ps.size());
  if (d == 1) {
    p.x_label = "x";
    for (std::size_t i = 0; i < ps.size(); ++i) p.points.emplace_back(ps.point(i)(0), 0.0);
  } else if (d == 2) {
    p.x_label = "x1";
    p.y_label = "x2";
    for (std::size_t i = 0; i < ps.size(); ++i) p.points.emplace_back(ps.point(i)(0), ps.point(i)(1));
    if (L && L->rank() == 1) p.line = std::make_pair(L->basis()(0, 0), L->basis()(1, 0));
  } else if (L && L->rank() >= 2) {
    p.x_label = "L coordinate 1";
    p.y_label = "L coordinate 2";
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const Vector c = L->coordinates(ps.point(i));
      p.points.emplace_back(c(0), c(1));
    }
  } else if (L && L->rank() == 1) {
    p.x_label = "L coordinate";
    p.y_label = "distance to L";
    for (std::size_t i = 0; i < ps.size(); ++i)
      p.points.emplace_back(L->coordinates(ps.point(i))(0), L->distance(ps.point(i)));
  } else {
    p.x_label = "x1";
    p.y_label = "x2";
    for (std::size_t i = 0; i < ps.size(); ++i) p.points.emplace_back(ps.point(i)(0), ps.point(i)(1));
  }
  return p;
}

Plot heis_plot(const HeisPointSet& ps) {
  Plot p;
  p.title = ps.label().empty() ? "Heisenberg set" : ps.label();
  p.x_label = "v1";
  p.y_label = "z";
  for (std::size_t i = 0; i < ps.size(); ++i) p.points.emplace_back(ps.v(i)(0), ps.z(i));
  return p;
}

void plot_section(Context& cx) {
  if (!cx.plot) return;
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  for (const auto& [x, y] : cx.plot->points) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  cx.rep.put("plot", "axes", cx.plot->x_label + " / " + cx.plot->y_label);
  cx.rep.put("plot", "points", cx.plot->points.size());
  cx.rep.put("plot", "x_range", "[" + fmt(xmin) + ", " + fmt(xmax) + "]");
  cx.rep.put("plot", "y_range", "[" + fmt(ymin) + ", " + fmt(ymax) + "]");
}

// ------------------------------------------------------------------ abelian

void run_verify(Context& cx, const PointSet& ps) {
  auto& rep = cx.rep;
  const auto disc = check_uniform_discreteness(ps, cx.cfg.tol.geom);
  rep.put("verify", "points", ps.size());
  rep.put("verify", "min_gap", disc.gap);
  rep.check("uniform_discreteness", disc.passed, disc.gap);

  std::optional<TranslationResult> tr;
  try {
    tr = find_translation_set_detailed(ps, translation_options(cx.cfg));
  } catch (const NotApproximateSubgroup& e) {
    rep.put("verify", "translation_set", std::string("none: ") + e.what());
    rep.check("translation_set", false, e.witness().norm(), fmt_vector(e.witness()));
    return;
  } catch (const WindowTooSmall& e) {
    rep.note(std::string("translation set: ") + e.what());
    rep.check("translation_set", false, 0, "window_too_small");
    return;
  }
  const auto& F = tr->F;
  if (tr->shift.size() > 0 && tr->shift.norm() > 0)
    rep.note("re-centred on the point nearest the origin (shift " + fmt_vector(tr->shift) +
             "); the window shrinks by the shift");
  rep.put("verify", "F_size", F.size());
  rep.put("verify", "K", F.K());
  rep.put("verify", "F", join_vectors(F.translates()));
  rep.put("verify", "tested_pairs", tr->tested_pairs);
  rep.put("verify", "distinct_differences", tr->distinct_differences);
  rep.put("verify", "candidates", tr->candidates);
  if (tr->stride > 1) rep.note("difference pairs sampled with stride " + std::to_string(tr->stride));
  rep.check("translation_set", true, static_cast<double>(F.size()));

  const auto inc = check_inclusion(ps, F, cx.cfg.tol.geom);
  rep.put("verify", "inclusion_pairs", inc.tested_pairs);
  rep.check("inclusion", inc.passed, static_cast<double>(inc.failures), counterexample_text(inc));
  const auto a = check_property_A(ps, F.K(), cx.cfg.tol.exact);
  rep.check("property_A", a.passed, static_cast<double>(a.failures), counterexample_text(a));
  const auto b = check_property_B(ps, F.K(), cx.cfg.tol.exact);
  rep.check("property_B", b.passed, static_cast<double>(b.failures), counterexample_text(b));
}

void emit_chain(std::ostringstream& o, std::size_t i, const Chain& c) {
  o << "chain=" << i << " target=" << fmt_vector(c.target) << " length=" << c.points.size()
    << " ok=" << (c.ok ? "true" : "false");
  if (!c.ok) o << " failure=" << c.failure;
  o << '\n';
  for (std::size_t k = 0; k < c.points.size(); ++k)
    o << "point=" << fmt_vector(c.points[k]) << " distance=" << fmt(c.distances[k]) << '\n';
}

void run_analyze(Context& cx, const PointSet& ps, bool with_translation_check) {
  auto& rep = cx.rep;
  const Analysis a = analyze(ps, analysis_options(cx.cfg));
  for (const auto& n : a.notes) rep.note("analysis: " + n);
  if (!a.F) {
    if (with_translation_check) rep.check("translation_set", false, 0, "none");
    rep.check("analysis", false, 0, "no_translation_set");
    cx.plot = flat_plot(ps, std::nullopt);
    return;
  }
  rep.put("analysis", "F_size", a.F->size());
  rep.put("analysis", "K", a.K);
  if (with_translation_check) rep.check("translation_set", true, static_cast<double>(a.F->size()));
  if (!a.L) {
    rep.check("asymptotic_directions", false, 0, "window_too_small");
    cx.plot = flat_plot(ps, std::nullopt);
    return;
  }
  rep.put("analysis", "directions", a.directions->dirs.size());
  rep.put("analysis", "L_rank", static_cast<std::size_t>(a.L->rank()));
  rep.put("analysis", "L_basis", basis_text(*a.L));
  rep.put("analysis", "thickening", a.thickening);
  rep.check("asymptotic_directions", a.L->rank() > 0, a.L->rank());
  rep.check("thickening_bound", a.thickening <= 3 * a.K + cx.cfg.tol.exact, a.thickening,
            a.thickening <= 3 * a.K + cx.cfg.tol.exact ? "" : "3K=" + fmt(3 * a.K));

  if (cx.inst.reference_L && !cx.inst.base && cx.inst.reference_L->ambient_dim() == a.L->ambient_dim()) {
    const auto& ref = *cx.inst.reference_L;
    const double angle = ref.rank() == a.L->rank() ? principal_angle(ref, *a.L) : std::numbers::pi / 2;
    rep.put("analysis", "reference_L", basis_text(ref));
    rep.put("analysis", "reference_angle", angle);
    rep.check("reference_subspace", angle <= 0.01, angle, angle <= 0.01 ? "" : "rank=" + std::to_string(a.L->rank()));
  }

  rep.put("analysis", "R", a.R);
  if (a.density) {
    rep.put("analysis", "density_R_witness", a.density->R_witness);
    rep.put("analysis", "density_targets", a.density->targets);
    rep.check("density_around", a.density->passed, a.density->R_witness);
  }
  if (a.system) {
    rep.put("analysis", "system_size", a.system->ell.size());
    rep.put("analysis", "system_M", a.system->M);
    rep.put("analysis", "system_epsilon", a.system->epsilon);
    rep.put("analysis", "system_T", a.system->T);
  }
  if (a.certification) {
    const auto& c = *a.certification;
    rep.put("analysis", "delta", c.delta);
    rep.put("analysis", "descent_threshold", c.threshold);
    rep.put("analysis", "certified_targets", c.targets);
    rep.put("analysis", "max_chain_length", c.max_chain_length);
    rep.put("analysis", "R_prime", c.R_prime);
    rep.check("certification", c.passed, c.R_prime, c.stall ? fmt_vector(c.stall->target) : "");
    for (std::size_t i = 0; i < c.chains.size(); ++i) emit_chain(cx.chains, i, c.chains[i]);
    if (c.stall) emit_chain(cx.chains, c.chains.size(), *c.stall);
  } else {
    rep.check("certification", false, 0, "not_run");
  }
  cx.plot = flat_plot(ps, a.L);
}

void put_meyer(Report& rep, const std::string& sec, const MeyerReport& m) {
  rep.put(sec, "discrete", m.discrete);
  rep.put(sec, "gap", m.gap);
  rep.put(sec, "gap_half", m.gap_half);
  rep.put(sec, "relatively_dense", m.relatively_dense);
  rep.put(sec, "covering_radius", m.radius);
  rep.put(sec, "density_bound", m.density_bound);
  rep.put(sec, "approx_subgroup", m.approx_subgroup);
  if (m.F) rep.put(sec, "K", m.F->K());
  rep.put(sec, "verdict", m.verdict);
  for (const auto& n : m.notes) rep.note(sec + ": " + n);
}

void run_meyer(Context& cx, const PointSet& ps) {
  auto& rep = cx.rep;
  const auto& cfg = cx.cfg;
  const auto mopt = meyer_options(cfg);
  const double interior = ps.window().interior();

  std::optional<TranslationSet> F;
  try {
    F = find_translation_set(ps, mopt.translation);
  } catch (const std::exception& e) {
    rep.note(std::string("meyer: ") + e.what());
  }
  std::optional<Subspace> L;
  double thick = 0;
  try {
    const auto dirs = asymptotic_directions(ps, 0.5 * interior, 0.05);
    L = span_of_directions(dirs, 0.1);
    thick = thickening_radius(ps, *L);
    rep.put("meyer", "L_rank", static_cast<std::size_t>(L->rank()));
    rep.put("meyer", "L_basis", basis_text(*L));
    rep.put("meyer", "thickening", thick);
  } catch (const WindowTooSmall& e) {
    rep.note(std::string("meyer: ") + e.what());
  }
  cx.plot = flat_plot(ps, L);

  const MeyerReport m = check_meyer(ps, mopt);
  put_meyer(rep, "meyer", m);

  if (!L || L->is_full() || L->rank() == 0) {
    rep.check("meyer_discrete", m.discrete, m.gap);
    rep.check("meyer_relatively_dense", m.relatively_dense, m.radius);
    rep.check("meyer_approx_subgroup", m.approx_subgroup, m.F ? static_cast<double>(m.F->size()) : 0);
    rep.check("meyer", m.verdict, m.verdict ? 1 : 0);
    if (cx.inst.base && cx.inst.extension_R && cx.inst.reference_L) {
      // A generated extension: cutting it back to the strip returns the base.
      const auto cut = restrict_to_strip(ps, *cx.inst.reference_L, *cx.inst.extension_R, false, mopt);
      std::string w;
      const std::size_t bad = set_mismatch(cut.ps, *cx.inst.base, interior, cfg.tol.geom, w);
      rep.put("meyer", "restriction_points", cut.ps.size());
      rep.check("strip_restriction", bad == 0, static_cast<double>(bad), w);
    }
    return;
  }

  // Proper L: the set itself is not relatively dense; exhibit the projection,
  // the missing finite transversal and the extension round trip.
  rep.note("fitted L is proper: the input is not expected to be a Meyer set; its check_meyer result is informational");
  const auto proj = check_projection_meyer(ps, *L, mopt);
  put_meyer(rep, "projection", proj.meyer);
  rep.put("projection", "R", proj.R);
  rep.put("projection", "contained", proj.contained);
  rep.put("projection", "containment_slack", proj.containment_slack);
  rep.check("projection_meyer", proj.meyer.verdict, proj.meyer.gap);
  rep.check("projection_containment", proj.contained, proj.containment_slack);
  if (proj.F_inherited) rep.check("projection_F_inherited", *proj.F_inherited, *proj.F_inherited ? 1 : 0);

  const std::size_t max_F = F ? F->size() : 0;
  const auto tv = check_no_finite_transversal(ps, *L, max_F, std::numeric_limits<double>::infinity(), 1.5,
                                              cfg.tol.geom);
  rep.put("transversal", "count", tv.count);
  rep.put("transversal", "count_half", tv.count_half);
  rep.put("transversal", "growth", tv.growth);
  rep.put("transversal", "finite", !tv.supported);
  if (!tv.supported)
    rep.note("the set meets finitely many translates of L (perpendicular values stop growing)");

  double R = thick;
  if (R <= cfg.tol.geom) {
    R = 1.0;
    rep.note("thickening is zero; the extension uses R = 1");
  }
  const double r_ext = std::sqrt(ps.window().radius() * ps.window().radius() - thick * thick) * (1 - 1e-12);
  if (r_ext <= ps.window().margin()) {
    rep.check("extension_meyer", false, 0, "window_too_small");
    return;
  }
  const Window ext_window(r_ext, ps.window().margin());
  const PointSet ext = gen_meyer_extension(ps, *L, R, ext_window).with_label(ps.label() + " extension");
  rep.put("extension", "R", R);
  rep.put("extension", "window", ext_window.radius());
  rep.put("extension", "points", ext.size());
  const MeyerReport em = check_meyer(ext, mopt);
  put_meyer(rep, "extension", em);
  rep.check("extension_meyer", em.verdict, em.radius);
  const auto cut = restrict_to_strip(ext, *L, R, false, mopt);
  std::string w;
  const std::size_t bad = set_mismatch(cut.ps, ps, ext_window.interior(), cfg.tol.geom, w);
  rep.check("round_trip", bad == 0, static_cast<double>(bad), w);
}

// --------------------------------------------------------------- Heisenberg

void run_heis_subgroup(Context& cx, const HeisPointSet& ps) {
  auto& rep = cx.rep;
  HeisApproxOptions o;
  o.tol = cx.cfg.tol.geom;
  o.seed = cx.cfg.seed;
  const auto r = check_heis_approx_subgroup(ps, o);
  rep.put("heis_subgroup", "points", ps.size());
  rep.put("heis_subgroup", "has_identity", r.has_identity);
  rep.put("heis_subgroup", "symmetric", r.symmetric);
  rep.put("heis_subgroup", "pairs", r.sampled_pairs);
  rep.put("heis_subgroup", "exhaustive", r.exhaustive);
  for (const auto& n : r.report.notes) rep.note("heis_subgroup: " + n);
  rep.check("heis_identity", r.has_identity, r.has_identity ? 1 : 0);
  rep.check("heis_symmetric", r.symmetric, r.symmetric ? 1 : 0, counterexample_text(r.report));
  if (r.F) {
    std::vector<Vector> fs;
    for (const auto& f : r.F->F) fs.push_back(f.flat());
    rep.put("heis_subgroup", "F_size", r.F->F.size());
    rep.put("heis_subgroup", "K", r.F->K);
    rep.put("heis_subgroup", "F", join_vectors(fs));
  }
  rep.check("heis_approx_subgroup", r.report.passed, r.F ? static_cast<double>(r.F->F.size()) : 0,
            counterexample_text(r.report));
}

void run_heis(Context& cx, const HeisPointSet& ps) {
  auto& rep = cx.rep;
  run_heis_subgroup(cx, ps);
  HeisAnalysisOptions o;
  o.tol = cx.cfg.tol.geom;
  o.flat = analysis_options(cx.cfg);
  const HeisAnalysis a = analyze_heis(ps, o);
  for (const auto& n : a.notes) rep.note("dichotomy: " + n);
  rep.put("dichotomy", "route", to_string(a.route));
  rep.put("dichotomy", "L_rank", static_cast<std::size_t>(a.L.rank()));
  rep.put("dichotomy", "L_basis", basis_text(a.L));
  rep.put("dichotomy", "omega_max", a.omega_max);
  rep.put("dichotomy", "projection_gap", a.projection.gap);
  rep.put("dichotomy", "projection_gap_half", a.projection.gap_half);
  rep.put("dichotomy", "approximate_lattice", a.approximate_lattice);

  const double route_code = a.route == HeisCase::Central ? 0 : a.route == HeisCase::Lagrangian ? 1 : 2;
  rep.check("dichotomy", a.passed, route_code);

  if (a.center) {
    rep.put("dichotomy", "center_max_gap", a.center->max_gap);
    rep.put("dichotomy", "center_range", a.center->range);
    rep.put("dichotomy", "center_values", a.center->values);
    rep.check("center_density", a.center->passed, a.center->max_gap);
  }
  if (a.density) {
    rep.put("dichotomy", "density_R_witness", a.density->R_witness);
    rep.put("dichotomy", "density_targets", a.density->targets);
    rep.check("density_around_subgroup", a.density->passed, a.density->R_witness);
  }
  if (a.L_prime) rep.put("dichotomy", "L_prime", basis_text(*a.L_prime));
  if (a.flat) {
    const auto& f = *a.flat;
    for (const auto& n : f.notes) rep.note("flattened: " + n);
    if (f.L) rep.put("dichotomy", "flat_L", basis_text(*f.L));
    rep.put("dichotomy", "flat_K", f.K);
    rep.put("dichotomy", "flat_thickening", f.thickening);
    const double value = f.certification ? f.certification->R_prime : f.density ? f.density->R_witness : 0;
    rep.check("density_around_subgroup", f.passed, value);
  }

  const double ratio = a.projection.gap_half > 0 ? a.projection.gap / a.projection.gap_half : 0;
  if (cx.inst.superset_proxy) {
    rep.note("no finite computation decides that no approximate lattice contains this set; the check reports the "
             "proxy: projection gaps shrink, which no relatively dense superset allows");
    rep.check("no_lattice_superset", !a.projection.passed, ratio);
  } else {
    rep.check("projection_discreteness", a.projection.passed, a.projection.gap,
              a.projection.passed ? "" : "gap_half=" + fmt(a.projection.gap_half));
  }
  cx.plot = heis_plot(ps);
}

// ------------------------------------------------------------------- inputs

bool looks_heis(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("form=", 0) == 0) return true;
  return false;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Window override_window(const Window& file, const RunConfig& c) {
  const double W = c.window ? *c.window : file.radius();
  const double m = c.margin ? *c.margin : std::min(file.margin(), W / 2);
  if (W > file.radius() * (1 + 1e-12))
    throw ConfigError("--window " + fmt(W) + " exceeds the point file window " + fmt(file.radius()));
  if (m < 0 || m >= W) throw ConfigError("margin must satisfy 0 <= margin < window");
  return Window(W, m);
}

Instance load_instance(const RunConfig& c, Report& rep) {
  if (c.points) {
    const std::string text = read_file(*c.points);
    std::istringstream in(text);
    Instance inst;
    inst.name = *c.points;
    if (c.dim) throw ConfigError("--dim applies to generated inputs only");
    if (looks_heis(text)) {
      const auto ps = read_heis_points(in);
      inst.heis = (c.window || c.margin) ? ps.restrict(override_window(ps.window(), c)) : ps;
    } else {
      const auto ps = read_points(in);
      inst.flat = (c.window || c.margin) ? ps.restrict(override_window(ps.window(), c)) : ps;
    }
    return inst;
  }
  SpecFile spec = c.preset ? preset_spec(*c.preset) : SpecFile::load(*c.spec);
  if (c.preset && !spec.has("label")) spec.set("label", *c.preset);
  if (c.dim) {
    const std::string gen = spec.str("generator");
    if (gen == "heis-line" || gen == "heis-coset" || gen == "heis-central" || gen == "cut-project")
      throw ConfigError("--dim does not apply to generator '" + gen + "'");
    if (*c.dim < 1 || *c.dim > 8) throw ConfigError("--dim must be between 1 and 8");
    if (spec.has("direction") || spec.has("basis"))
      throw ConfigError("--dim cannot resize a generator with explicit vectors");
    spec.set("dim", std::to_string(*c.dim));
  }
  for (const auto& e : spec.entries()) rep.config.emplace_back("spec." + e.key, e.value);
  const Window w = spec_window(spec, c.window, c.margin);
  rep.config.emplace_back("window", fmt(w.radius()));
  rep.config.emplace_back("margin", fmt(w.margin()));
  return build_instance(spec, w, c.seed);
}

void validate(const RunConfig& c) {
  bool known = false;
  for (const auto& n : command_names()) known = known || n == c.command;
  if (!known) throw ConfigError("unknown command '" + c.command + "'");
  const int sources = int(c.preset.has_value()) + int(c.spec.has_value()) + int(c.points.has_value());
  if (sources != 1) throw ConfigError("exactly one of --preset, --spec, --points is required");
  if (c.window && (!std::isfinite(*c.window) || *c.window <= 0)) throw ConfigError("--window must be positive");
  if (c.margin && (!std::isfinite(*c.margin) || *c.margin < 0)) throw ConfigError("--margin must be nonnegative");
  if (!(c.tol.geom > 0) || !(c.tol.exact > 0)) throw ConfigError("tolerances must be positive");
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
  if (!out) throw ConfigError("failed writing " + path);
}

void record_config(const RunConfig& c, Report& rep) {
  rep.command = c.command;
  if (c.preset) rep.config.emplace_back("preset", *c.preset);
  if (c.spec) rep.config.emplace_back("spec", *c.spec);
  if (c.points) rep.config.emplace_back("points", *c.points);
  if (c.dim) rep.config.emplace_back("dim", std::to_string(*c.dim));
  rep.config.emplace_back("tol_geom", fmt(c.tol.geom));
  rep.config.emplace_back("tol_exact", fmt(c.tol.exact));
  rep.config.emplace_back("seed", std::to_string(c.seed));
  if (c.out) rep.config.emplace_back("out", *c.out);
  if (c.json) rep.config.emplace_back("json", *c.json);
  if (c.svg) rep.config.emplace_back("svg", *c.svg);
  if (c.emit_chains) rep.config.emplace_back("emit_chains", *c.emit_chains);
}

}  // namespace

RunResult execute(const RunConfig& cfg) {
  RunResult res;
  Report& rep = res.report;
  std::optional<Context> cx;
  try {
    validate(cfg);
    record_config(cfg, rep);
    cx.emplace(Context{cfg, rep, load_instance(cfg, rep), {}, {}});
    if (cfg.points) {
      const auto& w = cx->inst.is_heis() ? cx->inst.heis->window() : cx->inst.flat->window();
      rep.config.emplace_back("window", fmt(w.radius()));
      rep.config.emplace_back("margin", fmt(w.margin()));
    }
    const bool heis = cx->inst.is_heis();
    if (cfg.command == "meyer" && heis) throw ConfigError("meyer needs a point set in R^d");
    if (cfg.command == "heis" && !heis) throw ConfigError("heis needs a Heisenberg point set");
    if (cfg.emit_chains && (heis || (cfg.command != "analyze" && cfg.command != "report")))
      throw ConfigError("--emit-chains applies to analyze and report on point sets in R^d");
  } catch (const ConfigError& e) {
    res.exit_code = 2;
    res.error = e.what();
    return res;
  } catch (const std::invalid_argument& e) {
    res.exit_code = 2;
    res.error = e.what();
    return res;
  }

  const Instance& inst = cx->inst;
  if (inst.is_heis())
    rep.put("input", "group", "heisenberg");
  else
    rep.put("input", "dim", static_cast<std::size_t>(inst.flat->dim()));
  rep.put("input", "label", inst.is_heis() ? inst.heis->label() : inst.flat->label());
  rep.put("input", "points", inst.is_heis() ? inst.heis->size() : inst.flat->size());
  for (const auto& n : inst.notes) rep.note(n);

  try {
    const std::string& cmd = cfg.command;
    if (cmd == "generate") {
      std::ostringstream pts;
      if (inst.is_heis()) {
        write_heis_points(pts, *inst.heis);
        cx->plot = heis_plot(*inst.heis);
      } else {
        write_points(pts, *inst.flat);
        cx->plot = flat_plot(*inst.flat, inst.reference_L);
      }
      rep.check("generate", true, static_cast<double>(inst.is_heis() ? inst.heis->size() : inst.flat->size()));
      if (cfg.out)
        write_file(*cfg.out, pts.str());
      else
        res.points_text = pts.str();
    } else if (inst.is_heis()) {
      if (cmd == "verify") {
        run_heis_subgroup(*cx, *inst.heis);
        cx->plot = heis_plot(*inst.heis);
      } else {
        run_heis(*cx, *inst.heis);
      }
    } else if (cmd == "verify") {
      run_verify(*cx, *inst.flat);
      cx->plot = flat_plot(*inst.flat, inst.reference_L);
    } else if (cmd == "analyze") {
      run_analyze(*cx, *inst.flat, true);
    } else if (cmd == "meyer") {
      run_meyer(*cx, *inst.flat);
    } else {  // report
      run_verify(*cx, *inst.flat);
      run_analyze(*cx, *inst.flat, false);
      auto keep = cx->plot;
      run_meyer(*cx, *inst.flat);
      cx->plot = keep;
    }
  } catch (const ConfigError& e) {
    res.exit_code = 2;
    res.error = e.what();
    return res;
  } catch (const std::exception& e) {
    rep.note(std::string("internal error: ") + e.what());
    rep.check("internal", false, 0);
  }

  plot_section(*cx);
  try {
    if (cfg.svg && cx->plot) write_file(*cfg.svg, render_svg(*cx->plot));
    if (cfg.emit_chains) write_file(*cfg.emit_chains, cx->chains.str());
    if (cfg.json) write_file(*cfg.json, rep.json());
    if (cfg.out && cfg.command != "generate") write_file(*cfg.out, rep.text());
  } catch (const ConfigError& e) {
    res.exit_code = 2;
    res.error = e.what();
    return res;
  }
  res.exit_code = rep.passed() ? 0 : 1;
  return res;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const RunResult r = execute(config);
  if (r.exit_code == 2) {
    err << "error: " << r.error << '\n';
    return 2;
  }
  if (!r.points_text.empty())
    out << r.points_text;
  else
    out << r.report.text();
  return r.exit_code;
}

}  // namespace apx
