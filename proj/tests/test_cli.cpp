#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "apx/cli.hpp"
#include "apx/errors.hpp"
#include "apx/pointset_io.hpp"
#include "apx/report.hpp"
#include "apx/spec_file.hpp"

using namespace apx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "apx_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig preset_run(const std::string& cmd, const std::string& preset) {
  RunConfig c;
  c.command = cmd;
  c.preset = preset;
  return c;
}

const Check* find_check(const Report& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("real tokens") {
  CHECK(parse_real_token("1.5") == 1.5);
  CHECK(parse_real_token(" -2 ") == -2);
  CHECK(parse_real_token("sqrt(3)") == std::sqrt(3.0));
  CHECK(parse_real_token("-sqrt(5)") == -std::sqrt(5.0));
  CHECK(std::isinf(*parse_real_token("inf")));
  CHECK_FALSE(parse_real_token("1.5x"));
  CHECK_FALSE(parse_real_token("sqrt(-1)"));
  CHECK_FALSE(parse_real_token(""));
}

TEST_CASE("spec file parsing") {
  const auto s = SpecFile::parse_string("# comment\n\ngenerator = strip\ndirection = 1, sqrt(3) ; 0,1  # two\nwidth=0.5\n");
  CHECK(s.str("generator") == "strip");
  CHECK(s.real("width") == 0.5);
  const auto vs = s.vectors("direction");
  REQUIRE(vs.size() == 2);
  CHECK(vs[0](1) == std::sqrt(3.0));
  CHECK(vs[1](0) == 0);
  CHECK(s.real("missing", 7.0) == 7.0);

  auto line_of = [](const std::string& text) {
    try {
      const auto sp = SpecFile::parse_string(text);
      build_instance(sp, Window(10, 2), 1);
    } catch (const ConfigError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("generator = strip\nwidth\n") == 2);
  CHECK(line_of("generator = strip\nwidth = 1\nwidth = 2\n") == 3);
  CHECK(line_of("generator = strip\ndirection = 1, x\n") == 2);
  CHECK(line_of("generator = lattice\n\nbogus = 1\n") == 3);
  CHECK(line_of("generator = strip\ndirection = 1,0\nwidth = -1\n") == 3);
  CHECK(line_of("generator = nothing\n") == 1);
  CHECK(line_of("generator = lattice\nwindow = -3\n") == -1);  // window is read by spec_window
  try {
    spec_window(SpecFile::parse_string("generator = lattice\nwindow = 5\nmargin = 9\n"), std::nullopt, std::nullopt);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("every preset builds") {
  for (const auto& name : preset_names()) {
    const auto spec = preset_spec(name);
    const auto inst = build_instance(spec, spec_window(spec, 10.0, std::nullopt), 3);
    CHECK((inst.flat.has_value() != inst.heis.has_value()));
    CHECK((inst.is_heis() ? inst.heis->size() : inst.flat->size()) > 0);
  }
  CHECK_THROWS_AS(preset_spec("nope"), ConfigError);
}

TEST_CASE("report formats") {
  Report r;
  r.command = "verify";
  r.config.emplace_back("preset", "zd");
  r.put("sec", "x", 0.5);
  r.check("alpha", true, 1.25);
  r.check("beta", false, 3, "(1,2) (3,4)");
  CHECK(r.summary() ==
        "check=alpha verdict=pass value=1.25\ncheck=beta verdict=fail value=3 witness=(1,2)_(3,4)\n");
  CHECK_FALSE(r.passed());
  CHECK(r.text().find("[sec]\nx = 0.5\n") != std::string::npos);
  CHECK(r.json().find("\"verdict\": \"fail\"") != std::string::npos);
  Plot p{"t", "x", "y", {{0, 0}, {1, 1}}, std::make_pair(1.0, 0.0)};
  const auto svg = render_svg(p);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("<circle") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(execute(preset_run("verify", "zd")).exit_code == 0);
  CHECK(execute(preset_run("verify", "perturbed")).exit_code == 1);
  CHECK(execute(preset_run("heis", "zd")).exit_code == 2);
  CHECK(execute(preset_run("meyer", "example-2.9")).exit_code == 2);
  RunConfig none;
  none.command = "verify";
  CHECK(execute(none).exit_code == 2);
  RunConfig two = preset_run("verify", "zd");
  two.spec = "x.spec";
  CHECK(execute(two).exit_code == 2);
  RunConfig bad_window = preset_run("verify", "zd");
  bad_window.window = -1;
  CHECK(execute(bad_window).exit_code == 2);

  const auto bad = scratch("bad.spec");
  std::ofstream(bad) << "generator = strip\ndirection = 1, sqrt(3)\nwidth = wide\n";
  RunConfig c;
  c.command = "analyze";
  c.spec = bad.string();
  const auto r = execute(c);
  CHECK(r.exit_code == 2);
  CHECK(r.error.find("line 3") != std::string::npos);
}

TEST_CASE("verify zd in dimension 3") {
  RunConfig c = preset_run("verify", "zd");
  c.dim = 3;
  c.window = 12;
  const auto r = execute(c);
  CHECK(r.exit_code == 0);
  const Check* t = find_check(r.report, "translation_set");
  REQUIRE(t);
  CHECK(t->value == 1);
}

TEST_CASE("analyze example-2.6") {
  RunConfig c = preset_run("analyze", "example-2.6");
  c.window = 100;
  const auto r = execute(c);
  CHECK(r.exit_code == 0);
  const Check* ref = find_check(r.report, "reference_subspace");
  REQUIRE(ref);
  CHECK(ref->value <= 0.01);
  const Check* d = find_check(r.report, "density_around");
  REQUIRE(d);
  CHECK(d->passed);
}

TEST_CASE("heis example-2.8") {
  RunConfig c = preset_run("heis", "example-2.8");
  c.window = 30;
  const auto r = execute(c);
  CHECK(r.exit_code == 1);
  const Check* p = find_check(r.report, "projection_discreteness");
  REQUIRE(p);
  CHECK_FALSE(p->passed);
  const Check* d = find_check(r.report, "density_around_subgroup");
  REQUIRE(d);
  CHECK(d->passed);
}

TEST_CASE("artifacts and point-file input") {
  const auto pts = scratch("strip.pts");
  RunConfig g = preset_run("generate", "example-2.6");
  g.window = 30;
  g.out = pts.string();
  REQUIRE(execute(g).exit_code == 0);
  const auto ps = load_points(pts.string());
  CHECK(ps.window().radius() == 30);

  RunConfig v;
  v.command = "analyze";
  v.points = pts.string();
  v.json = scratch("strip.json").string();
  v.svg = scratch("strip.svg").string();
  v.emit_chains = scratch("strip.chains").string();
  const auto r = execute(v);
  CHECK(r.exit_code == 0);
  CHECK(slurp(*v.json).find("\"checks\"") != std::string::npos);
  CHECK(slurp(*v.svg).find("</svg>") != std::string::npos);
  CHECK(slurp(*v.emit_chains).rfind("chain=0", 0) == 0);

  RunConfig too_big = v;
  too_big.window = 31;
  CHECK(execute(too_big).exit_code == 2);

  const auto hp = scratch("heis.pts");
  RunConfig gh = preset_run("generate", "example-2.9");
  gh.window = 6;
  gh.out = hp.string();
  REQUIRE(execute(gh).exit_code == 0);
  RunConfig vh;
  vh.command = "verify";
  vh.points = hp.string();
  CHECK(execute(vh).exit_code == 0);
}

TEST_CASE("determinism") {
  for (const std::string preset : {"perturbed", "example-2.9", "meyer-ext"}) {
    RunConfig c = preset_run("report", preset);
    c.seed = 42;
    const auto a = execute(c), b = execute(c);
    CHECK(a.report.summary() == b.report.summary());
    CHECK(a.report.json() == b.report.json());
    CHECK(a.report.text() == b.report.text());
  }
}
