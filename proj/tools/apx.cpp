// Command-line front end: flag parsing only; the pipeline lives in apx::run.
#include <iostream>

#include <CLI11.hpp>

#include "apx/cli.hpp"
#include "apx/spec_file.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Approximate subgroups of R^d and the Heisenberg group: generate, verify, analyze"};
  app.require_subcommand(1);
  apx::RunConfig cfg;
  std::string presets;
  for (const auto& n : apx::preset_names()) presets += (presets.empty() ? "" : ", ") + n;

  for (const auto& name : apx::command_names()) {
    static const std::map<std::string, std::string> help = {
        {"generate", "write the point file of an input"},
        {"verify", "translation set, inclusion and properties (A)/(B)"},
        {"analyze", "directions, thickening and density certification"},
        {"meyer", "Meyer checks, projection, extension and restriction"},
        {"heis", "Heisenberg approximate subgroup and dichotomy"},
        {"report", "every check applicable to the input"}};
    auto* sub = app.add_subcommand(name, help.at(name));
    auto* src = sub->add_option("--preset", cfg.preset, "named input: " + presets);
    auto* spec = sub->add_option("--spec", cfg.spec, "key = value spec file");
    auto* pts = sub->add_option("--points", cfg.points, "point file");
    src->excludes(spec)->excludes(pts);
    spec->excludes(pts);
    sub->add_option("--window", cfg.window, "window radius W");
    sub->add_option("--margin", cfg.margin, "boundary margin (default W/4)");
    sub->add_option("--dim", cfg.dim, "ambient dimension for lattice inputs");
    sub->add_option("--tol-geom", cfg.tol.geom, "tolerance for fitted quantities")->capture_default_str();
    sub->add_option("--tol-exact", cfg.tol.exact, "tolerance for algebraic identities")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "seed for random generators and sampling")->capture_default_str();
    sub->add_option("--out", cfg.out, "generate: point file; otherwise the text report");
    sub->add_option("--json", cfg.json, "JSON report path");
    sub->add_option("--svg", cfg.svg, "SVG scatter plot path");
    sub->add_option("--emit-chains", cfg.emit_chains, "certification chains path");
    sub->callback([&cfg, name] { cfg.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  return apx::run(cfg, std::cout, std::cerr);
}
