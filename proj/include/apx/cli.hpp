#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "apx/geometry.hpp"
#include "apx/report.hpp"

namespace apx {

struct RunConfig {
  std::string command;  // generate | verify | analyze | meyer | heis | report
  // exactly one input source
  std::optional<std::string> preset;
  std::optional<std::string> spec;
  std::optional<std::string> points;
  std::optional<double> window;
  std::optional<double> margin;
  std::optional<int> dim;
  Tolerances tol{};
  std::uint64_t seed = 1;
  // outputs
  std::optional<std::string> out;  // generate: point file; otherwise the text report
  std::optional<std::string> json;
  std::optional<std::string> svg;
  std::optional<std::string> emit_chains;
};

const std::vector<std::string>& command_names();

struct RunResult {
  int exit_code = 0;  // 0 pass, 1 a check failed, 2 configuration error
  Report report;
  std::string error;         // configuration error message (exit 2)
  std::string points_text;   // generate without --out: the point file
};

/// Runs the pipeline and writes the requested artifacts.
RunResult execute(const RunConfig& config);

/// execute() plus console output: the text report (or point file) on `out`,
/// diagnostics on `err`. Returns the exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace apx
