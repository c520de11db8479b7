#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "apx/geometry.hpp"

namespace apx {

struct Check {
  std::string name;
  bool passed = false;
  double value = 0;
  std::string witness;  // empty: none
};

/// Ordered, deterministic run report. Sections keep insertion order.
class Report {
 public:
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
  };

  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<Section> sections;
  std::vector<Check> checks;
  std::vector<std::string> notes;

  Section& section(const std::string& name);
  void put(const std::string& section_name, const std::string& key, const std::string& value);
  void put(const std::string& section_name, const std::string& key, double value);
  void put(const std::string& section_name, const std::string& key, std::size_t value);
  void put(const std::string& section_name, const std::string& key, bool value);
  void put(const std::string& section_name, const std::string& key, const char* value) {
    put(section_name, key, std::string(value));
  }
  void check(std::string name, bool passed, double value, std::string witness = {});
  void note(std::string text) { notes.push_back(std::move(text)); }

  bool passed() const;
  /// One `check=<name> verdict=<pass|fail> value=<decimal> [witness=<w>]` line per check.
  std::string summary() const;
  std::string text() const;
  std::string json() const;
};

/// Compact decimal (10 significant digits) used by reports.
std::string fmt(double x);
/// `(x1,x2,...)` without spaces so it survives as one summary token.
std::string fmt_vector(const Eigen::Ref<const Vector>& v);

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<std::pair<double, double>> points;
  // Optional line through the origin along this unit direction.
  std::optional<std::pair<double, double>> line;
};

std::string render_svg(const Plot& plot);

}  // namespace apx
