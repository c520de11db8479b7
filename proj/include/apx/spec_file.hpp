#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "apx/geometry.hpp"
#include "apx/heisenberg.hpp"

namespace apx {

/// `key = value` lines; `#` starts a comment, blank lines are skipped.
/// Reals accept decimals, `inf` and `sqrt(x)`; vectors are comma-separated
/// reals and vector lists separate vectors with `;`.
class SpecFile {
 public:
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;  // 0: set programmatically
  };

  static SpecFile parse(std::istream& in, std::string source = "<spec>");
  static SpecFile parse_string(const std::string& text, std::string source = "<spec>");
  static SpecFile load(const std::string& path);

  const std::string& source() const { return source_; }
  const std::vector<Entry>& entries() const { return entries_; }
  bool has(const std::string& key) const;
  /// Line of `key` (0 when absent or set programmatically).
  int line(const std::string& key) const;
  /// Replaces or appends.
  void set(const std::string& key, const std::string& value);

  std::string str(const std::string& key) const;
  std::string str(const std::string& key, const std::string& fallback) const;
  double real(const std::string& key) const;
  double real(const std::string& key, double fallback) const;
  long long integer(const std::string& key, long long fallback) const;
  Vector vector(const std::string& key) const;
  std::vector<Vector> vectors(const std::string& key) const;

  /// Throws ConfigError naming the first key outside `known`.
  void require_known(const std::set<std::string>& known) const;

 private:
  const Entry* find(const std::string& key) const;
  [[noreturn]] void fail(const Entry& e, const std::string& what) const;

  std::string source_;
  std::vector<Entry> entries_;
};

/// Parses one real token: decimal, `inf`, `-inf` or `[+-]sqrt(<decimal>)`.
std::optional<double> parse_real_token(const std::string& token);

std::vector<std::string> preset_names();
/// Spec text of a named preset. Throws ConfigError for unknown names.
std::string preset_text(const std::string& name);
SpecFile preset_spec(const std::string& name);

/// A generated or loaded point set together with what its generator knows.
struct Instance {
  std::string name;
  std::optional<PointSet> flat;
  std::optional<HeisPointSet> heis;
  // Subspace built into the generator (strip direction, full lattice span).
  std::optional<Subspace> reference_L;
  // Meyer extensions: the base set, the subspace and radius used.
  std::optional<PointSet> base;
  std::optional<double> extension_R;
  bool superset_proxy = false;  // report the no-approximate-lattice-superset proxy
  std::vector<std::string> notes;

  bool is_heis() const { return heis.has_value(); }
};

/// Builds the instance described by `spec` on `window`. `seed` drives the
/// random generators. Throws ConfigError with the offending line.
Instance build_instance(const SpecFile& spec, Window window, std::uint64_t seed);

/// Window of a spec: `window` and `margin` keys, margin defaulting to W/4.
Window spec_window(const SpecFile& spec, std::optional<double> radius, std::optional<double> margin);

}  // namespace apx
