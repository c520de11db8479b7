#include "apx/spec_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "apx/errors.hpp"
#include "apx/generators.hpp"

namespace apx {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.push_back({});
  return out;
}

bool valid_key(const std::string& k) {
  return !k.empty() && std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

}  // namespace

std::optional<double> parse_real_token(const std::string& raw) {
  std::string t = trim(raw);
  if (t.empty()) return std::nullopt;
  double sign = 1;
  if (t[0] == '+' || t[0] == '-') {
    if (t[0] == '-') sign = -1;
    t = t.substr(1);
  }
  if (t == "inf") return sign * std::numeric_limits<double>::infinity();
  if (t.rfind("sqrt(", 0) == 0 && t.back() == ')') {
    const auto inner = parse_real_token(t.substr(5, t.size() - 6));
    if (!inner || *inner < 0 || !std::isfinite(*inner)) return std::nullopt;
    return sign * std::sqrt(*inner);
  }
  double x = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(x)) return std::nullopt;
  return sign * x;
}

SpecFile SpecFile::parse(std::istream& in, std::string source) {
  SpecFile s;
  s.source_ = std::move(source);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value' in " + s.source_, no);
    Entry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), no};
    if (!valid_key(e.key)) throw ConfigError("invalid key '" + e.key + "' in " + s.source_, no);
    if (e.value.empty()) throw ConfigError("empty value for '" + e.key + "' in " + s.source_, no);
    if (const Entry* prev = s.find(e.key))
      throw ConfigError("duplicate key '" + e.key + "' (first on line " + std::to_string(prev->line) + ")", no);
    s.entries_.push_back(std::move(e));
  }
  return s;
}

SpecFile SpecFile::parse_string(const std::string& text, std::string source) {
  std::istringstream in(text);
  return parse(in, std::move(source));
}

SpecFile SpecFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spec file " + path);
  return parse(in, path);
}

const SpecFile::Entry* SpecFile::find(const std::string& key) const {
  for (const auto& e : entries_)
    if (e.key == key) return &e;
  return nullptr;
}

void SpecFile::fail(const Entry& e, const std::string& what) const {
  throw ConfigError(source_ + ": '" + e.key + "': " + what, e.line);
}

bool SpecFile::has(const std::string& key) const { return find(key) != nullptr; }

int SpecFile::line(const std::string& key) const {
  const Entry* e = find(key);
  return e ? e->line : 0;
}

void SpecFile::set(const std::string& key, const std::string& value) {
  for (auto& e : entries_)
    if (e.key == key) {
      e.value = value;
      e.line = 0;
      return;
    }
  entries_.push_back({key, value, 0});
}

std::string SpecFile::str(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) throw ConfigError(source_ + ": missing required key '" + key + "'");
  return e->value;
}

std::string SpecFile::str(const std::string& key, const std::string& fallback) const {
  const Entry* e = find(key);
  return e ? e->value : fallback;
}

double SpecFile::real(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) throw ConfigError(source_ + ": missing required key '" + key + "'");
  const auto x = parse_real_token(e->value);
  if (!x) fail(*e, "not a real number: " + e->value);
  return *x;
}

double SpecFile::real(const std::string& key, double fallback) const { return has(key) ? real(key) : fallback; }

long long SpecFile::integer(const std::string& key, long long fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  long long v = 0;
  const auto& s = e->value;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail(*e, "not an integer: " + s);
  return v;
}

Vector SpecFile::vector(const std::string& key) const {
  const auto vs = vectors(key);
  if (vs.size() != 1) fail(*find(key), "expected a single vector");
  return vs[0];
}

std::vector<Vector> SpecFile::vectors(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) throw ConfigError(source_ + ": missing required key '" + key + "'");
  std::vector<Vector> out;
  for (const auto& group : split(e->value, ';')) {
    const auto toks = split(group, ',');
    Vector v(static_cast<Eigen::Index>(toks.size()));
    for (std::size_t i = 0; i < toks.size(); ++i) {
      const auto x = parse_real_token(toks[i]);
      if (!x || !std::isfinite(*x)) fail(*e, "bad vector component '" + toks[i] + "'");
      v(static_cast<Eigen::Index>(i)) = *x;
    }
    out.push_back(std::move(v));
  }
  for (const auto& v : out)
    if (v.size() != out[0].size()) fail(*e, "vectors of different lengths");
  return out;
}

void SpecFile::require_known(const std::set<std::string>& known) const {
  for (const auto& e : entries_)
    if (!known.count(e.key)) fail(e, "unknown key for this generator");
}

// ---------------------------------------------------------------------------

namespace {

const std::map<std::string, std::string>& presets() {
  static const std::map<std::string, std::string> p = {
      {"example-2.6",
       "generator = strip\ndim = 2\ndirection = 1, sqrt(3)\nwidth = 1\nwindow = 50\n"},
      {"fibonacci",
       "generator = cut-project\ndim = 2\nphysical = 1, 1.6180339887498949\ninternal_radius = 1\nwindow = 100\n"},
      {"zd", "generator = lattice\ndim = 2\nwindow = 20\n"},
      {"meyer-ext",
       "generator = meyer-ext\ndim = 2\ndirection = 1, sqrt(3)\nwidth = 1\nradius = 1\nwindow = 30\n"},
      {"z-line", "generator = strip\ndim = 2\ndirection = 1, 0\nwidth = 0\nwindow = 40\n"},
      {"perturbed", "generator = perturbed\ndim = 2\namplitude = 0.3\nwindow = 20\n"},
      {"cloud", "generator = cloud\ndim = 2\ncount = 50\nwindow = 20\n"},
      {"example-2.8", "generator = heis-line\nalpha = sqrt(5)\nbeta = sqrt(3)\nwindow = 30\n"},
      {"example-2.9", "generator = heis-coset\nalpha = sqrt(5)\nwindow = 12\n"},
      {"prop-2.10", "generator = heis-line\nalpha = sqrt(5)\nbeta = sqrt(3)\nwindow = 30\nsuperset_proxy = 1\n"},
      {"central", "generator = heis-central\nn = 1\nspacing = 1\nwindow = 20\n"},
  };
  return p;
}

[[noreturn]] void bad(const SpecFile& s, const std::string& key, const std::string& what) {
  throw ConfigError(s.source() + ": '" + key + "' " + what, s.line(key));
}

const std::set<std::string> kCommon = {"generator", "label", "window", "margin", "seed"};

std::set<std::string> with_common(std::initializer_list<std::string> extra) {
  std::set<std::string> s = kCommon;
  s.insert(extra.begin(), extra.end());
  return s;
}

int spec_dim(const SpecFile& s) {
  const long long d = s.integer("dim", 2);
  if (d < 1 || d > 8) bad(s, "dim", "must be between 1 and 8");
  return static_cast<int>(d);
}

LatticeSpec spec_lattice(const SpecFile& s, int dim) {
  LatticeSpec lat;
  if (s.has("basis")) {
    const auto gens = s.vectors("basis");
    if (static_cast<int>(gens.size()) != dim || gens[0].size() != dim)
      bad(s, "basis", "needs " + std::to_string(dim) + " vectors of length " + std::to_string(dim));
    lat.basis.resize(dim, dim);
    for (int j = 0; j < dim; ++j) lat.basis.col(j) = gens[static_cast<std::size_t>(j)];
  } else {
    lat = LatticeSpec::cubic(dim, s.real("spacing", 1.0));
  }
  try {
    lat.validate();
  } catch (const std::exception& e) {
    throw ConfigError(s.source() + ": " + e.what(), s.line("basis"));
  }
  return lat;
}

Subspace spec_subspace(const SpecFile& s, const std::string& key, int dim) {
  const auto gens = s.vectors(key);
  for (const auto& g : gens)
    if (g.size() != dim) bad(s, key, "vectors must have length " + std::to_string(dim));
  const Subspace L = Subspace::span(gens, dim);
  if (L.rank() == 0) bad(s, key, "spans the zero subspace");
  return L;
}

double positive(const SpecFile& s, const std::string& key, double fallback, bool allow_zero = false) {
  const double x = s.real(key, fallback);
  if (std::isnan(x) || x < 0 || (!allow_zero && x == 0))
    bad(s, key, std::string("must be ") + (allow_zero ? "nonnegative" : "positive"));
  return x;
}

PointSet random_cloud(int dim, std::size_t count, Window window, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vector> pts;
  pts.push_back(Vector::Zero(dim));
  while (pts.size() < count) {
    Vector v(dim);
    for (int a = 0; a < dim; ++a) v(a) = u(rng);
    if (v.norm() <= 1.0) pts.push_back(v * window.radius());
  }
  return PointSet::from_points(pts, window);
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : presets()) out.push_back(k);
  return out;
}

std::string preset_text(const std::string& name) {
  const auto it = presets().find(name);
  if (it == presets().end()) {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
  }
  return it->second;
}

SpecFile preset_spec(const std::string& name) { return SpecFile::parse_string(preset_text(name), "preset " + name); }

Window spec_window(const SpecFile& spec, std::optional<double> radius, std::optional<double> margin) {
  const double W = radius ? *radius : spec.real("window", 50.0);
  if (!std::isfinite(W) || W <= 0) throw ConfigError("window must be a positive number", radius ? 0 : spec.line("window"));
  const double m = margin ? *margin : spec.real("margin", W / 4);
  if (!std::isfinite(m) || m < 0 || m >= W)
    throw ConfigError("margin must satisfy 0 <= margin < window", margin ? 0 : spec.line("margin"));
  return Window(W, m);
}

Instance build_instance(const SpecFile& s, Window window, std::uint64_t seed) {
  Instance inst;
  const std::string gen = s.str("generator");
  inst.name = s.str("label", gen);
  const std::string label = inst.name;

  if (gen == "lattice") {
    s.require_known(with_common({"dim", "basis", "spacing"}));
    const int d = spec_dim(s);
    inst.flat = gen_lattice(spec_lattice(s, d), window).with_label(label);
    inst.reference_L = Subspace::full(d);
  } else if (gen == "strip") {
    s.require_known(with_common({"dim", "basis", "spacing", "direction", "width"}));
    const int d = spec_dim(s);
    const Subspace L = spec_subspace(s, "direction", d);
    inst.flat = gen_strip(spec_lattice(s, d), L, positive(s, "width", 1.0, true), window).with_label(label);
    inst.reference_L = L;
  } else if (gen == "cut-project") {
    s.require_known(with_common({"dim", "basis", "spacing", "physical", "internal_radius"}));
    const int d = spec_dim(s);
    CutProjectSpec cp{spec_lattice(s, d), spec_subspace(s, "physical", d), positive(s, "internal_radius", 1.0)};
    if (cp.physical.is_full()) bad(s, "physical", "must span a proper subspace");
    inst.flat = gen_cut_project(cp, window).with_label(label);
    inst.reference_L = Subspace::full(cp.physical.rank());
  } else if (gen == "meyer-ext") {
    s.require_known(with_common({"dim", "basis", "spacing", "direction", "width", "radius", "subspace"}));
    const int d = spec_dim(s);
    const Subspace strip_L = spec_subspace(s, "direction", d);
    const Subspace L = s.has("subspace") ? spec_subspace(s, "subspace", d) : strip_L;
    const double width = positive(s, "width", 1.0, true);
    const double R = positive(s, "radius", 1.0);
    // The extension at radius W draws on base points up to sqrt(W^2 + width^2).
    const double base_r = std::hypot(window.radius(), width) + 1.0;
    const PointSet src = gen_strip(spec_lattice(s, d), strip_L, width, Window(base_r, base_r - window.interior()));
    inst.base = src.restrict(window).with_label(label + " base");
    inst.flat = gen_meyer_extension(src, L, R, window).with_label(label);
    inst.reference_L = L;
    inst.extension_R = R;
  } else if (gen == "perturbed") {
    s.require_known(with_common({"dim", "basis", "spacing", "amplitude"}));
    const int d = spec_dim(s);
    const double amp = positive(s, "amplitude", 0.3, true);
    const PointSet base = gen_lattice(spec_lattice(s, d), window);
    inst.flat = gen_perturbed(base, amp, static_cast<std::uint64_t>(s.integer("seed", static_cast<long long>(seed))))
                    .with_label(label);
  } else if (gen == "cloud") {
    s.require_known(with_common({"dim", "count"}));
    const long long count = s.integer("count", 50);
    if (count < 1 || count > 10'000'000) bad(s, "count", "out of range");
    inst.flat = random_cloud(spec_dim(s), static_cast<std::size_t>(count), window,
                             static_cast<std::uint64_t>(s.integer("seed", static_cast<long long>(seed))))
                    .with_label(label);
  } else if (gen == "heis-line") {
    s.require_known(with_common({"alpha", "beta", "superset_proxy"}));
    const double a = s.real("alpha", std::sqrt(5.0)), b = s.real("beta", std::sqrt(3.0));
    if (!std::isfinite(a) || !std::isfinite(b) || a == 0 || b == 0)
      bad(s, a == 0 || !std::isfinite(a) ? "alpha" : "beta", "must be finite and nonzero");
    inst.heis = gen_heis_line(window, a, b).with_label(label);
    inst.superset_proxy = s.integer("superset_proxy", 0) != 0;
  } else if (gen == "heis-coset") {
    s.require_known(with_common({"alpha"}));
    const double a = s.real("alpha", std::sqrt(5.0));
    if (!std::isfinite(a)) bad(s, "alpha", "must be finite");
    inst.heis = gen_heis_coset_lattice(window, a).with_label(label);
  } else if (gen == "heis-central") {
    s.require_known(with_common({"n", "spacing"}));
    const long long n = s.integer("n", 1);
    if (n < 1 || n > 4) bad(s, "n", "must be between 1 and 4");
    inst.heis = gen_heis_central(window, static_cast<int>(n), positive(s, "spacing", 1.0)).with_label(label);
  } else {
    bad(s, "generator", "names an unknown generator: " + gen);
  }
  return inst;
}

}  // namespace apx
