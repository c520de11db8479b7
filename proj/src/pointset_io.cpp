#include "apx/pointset_io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "apx/errors.hpp"

namespace apx {

std::string format_real(double x) {
  if (x == 0.0) return "0";  // also folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::map<std::string, std::string> parse_header(const std::string& line, int line_no) {
  std::map<std::string, std::string> kv;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos >= line.size()) break;
    const std::size_t eq = line.find('=', pos);
    if (eq == std::string::npos) throw ConfigError("expected key=value in header", line_no);
    const std::string key = line.substr(pos, eq - pos);
    if (key.empty() || key.find(' ') != std::string::npos) throw ConfigError("malformed header key", line_no);
    if (key == "label") {
      kv[key] = line.substr(eq + 1);
      break;
    }
    std::size_t end = line.find_first_of(" \t", eq + 1);
    if (end == std::string::npos) end = line.size();
    kv[key] = line.substr(eq + 1, end - eq - 1);
    pos = end;
  }
  return kv;
}

std::vector<double> parse_reals(const std::string& line, int line_no, int expected) {
  std::vector<double> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) {
    double v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
      throw ConfigError("not a number: '" + tok + "'", line_no);
    out.push_back(v);
  }
  if (expected >= 0 && static_cast<int>(out.size()) != expected)
    throw ConfigError("expected " + std::to_string(expected) + " coordinates, got " + std::to_string(out.size()),
                      line_no);
  return out;
}

void write_points(std::ostream& out, const PointSet& ps) {
  out << "dim=" << ps.dim() << " window=" << format_real(ps.window().radius())
      << " margin=" << format_real(ps.window().margin()) << " label=" << ps.label() << '\n';
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto p = ps.point(i);
    for (int a = 0; a < ps.dim(); ++a) out << (a ? " " : "") << format_real(p(a));
    out << '\n';
  }
}

namespace {

double header_real(const std::map<std::string, std::string>& kv, const std::string& key, int line_no) {
  auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError("header is missing '" + key + "'", line_no);
  return parse_reals(it->second, line_no, 1)[0];
}

}  // namespace

PointSet read_points(std::istream& in) {
  std::string line;
  int line_no = 0;
  std::map<std::string, std::string> kv;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    kv = parse_header(line, line_no);
    break;
  }
  if (kv.empty()) throw ConfigError("point file has no header");
  const int header_line = line_no;
  const double dim_real = header_real(kv, "dim", header_line);
  const int dim = static_cast<int>(dim_real);
  if (dim < 1 || dim != dim_real) throw ConfigError("dim must be a positive integer", header_line);
  const double radius = header_real(kv, "window", header_line);
  const double margin = kv.count("margin") ? header_real(kv, "margin", header_line) : 0.0;
  std::vector<double> flat;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    const auto xs = parse_reals(line, line_no, dim);
    flat.insert(flat.end(), xs.begin(), xs.end());
  }
  try {
    return PointSet(dim, std::move(flat), Window(radius, margin), kv.count("label") ? kv["label"] : "");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void save_points(const std::string& path, const PointSet& ps) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  write_points(out, ps);
}

PointSet load_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return read_points(in);
}

}  // namespace apx
