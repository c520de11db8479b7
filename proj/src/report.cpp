#include "apx/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace apx {

std::string fmt(double x) {
  if (x == 0.0) return "0";
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string fmt_vector(const Eigen::Ref<const Vector>& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v(i));
  return s + ")";
}

Report::Section& Report::section(const std::string& name) {
  for (auto& s : sections)
    if (s.name == name) return s;
  sections.push_back({name, {}});
  return sections.back();
}

void Report::put(const std::string& sec, const std::string& key, const std::string& value) {
  section(sec).entries.emplace_back(key, value);
}
void Report::put(const std::string& sec, const std::string& key, double value) { put(sec, key, fmt(value)); }
void Report::put(const std::string& sec, const std::string& key, std::size_t value) {
  put(sec, key, std::to_string(value));
}
void Report::put(const std::string& sec, const std::string& key, bool value) {
  put(sec, key, std::string(value ? "true" : "false"));
}

void Report::check(std::string name, bool passed, double value, std::string witness) {
  std::replace(witness.begin(), witness.end(), ' ', '_');
  checks.push_back({std::move(name), passed, value, std::move(witness)});
}

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::string Report::summary() const {
  std::string out;
  for (const auto& c : checks) {
    out += "check=" + c.name + " verdict=" + (c.passed ? "pass" : "fail") + " value=" + fmt(c.value);
    if (!c.witness.empty()) out += " witness=" + c.witness;
    out += '\n';
  }
  return out;
}

std::string Report::text() const {
  std::ostringstream o;
  o << "command: " << command << "\n\n[config]\n";
  for (const auto& [k, v] : config) o << k << " = " << v << '\n';
  for (const auto& s : sections) {
    o << "\n[" << s.name << "]\n";
    for (const auto& [k, v] : s.entries) o << k << " = " << v << '\n';
  }
  if (!notes.empty()) {
    o << "\n[notes]\n";
    for (const auto& n : notes) o << "- " << n << '\n';
  }
  o << "\n[summary]\n" << summary();
  o << "overall=" << (passed() ? "pass" : "fail") << '\n';
  return o.str();
}

std::string Report::json() const {
  using J = nlohmann::ordered_json;
  J j;
  j["command"] = command;
  J cfg = J::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  j["config"] = cfg;
  J secs = J::object();
  for (const auto& s : sections) {
    J e = J::object();
    for (const auto& [k, v] : s.entries) e[k] = v;
    secs[s.name] = e;
  }
  j["sections"] = secs;
  J cs = J::array();
  for (const auto& c : checks) {
    J e;
    e["name"] = c.name;
    e["verdict"] = c.passed ? "pass" : "fail";
    e["value"] = fmt(c.value);
    if (!c.witness.empty()) e["witness"] = c.witness;
    cs.push_back(e);
  }
  j["checks"] = cs;
  j["notes"] = notes;
  j["passed"] = passed();
  return j.dump(2) + "\n";
}

std::string render_svg(const Plot& plot) {
  constexpr double size = 600, pad = 50;
  double xmin = -1, xmax = 1, ymin = -1, ymax = 1;
  for (const auto& [x, y] : plot.points) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  // equal aspect
  const double span = std::max(xmax - xmin, ymax - ymin);
  const double cx = (xmin + xmax) / 2, cy = (ymin + ymax) / 2;
  const double scale = (size - 2 * pad) / span;
  auto X = [&](double x) { return size / 2 + (x - cx) * scale; };
  auto Y = [&](double y) { return size / 2 - (y - cy) * scale; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
    << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << pad << "\" y=\"" << pad / 2 << "\" font-family=\"sans-serif\" font-size=\"14\">" << plot.title
    << " (" << plot.points.size() << " points)</text>\n";
  o << "<line x1=\"" << fmt(X(cx - span / 2)) << "\" y1=\"" << fmt(Y(0)) << "\" x2=\"" << fmt(X(cx + span / 2))
    << "\" y2=\"" << fmt(Y(0)) << "\" stroke=\"#bbb\"/>\n";
  o << "<line x1=\"" << fmt(X(0)) << "\" y1=\"" << fmt(Y(cy - span / 2)) << "\" x2=\"" << fmt(X(0)) << "\" y2=\""
    << fmt(Y(cy + span / 2)) << "\" stroke=\"#bbb\"/>\n";
  if (plot.line) {
    const auto [ux, uy] = *plot.line;
    const double t = span;
    o << "<line x1=\"" << fmt(X(-t * ux)) << "\" y1=\"" << fmt(Y(-t * uy)) << "\" x2=\"" << fmt(X(t * ux))
      << "\" y2=\"" << fmt(Y(t * uy)) << "\" stroke=\"#d33\" stroke-width=\"1\"/>\n";
  }
  const double r = plot.points.size() > 20'000 ? 0.6 : 1.6;
  o << "<g fill=\"#14c\">\n";
  for (const auto& [x, y] : plot.points)
    o << "<circle cx=\"" << fmt(X(x)) << "\" cy=\"" << fmt(Y(y)) << "\" r=\"" << r << "\"/>\n";
  o << "</g>\n";
  o << "<text x=\"" << size / 2 << "\" y=\"" << size - 10 << "\" font-family=\"sans-serif\" font-size=\"12\">"
    << plot.x_label << "</text>\n";
  o << "<text x=\"10\" y=\"" << size / 2 << "\" font-family=\"sans-serif\" font-size=\"12\">" << plot.y_label
    << "</text>\n";
  o << "</svg>\n";
  return o.str();
}

}  // namespace apx
