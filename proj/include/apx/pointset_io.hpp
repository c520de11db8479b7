#pragma once

#include <iosfwd>
#include <map>
#include <vector>
#include <string>

#include "apx/geometry.hpp"

namespace apx {

/// Header line `dim=<d> window=<W> margin=<m> label=<text>` followed by one
/// point per line, 17 significant digits. Blank lines and `#` comments are
/// ignored on input.
void write_points(std::ostream& out, const PointSet& ps);
PointSet read_points(std::istream& in);

void save_points(const std::string& path, const PointSet& ps);
PointSet load_points(const std::string& path);

/// 17 significant digits: exact round trip for doubles.
std::string format_real(double x);

/// Splits a `key=value` header line. `label=` swallows the rest of the line.
std::map<std::string, std::string> parse_header(const std::string& line, int line_no);

/// Parses whitespace-separated decimals of a point line; `expected` < 0 skips the count check.
std::vector<double> parse_reals(const std::string& line, int line_no, int expected);

}  // namespace apx
