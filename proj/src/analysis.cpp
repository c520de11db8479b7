#include "apx/analysis.hpp"

#include <algorithm>
#include <sstream>

#include "apx/errors.hpp"

namespace apx {

Analysis analyze(const PointSet& ps, const AnalysisOptions& opt) {
  Analysis a;
  try {
    a.F = find_translation_set(ps, opt.translation);
    a.K = a.F->K();
  } catch (const NotApproximateSubgroup& e) {
    a.notes.push_back(std::string("translation set: ") + e.what());
    return a;
  }

  const double interior = ps.window().interior();
  try {
    a.directions = asymptotic_directions(ps, opt.r_min_fraction * interior, opt.cluster_tol);
  } catch (const WindowTooSmall& e) {
    a.notes.push_back(std::string("directions: ") + e.what());
    return a;
  }
  a.L = span_of_directions(*a.directions, opt.rank_tol);
  a.thickening = thickening_radius(ps, *a.L);
  a.R = opt.R > 0 ? opt.R : interior / 4;
  a.density = check_relative_density_around(ps, *a.L, a.R);

  const double M = opt.M > 0 ? opt.M : interior / 4;
  try {
    a.system = find_well_spread_system(ps, *a.L, M, a.K, opt.system);
    a.certification = certify_density(ps, *a.L, *a.system, a.R, opt.certify);
  } catch (const WindowTooSmall& e) {
    a.notes.push_back(std::string("certification: ") + e.what());
    return a;
  }
  a.passed = a.density->passed && a.certification->passed;
  return a;
}

}  // namespace apx
