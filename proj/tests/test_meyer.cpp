#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "apx/generators.hpp"
#include "apx/meyer.hpp"
#include "apx/schreiber.hpp"
#include "oracles.hpp"

using namespace apx;
using oracle::v1;
using oracle::v2;

namespace {

const double kSqrt3 = std::sqrt(3.0);
const double kPhi = (1 + std::sqrt(5.0)) / 2;

Subspace line(double x, double y) { return Subspace::span({v2(x, y)}, 2); }

PointSet z2(double w, double m = 0) { return gen_lattice(LatticeSpec::cubic(2), Window(w, m)); }

PointSet strip(double w, double m = 0) {
  return gen_strip(LatticeSpec::cubic(2), line(1, kSqrt3), 1.0, Window(w, m));
}

PointSet axis(double w, double m = 0) { return gen_strip(LatticeSpec::cubic(2), line(1, 0), 0.0, Window(w, m)); }

using Key = std::pair<long long, long long>;
Key key(const Eigen::Ref<const Vector>& p) { return {std::llround(p(0) * 1e6), std::llround(p(1) * 1e6)}; }

std::set<Key> keys_within(const PointSet& ps, double r) {
  std::set<Key> out;
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (ps.point(i).norm() <= r) out.insert(key(ps.point(i)));
  return out;
}

std::set<Key> keys_of(const std::vector<Vector>& pts, double r) {
  std::set<Key> out;
  for (const auto& p : pts)
    if (p.norm() <= r) out.insert(key(p));
  return out;
}

void check_conjunction(const MeyerReport& r) {
  CHECK(r.verdict == (r.discrete && r.relatively_dense && r.approx_subgroup));
}

}  // namespace

TEST_CASE("Z^2 is a Meyer set") {
  const auto r = check_meyer(z2(20, 5));
  check_conjunction(r);
  CHECK(r.verdict);
  CHECK(r.gap == doctest::Approx(1.0));
  CHECK(r.radius == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-9));
  REQUIRE(r.F);
  CHECK(r.F->K() == 0);
}

TEST_CASE("Fibonacci model set is a Meyer set") {
  const auto ps = gen_cut_project({LatticeSpec::cubic(2), line(1, kPhi), 1.0}, Window(200, 50));
  const auto r = check_meyer(ps);
  check_conjunction(r);
  CHECK(r.discrete);
  CHECK(r.relatively_dense);
  CHECK(r.approx_subgroup);
  CHECK(r.verdict);
  // independent: largest gap between consecutive sorted points bounds the covering radius
  std::vector<double> xs;
  for (std::size_t i = 0; i < ps.size(); ++i) xs.push_back(ps.point(i)(0));
  double max_gap = 0;
  for (std::size_t i = 1; i < xs.size(); ++i) max_gap = std::max(max_gap, xs[i] - xs[i - 1]);
  CHECK(r.radius <= max_gap / 2 + 0.05);
  CHECK(r.gap == doctest::Approx(oracle::sorted_gap(xs)));
}

TEST_CASE("a strip is not relatively dense in the plane") {
  const auto r = check_meyer(strip(40, 10));
  check_conjunction(r);
  CHECK(r.discrete);
  CHECK(r.approx_subgroup);
  CHECK_FALSE(r.relatively_dense);
  CHECK_FALSE(r.verdict);
  CHECK(r.radius > 20);
}

TEST_CASE("restriction to a strip") {
  const auto r1 = restrict_to_strip(z2(10), line(1, 0), 1.0);
  std::vector<Vector> expect;
  for (const auto& p : oracle::z2_disk(10))
    if (std::abs(p(1)) <= 1) expect.push_back(p);
  CHECK(keys_within(r1.ps, 10) == keys_of(expect, 10));
  CHECK(r1.ps.size() == expect.size());
  // covering radius sqrt(2)/2 exceeds R/2
  CHECK(r1.warning.has_value());

  const auto r2 = restrict_to_strip(z2(30), line(1, kSqrt3), 1.0, false);
  CHECK(keys_within(r2.ps, 30) == keys_of(oracle::strip_2_6(30), 30));
  CHECK_FALSE(r2.warning);

  const auto r3 = restrict_to_strip(z2(10), line(1, 0), 2.0);
  CHECK_FALSE(r3.warning);
  CHECK_THROWS(restrict_to_strip(z2(5), line(1, 0), 0.0));
}

TEST_CASE("Meyer extension round trip") {
  struct Case {
    PointSet src;
    Subspace L;
    double R;
  };
  const double w = 30, m = 8;
  // the source window must reach sqrt(w^2 + R^2) to cover the extension window
  const std::vector<Case> cases = {{strip(32), line(1, kSqrt3), 1.0}, {axis(32), line(1, 0), 1.0}};
  for (const auto& c : cases) {
    const auto ext = gen_meyer_extension(c.src, c.L, c.R, Window(w, m));
    const auto back = restrict_to_strip(ext, c.L, c.R, false);
    CHECK(keys_within(back.ps, w - m) == keys_within(c.src, w - m));
    const auto rep = check_meyer(ext);
    check_conjunction(rep);
    CHECK(rep.verdict);
  }
}

TEST_CASE("projection of the strip onto its line") {
  const auto ps = strip(60, 12);
  const auto L = line(1, kSqrt3);
  const auto r = check_projection_meyer(ps, L);
  CHECK(r.projected.dim() == 1);
  CHECK(r.R == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.contained);
  CHECK(r.containment_slack <= 1e-9);
  check_conjunction(r.meyer);
  CHECK(r.meyer.discrete);
  CHECK(r.meyer.relatively_dense);
  CHECK(r.meyer.approx_subgroup);
  CHECK(r.meyer.verdict);
  REQUIRE(r.F_inherited);
  CHECK(*r.F_inherited);

  // oracle: projected coordinates (m + sqrt3 n)/2 by direct loop
  std::vector<double> xs;
  for (const auto& p : oracle::strip_2_6(60)) xs.push_back((p(0) + kSqrt3 * p(1)) / 2);
  CHECK(r.projected.size() == xs.size());
  CHECK(r.meyer.gap == doctest::Approx(oracle::sorted_gap(xs)));
}

TEST_CASE("projection of a line onto itself") {
  const auto r = check_projection_meyer(axis(30, 6), line(1, 0));
  CHECK(r.meyer.verdict);
  CHECK(r.R == 0);
  CHECK(r.contained);
  CHECK(r.meyer.gap == doctest::Approx(1.0));
}

TEST_CASE("irrational projection of Z^2 is not discrete") {
  const auto r = check_projection_meyer(z2(30, 6), line(1, kSqrt3));
  CHECK_FALSE(r.meyer.discrete);
  CHECK_FALSE(r.meyer.verdict);
  std::vector<double> xs, xs_half;
  for (const auto& p : oracle::z2_disk(30)) {
    const double x = (p(0) + kSqrt3 * p(1)) / 2;
    xs.push_back(x);
    if (p.norm() <= 15) xs_half.push_back(x);
  }
  CHECK(r.meyer.gap == doctest::Approx(oracle::sorted_gap(xs)).epsilon(1e-6));
  CHECK(oracle::sorted_gap(xs) < 0.9 * oracle::sorted_gap(xs_half));
}

TEST_CASE("no finite transversal") {
  const auto L = line(1, kSqrt3);
  const auto r = check_no_finite_transversal(strip(100), L, 20);
  // distinct values of sqrt3 m - n are in bijection with the strip points
  CHECK(r.count == oracle::strip_2_6(100).size());
  CHECK(r.count_half == oracle::strip_2_6(50).size());
  CHECK(r.growth >= 1.5);
  CHECK(r.supported);

  const auto a = check_no_finite_transversal(axis(100), line(1, 0), 20);
  CHECK(a.count == 1);
  CHECK_FALSE(a.supported);

  const auto ext = gen_meyer_extension(axis(110), line(1, 0), 1.0, Window(100));
  const auto e = check_no_finite_transversal(ext, line(1, 0), 20, 1.0);
  CHECK(e.count == 1);
  CHECK_FALSE(e.supported);
}
