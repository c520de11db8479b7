#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "apx/errors.hpp"
#include "apx/heisenberg.hpp"
#include "oracles.hpp"

using namespace apx;
using oracle::v2;

namespace {

const double kSqrt3 = std::sqrt(3.0);
const double kSqrt5 = std::sqrt(5.0);

HeisPoint hp(double x, double y, double z) { return {v2(x, y), z}; }

HeisPoint random_point(std::mt19937_64& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  HeisPoint p{Vector(2 * n), u(rng)};
  for (int i = 0; i < 2 * n; ++i) p.v(i) = u(rng);
  return p;
}

double omega_by_sum(const Vector& v, const Vector& u) {
  const auto n = v.size() / 2;
  double s = 0;
  for (Eigen::Index i = 0; i < n; ++i) s += v(i) * u(n + i) - v(n + i) * u(i);
  return s;
}

bool same(const HeisPoint& a, const HeisPoint& b, double tol = 1e-12) {
  return (a.v - b.v).cwiseAbs().maxCoeff() <= tol && std::abs(a.z - b.z) <= tol;
}

// Independent count of the coset lattice {((m,n), m sqrt5 + j/2)} in a gauge ball.
std::size_t coset_lattice_count(double W) {
  std::size_t c = 0;
  const int b = static_cast<int>(W) + 1;
  for (int m = -b; m <= b; ++m)
    for (int n = -b; n <= b; ++n) {
      const double v2n = m * m + n * n;
      for (int j = -4 * static_cast<int>(W * W) - 20; j <= 4 * static_cast<int>(W * W) + 20; ++j) {
        const double z = m * kSqrt5 + j / 2.0;
        if (v2n * v2n + 16 * z * z <= W * W * W * W * (1 + 1e-12)) ++c;
      }
    }
  return c;
}

}  // namespace

TEST_CASE("symplectic forms") {
  const auto J = SymplecticForm::standard(1);
  CHECK(J(v2(1, 0), v2(0, 1)) == 1);
  CHECK(J(v2(2, 3), v2(5, 7)) == doctest::Approx(2 * 7 - 3 * 5));
  Matrix bad(2, 2);
  bad << 0, 1, 1, 0;
  CHECK_THROWS(SymplecticForm::from_matrix(bad));
  CHECK_THROWS(SymplecticForm::from_matrix(Matrix::Zero(2, 2)));
  CHECK_THROWS(SymplecticForm::from_matrix(Matrix::Zero(3, 3)));
  std::mt19937_64 rng(5);
  const auto J2 = SymplecticForm::standard(2);
  for (int t = 0; t < 100; ++t) {
    const auto a = random_point(rng, 2, 3), b = random_point(rng, 2, 3);
    CHECK(J2(a.v, b.v) == doctest::Approx(omega_by_sum(a.v, b.v)).epsilon(1e-12));
  }
}

TEST_CASE("group law examples") {
  const auto J = SymplecticForm::standard(1);
  CHECK(same(heis_mul(hp(1, 0, 0), hp(0, 1, 0), J), hp(1, 1, 0.5)));
  const auto a = hp(2.5, -1, 3);
  CHECK(same(heis_mul(a, HeisPoint::identity(1), J), a));
  CHECK(same(heis_mul(a, heis_inverse(a), J), HeisPoint::identity(1)));
  CHECK_THROWS(heis_mul(a, HeisPoint::identity(2), J));
}

TEST_CASE("commutator identity") {
  const auto J = SymplecticForm::standard(1);
  CHECK(same(heis_commutator(hp(1, 0, 5), hp(0, 1, -3), J), hp(0, 0, 1)));
  CHECK(same(heis_commutator(hp(1, 2, 4), hp(2, 4, -1), J), HeisPoint::identity(1)));
  std::mt19937_64 rng(11);
  for (int n : {1, 2}) {
    const auto F = SymplecticForm::standard(n);
    for (int t = 0; t < 10'000; ++t) {
      const auto a = random_point(rng, n, 10), b = random_point(rng, n, 10);
      const auto c = heis_commutator(a, b, F);
      CHECK(c.v.cwiseAbs().maxCoeff() <= 1e-9);
      CHECK(std::abs(c.z - omega_by_sum(a.v, b.v)) <= 1e-9 * std::max(1.0, a.v.norm() * b.v.norm()));
    }
  }
}

TEST_CASE("associativity and left invariance") {
  std::mt19937_64 rng(12);
  for (int n : {1, 2}) {
    const auto F = SymplecticForm::standard(n);
    double worst_assoc = 0, worst_inv = 0;
    for (int t = 0; t < 10'000; ++t) {
      const auto a = random_point(rng, n, 5), b = random_point(rng, n, 5), g = random_point(rng, n, 5);
      const auto l = heis_mul(heis_mul(a, b, F), g, F), r = heis_mul(a, heis_mul(b, g, F), F);
      worst_assoc = std::max({worst_assoc, (l.v - r.v).cwiseAbs().maxCoeff(), std::abs(l.z - r.z)});
      const double d0 = heis_dist(a, b, F);
      const double d1 = heis_dist(heis_mul(g, a, F), heis_mul(g, b, F), F);
      worst_inv = std::max(worst_inv, std::abs(d0 - d1));
    }
    CHECK(worst_assoc < 1e-9);
    CHECK(worst_inv < 1e-9);
  }
}

TEST_CASE("gauge distance") {
  const auto J = SymplecticForm::standard(1);
  CHECK(heis_dist(HeisPoint::identity(1), hp(0, 0, 1), J) == doctest::Approx(2.0));
  const auto a = hp(1.5, -2, 0.25);
  CHECK(heis_dist(a, a, J) == 0);
  CHECK(heis_gauge(hp(3, 4, 0)) == doctest::Approx(5.0));
  // triangle inequality on random triples
  std::mt19937_64 rng(13);
  for (int t = 0; t < 1000; ++t) {
    const auto x = random_point(rng, 1, 4), y = random_point(rng, 1, 4), w = random_point(rng, 1, 4);
    CHECK(heis_dist(x, w, J) <= heis_dist(x, y, J) + heis_dist(y, w, J) + 1e-12);
  }
}

TEST_CASE("gauge topology matches the product topology") {
  const auto J = SymplecticForm::standard(1);
  const auto limit = hp(2, -1, 3);
  double last = 1e9;
  for (int k = 1; k <= 1 << 20; k *= 2) {
    const auto pk = hp(2 + 1.0 / k, -1 - 2.0 / k, 3 + 1.0 / k);
    const double d = heis_dist(pk, limit, J);
    CHECK(d < last);
    last = d;
  }
  CHECK(last < 1e-2);
  // z stays away: distance stays bounded below
  for (int k = 1; k <= 1 << 20; k *= 2) CHECK(heis_dist(hp(2 + 1.0 / k, -1, 4), limit, J) > 1.0);
  // v stays away
  for (int k = 1; k <= 1 << 20; k *= 2) CHECK(heis_dist(hp(2.5, -1, 3 + 1.0 / k), limit, J) > 0.4);
  // and conversely: small distance forces both coordinates close
  std::mt19937_64 rng(14);
  for (int t = 0; t < 1000; ++t) {
    const auto x = random_point(rng, 1, 1e-4);
    const auto p = heis_mul(limit, x, J);
    const double d = heis_dist(p, limit, J);
    CHECK((p.v - limit.v).norm() <= d + 1e-15);
    CHECK(std::abs(p.z - limit.z) <= d * d / 4 + 0.5 * limit.v.norm() * d + 1e-15);
  }
}

TEST_CASE("generators against brute-force enumeration") {
  for (double W : {3.0, 5.0}) {
    const auto ps = gen_heis_coset_lattice(Window(W));
    CHECK(ps.size() == coset_lattice_count(W));
    for (std::size_t i = 0; i < ps.size(); ++i) CHECK(heis_gauge(ps.point(i)) <= W * (1 + 1e-12));
  }
  const double W = 8;
  const auto line = gen_heis_line(Window(W));
  std::size_t expect = 0;
  for (int m = -20; m <= 20; ++m)
    for (int n = -60; n <= 60; ++n) {
      const double x = m * kSqrt5 + n * kSqrt3;
      if (x * x * x * x + 16.0 * m * m <= W * W * W * W * (1 + 1e-12)) ++expect;
    }
  CHECK(line.size() == expect);
  const auto c = gen_heis_central(Window(4));
  CHECK(c.size() == 9);  // |k| <= 4
}

TEST_CASE("point set validation and order") {
  const auto J = SymplecticForm::standard(1);
  CHECK_THROWS(HeisPointSet::from_points(J, {hp(0, 0, 0), hp(0, 0, 0)}, Window(1)));
  CHECK_THROWS(HeisPointSet::from_points(J, {hp(0, 0, 3)}, Window(2)));  // gauge 2 sqrt 3
  const auto ps = HeisPointSet::from_points(J, {hp(1, 0, 0), hp(0, 0, 1), hp(0, 0, -1)}, Window(3));
  CHECK(ps.point(0).z == -1);
  CHECK(ps.point(2).v(0) == 1);
  CHECK(ps.index().groups() == 2);
}

TEST_CASE("index queries agree with a scan") {
  const auto ps = gen_heis_coset_lattice(Window(5));
  const auto& J = ps.form();
  std::mt19937_64 rng(21);
  for (int t = 0; t < 200; ++t) {
    const auto x = random_point(rng, 1, 3);
    for (auto side : {HeisIndex::Side::Left, HeisIndex::Side::Right}) {
      double best = 1e300;
      std::size_t count = 0;
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const double d = side == HeisIndex::Side::Left ? heis_dist(x, ps.point(i), J)
                                                       : heis_dist_right(x, ps.point(i), J);
        best = std::min(best, d);
        if (d <= 1.5) ++count;
      }
      const auto nb = ps.index().nearest(x, side);
      REQUIRE(nb);
      CHECK(nb->distance == doctest::Approx(best).epsilon(1e-12));
      CHECK(ps.index().within(x, 1.5, side).size() == count);
    }
  }
}

TEST_CASE("projection to V") {
  const auto J = SymplecticForm::standard(1);
  std::vector<HeisPoint> pts;
  std::vector<double> xs;
  for (int m = -30; m <= 30; ++m)
    for (int n = -30; n <= 30; ++n) {
      pts.push_back(hp(m * kSqrt5 + n * kSqrt3, 0, m));
      xs.push_back(m * kSqrt5 + n * kSqrt3);
    }
  const auto P = pi_V(HeisPointSet::from_points(J, pts, Window(130)));
  CHECK(P.size() == pts.size());
  CHECK(min_pairwise_gap(P) == doctest::Approx(oracle::sorted_gap(xs)));
  CHECK(min_pairwise_gap(P) < 0.05);

  const auto Q = pi_V(gen_heis_coset_lattice(Window(6)));
  // v = (m, n) survives iff some m sqrt5 + j/2 fits in the z-slice at |v|
  std::size_t expect_q = 0;
  for (const auto& v : oracle::z2_disk(6)) {
    const double r = v.norm(), slice = std::sqrt(std::max(0.0, 1296 - r * r * r * r)) / 4;
    const double zm = v(0) * kSqrt5, frac = std::abs(zm * 2 - std::round(zm * 2)) / 2;
    if (frac <= slice + 1e-12) ++expect_q;
  }
  CHECK(Q.size() == expect_q);
  CHECK(min_pairwise_gap(Q) == 1);

  const auto E = pi_V(HeisPointSet::from_points(J, {HeisPoint::identity(1)}, Window(1)));
  REQUIRE(E.size() == 1);
  CHECK(E.point(0).norm() == 0);
}

TEST_CASE("subgroups pass the approximate subgroup check") {
  const auto lat = gen_heis_coset_lattice(Window(6, 2));
  const auto r = check_heis_approx_subgroup(lat);
  CHECK(r.has_identity);
  CHECK(r.symmetric);
  CHECK(r.report.passed);
  REQUIRE(r.F);
  CHECK(r.F->F.size() == 1);
  CHECK(heis_gauge(r.F->F[0]) <= 1e-9);
  CHECK(r.sampled_pairs > 1000);

  // exhaustive on a small window
  const auto small = gen_heis_coset_lattice(Window(3, 1));
  const auto rs = check_heis_approx_subgroup(small);
  CHECK(rs.exhaustive);
  CHECK(rs.report.passed);

  const auto line = gen_heis_line(Window(10, 3));
  const auto rl = check_heis_approx_subgroup(line);
  CHECK(rl.report.passed);
  REQUIRE(rl.F);
  CHECK(rl.F->F.size() == 1);

  // projection of F certifies the projected set
  const auto P = pi_V(lat);
  std::vector<Vector> fv;
  for (const auto& f : r.F->F) fv.push_back(f.v);
  CHECK(check_inclusion(P, TranslationSet(2, fv)).passed);
}

TEST_CASE("dropping inverses breaks symmetry") {
  const auto lat = gen_heis_coset_lattice(Window(4, 1));
  std::vector<HeisPoint> half;
  for (std::size_t i = 0; i < lat.size(); ++i)
    if (lat.z(i) >= 0) half.push_back(lat.point(i));
  const auto ps = HeisPointSet::from_points(lat.form(), half, lat.window());
  const auto r = check_heis_approx_subgroup(ps);
  CHECK_FALSE(r.symmetric);
  CHECK_FALSE(r.report.passed);
  CHECK_FALSE(r.report.counterexamples.empty());
}

TEST_CASE("triple products") {
  const auto J = SymplecticForm::standard(1);
  HeisTranslationSet F{{HeisPoint::identity(1), hp(1, 0, 0), hp(0, 1, 0)}, 0};
  const auto F3 = heis_triple_product(F, J);
  // independent: enumerate and dedupe by rounding
  std::set<std::tuple<long long, long long, long long>> keys;
  for (const auto& a : F.F)
    for (const auto& b : F.F)
      for (const auto& c : F.F) {
        const auto p = heis_mul(heis_mul(a, b, J), c, J);
        keys.insert({std::llround(p.v(0) * 1e6), std::llround(p.v(1) * 1e6), std::llround(p.z * 1e6)});
      }
  CHECK(F3.F.size() == keys.size());
  CHECK(F3.K > 0);
}

TEST_CASE("center density") {
  const double W = 16, m = 4;
  const auto lat = gen_heis_coset_lattice(Window(W, m));
  const auto c = check_center_density(lat, 1.0);
  CHECK(c.passed);
  CHECK(c.max_gap <= 2);
  // oracle: sorted distinct values m n' - n m' over interior v's
  std::vector<double> vals;
  std::vector<std::pair<int, int>> vs;
  for (const auto& p : oracle::z2_disk(W - m)) vs.push_back({static_cast<int>(p(0)), static_cast<int>(p(1))});
  const double range = (W - m) * (W - m) / 4;
  std::set<long long> distinct{0};
  for (auto [a, b] : vs)
    for (auto [e, f] : vs) {
      const long long w = static_cast<long long>(a) * f - static_cast<long long>(b) * e;
      if (std::abs(static_cast<double>(w)) <= range) distinct.insert(w);
    }
  CHECK(c.values == distinct.size());
  CHECK(c.max_gap == doctest::Approx(1.0));

  CHECK_THROWS_AS(check_center_density(gen_heis_line(Window(10, 2)), 1.0), DegenerateForm);

  const auto J = SymplecticForm::standard(1);
  const auto two = HeisPointSet::from_points(J, {hp(1, 0, 0), hp(-1, 0, 0), HeisPoint::identity(1)}, Window(10, 2));
  CHECK_THROWS_AS(check_center_density(two, 1.0), DegenerateForm);
  const auto four = HeisPointSet::from_points(
      J, {hp(1, 0, 0), hp(-1, 0, 0), hp(0, 1, 0), hp(0, -1, 0), HeisPoint::identity(1)}, Window(10, 2));
  const auto r4 = check_center_density(four, 1.0);
  CHECK_FALSE(r4.passed);
  CHECK(r4.values == 3);
}

TEST_CASE("density around subgroups") {
  const auto lat = gen_heis_coset_lattice(Window(8, 2));
  const auto d = check_density_around_subgroup(lat, Subspace::full(2), 2.0);
  CHECK(d.passed);
  CHECK(d.thickening == 0);
  CHECK(d.covering <= 1.5);
  CHECK(d.targets > 100);

  const auto central = gen_heis_central(Window(8, 2));
  const auto dc = check_density_around_subgroup(central, Subspace::zero(2), 2.0);
  CHECK(dc.passed);
  CHECK(dc.R_witness <= 2.0);
  CHECK(dc.R_witness >= std::sqrt(2.0) - 1e-9);  // z-grid spacing 0.5 hits half-integers
}

TEST_CASE("projection discreteness") {
  const auto p9 = check_projection_discreteness(gen_heis_coset_lattice(Window(10, 2)));
  CHECK(p9.passed);
  CHECK(p9.gap == 1);
  CHECK(p9.gap_half == 1);

  const auto a = check_projection_discreteness(gen_heis_line(Window(30, 7.5)));
  const auto b = check_projection_discreteness(gen_heis_line(Window(60, 15)));
  CHECK_FALSE(b.passed);
  CHECK(b.gap < 0.5 * a.gap);
  CHECK(b.gap_half == doctest::Approx(a.gap));
}

TEST_CASE("dichotomy routing") {
  const auto r9 = analyze_heis(gen_heis_coset_lattice(Window(10, 2.5)));
  CHECK(r9.route == HeisCase::Symplectic);
  CHECK(r9.L.rank() == 2);
  REQUIRE(r9.center);
  CHECK(r9.center->passed);
  CHECK(r9.projection.passed);
  CHECK(r9.approximate_lattice);
  CHECK(r9.passed);

  const auto r8 = analyze_heis(gen_heis_line(Window(30, 7.5)));
  CHECK(r8.route == HeisCase::Lagrangian);
  CHECK(r8.L.rank() == 1);
  CHECK_FALSE(r8.projection.passed);
  REQUIRE(r8.flat);
  CHECK(r8.flat->passed);
  REQUIRE(r8.L_prime);
  CHECK(r8.L_prime->rank() == 1);

  const auto rc = analyze_heis(gen_heis_central(Window(10, 2.5)));
  CHECK(rc.route == HeisCase::Central);
  CHECK(rc.passed);
}

TEST_CASE("point file round trip") {
  const auto ps = gen_heis_coset_lattice(Window(3, 1)).with_label("coset lattice");
  std::stringstream ss;
  write_heis_points(ss, ps);
  const auto back = read_heis_points(ss);
  CHECK(back.size() == ps.size());
  CHECK(back.label() == "coset lattice");
  CHECK(back.form().matrix() == ps.form().matrix());
  for (std::size_t i = 0; i < ps.size(); ++i) CHECK(same(back.point(i), ps.point(i), 0));

  std::stringstream bad("dim=3 window=2\n0 0 0\n");
  try {
    read_heis_points(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 2);
  }
  std::stringstream degenerate("dim=3 window=2\nform=0 0 0 0\n0 0 0\n");
  CHECK_THROWS_AS(read_heis_points(degenerate), ConfigError);
}
