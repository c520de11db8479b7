#include "apx/schreiber.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "apx/errors.hpp"
#include "apx/verify.hpp"

namespace apx {

namespace {

double clamp_unit(double c) { return std::clamp(c, -1.0, 1.0); }

double angle_between_units(const Vector& a, const Vector& b) { return std::acos(clamp_unit(a.dot(b))); }

// Radical inverse in base b, for Halton points.
double radical_inverse(std::uint64_t i, std::uint64_t b) {
  double f = 1, r = 0;
  while (i > 0) {
    f /= static_cast<double>(b);
    r += f * static_cast<double>(i % b);
    i /= b;
  }
  return r;
}

constexpr std::uint64_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

// Deterministic, roughly uniform points on S^{k-1}, k >= 3.
std::vector<Vector> sphere_samples(int k, int n) {
  std::vector<Vector> out;
  out.reserve(n);
  if (k == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
      const double y = 1.0 - 2.0 * (i + 0.5) / n;
      const double r = std::sqrt(std::max(0.0, 1.0 - y * y));
      Vector v(3);
      v << r * std::cos(golden * i), y, r * std::sin(golden * i);
      out.push_back(v);
    }
    return out;
  }
  // Halton points pushed through Box-Muller, then normalized.
  for (int i = 1; out.size() < static_cast<std::size_t>(n); ++i) {
    Vector v(k);
    for (int a = 0; a < k; a += 2) {
      const double u1 = std::max(radical_inverse(i, kPrimes[a % 16]), 1e-12);
      const double u2 = radical_inverse(i, kPrimes[(a + 1) % 16]);
      const double rad = std::sqrt(-2.0 * std::log(u1));
      v(a) = rad * std::cos(2 * std::numbers::pi * u2);
      if (a + 1 < k) v(a + 1) = rad * std::sin(2 * std::numbers::pi * u2);
    }
    const double nv = v.norm();
    if (nv > 0) out.push_back(v / nv);
  }
  return out;
}

}  // namespace

// ------------------------------------------------------------- directions

DirectionSet asymptotic_directions(const PointSet& ps, double r_min, double cluster_tol) {
  if (!(cluster_tol > 0)) throw std::invalid_argument("cluster tolerance must be positive");
  struct Cluster {
    Vector sum;
    Vector rep;
  };
  std::vector<Cluster> clusters;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const Vector p = ps.point(i);
    const double n = p.norm();
    if (n < r_min || n == 0) continue;
    const Vector u = p / n;
    Cluster* home = nullptr;
    double best = cluster_tol;
    for (auto& c : clusters) {
      const double a = angle_between_units(u, c.rep);
      if (a <= best) {
        best = a;
        home = &c;
      }
    }
    if (home) {
      home->sum += u;
      home->rep = home->sum.normalized();
    } else {
      clusters.push_back({u, u});
    }
  }
  if (clusters.empty()) throw WindowTooSmall("window too small: no points with norm >= r_min");
  // Drifting means can bring representatives closer than the tolerance; fold them.
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t a = 0; a < clusters.size() && !merged; ++a)
      for (std::size_t b = a + 1; b < clusters.size() && !merged; ++b)
        if (angle_between_units(clusters[a].rep, clusters[b].rep) < cluster_tol) {
          clusters[a].sum += clusters[b].sum;
          clusters[a].rep = clusters[a].sum.normalized();
          clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(b));
          merged = true;
        }
  }
  DirectionSet out{{}, r_min, cluster_tol};
  for (auto& c : clusters) out.dirs.push_back(c.rep);
  return out;
}

Subspace span_of_directions(const DirectionSet& dirs, double rank_tol) {
  if (dirs.dirs.empty()) throw std::invalid_argument("empty direction set");
  return Subspace::span(dirs.dirs, static_cast<int>(dirs.dirs.front().size()), rank_tol);
}

double thickening_radius(const PointSet& ps, const Subspace& L) {
  if (L.ambient_dim() != ps.dim()) throw std::invalid_argument("dimension mismatch");
  double t = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) t = std::max(t, L.distance(ps.point(i)));
  return t;
}

bool cone_contains(const Vector& x, const Vector& u, double epsilon) {
  if (x.size() != u.size()) throw std::invalid_argument("dimension mismatch");
  if (std::abs(u.norm() - 1.0) > Tolerances{}.exact) throw std::invalid_argument("cone axis must be a unit vector");
  if (!(epsilon > 0 && epsilon < 1)) throw std::invalid_argument("cone parameter must lie in (0, 1)");
  const double n = x.norm();
  if (n == 0) return false;
  return x.dot(u) / n >= 1.0 - epsilon;
}

double cone_constant(double ell_norm, double K) {
  const double s = ell_norm * ell_norm - 5.0 * K * K;
  if (!(ell_norm > 0) || s < 0) throw std::invalid_argument("cone constant needs ‖ℓ‖² >= 5K²");
  return std::sqrt(s) / ell_norm;
}

// ---------------------------------------------------------- spread systems

std::vector<Vector> WellSpreadSystem::family() const {
  std::vector<Vector> out = ell;
  out.insert(out.end(), ell_reflected.begin(), ell_reflected.end());
  return out;
}

double angle_to_span(const Vector& v, const std::vector<Vector>& others) {
  const double nv = v.norm();
  if (nv == 0) return 0;
  if (others.empty()) return std::numbers::pi / 2;
  const Subspace S = Subspace::span(others, static_cast<int>(v.size()), 1e-12);
  if (S.rank() == 0) return std::numbers::pi / 2;
  return std::acos(clamp_unit(S.project(v).norm() / nv));
}

namespace {

double realized_epsilon(const std::vector<Vector>& ell, double K, const SystemOptions& opt) {
  const std::size_t k = ell.size();
  if (k <= 1) return std::numbers::pi / 2;
  auto min_angle = [&](const std::vector<Vector>& vs) {
    double m = std::numbers::pi / 2;
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<Vector> others;
      for (std::size_t j = 0; j < k; ++j)
        if (j != i) others.push_back(vs[j]);
      m = std::min(m, angle_to_span(vs[i], others));
    }
    return m;
  };
  double eps = min_angle(ell);
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int d = static_cast<int>(ell.front().size());
  for (int s = 0; s < opt.perturbation_samples; ++s) {
    std::vector<Vector> vs = ell;
    for (auto& v : vs) {
      Vector dir(d);
      for (int a = 0; a < d; ++a) dir(a) = gauss(rng);
      if (dir.norm() == 0) continue;
      v += dir.normalized() * (2 * K * std::pow(unif(rng), 1.0 / d));
    }
    eps = std::min(eps, min_angle(vs));
  }
  return eps;
}

}  // namespace

WellSpreadSystem find_well_spread_system(const PointSet& ps, const Subspace& L, double M, double K,
                                         const SystemOptions& opt) {
  if (L.ambient_dim() != ps.dim()) throw std::invalid_argument("dimension mismatch");
  if (L.rank() == 0) throw std::invalid_argument("well-spread systems need a nonzero subspace");
  if (!(M > 0) || !(K >= 0)) throw std::invalid_argument("need M > 0 and K >= 0");
  const int k = L.rank();

  std::vector<std::size_t> all, pool;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const Vector p = ps.point(i);
    const double n = p.norm();
    if (n < M) continue;
    if (!ps.index().any_within(-p, K + opt.tol)) continue;
    all.push_back(i);
    if (n <= 2 * M) pool.push_back(i);
  }
  if (pool.empty()) pool = all;
  if (pool.empty()) throw WindowTooSmall("no valid system at this window: increase window or decrease M");

  std::vector<Vector> chosen;
  std::vector<char> used(ps.size(), 0);
  for (int step = 0; step < k; ++step) {
    const Vector axis = L.basis().col(step);
    std::size_t best = ps.size();
    double best_angle = -1, best_norm = 0, best_align = 0;
    for (std::size_t i : pool) {
      if (used[i]) continue;
      const Vector p = ps.point(i);
      const double ang = angle_to_span(p, chosen);
      const double nrm = p.norm();
      const double align = p.dot(axis);
      bool better = false;
      if (best == ps.size() || ang > best_angle + 1e-12) {
        better = true;
      } else if (ang >= best_angle - 1e-12) {
        if (nrm < best_norm - 1e-12) better = true;
        else if (nrm <= best_norm + 1e-12 && align > best_align + 1e-12) better = true;
      }
      if (better) {
        best = i;
        best_angle = ang;
        best_norm = nrm;
        best_align = align;
      }
    }
    if (best == ps.size() || best_angle < 1e-9)
      throw WindowTooSmall("no valid system at this window: only " + std::to_string(step) +
                           " independent long vectors (increase window or decrease M)");
    used[best] = 1;
    chosen.emplace_back(ps.point(best));
  }

  WellSpreadSystem sys;
  sys.ell = chosen;
  for (const auto& l : chosen) {
    const auto nb = ps.index().k_nearest(-l, 1, K + opt.tol);
    sys.ell_reflected.emplace_back(ps.point(nb.front().index));
  }
  sys.M = M;
  sys.K = K;
  for (const auto& v : sys.family()) sys.T = std::max(sys.T, v.norm());
  sys.epsilon = realized_epsilon(sys.ell, K, opt);
  return sys;
}

double delta_of_system(const WellSpreadSystem& sys, const Subspace& L, int n_samples) {
  const int k = L.rank();
  if (static_cast<int>(sys.ell.size()) != k) throw std::invalid_argument("system size does not match rank of L");
  if (k == 0) throw std::invalid_argument("delta needs a nonzero subspace");
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");
  std::vector<Vector> c;
  for (const auto& v : sys.family()) {
    if (v.size() != L.ambient_dim()) throw std::invalid_argument("dimension mismatch");
    c.push_back(L.basis().transpose() * v.normalized());
  }
  auto f = [&](const Vector& z) {
    double m = 0;
    for (const auto& ci : c) m = std::max(m, std::abs(z.dot(ci)));
    return m;
  };
  if (k == 1) {
    Vector z(1);
    z << 1.0;
    return f(z);  // f(-z) = f(z)
  }
  if (k == 2) {
    // |<z, c>| is pi-periodic in the angle of z, so half a circle suffices;
    // refine by repeatedly zooming into the best sample's neighborhood.
    auto g = [&](double t) {
      Vector z(2);
      z << std::cos(t), std::sin(t);
      return f(z);
    };
    double lo = 0, step = std::numbers::pi / n_samples, best_t = 0, best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_samples; ++i) {
      const double t = lo + (i + 0.5) * step;
      const double v = g(t);
      if (v < best) {
        best = v;
        best_t = t;
      }
    }
    for (int round = 0; round < 8; ++round) {
      const double a = best_t - step, b = best_t + step;
      const int m = 64;
      step = (b - a) / m;
      for (int i = 0; i <= m; ++i) {
        const double t = a + i * step;
        const double v = g(t);
        if (v < best) {
          best = v;
          best_t = t;
        }
      }
    }
    return best;
  }
  const auto samples = sphere_samples(k, n_samples);
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i = 0; i < samples.size(); ++i) scored.push_back({f(samples[i]), i});
  const std::size_t keep = std::min<std::size_t>(8, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end());
  double best = scored.front().first;
  const double start_step = std::sqrt(4.0 * std::numbers::pi / n_samples);
  for (std::size_t s = 0; s < keep; ++s) {
    Vector z = samples[scored[s].second];
    double val = scored[s].first;
    double h = start_step;
    for (int it = 0; it < 4000 && h > 1e-12; ++it) {
      // tangent basis at z
      Matrix Z(k, 1);
      Z.col(0) = z;
      Eigen::JacobiSVD<Matrix> svd(Z, Eigen::ComputeFullU);
      const Matrix T = svd.matrixU().rightCols(k - 1);
      bool moved = false;
      for (int a = 0; a < k - 1 && !moved; ++a)
        for (double sgn : {1.0, -1.0}) {
          const Vector cand = (z + sgn * h * T.col(a)).normalized();
          const double v = f(cand);
          if (v < val) {
            z = cand;
            val = v;
            moved = true;
            break;
          }
        }
      if (!moved) h *= 0.5;
    }
    best = std::min(best, val);
  }
  return best;
}

double descent_threshold(const WellSpreadSystem& sys, double delta) {
  if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
  return std::max(sys.T, sys.T * sys.T / delta);
}

DescentStep descent_step(const Vector& x, const WellSpreadSystem& sys, double delta, double K) {
  const auto fam = sys.family();
  if (fam.empty()) throw std::invalid_argument("empty system");
  const Vector* best = nullptr;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const auto& l : fam) {
    if (l.size() != x.size()) throw std::invalid_argument("dimension mismatch");
    const double s = x.dot(l) / l.norm();
    if (s > best_score) {
      best_score = s;
      best = &l;
    }
  }
  const double decrease = x.norm() - ((x - *best).norm() + K);
  const double need = delta * sys.M / 4.0;
  if (decrease < need)
    throw DescentFailure("descent decrease " + std::to_string(decrease) + " below δM/4 = " + std::to_string(need),
                         need - decrease);
  return {*best, decrease};
}

// ----------------------------------------------------------- certification

Certification certify_density(const PointSet& input, const Subspace& L, const WellSpreadSystem& sys, double R,
                              const CertifyOptions& opt) {
  if (L.ambient_dim() != input.dim()) throw std::invalid_argument("dimension mismatch");
  if (!(R > 0)) throw std::invalid_argument("density radius must be positive");
  const auto norm = normalize_origin(input);
  const PointSet& ps = norm.ps;
  Certification cert;
  cert.delta = delta_of_system(sys, L, opt.delta_samples);
  cert.threshold = descent_threshold(sys, cert.delta);
  const double need = cert.delta * sys.M / 4.0;
  const double K = sys.K;
  const auto fam = sys.family();

  const double interior = ps.window().interior();
  const auto targets = density_targets(L, interior, opt.spacing > 0 ? opt.spacing : R / 2, opt.max_targets);
  cert.targets = targets.size();
  cert.R_prime = covering_radius(ps, targets);

  std::vector<std::size_t> inner;
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (ps.window().interior_norm(ps.point(i).norm())) inner.push_back(i);
  if (inner.empty()) throw WindowTooSmall("no interior points");

  bool all_ok = true;
  for (const auto& z : targets) {
    Chain ch;
    ch.target = z;
    std::size_t start = inner.front();
    double far = -1;
    for (std::size_t i : inner) {
      const double dz = (ps.point(i) - z).norm();
      if (dz > far) {
        far = dz;
        start = i;
      }
    }
    Vector y = ps.point(start);
    ch.points.push_back(y);
    ch.distances.push_back(far);
    while (true) {
      const Vector x = y - z;
      const Vector* ell = &fam.front();
      double score = -std::numeric_limits<double>::infinity();
      for (const auto& l : fam) {
        const double s = x.dot(l) / l.norm();
        if (s > score) {
          score = s;
          ell = &l;
        }
      }
      const double decrease = x.norm() - ((x - *ell).norm() + K);
      if (decrease < need) break;
      const Vector aim = y - *ell;
      const auto near = ps.index().within(aim, K + opt.tol);
      if (near.empty()) {
        ch.ok = false;
        ch.failure = "stall: no point within K of y - l";
        break;
      }
      std::size_t pick = near.front();
      double pd = std::numeric_limits<double>::infinity();
      for (std::size_t j : near) {
        const double dz = (ps.point(j) - z).norm();
        if (dz < pd) {
          pd = dz;
          pick = j;
        }
      }
      if (!(pd < ch.distances.back())) {
        ch.ok = false;
        ch.failure = "non-monotone step";
        break;
      }
      y = ps.point(pick);
      ch.points.push_back(y);
      ch.distances.push_back(pd);
    }
    if (ch.ok && ch.distances.back() > cert.threshold + opt.tol) {
      ch.ok = false;
      ch.failure = "chain ended outside the descent threshold";
    }
    cert.max_chain_length = std::max(cert.max_chain_length, ch.points.size());
    if (!ch.ok) {
      all_ok = false;
      if (!cert.stall) cert.stall = ch;
    }
    if (opt.keep_chains) cert.chains.push_back(std::move(ch));
  }
  cert.passed = all_ok && cert.R_prime <= R + 1e-9 * std::max(1.0, R);
  return cert;
}

}  // namespace apx
