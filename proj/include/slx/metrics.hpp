#pragma once

// Distances between simplex densities and between noise-convolved models:
// closed-form TV / l2 for two uniforms (intersection volume by Monte Carlo),
// exact minimum-cost vertex matching, and mixture-proposal Monte Carlo
// estimators for TV / KL of convolved densities.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "slx/geometry.hpp"
#include "slx/sampler.hpp"
#include "slx/scheffe.hpp"

namespace slx {

struct DistanceEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int mc_samples = 0;
  std::uint64_t seed = 0;
};

struct VertexAssignment {
  std::vector<int> permutation;  // vertex i of s1 -> permutation[i] of s2
  double cost = 0.0;             // minimal sum of l1 vertex distances
};

namespace detail {

// Vol(S1 cap S2) estimated by sampling uniformly from the smaller-volume
// simplex (variance reduction) and counting hits in the other.
struct IntersectionEstimate {
  double vol1, vol2, inter, hit_se;  // hit_se = binomial SE of the hit rate
};

inline IntersectionEstimate intersection_mc(const Simplex& s1,
                                            const Simplex& s2, int mc,
                                            std::uint64_t seed) {
  if (is_degenerate(s1) || is_degenerate(s2)) throw DegenerateSimplex();
  if (s1.dim() != s2.dim()) throw DimMismatch();
  if (mc < 1000) throw InvalidConfig("need mc >= 1000");
  IntersectionEstimate est;
  est.vol1 = geometry_summary(s1).volume;
  est.vol2 = geometry_summary(s2).volume;
  const Simplex& small = est.vol1 <= est.vol2 ? s1 : s2;
  const Simplex& other = est.vol1 <= est.vol2 ? s2 : s1;
  const SampleSet pts = sample(NoisyModel(small, 0.0), mc, seed);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(other.zero_translated());
  const Eigen::MatrixXd rel =
      (pts.points.rowwise() - other.v0().transpose()).transpose();
  const Eigen::MatrixXd lam = lu.solve(rel);
  int hits = 0;
  for (int i = 0; i < mc; ++i)
    if (lam.col(i).minCoeff() >= -kMembershipTol &&
        lam.col(i).sum() <= 1.0 + kMembershipTol)
      ++hits;
  const double p = double(hits) / mc;
  est.inter = std::min(est.vol1, est.vol2) * p;
  est.hit_se = std::sqrt(std::max(p * (1.0 - p), 0.0) / mc);
  return est;
}

}  // namespace detail

// TV between two uniform simplex densities. With I = Vol(S1 cap S2) and
// V1 <= V2:
//   TV = 1/2 int |f1 - f2|
//      = 1/2 [ (V1-I)/V1 + (V2-I)/V2 + I (1/V1 - 1/V2) ]
//      = 1 - I / V2 = 1 - I / max(V1, V2).
inline DistanceEstimate tv_uniform(const Simplex& s1, const Simplex& s2,
                                   int mc, std::uint64_t seed) {
  const auto est = detail::intersection_mc(s1, s2, mc, seed);
  DistanceEstimate out;
  const double vmax = std::max(est.vol1, est.vol2);
  out.value = 1.0 - est.inter / vmax;
  out.std_error = std::min(est.vol1, est.vol2) * est.hit_se / vmax;
  out.mc_samples = mc;
  out.seed = seed;
  return out;
}

// l2 distance between two uniform simplex densities:
//   ||f1 - f2||_2^2 = (V1-I)/V1^2 + (V2-I)/V2^2 + I (1/V1 - 1/V2)^2.
inline DistanceEstimate l2_uniform(const Simplex& s1, const Simplex& s2,
                                   int mc, std::uint64_t seed) {
  const auto est = detail::intersection_mc(s1, s2, mc, seed);
  DistanceEstimate out;
  const double v1 = est.vol1, v2 = est.vol2, i = est.inter;
  const double sq = (v1 - i) / (v1 * v1) + (v2 - i) / (v2 * v2) +
                    i * std::pow(1.0 / v1 - 1.0 / v2, 2);
  out.value = std::sqrt(std::max(sq, 0.0));
  // first-order error propagation through d(value)/dI
  const double di = std::abs(-1.0 / (v1 * v1) - 1.0 / (v2 * v2) +
                             std::pow(1.0 / v1 - 1.0 / v2, 2));
  const double i_se = std::min(v1, v2) * est.hit_se;
  out.std_error = out.value > 0 ? 0.5 * di * i_se / out.value : di * i_se;
  out.mc_samples = mc;
  out.seed = seed;
  return out;
}

namespace detail {

// Jonker-Volgenant style shortest augmenting path assignment; exact minimum
// over bijections for a small dense cost matrix.
inline std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace detail

// Minimum over vertex bijections of the summed l1 vertex distances.
inline VertexAssignment vertex_l1(const Simplex& s1, const Simplex& s2) {
  if (s1.dim() != s2.dim()) throw DimMismatch();
  const int n = s1.dim() + 1;
  Eigen::MatrixXd cost(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      cost(i, j) =
          (s1.vertices.col(i) - s2.vertices.col(j)).cwiseAbs().sum();
  VertexAssignment out;
  out.permutation = detail::solve_assignment(cost);
  out.cost = 0.0;
  for (int i = 0; i < n; ++i) out.cost += cost(i, out.permutation[i]);
  return out;
}

// TV between two noise-convolved models by importance sampling from the
// balanced mixture h = (f1 + f2)/2:
//   TV = 1/2 E_h[ |f1 - f2| / h ] = E_h[ |f1 - f2| / (f1 + f2) ].
// Densities come from frozen quadratures (sub-seeded per model), so the
// estimate is deterministic given the seed; sigma = 0 models use the exact
// uniform density.
inline DistanceEstimate tv_noisy_mc(const NoisyModel& m1, const NoisyModel& m2,
                                    int mc, int quad, std::uint64_t seed) {
  if (mc < 1000 || quad < 1000) throw InvalidConfig("need mc, quad >= 1000");
  const HypothesisEvaluator f1({m1.simplex, m1.sigma}, quad,
                               derive_seed(seed, "quad", 1));
  const HypothesisEvaluator f2({m2.simplex, m2.sigma}, quad,
                               derive_seed(seed, "quad", 2));
  // Stratified mixture draw: half from each component.
  const int n1 = mc / 2, n2 = mc - mc / 2;
  Eigen::MatrixXd pts(mc, m1.simplex.dim());
  pts.topRows(n1) = sample(m1, n1, derive_seed(seed, "mix", 1)).points;
  pts.bottomRows(n2) = sample(m2, n2, derive_seed(seed, "mix", 2)).points;
  const Eigen::VectorXd d1 = f1.batch(pts), d2 = f2.batch(pts);
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < mc; ++i) {
    const double denom = d1(i) + d2(i);
    const double r = denom > 0 ? std::abs(d1(i) - d2(i)) / denom : 0.0;
    sum += r;
    sumsq += r * r;
  }
  DistanceEstimate out;
  out.value = sum / mc;
  out.std_error =
      std::sqrt(std::max(sumsq / mc - out.value * out.value, 0.0) / mc);
  out.mc_samples = mc;
  out.seed = seed;
  return out;
}

// KL(f1 || f2) for convolved models, E_{x~f1}[log(f1/f2)] with the density
// ratio clamped to [1e-300, 1e300] before the log (guards MC underflow at
// the cost of a small documented bias).
inline DistanceEstimate kl_noisy_mc(const NoisyModel& m1, const NoisyModel& m2,
                                    int mc, int quad, std::uint64_t seed) {
  if (m2.sigma <= 0.0)
    throw UnsupportedNoiseless("KL needs sigma2 > 0 for absolute continuity");
  if (mc < 1000 || quad < 1000) throw InvalidConfig("need mc, quad >= 1000");
  const HypothesisEvaluator f1({m1.simplex, m1.sigma}, quad,
                               derive_seed(seed, "quad", 1));
  const HypothesisEvaluator f2({m2.simplex, m2.sigma}, quad,
                               derive_seed(seed, "quad", 2));
  const Eigen::MatrixXd pts =
      sample(m1, mc, derive_seed(seed, "draw", 1)).points;
  const Eigen::VectorXd d1 = f1.batch(pts), d2 = f2.batch(pts);
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < mc; ++i) {
    const double ratio =
        std::clamp(d1(i) / std::max(d2(i), 1e-300), 1e-300, 1e300);
    const double t = std::log(ratio);
    sum += t;
    sumsq += t * t;
  }
  DistanceEstimate out;
  out.value = sum / mc;
  out.std_error =
      std::sqrt(std::max(sumsq / mc - out.value * out.value, 0.0) / mc);
  out.mc_samples = mc;
  out.seed = seed;
  return out;
}

}  // namespace slx
