#pragma once

// Quantization stage: an eps-cover of the localization ball by uniform
// sampling, a sigma grid for the noise level, and enumeration of candidate
// (simplex, sigma) hypotheses with isoperimetric filtering.
//
// The theoretical point/tuple counts explode combinatorially beyond K = 2,
// so both stages carry explicit budgets; `truncated` reports honestly
// whether a budget (rather than the theoretical cardinality) limited the
// enumeration.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "slx/geometry.hpp"
#include "slx/localization.hpp"
#include "slx/rng.hpp"

namespace slx {

struct CoverSpec {
  double epsilon = 0.1;        // TV target driving grid spacings
  double alpha = 0.0;          // vertex-perturbation scale; <= 0 -> derived
  std::int64_t point_budget = 5000;
  std::int64_t tuple_budget = 200000;
  std::uint64_t seed = 0;
  // Base factor c in the cover-count target (1 + c R / eps)^{2K}. The looser
  // c = 4 variant is available for the coupon-collector construction.
  double count_factor = 2.0;
  // Explicit sigma grid; when empty the grid is derived from the ball.
  std::vector<double> sigmas;

  void validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0))
      throw InvalidConfig("epsilon must lie in (0,1)");
    if (point_budget < 1 || tuple_budget < 1)
      throw InvalidConfig("budgets must be >= 1");
  }
};

struct CoverPoints {
  Eigen::MatrixXd points;   // P x K, rows are cover points
  double log_target_count;  // log of the theoretical count
  bool truncated;           // point budget was the binding constraint
};

// Uniformly sampled points in the closed ball around the localization
// center. Target count min((1 + c R/eps)^{2K}, point_budget).
inline CoverPoints cover_sphere(const LocalizationBall& ball, double eps_cov,
                                const CoverSpec& spec) {
  if (eps_cov <= 0) throw InvalidConfig("eps_cov must be positive");
  spec.validate();
  const int k = static_cast<int>(ball.center.size());
  CoverPoints out;
  out.log_target_count =
      2.0 * k * std::log1p(spec.count_factor * ball.radius / eps_cov);
  std::int64_t count;
  if (out.log_target_count >= std::log(double(spec.point_budget))) {
    count = spec.point_budget;
    out.truncated = out.log_target_count > std::log(double(spec.point_budget));
  } else {
    count = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(std::exp(out.log_target_count))));
    out.truncated = false;
  }
  out.points.resize(count, k);
  for (std::int64_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(spec.seed, "cover", static_cast<std::uint64_t>(i)));
    Eigen::VectorXd dir(k);
    for (int d = 0; d < k; ++d) dir(d) = rng.gaussian();
    const double nrm = dir.norm();
    if (nrm == 0.0) {
      out.points.row(i) = ball.center.transpose();
      continue;
    }
    const double r = ball.radius * std::pow(rng.uniform(), 1.0 / k);
    out.points.row(i) = (ball.center + dir * (r / nrm)).transpose();
  }
  return out;
}

// Sigma grid {0, eps/sqrt(K), 2 eps/sqrt(K), ...}; the last point is the
// first multiple >= sqrt(r_n_variance). r_n is in variance units.
inline std::vector<double> noise_grid(double r_n_variance, double epsilon,
                                      int k) {
  if (r_n_variance < 0) throw InvalidConfig("R_n must be nonnegative");
  if (epsilon <= 0) throw InvalidConfig("epsilon must be positive");
  if (k < 1) throw InvalidConfig("K must be positive");
  std::vector<double> grid{0.0};
  const double sigma_max = std::sqrt(r_n_variance);
  const double step = epsilon / std::sqrt(double(k));
  double s = 0.0;
  while (s < sigma_max) {
    s += step;
    grid.push_back(s);
  }
  return grid;
}

struct Hypothesis {
  Simplex simplex;
  double sigma;
};

struct CandidateFamily {
  std::vector<Hypothesis> hypotheses;
  std::int64_t cover_points_used = 0;
  bool truncated = false;         // any budget bound was active
  bool points_truncated = false;  // detail: cover stage hit point_budget
  bool tuples_truncated = false;  // detail: subset stage hit tuple_budget

  std::int64_t size() const {
    return static_cast<std::int64_t>(hypotheses.size());
  }
};

namespace detail {

// log C(n, r), used to decide whether full enumeration fits the budget.
inline double log_binomial(std::int64_t n, int r) {
  double s = 0.0;
  for (int i = 0; i < r; ++i)
    s += std::log(double(n - i)) - std::log(double(i + 1));
  return s;
}

inline bool passes_filters(const Simplex& s, const LocalizationBall& ball,
                           double theta_lo, double theta_hi,
                           double vol_floor) {
  if (is_degenerate(s)) return false;
  for (int c = 0; c < s.vertices.cols(); ++c)
    if ((s.vertices.col(c) - ball.center).norm() > ball.radius * (1 + 1e-12))
      return false;
  const GeometrySummary g = geometry_summary(s);
  if (g.volume < vol_floor) return false;
  const int k = s.dim();
  if (g.a_max > theta_hi * std::pow(g.volume, double(k - 1) / k)) return false;
  if (g.l_max > theta_lo * k * std::pow(g.volume, 1.0 / k)) return false;
  return true;
}

}  // namespace detail

// Builds candidate simplices from (K+1)-subsets of the cover points, filters
// them, and crosses the survivors with the sigma grid. Full lexicographic
// enumeration when C(P, K+1) fits the tuple budget, otherwise that many
// distinct random subsets.
inline CandidateFamily enumerate_candidates(const CoverPoints& cover,
                                            const LocalizationBall& ball,
                                            const CoverSpec& spec,
                                            double theta_lo, double theta_hi,
                                            double vol_floor) {
  spec.validate();
  const std::int64_t p = cover.points.rows();
  const int k = static_cast<int>(cover.points.cols());
  if (p < k + 1) throw InsufficientCover("fewer than K+1 cover points");

  std::vector<double> sigmas = spec.sigmas;
  if (sigmas.empty()) {
    sigmas = ball.noise_bound ? noise_grid(*ball.noise_bound, spec.epsilon, k)
                              : std::vector<double>{0.0};
  }

  CandidateFamily fam;
  fam.cover_points_used = p;
  fam.points_truncated = cover.truncated;

  const bool full = detail::log_binomial(p, k + 1) <=
                    std::log(double(spec.tuple_budget)) + 1e-12;

  auto emit = [&](const std::vector<int>& idx) {
    Eigen::MatrixXd v(k, k + 1);
    for (int c = 0; c < k + 1; ++c)
      v.col(c) = cover.points.row(idx[c]).transpose();
    Simplex s(std::move(v));
    if (!detail::passes_filters(s, ball, theta_lo, theta_hi, vol_floor))
      return;
    for (double sig : sigmas) fam.hypotheses.push_back({s, sig});
  };

  if (full) {
    std::vector<int> idx(k + 1);
    for (int i = 0; i < k + 1; ++i) idx[i] = i;
    while (true) {
      emit(idx);
      int pos = k;
      while (pos >= 0 && idx[pos] == p - (k + 1) + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int j = pos + 1; j < k + 1; ++j) idx[j] = idx[j - 1] + 1;
    }
  } else {
    fam.tuples_truncated = true;
    Rng rng(derive_seed(spec.seed, "tuples"));
    std::unordered_set<std::uint64_t> seen;
    std::vector<int> idx(k + 1);
    std::int64_t drawn = 0;
    std::int64_t attempts = 0;
    const std::int64_t max_attempts = 64 * spec.tuple_budget + 1024;
    while (drawn < spec.tuple_budget && attempts < max_attempts) {
      ++attempts;
      for (int j = 0; j < k + 1; ++j)
        idx[j] = static_cast<int>(rng.next_u64() % std::uint64_t(p));
      std::sort(idx.begin(), idx.end());
      if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) continue;
      std::uint64_t key = 1469598103934665603ULL;
      for (int j : idx) key = splitmix64(key ^ std::uint64_t(j));
      if (!seen.insert(key).second) continue;
      ++drawn;
      emit(idx);
    }
  }
  fam.truncated = fam.points_truncated || fam.tuples_truncated;
  return fam;
}

// log of the theoretical hypothesis-family cardinality bound
// (R_n sqrt(K)/eps) * (1 + 2(K+1) R / (alpha eps))^{K(K+1)}.
inline double family_size_bound(const LocalizationBall& ball, double epsilon,
                                double alpha, int k) {
  if (epsilon <= 0 || alpha <= 0 || k < 1)
    throw InvalidConfig("family_size_bound needs positive arguments");
  const double r_n = ball.noise_bound ? *ball.noise_bound : ball.statistic;
  return std::log(r_n * std::sqrt(double(k)) / epsilon) +
         double(k) * (k + 1) *
             std::log1p(2.0 * (k + 1) * ball.radius / (alpha * epsilon));
}

// Vertex-perturbation scale from the quantization analysis,
// alpha <= Vol^{1/K} / (5 (K+1) theta_hi), with vol_floor standing in for
// the unknown true volume.
inline double default_alpha(double vol_floor, int k, double theta_hi) {
  if (vol_floor <= 0 || theta_hi <= 0)
    throw InvalidConfig("vol_floor and theta_hi must be positive");
  return std::pow(vol_floor, 1.0 / k) / (5.0 * (k + 1) * theta_hi);
}

}  // namespace slx
