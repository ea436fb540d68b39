#pragma once

// Test-only oracles: independent brute-force / quadrature routes for the
// quantities the library computes by smarter means. Nothing here is allowed
// to call the implementation path it checks.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <vector>

#include "slx/geometry.hpp"
#include "slx/rng.hpp"
#include "slx/sampler.hpp"

namespace oracle {

// Minimum summed l1 vertex distance over all (K+1)! bijections.
inline double brute_force_vertex_l1(const slx::Simplex& s1,
                                    const slx::Simplex& s2) {
  const int n = s1.dim() + 1;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (int i = 0; i < n; ++i)
      cost += (s1.vertices.col(i) - s2.vertices.col(perm[i])).cwiseAbs().sum();
    best = std::min(best, cost);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// One-variable-at-a-time CF recursion, pivoting on the largest coordinate
// (the CF is symmetric in the coordinates). The base case uses the
// half-angle form of 1 - e^{-i w}, which is cancellation-free, so no series
// fallback is needed.
inline std::complex<double> cf_recursion(std::vector<double> w) {
  using C = std::complex<double>;
  const int k = static_cast<int>(w.size());
  int piv = 0;
  for (int i = 1; i < k; ++i)
    if (std::abs(w[i]) > std::abs(w[piv])) piv = i;
  std::swap(w[piv], w[k - 1]);
  const double wk = w.back();
  const double s = std::sin(0.5 * wk), c = std::cos(0.5 * wk);
  const C one_minus_cis{2.0 * s * s, 2.0 * s * c};
  if (k == 1) return one_minus_cis / C{0.0, wk};
  std::vector<double> head(w.begin(), w.end() - 1);
  std::vector<double> shifted(head);
  for (double& x : shifted) x -= wk;
  const C a = cf_recursion(std::move(head));
  const C b = cf_recursion(std::move(shifted));
  return double(k) / C{0.0, wk} * (a - C{std::cos(wk), -std::sin(wk)} * b);
}

inline std::complex<double> cf_recursion(const Eigen::VectorXd& omega) {
  return cf_recursion(
      std::vector<double>(omega.data(), omega.data() + omega.size()));
}

// Empirical characteristic function over N uniform draws from the simplex.
inline std::complex<double> empirical_cf(const slx::Simplex& s,
                                         const Eigen::VectorXd& omega, int n,
                                         std::uint64_t seed,
                                         double sigma = 0.0) {
  const slx::SampleSet set = slx::sample(slx::NoisyModel(s, sigma), n, seed);
  const Eigen::VectorXd phase = set.points * omega;
  std::complex<double> acc{0, 0};
  for (int i = 0; i < n; ++i)
    acc += std::complex<double>{std::cos(phase(i)), -std::sin(phase(i))};
  return acc / double(n);
}

// Density of uniform[a,b] convolved with N(0, sigma^2), by dense trapezoid
// over the interval.
inline double conv_density_1d(double a, double b, double sigma, double x,
                              int grid = 20000) {
  const double h = (b - a) / grid;
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma);
  double acc = 0.0;
  for (int i = 0; i <= grid; ++i) {
    const double y = a + i * h;
    const double w = (i == 0 || i == grid) ? 0.5 : 1.0;
    acc += w * std::exp(-0.5 * (x - y) * (x - y) / (sigma * sigma));
  }
  return norm * acc * h / (b - a);
}

// Dense 1-d quadrature of TV and KL between two smoothed intervals.
inline double tv_1d_noisy(double a1, double b1, double s1, double a2,
                          double b2, double s2, int grid = 40000) {
  const double lo = std::min(a1, a2) - 8.0 * std::max(s1, s2);
  const double hi = std::max(b1, b2) + 8.0 * std::max(s1, s2);
  const double h = (hi - lo) / grid;
  double acc = 0.0;
  for (int i = 0; i <= grid; ++i) {
    const double x = lo + i * h;
    const double w = (i == 0 || i == grid) ? 0.5 : 1.0;
    acc += w * std::abs(conv_density_1d(a1, b1, s1, x, 4000) -
                        conv_density_1d(a2, b2, s2, x, 4000));
  }
  return 0.5 * acc * h;
}

inline double kl_1d_noisy(double a1, double b1, double s1, double a2,
                          double b2, double s2, int grid = 20000) {
  const double lo = std::min(a1, a2) - 8.0 * std::max(s1, s2);
  const double hi = std::max(b1, b2) + 8.0 * std::max(s1, s2);
  const double h = (hi - lo) / grid;
  double acc = 0.0;
  for (int i = 0; i <= grid; ++i) {
    const double x = lo + i * h;
    const double w = (i == 0 || i == grid) ? 0.5 : 1.0;
    const double f = conv_density_1d(a1, b1, s1, x, 2000);
    const double g = conv_density_1d(a2, b2, s2, x, 2000);
    if (f > 1e-300) acc += w * f * std::log(f / std::max(g, 1e-300));
  }
  return acc * h;
}

// ||(f1 - f2) * G_sigma||_2 for two smoothed intervals, dense quadrature.
inline double l2_1d_noisy(double a1, double b1, double a2, double b2,
                          double sigma, int grid = 40000) {
  const double lo = std::min(a1, a2) - 8.0 * sigma;
  const double hi = std::max(b1, b2) + 8.0 * sigma;
  const double h = (hi - lo) / grid;
  double acc = 0.0;
  for (int i = 0; i <= grid; ++i) {
    const double x = lo + i * h;
    const double w = (i == 0 || i == grid) ? 0.5 : 1.0;
    const double d = conv_density_1d(a1, b1, sigma, x, 4000) -
                     conv_density_1d(a2, b2, sigma, x, 4000);
    acc += w * d * d;
  }
  return std::sqrt(acc * h);
}

struct VolumeEstimate {
  double value;
  double se;
};

// Monte-Carlo volume: uniform draws over the bounding box, hit fraction
// times box volume.
inline VolumeEstimate mc_volume_bbox(const slx::Simplex& s, int mc,
                                     std::uint64_t seed) {
  const int k = s.dim();
  const Eigen::VectorXd lo = s.vertices.rowwise().minCoeff();
  const Eigen::VectorXd hi = s.vertices.rowwise().maxCoeff();
  double box = 1.0;
  for (int d = 0; d < k; ++d) box *= (hi(d) - lo(d));
  slx::Rng rng(seed);
  int hits = 0;
  Eigen::VectorXd x(k);
  for (int i = 0; i < mc; ++i) {
    for (int d = 0; d < k; ++d) x(d) = rng.uniform(lo(d), hi(d));
    if (slx::contains(s, x)) ++hits;
  }
  const double p = double(hits) / mc;
  return {box * p, box * std::sqrt(std::max(p * (1 - p), 0.0) / mc)};
}

// (K-1)-volume of a facet via QR of the edge matrix: product of the R
// diagonal over (K-1)!. Independent route from the Gram determinant.
inline double facet_measure_qr(const slx::Simplex& s, int skip) {
  const int k = s.dim();
  if (k == 1) return 1.0;
  Eigen::MatrixXd g(k, k - 1);
  const int base = (skip == 0) ? 1 : 0;
  int col = 0;
  for (int i = 0; i < k + 1; ++i) {
    if (i == skip || i == base) continue;
    g.col(col++) = s.vertices.col(i) - s.vertices.col(base);
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd r =
      qr.matrixQR().topRows(k - 1).triangularView<Eigen::Upper>();
  double prod = 1.0;
  for (int i = 0; i < k - 1; ++i) prod *= std::abs(r(i, i));
  return prod / slx::factorial(k - 1);
}

inline slx::Simplex random_simplex(int k, slx::Rng& rng, double scale = 1.0,
                                   double min_det = 0.05) {
  while (true) {
    Eigen::MatrixXd v(k, k + 1);
    for (int c = 0; c < k + 1; ++c)
      for (int r = 0; r < k; ++r) v(r, c) = scale * rng.gaussian();
    slx::Simplex s(std::move(v));
    if (slx::is_degenerate(s)) continue;
    const double d = std::abs(s.zero_translated().determinant());
    if (d >= min_det * std::pow(scale, k)) return s;
  }
}

inline Eigen::MatrixXd random_rotation(int k, slx::Rng& rng) {
  Eigen::MatrixXd a(k, k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) a(r, c) = rng.gaussian();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) = -q.col(0);
  return q;
}

}  // namespace oracle
