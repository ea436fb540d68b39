#pragma once

// Characteristic functions of simplex densities and band-energy machinery.
//
// The CF of the standard simplex is a divided difference of the exponential:
//   F_k(w) = (k!/i^k) sum_l (1 - e^{-i w_l}) [ w_l prod_{j!=l} (w_j - w_l) ]^{-1},
// with every pole removable. Naive evaluation is catastrophically
// cancellative near coincident or vanishing coordinates, so evaluation is
// routed by separation: the closed form on well-separated input, otherwise
// the one-variable-at-a-time recursion pivoted on the largest coordinate,
// and a homogeneous-moment series once every coordinate is small.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "slx/geometry.hpp"
#include "slx/metrics.hpp"
#include "slx/rng.hpp"
#include "slx/sampler.hpp"

namespace slx {

using Complex = std::complex<double>;

namespace cf_detail {

// 1 - e^{-i t} without cancellation: 2 sin(t/2) (sin(t/2) + i cos(t/2)).
inline Complex one_minus_cis(double t) {
  const double s = std::sin(0.5 * t), c = std::cos(0.5 * t);
  return {2.0 * s * s, 2.0 * s * c};
}

inline Complex i_pow_neg(int k) {
  switch (k & 3) {
    case 0: return {1, 0};
    case 1: return {0, -1};
    case 2: return {-1, 0};
    default: return {0, 1};
  }
}

inline Complex closed_form(const std::vector<double>& w) {
  const int k = static_cast<int>(w.size());
  Complex sum{0, 0};
  for (int l = 0; l < k; ++l) {
    double denom = w[l];
    for (int j = 0; j < k; ++j)
      if (j != l) denom *= (w[j] - w[l]);
    sum += one_minus_cis(w[l]) / denom;
  }
  return factorial(k) * i_pow_neg(k) * sum;
}

// E[e^{-i w.x}] expanded in moments of the flat Dirichlet:
//   F = sum_n (-i)^n k!/(n+k)! h_n(w),
// with h_n the complete homogeneous symmetric polynomial. Accurate for
// small ||w||_inf where the other routes cancel.
inline Complex series(const std::vector<double>& w) {
  const int k = static_cast<int>(w.size());
  constexpr int kMax = 120;
  std::vector<Complex> h(kMax + 1, Complex{0, 0});
  h[0] = 1.0;
  for (double x : w)
    for (int n = 1; n <= kMax; ++n) h[n] += x * h[n - 1];
  Complex acc{0, 0};
  Complex ipow{1, 0};
  double c = 1.0;  // k!/(n+k)! at n = 0
  for (int n = 0; n <= kMax; ++n) {
    const Complex term = c * ipow * h[n];
    acc += term;
    if (n > 4 && std::abs(term) < 1e-19) break;
    ipow *= Complex{0, -1};
    c /= double(n + k + 1);
  }
  return acc;
}

// Recursion F_k(w_1..w_k) = (k/(i w_k)) [F_{k-1}(w_1..w_{k-1})
//   - e^{-i w_k} F_{k-1}(w_1 - w_k, ..., w_{k-1} - w_k)],
// always dividing by the largest coordinate (the CF is symmetric in the
// coordinates). Small inputs short-circuit into the series.
inline Complex recursive(std::vector<double> w) {
  const int k = static_cast<int>(w.size());
  int piv = 0;
  for (int i = 1; i < k; ++i)
    if (std::abs(w[i]) > std::abs(w[piv])) piv = i;
  if (std::abs(w[piv]) < 0.6) return series(w);
  std::swap(w[piv], w[k - 1]);
  const double wk = w.back();
  if (k == 1) return one_minus_cis(wk) / Complex{0, wk};
  std::vector<double> head(w.begin(), w.end() - 1);
  std::vector<double> shifted(head);
  for (double& x : shifted) x -= wk;
  const Complex a = recursive(head);
  const Complex b = recursive(std::move(shifted));
  const Complex phase{std::cos(wk), -std::sin(wk)};
  return double(k) / Complex{0, wk} * (a - phase * b);
}

inline bool well_separated(const std::vector<double>& w) {
  double winf = 0.0;
  for (double x : w) winf = std::max(winf, std::abs(x));
  const double thresh = 1e-6 * (1.0 + winf);
  for (std::size_t l = 0; l < w.size(); ++l) {
    if (std::abs(w[l]) <= thresh) return false;
    for (std::size_t j = l + 1; j < w.size(); ++j)
      if (std::abs(w[j] - w[l]) <= thresh) return false;
  }
  return true;
}

}  // namespace cf_detail

// CF of the uniform density on the standard simplex Delta_K at frequency w.
inline Complex cf_standard(const Eigen::VectorXd& omega) {
  const int k = static_cast<int>(omega.size());
  if (k < 1) throw InvalidConfig("frequency must have dimension >= 1");
  std::vector<double> w(omega.data(), omega.data() + k);
  if (cf_detail::well_separated(w)) return cf_detail::closed_form(w);
  return cf_detail::recursive(std::move(w));
}

// Affine transport: F_S(w) = e^{-i w.v0} F_Delta(Theta^T w).
inline Complex cf_simplex(const Simplex& s, const Eigen::VectorXd& omega) {
  if (is_degenerate(s)) throw DegenerateSimplex();
  if (omega.size() != s.dim()) throw DimMismatch();
  const double phase = omega.dot(s.v0());
  const Complex shift{std::cos(phase), -std::sin(phase)};
  return shift * cf_standard(s.zero_translated().transpose() * omega);
}

// CF of the model f_S * G_sigma: Gaussian multiplier e^{-sigma^2 |w|^2 / 2}.
inline Complex cf_noisy(const NoisyModel& m, const Eigen::VectorXd& omega) {
  return cf_simplex(m.simplex, omega) *
         std::exp(-0.5 * m.sigma * m.sigma * omega.squaredNorm());
}

enum class TailMethod { closed_form_quadrature, monte_carlo };

struct TailReport {
  double alpha = 0.0;
  double in_band_energy = 0.0;   // int_{[-a,a]^K} |F|^2
  double out_band_energy = 0.0;  // total - in_band
  double total_energy = 0.0;     // (2 pi)^K / Vol(S), by Parseval
  TailMethod method = TailMethod::closed_form_quadrature;

  double normalized_tail() const { return out_band_energy / total_energy; }
};

namespace cf_detail {

template <typename Fn>
inline double tensor_trapezoid(int k, double alpha, int grid, Fn&& f) {
  // composite trapezoid over [-alpha, alpha]^K via an index odometer
  const double h = 2.0 * alpha / grid;
  std::vector<int> idx(k, 0);
  Eigen::VectorXd w(k);
  double acc = 0.0;
  while (true) {
    double weight = 1.0;
    for (int d = 0; d < k; ++d) {
      w(d) = -alpha + h * idx[d];
      if (idx[d] == 0 || idx[d] == grid) weight *= 0.5;
    }
    acc += weight * f(w);
    int d = 0;
    while (d < k && ++idx[d] > grid) idx[d++] = 0;
    if (d == k) break;
  }
  return acc * std::pow(h, k);
}

inline int default_grid(int k) {
  switch (k) {
    case 1: return 2048;
    case 2: return 512;
    default: return 128;
  }
}

}  // namespace cf_detail

// Band-energy split of |F_S|^2 at the box [-alpha, alpha]^K. Quadrature mode
// is limited to K <= 3 (cost grows as grid^K); Monte Carlo mode estimates
// the in-band integral by uniform frequency sampling and works at any K.
inline TailReport tail_energy(const Simplex& s, double alpha, int grid = 0,
                              TailMethod method =
                                  TailMethod::closed_form_quadrature,
                              int mc = 200000, std::uint64_t seed = 0) {
  if (alpha <= 0) throw InvalidConfig("alpha must be positive");
  const int k = s.dim();
  if (method == TailMethod::closed_form_quadrature && k > 3)
    throw UnsupportedDimension("quadrature tail mode supports K <= 3");
  TailReport rep;
  rep.alpha = alpha;
  rep.method = method;
  rep.total_energy = std::pow(2.0 * std::numbers::pi, k) /
                     geometry_summary(s).volume;
  if (method == TailMethod::closed_form_quadrature) {
    if (grid <= 0) grid = cf_detail::default_grid(k);
    rep.in_band_energy = cf_detail::tensor_trapezoid(
        k, alpha, grid,
        [&](const Eigen::VectorXd& w) { return std::norm(cf_simplex(s, w)); });
  } else {
    Rng rng(derive_seed(seed, "tail-mc"));
    double acc = 0.0;
    Eigen::VectorXd w(k);
    for (int i = 0; i < mc; ++i) {
      for (int d = 0; d < k; ++d) w(d) = rng.uniform(-alpha, alpha);
      acc += std::norm(cf_simplex(s, w));
    }
    rep.in_band_energy = std::pow(2.0 * alpha, k) * acc / mc;
  }
  rep.out_band_energy = std::max(rep.total_energy - rep.in_band_energy, 0.0);
  return rep;
}

// ||(f1 - f2) * G_sigma||_2 by frequency-domain quadrature:
//   (2 pi)^{-K} int |F1 - F2|^2 e^{-sigma^2 |w|^2} dw
// over a box wide enough that the Gaussian factor is below 1e-12 outside.
inline double l2_noisy_quad(const Simplex& s1, const Simplex& s2, double sigma,
                            int grid = 0) {
  if (s1.dim() != s2.dim()) throw DimMismatch();
  const int k = s1.dim();
  if (k > 3) throw UnsupportedDimension("frequency quadrature supports K <= 3");
  if (sigma <= 0) throw InvalidConfig("sigma must be positive");
  if (grid <= 0) grid = cf_detail::default_grid(k);
  const double half_width = std::sqrt(2.0 * std::log(1e12)) / sigma;
  const double integral = cf_detail::tensor_trapezoid(
      k, half_width, grid, [&](const Eigen::VectorXd& w) {
        const Complex diff = cf_simplex(s1, w) - cf_simplex(s2, w);
        return std::norm(diff) * std::exp(-sigma * sigma * w.squaredNorm());
      });
  return std::sqrt(std::max(integral, 0.0) /
                   std::pow(2.0 * std::numbers::pi, k));
}

struct RecoverabilityReport {
  double l2_plain = 0.0;     // ||f1 - f2||_2 (MC intersection estimate)
  double l2_plain_se = 0.0;
  double l2_noisy = 0.0;     // ||(f1 - f2) * G_sigma||_2 (CF quadrature)
  double ratio = 0.0;        // rho = l2_plain / l2_noisy
  double snr = 0.0;
  double envelope = 0.0;     // e^{c K / SNR^2} at the configured c
  double envelope_c = 0.0;
};

// Measures how much Gaussian smoothing attenuates the l2 difference of two
// simplex densities, next to the theoretical envelope e^{c K / SNR^2} for a
// caller-chosen constant c. The envelope constant is reported, never
// asserted.
inline RecoverabilityReport recoverability_check(const Simplex& s1,
                                                 const Simplex& s2,
                                                 double sigma, int mc,
                                                 std::uint64_t seed,
                                                 double envelope_c = 1.0,
                                                 int grid = 0) {
  RecoverabilityReport rep;
  const DistanceEstimate plain = l2_uniform(s1, s2, mc, seed);
  rep.l2_plain = plain.value;
  rep.l2_plain_se = plain.std_error;
  const double l_max = std::max(diameter(s1), diameter(s2));
  rep.envelope_c = envelope_c;
  if (sigma == 0.0) {
    rep.l2_noisy = rep.l2_plain;  // identity kernel
    rep.ratio = 1.0;
    rep.snr = std::numeric_limits<double>::infinity();
    rep.envelope = 1.0;
    return rep;
  }
  rep.l2_noisy = l2_noisy_quad(s1, s2, sigma, grid);
  rep.ratio = rep.l2_noisy > 0 ? rep.l2_plain / rep.l2_noisy
                               : std::numeric_limits<double>::infinity();
  rep.snr = l_max / (s1.dim() * sigma);
  rep.envelope = std::exp(envelope_c * s1.dim() / (rep.snr * rep.snr));
  return rep;
}

}  // namespace slx
