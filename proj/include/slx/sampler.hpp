#pragma once

// Data generation: y_i = V phi_i + z_i with uniform-Dirichlet weights and
// isotropic Gaussian noise. Sample i is generated from its own derived
// substream, so chunked/parallel generation agrees with serial.

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "slx/geometry.hpp"
#include "slx/rng.hpp"

namespace slx {

struct NoisyModel {
  Simplex simplex;
  double sigma = 0.0;

  NoisyModel() = default;
  NoisyModel(Simplex s, double sig) : simplex(std::move(s)), sigma(sig) {
    if (sigma < 0) throw InvalidConfig("sigma must be nonnegative");
    if (is_degenerate(simplex)) throw DegenerateSimplex();
  }

  double snr() const { return slx::snr(simplex, sigma); }
};

struct SampleSet {
  Eigen::MatrixXd points;  // n x K, one row per sample
  std::uint64_t seed = 0;
  std::string model_tag;

  int n() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
};

// Uniform Dirichlet draws by normalizing K+1 i.i.d. unit-rate exponentials.
// Returns count x k_plus_1, one weight vector per row.
inline Eigen::MatrixXd dirichlet_uniform(int k_plus_1, int count,
                                         std::uint64_t seed) {
  if (k_plus_1 < 2) throw InvalidConfig("need at least 2 weight components");
  if (count < 1) throw InvalidConfig("count must be >= 1");
  Eigen::MatrixXd w(count, k_plus_1);
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, "dirichlet", static_cast<std::uint64_t>(i)));
    double sum = 0.0;
    for (int j = 0; j < k_plus_1; ++j) {
      w(i, j) = rng.exponential();
      sum += w(i, j);
    }
    w.row(i) /= sum;
  }
  return w;
}

inline SampleSet sample(const NoisyModel& model, int n, std::uint64_t seed) {
  if (n < 1) throw InvalidConfig("n must be >= 1");
  const int k = model.simplex.dim();
  SampleSet out;
  out.points.resize(n, k);
  out.seed = seed;
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, "sample", static_cast<std::uint64_t>(i)));
    Eigen::VectorXd phi(k + 1);
    double sum = 0.0;
    for (int j = 0; j < k + 1; ++j) {
      phi(j) = rng.exponential();
      sum += phi(j);
    }
    phi /= sum;
    Eigen::VectorXd y = model.simplex.vertices * phi;
    if (model.sigma > 0.0)
      for (int d = 0; d < k; ++d) y(d) += model.sigma * rng.gaussian();
    out.points.row(i) = y.transpose();
  }
  return out;
}

}  // namespace slx
