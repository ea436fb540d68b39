#pragma once

// Localization of the true simplex from noisy samples: a data-driven ball
// C^K(p, R) that contains the simplex with high probability, plus an upper
// bound on the noise variance.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>

#include "slx/common.hpp"
#include "slx/sampler.hpp"

namespace slx {

// Which denominator to use for the noise-variance bound R_n = D / (K - c).
// The statement form (c = 2) is the default; the proof form (c = 3) is
// exposed because both appear in the derivation and they disagree.
enum class NoiseBoundVariant { statement, proof };

struct LocalizationBall {
  Eigen::VectorXd center;              // p, mean of all samples
  double radius = 0.0;                 // R = 8 sqrt((K+1)(K+2) D)
  std::optional<double> noise_bound;   // R_n, variance units; empty if K too small
  double statistic = 0.0;              // D, half mean squared pair difference
  int pairs = 0;                       // m, number of disjoint pairs used

  double noise_bound_or_throw() const {
    if (!noise_bound)
      throw NoiseBoundUndefined("R_n denominator nonpositive at this K");
    return *noise_bound;
  }
};

// D is built from disjoint consecutive pairs (y_1,y_2), (y_3,y_4), ... in
// file order; with an odd sample count the last sample still enters p but is
// dropped from D.
inline LocalizationBall localize(
    const SampleSet& samples,
    NoiseBoundVariant variant = NoiseBoundVariant::statement) {
  const int n = samples.n();
  if (n < 2) throw InvalidConfig("localization needs at least 2 samples");
  const int k = samples.dim();
  const int m = n / 2;

  LocalizationBall ball;
  ball.center = samples.points.colwise().mean().transpose();
  double d = 0.0;
  for (int i = 0; i < m; ++i)
    d += (samples.points.row(2 * i + 1) - samples.points.row(2 * i))
             .squaredNorm();
  ball.statistic = d / (2.0 * m);
  ball.pairs = m;
  ball.radius = 8.0 * std::sqrt((k + 1.0) * (k + 2.0) * ball.statistic);
  const int denom = k - (variant == NoiseBoundVariant::statement ? 2 : 3);
  if (denom > 0) ball.noise_bound = ball.statistic / denom;
  return ball;
}

// Pairs m needed for the localization guarantee at confidence 1 - delta;
// callers must supply 2m samples.
inline std::int64_t min_samples_localize(int k, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw InvalidConfidence("delta must lie in (0,1)");
  if (k < 1) throw InvalidConfig("K must be positive");
  const double m = 1000.0 * (k + 1.0) * (k + 2.0) * std::log(6.0 / delta);
  return static_cast<std::int64_t>(std::ceil(m));
}

}  // namespace slx
