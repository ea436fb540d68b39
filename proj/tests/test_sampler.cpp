#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "slx/sampler.hpp"

using slx::NoisyModel;
using slx::standard_simplex;

TEST_CASE("dirichlet rows are valid weights") {
  const Eigen::MatrixXd w = slx::dirichlet_uniform(4, 500, 3);
  for (int i = 0; i < w.rows(); ++i) {
    REQUIRE(w.row(i).minCoeff() >= 0.0);
    REQUIRE(std::abs(w.row(i).sum() - 1.0) < 1e-12);
  }
}

TEST_CASE("dirichlet symmetry: two components average one half") {
  const int n = 100000;
  const Eigen::MatrixXd w = slx::dirichlet_uniform(2, n, 5);
  const double mean = w.col(0).mean();
  // Var of Beta(1,1) is 1/12
  REQUIRE(std::abs(mean - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("dirichlet component variance matches K/((K+1)^2 (K+2))") {
  const int n = 100000;
  const Eigen::MatrixXd w = slx::dirichlet_uniform(4, n, 7);
  const double mean = w.col(1).mean();
  double var = 0.0, m4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = w(i, 1) - mean;
    var += d * d;
    m4 += d * d * d * d;
  }
  var /= n;
  m4 /= n;
  const double target = 3.0 / (16.0 * 5.0);  // 0.0375
  const double se_var = std::sqrt(std::max(m4 - var * var, 0.0) / n);
  REQUIRE(std::abs(var - target) < 3.0 * se_var);
}

TEST_CASE("noiseless samples stay inside the simplex") {
  slx::Rng rng(11);
  const auto s = oracle::random_simplex(3, rng);
  const auto set = slx::sample(NoisyModel(s, 0.0), 500, 13);
  for (int i = 0; i < set.n(); ++i)
    REQUIRE(slx::contains(s, set.points.row(i).transpose()));
}

TEST_CASE("sample mean approaches the centroid") {
  const auto s = standard_simplex(2);
  const auto set = slx::sample(NoisyModel(s, 0.0), 100000, 17);
  const Eigen::VectorXd mean = set.points.colwise().mean().transpose();
  // component sd of uniform Dirichlet weights ~ sqrt(K/((K+1)^2(K+2)))
  const double se = std::sqrt(2.0 / (9.0 * 4.0) / set.n());
  REQUIRE((mean - s.centroid()).lpNorm<Eigen::Infinity>() < 4.0 * se);
}

TEST_CASE("noise displacement second moment is K sigma^2") {
  const auto s = standard_simplex(3);
  const double sigma = 0.5;
  const int n = 100000;
  const auto noisy = slx::sample(NoisyModel(s, sigma), n, 19);
  const auto clean = slx::sample(NoisyModel(s, 0.0), n, 19);
  double sum = 0, sumsq = 0;
  for (int i = 0; i < n; ++i) {
    const double d2 = (noisy.points.row(i) - clean.points.row(i)).squaredNorm();
    sum += d2;
    sumsq += d2 * d2;
  }
  const double mean = sum / n;
  const double se = std::sqrt(std::max(sumsq / n - mean * mean, 0.0) / n);
  REQUIRE(std::abs(mean - 3.0 * sigma * sigma) < 3.0 * se);
}

TEST_CASE("identical seeds give bitwise identical sample sets") {
  const auto s = standard_simplex(2);
  const auto a = slx::sample(NoisyModel(s, 0.3), 200, 23);
  const auto b = slx::sample(NoisyModel(s, 0.3), 200, 23);
  REQUIRE(a.points == b.points);
  const auto c = slx::sample(NoisyModel(s, 0.3), 200, 24);
  REQUIRE(a.points != c.points);
}

TEST_CASE("covariance splits into signal plus noise") {
  const auto s = standard_simplex(3);
  const double sigma = 0.4;
  const int n = 100000;
  const auto set = slx::sample(NoisyModel(s, sigma), n, 29);
  const Eigen::RowVectorXd mean = set.points.colwise().mean();
  const Eigen::MatrixXd centered = set.points.rowwise() - mean;
  const double trace_emp =
      (centered.transpose() * centered / double(n)).trace();
  // trace(V Cov(phi) V^T) for the standard simplex: Cov(phi) has K/((K+1)^2(K+2))
  // on the diagonal and -1/((K+1)^2(K+2)) off it; V = [0 | I] picks the last
  // K coordinates.
  const int k = 3;
  const double c = 1.0 / ((k + 1.0) * (k + 1.0) * (k + 2.0));
  const double trace_signal = k * (k * c);  // K diagonal entries of value K c
  const double expected = trace_signal + k * sigma * sigma;
  REQUIRE(std::abs(trace_emp - expected) < 0.01 * expected);
}
