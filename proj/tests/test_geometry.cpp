#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "slx/geometry.hpp"

using slx::Simplex;
using slx::standard_simplex;

TEST_CASE("standard simplex summary values") {
  const auto g2 = slx::geometry_summary(standard_simplex(2));
  REQUIRE(g2.volume == Catch::Approx(0.5));
  REQUIRE(g2.l_max == Catch::Approx(std::sqrt(2.0)));
  REQUIRE(g2.a_max == Catch::Approx(std::sqrt(2.0)));

  const auto g3 = slx::geometry_summary(standard_simplex(3));
  REQUIRE(g3.volume == Catch::Approx(1.0 / 6.0));
  REQUIRE(g3.a_max == Catch::Approx(std::sqrt(3.0) / 2.0));
  REQUIRE(g3.lambda_min > 0);
  REQUIRE(g3.lambda_min <= g3.lambda_max);
}

TEST_CASE("K=1 facets carry counting measure") {
  Eigen::MatrixXd v(1, 2);
  v << 0.0, 3.0;
  const auto g = slx::geometry_summary(Simplex(v));
  REQUIRE(g.a_max == Catch::Approx(1.0));
  REQUIRE(g.volume == Catch::Approx(3.0));
  REQUIRE(g.l_max == Catch::Approx(3.0));
}

TEST_CASE("isoperimetricity thresholds") {
  const auto d2 = standard_simplex(2);
  REQUIRE(slx::is_isoperimetric(d2, 2.0, 3.0));
  REQUIRE_FALSE(slx::is_isoperimetric(d2, 2.0, 1.0));
  REQUIRE(slx::is_isoperimetric(d2, 1e9, 1e9));
}

TEST_CASE("barycentric centroid, vertices, round trip") {
  const auto d3 = standard_simplex(3);
  const Eigen::VectorXd phi_c = slx::barycentric(d3, d3.centroid());
  for (int i = 0; i < 4; ++i) REQUIRE(phi_c(i) == Catch::Approx(0.25));

  const Eigen::VectorXd phi_v = slx::barycentric(d3, d3.vertices.col(3));
  REQUIRE(phi_v(3) == Catch::Approx(1.0));
  REQUIRE(std::abs(phi_v(0)) < 1e-12);

  slx::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Simplex s = oracle::random_simplex(3, rng);
    Eigen::VectorXd w(4);
    double sum = 0;
    for (int i = 0; i < 4; ++i) sum += (w(i) = rng.exponential());
    w /= sum;
    const Eigen::VectorXd x = s.vertices * w;
    const Eigen::VectorXd phi = slx::barycentric(s, x);
    REQUIRE((s.vertices * phi - x).norm() < 1e-10);
    REQUIRE(phi.minCoeff() >= -slx::kMembershipTol);
    REQUIRE(slx::contains(s, x));
  }
}

TEST_CASE("snr values") {
  REQUIRE(slx::snr(standard_simplex(2), std::sqrt(2.0) / 2.0) ==
          Catch::Approx(1.0));
  REQUIRE(std::isinf(slx::snr(standard_simplex(3), 0.0)));
  REQUIRE(slx::snr(standard_simplex(3), 0.1) ==
          Catch::Approx(std::sqrt(2.0) / 0.3));
}

TEST_CASE("barycentric coordinates are affine invariant") {
  slx::Rng rng(13);
  for (int k = 1; k <= 4; ++k) {
    for (int trial = 0; trial < 10; ++trial) {
      const Simplex s = oracle::random_simplex(k, rng);
      Eigen::MatrixXd a(k, k);
      do {
        for (int r = 0; r < k; ++r)
          for (int c = 0; c < k; ++c) a(r, c) = rng.gaussian();
      } while (std::abs(a.determinant()) < 0.1);
      Eigen::VectorXd b(k);
      for (int d = 0; d < k; ++d) b(d) = rng.gaussian();

      Eigen::VectorXd w(k + 1);
      double sum = 0;
      for (int i = 0; i <= k; ++i) sum += (w(i) = rng.exponential());
      w /= sum;
      const Eigen::VectorXd x = s.vertices * w;

      const Simplex mapped(((a * s.vertices).colwise() + b).eval());
      const Eigen::VectorXd phi1 = slx::barycentric(s, x);
      const Eigen::VectorXd phi2 = slx::barycentric(mapped, a * x + b);
      REQUIRE((phi1 - phi2).lpNorm<Eigen::Infinity>() < 1e-9);
    }
  }
}

TEST_CASE("volume scales like c^K and ignores translation") {
  slx::Rng rng(17);
  for (int k = 1; k <= 4; ++k) {
    const Simplex s = oracle::random_simplex(k, rng);
    const double vol = slx::geometry_summary(s).volume;
    const double c = 1.7;
    const Simplex scaled(Eigen::MatrixXd(c * s.vertices));
    REQUIRE(slx::geometry_summary(scaled).volume ==
            Catch::Approx(vol * std::pow(c, k)));
    Eigen::VectorXd b(k);
    for (int d = 0; d < k; ++d) b(d) = rng.gaussian();
    REQUIRE(slx::geometry_summary(slx::translate(s, b)).volume ==
            Catch::Approx(vol));
  }
}

TEST_CASE("diameter dominates interior point pairs") {
  slx::Rng rng(19);
  const Simplex s = oracle::random_simplex(3, rng);
  const double l = slx::diameter(s);
  const auto pts = slx::sample(slx::NoisyModel(s, 0.0), 2000, 7).points;
  for (int i = 0; i + 1 < pts.rows(); i += 2)
    REQUIRE((pts.row(i) - pts.row(i + 1)).norm() <= l + 1e-12);
}

TEST_CASE("monte carlo volume agrees within 3 SE") {
  slx::Rng rng(23);
  for (int k = 1; k <= 3; ++k) {
    const Simplex s = oracle::random_simplex(k, rng);
    const double vol = slx::geometry_summary(s).volume;
    const auto est = oracle::mc_volume_bbox(s, 40000, 99 + k);
    REQUIRE(std::abs(est.value - vol) <= 3.0 * est.se + 1e-12);
  }
}

TEST_CASE("degenerate simplices are rejected") {
  Eigen::MatrixXd v(2, 3);
  v << 0, 1, 2, 0, 1, 2;  // collinear
  const Simplex s(v);
  REQUIRE(slx::is_degenerate(s));
  REQUIRE_THROWS_AS(slx::geometry_summary(s), slx::DegenerateSimplex);
  REQUIRE_THROWS_AS(slx::barycentric(s, Eigen::Vector2d(0, 0)),
                    slx::DegenerateSimplex);
}
