#pragma once

// Simplex representation and geometric functionals. A K-simplex lives in R^K
// and is stored as a K x (K+1) matrix whose columns are vertices. All
// operations are pure; values are freely shareable across threads.

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "slx/common.hpp"

namespace slx {

// Vertices below this determinant threshold (relative to diameter^K) are
// treated as affinely dependent.
inline constexpr double kDegeneracyTol = 1e-12;
// Barycentric coordinates down to -kMembershipTol still count as inside;
// absorbs linear-solve roundoff.
inline constexpr double kMembershipTol = 1e-9;

struct Simplex {
  Eigen::MatrixXd vertices;  // K x (K+1), columns are vertices

  Simplex() = default;
  explicit Simplex(Eigen::MatrixXd v) : vertices(std::move(v)) {
    if (vertices.cols() != vertices.rows() + 1)
      throw DimMismatch("simplex needs K+1 vertices in R^K");
    if (!vertices.allFinite())
      throw InvalidConfig("simplex vertices must be finite");
  }

  int dim() const { return static_cast<int>(vertices.rows()); }

  Eigen::VectorXd v0() const { return vertices.col(0); }

  // Zero-translated vertex matrix [v_1 - v_0 | ... | v_K - v_0].
  Eigen::MatrixXd zero_translated() const {
    const int k = dim();
    return vertices.rightCols(k).colwise() - vertices.col(0);
  }

  Eigen::VectorXd centroid() const { return vertices.rowwise().mean(); }
};

inline Simplex standard_simplex(int k) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(k, k + 1);
  v.rightCols(k) = Eigen::MatrixXd::Identity(k, k);
  return Simplex(std::move(v));
}

inline Simplex translate(const Simplex& s, const Eigen::VectorXd& b) {
  return Simplex(s.vertices.colwise() + b);
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

inline double diameter(const Simplex& s) {
  double best = 0.0;
  for (int i = 0; i < s.vertices.cols(); ++i)
    for (int j = i + 1; j < s.vertices.cols(); ++j)
      best = std::max(best, (s.vertices.col(i) - s.vertices.col(j)).norm());
  return best;
}

inline bool is_degenerate(const Simplex& s) {
  const double l = diameter(s);
  if (l == 0.0) return true;
  const double d = std::abs(s.zero_translated().determinant());
  return d < kDegeneracyTol * std::pow(l, s.dim());
}

struct GeometrySummary {
  double volume;      // Lebesgue measure, |det Theta| / K!
  double a_max;       // (K-1)-volume of the largest facet
  double l_max;       // diameter = longest edge
  double lambda_min;  // extreme singular values of Theta
  double lambda_max;
};

// Facet measure: the facet opposite vertex f is spanned by K-1 edges among
// the remaining vertices; its (K-1)-volume is sqrt(det(G^T G))/(K-1)!. A
// 0-dimensional facet (K=1) carries counting measure 1.
inline double facet_measure(const Simplex& s, int skip) {
  const int k = s.dim();
  if (k == 1) return 1.0;
  Eigen::MatrixXd g(k, k - 1);
  int base = (skip == 0) ? 1 : 0;
  int col = 0;
  for (int i = 0; i < k + 1; ++i) {
    if (i == skip || i == base) continue;
    g.col(col++) = s.vertices.col(i) - s.vertices.col(base);
  }
  const Eigen::MatrixXd gram = g.transpose() * g;
  const double det = gram.determinant();
  return std::sqrt(std::max(det, 0.0)) / factorial(k - 1);
}

inline GeometrySummary geometry_summary(const Simplex& s) {
  if (is_degenerate(s)) throw DegenerateSimplex();
  const int k = s.dim();
  GeometrySummary out;
  const Eigen::MatrixXd theta = s.zero_translated();
  out.volume = std::abs(theta.determinant()) / factorial(k);
  out.l_max = diameter(s);
  out.a_max = 0.0;
  for (int f = 0; f < k + 1; ++f)
    out.a_max = std::max(out.a_max, facet_measure(s, f));
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(theta);
  out.lambda_max = svd.singularValues()(0);
  out.lambda_min = svd.singularValues()(k - 1);
  return out;
}

inline bool is_isoperimetric(const Simplex& s, double theta_lo,
                             double theta_hi) {
  if (theta_lo <= 0 || theta_hi <= 0)
    throw InvalidConfig("isoperimetricity parameters must be positive");
  const GeometrySummary g = geometry_summary(s);
  const int k = s.dim();
  const bool facet_ok =
      g.a_max <= theta_hi * std::pow(g.volume, double(k - 1) / k);
  const bool diam_ok = g.l_max <= theta_lo * k * std::pow(g.volume, 1.0 / k);
  return facet_ok && diam_ok;
}

// Weights phi with V phi = x and sum(phi) = 1, via the K x K system
// Theta * phi_{1:K} = x - v_0.
inline Eigen::VectorXd barycentric(const Simplex& s,
                                   const Eigen::VectorXd& x) {
  if (x.size() != s.dim()) throw DimMismatch("point dimension != simplex dim");
  if (is_degenerate(s)) throw DegenerateSimplex();
  const int k = s.dim();
  Eigen::VectorXd phi(k + 1);
  phi.tail(k) = s.zero_translated().partialPivLu().solve(x - s.vertices.col(0));
  phi(0) = 1.0 - phi.tail(k).sum();
  return phi;
}

inline bool contains(const Simplex& s, const Eigen::VectorXd& x,
                     double tol = kMembershipTol) {
  return barycentric(s, x).minCoeff() >= -tol;
}

// Signal-to-noise ratio l_max / (K sigma); +inf when noiseless.
inline double snr(const Simplex& s, double sigma) {
  if (sigma < 0) throw InvalidConfig("sigma must be nonnegative");
  if (sigma == 0.0) return std::numeric_limits<double>::infinity();
  return diameter(s) / (s.dim() * sigma);
}

}  // namespace slx
