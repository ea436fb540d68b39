#pragma once

// Density selection: quadrature evaluation of noise-convolved simplex
// densities and the deterministic pairwise tournament that picks a
// hypothesis whose density is close to the data distribution.
//
// Duel rule, fixed here: for each pair i < j the set A_ij = {x : f_i(x) >
// f_j(x)} is evaluated pointwise; each hypothesis estimates its own mass of
// A_ij from a frozen sample set, and the duel goes to the hypothesis whose
// mass is closer to the empirical data mass. Final winner is the hypothesis
// with the most duel wins, ties to the lowest index.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "slx/cover.hpp"
#include "slx/geometry.hpp"
#include "slx/localization.hpp"
#include "slx/sampler.hpp"

namespace slx {

// Frozen Dirichlet weights shared by every duel that touches the same
// hypothesis; freezing keeps the tournament deterministic given the seed.
//
// Nodes come from a seed-rotated Halton sequence pushed through the
// exponential-spacings map. The low-discrepancy stream drops the mixture
// ripple from Q^{-1/2} to roughly log(Q)/Q, which is what makes moderate
// quadrature sizes usable at small sigma.
struct QuadratureSet {
  Eigen::MatrixXd weights;  // quad x (K+1) Dirichlet rows
  int quad = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline double radical_inverse(std::uint64_t n, std::uint32_t base) {
  double inv = 1.0 / base, value = 0.0, factor = inv;
  while (n) {
    value += double(n % base) * factor;
    n /= base;
    factor *= inv;
  }
  return value;
}

inline constexpr std::uint32_t kHaltonPrimes[] = {
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43};

}  // namespace detail

inline QuadratureSet make_quadrature(int k, int quad, std::uint64_t seed) {
  if (quad < 1) throw InvalidConfig("quadrature size must be >= 1");
  if (k > int(std::size(detail::kHaltonPrimes)))
    throw UnsupportedDimension("quadrature bases cover K <= 14");
  QuadratureSet q;
  q.quad = quad;
  q.seed = seed;
  q.weights.resize(quad, k + 1);
  // Cranley-Patterson rotation keeps the node set seed-dependent while
  // preserving the low-discrepancy structure.
  std::vector<double> shift(k);
  for (int d = 0; d < k; ++d) {
    shift[d] = double(splitmix64(derive_seed(seed, "qshift", d)) >> 11) *
               0x1.0p-53;
  }
  // Stick-breaking map to flat-Dirichlet weights: w_i = rem (1 - u^{1/(K-i)}).
  for (int j = 0; j < quad; ++j) {
    double rem = 1.0;
    for (int d = 0; d < k; ++d) {
      double u = detail::radical_inverse(std::uint64_t(j) + 1,
                                         detail::kHaltonPrimes[d]) +
                 shift[d];
      u -= std::floor(u);
      const double x = 1.0 - std::pow(u, 1.0 / (k - d));
      q.weights(j, d) = rem * x;
      rem *= (1.0 - x);
    }
    q.weights(j, k) = rem;
  }
  return q;
}

// (f_S * G_sigma)(x) approximated as a uniform mixture of Gaussians centered
// at V phi_q over the frozen weights.
inline double noisy_density(const NoisyModel& model, const Eigen::VectorXd& x,
                            const QuadratureSet& quad) {
  if (model.sigma <= 0.0)
    throw UnsupportedNoiseless("density evaluation needs sigma > 0");
  const int k = model.simplex.dim();
  const double inv2s2 = 0.5 / (model.sigma * model.sigma);
  const double norm =
      std::pow(2.0 * std::numbers::pi * model.sigma * model.sigma, -0.5 * k);
  double acc = 0.0;
  for (int q = 0; q < quad.quad; ++q) {
    const Eigen::VectorXd center =
        model.simplex.vertices * quad.weights.row(q).transpose();
    acc += std::exp(-inv2s2 * (x - center).squaredNorm());
  }
  return norm * acc / quad.quad;
}

// Batched density evaluation for one hypothesis. sigma = 0 hypotheses are
// evaluated exactly as uniform densities, which is what the tournament falls
// back to in the noiseless case.
class HypothesisEvaluator {
 public:
  HypothesisEvaluator(const Hypothesis& hyp, int quad, std::uint64_t seed)
      : model_{hyp.simplex, hyp.sigma} {
    const int k = model_.simplex.dim();
    if (model_.sigma > 0.0) {
      quad_ = make_quadrature(k, quad, seed);
      atoms_ = quad_.weights * model_.simplex.vertices.transpose();  // Q x K
      atom_sq_ = atoms_.rowwise().squaredNorm();
      norm_ = std::pow(
          2.0 * std::numbers::pi * model_.sigma * model_.sigma, -0.5 * k);
    } else {
      inv_vol_ = 1.0 / geometry_summary(model_.simplex).volume;
      lu_.compute(model_.simplex.zero_translated());
    }
  }

  const NoisyModel& model() const { return model_; }

  // Densities at the rows of `pts` (P x K).
  Eigen::VectorXd batch(const Eigen::MatrixXd& pts) const {
    const int p = static_cast<int>(pts.rows());
    Eigen::VectorXd out(p);
    if (model_.sigma == 0.0) {
      const Eigen::MatrixXd rel =
          (pts.rowwise() - model_.simplex.v0().transpose()).transpose();
      const Eigen::MatrixXd lam = lu_.solve(rel);  // K x P
      for (int i = 0; i < p; ++i) {
        const bool inside = lam.col(i).minCoeff() >= -kMembershipTol &&
                            lam.col(i).sum() <= 1.0 + kMembershipTol;
        out(i) = inside ? inv_vol_ : 0.0;
      }
      return out;
    }
    // Exponent inv2s2 (2 p.a - |p|^2 - |a|^2) = -|p - a|^2 / (2 sigma^2) is
    // never positive, so the exp cannot overflow. The dot-product block is
    // built in a reused thread-local buffer; per-call allocation of the
    // len x Q panel would dominate the tournament otherwise.
    const double inv2s2 = 0.5 / (model_.sigma * model_.sigma);
    const int q = static_cast<int>(atoms_.rows());
    constexpr int kBlock = 512;
    static thread_local std::vector<double> buf;
    buf.resize(std::size_t(kBlock) * q);
    for (int start = 0; start < p; start += kBlock) {
      const int len = std::min<int>(kBlock, p - start);
      Eigen::Map<Eigen::MatrixXd> panel(buf.data(), len, q);
      const auto block = pts.middleRows(start, len);
      panel.noalias() = block * atoms_.transpose();
      Eigen::Map<Eigen::ArrayXXd> e(buf.data(), len, q);
      e *= 2.0 * inv2s2;
      e.colwise() -= inv2s2 * block.rowwise().squaredNorm().array();
      e.rowwise() -= inv2s2 * atom_sq_.transpose().array();
      out.segment(start, len) = e.exp().rowwise().sum() * (norm_ / q);
    }
    return out;
  }

 private:
  NoisyModel model_;
  QuadratureSet quad_;
  Eigen::MatrixXd atoms_;    // quad x K mixture centers
  Eigen::VectorXd atom_sq_;  // squared norms of the centers
  double norm_ = 0.0;
  double inv_vol_ = 0.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

struct DuelRecord {
  int i, j;
  double dev_i;  // |P_i(A_ij) - mu_n(A_ij)|
  double dev_j;  // |P_j(A_ij) - mu_n(A_ij)|
  int winner;
};

struct TournamentOutcome {
  int winner = 0;
  std::vector<int> wins;
  std::vector<DuelRecord> discrepancies;
  int n_used = 0;
};

// Samples needed by the tournament to select within 3 min + 4 eps at
// confidence 1 - delta from a family of M densities.
inline std::int64_t min_samples_select(std::int64_t m, double epsilon,
                                       double delta) {
  if (m < 1) throw InvalidConfig("family size must be >= 1");
  if (!(epsilon > 0 && epsilon < 1) || !(delta > 0 && delta < 1))
    throw InvalidConfig("epsilon and delta must lie in (0,1)");
  const double n =
      std::log(3.0 * double(m) * double(m) / delta) / (2.0 * epsilon * epsilon);
  return static_cast<std::int64_t>(std::ceil(n));
}

inline TournamentOutcome scheffe_select(const CandidateFamily& family,
                                        const SampleSet& data, int quad_size,
                                        int mc_mass, std::uint64_t seed) {
  const std::int64_t m = family.size();
  if (m == 0) throw EmptyFamily();
  if (data.n() < 1) throw InvalidConfig("tournament needs data");

  TournamentOutcome out;
  out.n_used = data.n();
  out.wins.assign(m, 0);
  if (m == 1) return out;

  std::vector<HypothesisEvaluator> evals;
  evals.reserve(m);
  for (std::int64_t i = 0; i < m; ++i)
    evals.emplace_back(family.hypotheses[i], quad_size,
                       derive_seed(seed, "quad", std::uint64_t(i)));

  // Frozen per-hypothesis sample sets for the mass estimates, plus each
  // hypothesis's own density on its own set and on the data.
  std::vector<Eigen::MatrixXd> sets(m);
  std::vector<Eigen::VectorXd> dens_own(m), dens_data(m);
  for (std::int64_t i = 0; i < m; ++i) {
    sets[i] = sample(evals[i].model(), mc_mass,
                     derive_seed(seed, "mass", std::uint64_t(i)))
                  .points;
    dens_own[i] = evals[i].batch(sets[i]);
    dens_data[i] = evals[i].batch(data.points);
  }

  out.discrepancies.reserve(std::size_t(m) * (m - 1) / 2);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const Eigen::VectorXd fj_on_i = evals[j].batch(sets[i]);
      const Eigen::VectorXd fi_on_j = evals[i].batch(sets[j]);
      const double p_i =
          (dens_own[i].array() > fj_on_i.array()).cast<double>().mean();
      const double p_j =
          (fi_on_j.array() > dens_own[j].array()).cast<double>().mean();
      const double mu =
          (dens_data[i].array() > dens_data[j].array()).cast<double>().mean();
      DuelRecord rec;
      rec.i = i;
      rec.j = j;
      rec.dev_i = std::abs(p_i - mu);
      rec.dev_j = std::abs(p_j - mu);
      rec.winner = (rec.dev_i <= rec.dev_j) ? i : j;
      ++out.wins[rec.winner];
      out.discrepancies.push_back(rec);
    }
  }
  int best = 0;
  for (int i = 1; i < m; ++i)
    if (out.wins[i] > out.wins[best]) best = i;
  out.winner = best;
  return out;
}

// Sample-size bound of the bounded-ball learnability statement, exposed for
// reporting only; the operative count for the tournament stage is
// min_samples_select.
inline double pac_sample_bound(int k, double epsilon, double delta, double r,
                               double r_n, double theta_hi, double vol) {
  if (!(epsilon > 0 && delta > 0) || vol <= 0)
    throw InvalidConfig("pac_sample_bound needs positive arguments");
  const double t1 = std::log(30.0 * r_n * std::sqrt(double(k)) /
                             (delta * epsilon));
  const double t2 =
      2.0 * (k + 1.0) * (k + 1.0) *
      std::log1p(100.0 * r * theta_hi * (k + 1.0) /
                 (epsilon * std::pow(vol, 1.0 / k)));
  return 50.0 * (t1 + t2) / (epsilon * epsilon);
}

struct LearnConfig {
  double epsilon = 0.1;
  double delta = 0.1;
  double theta_lo = 5.0;
  double theta_hi = 5.0;
  double vol_floor = 1.0;
  std::int64_t point_budget = 5000;
  std::int64_t tuple_budget = 200000;
  double eps_cov = 0.0;     // <= 0: alpha * epsilon / (K+1)
  double alpha = 0.0;       // <= 0: derived from vol_floor
  double count_factor = 2.0;
  double sigma_max = -1.0;  // < 0: sqrt(R_n), or sqrt(D) where R_n undefined
  int quad_size = 4000;
  int mc_mass = 20000;
  bool seed_candidates = true;
  std::vector<Hypothesis> forced;  // appended verbatim (test hook)
  NoiseBoundVariant rn_variant = NoiseBoundVariant::statement;
  std::uint64_t seed = 0;
};

struct LearnResult {
  Simplex simplex;
  double sigma = 0.0;
  TournamentOutcome outcome;
  LocalizationBall ball;
  std::int64_t family_size = 0;
  bool family_truncated = false;
  bool cover_truncated = false;  // point stage specifically
};

namespace detail {

// Data-driven candidate seeding: a farthest-point traversal of the
// localization half picks K+1 spread samples as a base simplex. Each
// hypothesis noise level then gets deflation-corrected copies: the extreme
// of n noisy draws overshoots the support by roughly sigma sqrt(2 ln n), so
// the base is pulled toward the centroid by that amount before jittering.
// Purely a practical booster for the budgeted enumeration; selection still
// runs through the tournament.
struct HullSeedBase {
  Eigen::MatrixXd vertices;  // K x (K+1) extreme points
  Eigen::VectorXd centroid;
  double mean_radius = 0.0;  // mean vertex distance from the centroid
  int n = 0;
};

inline std::optional<HullSeedBase> hull_seed_base(const Eigen::MatrixXd& pts,
                                                  int k) {
  const int n = static_cast<int>(pts.rows());
  if (n < k + 1) return std::nullopt;
  const Eigen::RowVectorXd centroid = pts.colwise().mean();
  std::vector<int> chosen;
  {
    int far = 0;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      const double d = (pts.row(i) - centroid).squaredNorm();
      if (d > best) best = d, far = i;
    }
    chosen.push_back(far);
  }
  Eigen::VectorXd mind = Eigen::VectorXd::Constant(
      n, std::numeric_limits<double>::infinity());
  while (static_cast<int>(chosen.size()) < k + 1) {
    const int last = chosen.back();
    int far = 0;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      mind(i) = std::min(mind(i), (pts.row(i) - pts.row(last)).squaredNorm());
      if (mind(i) > best) best = mind(i), far = i;
    }
    chosen.push_back(far);
  }
  HullSeedBase base;
  base.vertices.resize(k, k + 1);
  for (int c = 0; c < k + 1; ++c)
    base.vertices.col(c) = pts.row(chosen[c]).transpose();
  base.centroid = centroid.transpose();
  base.n = n;
  for (int c = 0; c < k + 1; ++c)
    base.mean_radius += (base.vertices.col(c) - base.centroid).norm();
  base.mean_radius /= (k + 1);
  return base;
}

inline std::vector<Simplex> hull_seeds_for_sigma(const HullSeedBase& base,
                                                 double sigma) {
  // Radial extreme-value correction: the farthest sample overreaches the
  // hull by roughly 2 sigma (the maximizer trades signal quantile against
  // noise quantile, so the effective log factor is mild). Near-unit scales
  // are always kept so shape quality never hinges on the sigma estimate.
  double deflate = 1.0;
  if (sigma > 0.0 && base.mean_radius > 0.0)
    deflate = std::max(0.3, 1.0 - 2.0 * sigma / base.mean_radius);
  std::vector<double> scales{0.95, 1.0, 1.06};
  for (double jitter : {0.95, 1.0, 1.06}) {
    const double s = deflate * jitter;
    bool dup = false;
    for (double existing : scales) dup = dup || std::abs(existing - s) < 0.02;
    if (!dup) scales.push_back(s);
  }
  std::vector<Simplex> out;
  for (double scale : scales) {
    Eigen::MatrixXd v = base.vertices;
    for (int c = 0; c < v.cols(); ++c)
      v.col(c) = base.centroid + scale * (base.vertices.col(c) - base.centroid);
    Simplex s(std::move(v));
    if (!is_degenerate(s)) out.push_back(std::move(s));
  }
  // Absolute variants: pull every vertex the same fixed distance toward the
  // centroid (multiples of sigma). Handles uneven per-vertex overreach that
  // a global scale cannot.
  if (sigma > 0.0) {
    for (double mult : {1.0, 2.0, 3.0}) {
      Eigen::MatrixXd v = base.vertices;
      bool valid = true;
      for (int c = 0; c < v.cols() && valid; ++c) {
        const Eigen::VectorXd r = base.vertices.col(c) - base.centroid;
        const double len = r.norm();
        if (len <= 2.0 * mult * sigma) {
          valid = false;
          break;
        }
        v.col(c) = base.vertices.col(c) - (mult * sigma / len) * r;
      }
      if (!valid) continue;
      Simplex s(std::move(v));
      if (!is_degenerate(s)) out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace detail

// Full pipeline: split the data by index parity, localize on the even half,
// build the candidate family, and select on the odd half.
inline LearnResult learn(const SampleSet& data, const LearnConfig& cfg) {
  if (data.n() < 4) throw InvalidConfig("learn needs at least 4 samples");
  const int k = data.dim();

  SampleSet loc_half, sel_half;
  const int n = data.n();
  loc_half.points.resize((n + 1) / 2, k);
  sel_half.points.resize(n / 2, k);
  for (int i = 0; i < n; ++i) {
    if (i % 2 == 0)
      loc_half.points.row(i / 2) = data.points.row(i);
    else
      sel_half.points.row(i / 2) = data.points.row(i);
  }
  loc_half.seed = sel_half.seed = data.seed;

  LearnResult res;
  res.ball = localize(loc_half, cfg.rn_variant);

  double sigma_max = cfg.sigma_max;
  if (sigma_max < 0.0)
    sigma_max = res.ball.noise_bound ? std::sqrt(*res.ball.noise_bound)
                                     : std::sqrt(res.ball.statistic);

  CoverSpec spec;
  spec.epsilon = cfg.epsilon;
  spec.alpha = cfg.alpha > 0 ? cfg.alpha
                             : default_alpha(cfg.vol_floor, k, cfg.theta_hi);
  spec.point_budget = cfg.point_budget;
  spec.tuple_budget = cfg.tuple_budget;
  spec.seed = derive_seed(cfg.seed, "cover-stage");
  spec.count_factor = cfg.count_factor;
  spec.sigmas = noise_grid(sigma_max * sigma_max, cfg.epsilon, k);

  const double eps_cov =
      cfg.eps_cov > 0 ? cfg.eps_cov : spec.alpha * cfg.epsilon / (k + 1);
  const CoverPoints cover = cover_sphere(res.ball, eps_cov, spec);
  CandidateFamily fam = enumerate_candidates(cover, res.ball, spec,
                                             cfg.theta_lo, cfg.theta_hi,
                                             cfg.vol_floor);

  if (cfg.seed_candidates) {
    if (const auto base = detail::hull_seed_base(loc_half.points, k)) {
      for (double sig : spec.sigmas) {
        for (Simplex& s : detail::hull_seeds_for_sigma(*base, sig)) {
          bool inside = true;
          for (int c = 0; c < k + 1 && inside; ++c)
            inside = (s.vertices.col(c) - res.ball.center).norm() <=
                     res.ball.radius * (1 + 1e-12);
          if (inside) fam.hypotheses.push_back({std::move(s), sig});
        }
      }
    }
  }
  for (const Hypothesis& h : cfg.forced) fam.hypotheses.push_back(h);
  if (fam.hypotheses.empty())
    throw EmptyFamily("no candidate survived filtering");

  res.outcome = scheffe_select(fam, sel_half, cfg.quad_size, cfg.mc_mass,
                               derive_seed(cfg.seed, "select"));
  res.simplex = fam.hypotheses[res.outcome.winner].simplex;
  res.sigma = fam.hypotheses[res.outcome.winner].sigma;
  res.family_size = fam.size();
  res.family_truncated = fam.truncated;
  res.cover_truncated = fam.points_truncated;
  return res;
}

}  // namespace slx
