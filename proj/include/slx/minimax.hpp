#pragma once

// Lower-bound constructions: a Fano packing of translated standard
// simplices, Assouad bit-coded vertex families (a K-bit family for TV and a
// lazy K^2-bit family for vertex distance), and the Le Cam altitude pair.
// Plus empirical max-risk estimation of a configured learner against these
// families. Theoretical lower bounds are reported beside the empirical
// numbers, never asserted.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "slx/geometry.hpp"
#include "slx/metrics.hpp"
#include "slx/rng.hpp"
#include "slx/scheffe.hpp"

namespace slx {

enum class Construction { fano_translate, assouad_bits, lecam_pair };
enum class AssouadMode { vertex_l1, tv };

using BitCode = std::vector<std::uint8_t>;

struct HypothesisFamily {
  std::vector<Simplex> members;
  Construction construction = Construction::fano_translate;
  double zeta = 0.0;
  int dim = 0;
  std::optional<std::vector<BitCode>> codes;  // per-member codes when coded
  // Extra report for the Le Cam pair: the proof's TV lower bound K zeta / h.
  double lecam_tv_bound = 0.0;
  // Set when the assouad vertex_l1 family is lazy (2^{K^2} members are never
  // materialized; use assouad_decode_l1 / materialize).
  bool lazy = false;
};

// Translates of Delta_K drawn from the ball of radius zeta/K around the
// origin, kept pairwise at least zeta/(2K) apart. Each slot takes the best
// of a proposal batch (max-min separation), which keeps honest margins over
// the minimum distance; a global attempt budget guards termination.
inline HypothesisFamily fano_family(int k, double zeta, int m,
                                    std::uint64_t seed,
                                    std::int64_t attempt_budget = 1000000) {
  if (!(zeta > 0.0 && zeta <= 0.5))
    throw InvalidConfig("fano packing needs zeta in (0, 1/2]");
  if (m < 2) throw InvalidConfig("need at least 2 members");
  const double radius = zeta / k;
  const double min_sep = zeta / (2.0 * k);
  Rng rng(derive_seed(seed, "fano"));
  std::vector<Eigen::VectorXd> shifts;
  std::int64_t attempts = 0;
  constexpr int kBatch = 64;
  while (static_cast<int>(shifts.size()) < m) {
    Eigen::VectorXd best;
    double best_score = -1.0;
    for (int b = 0; b < kBatch && attempts < attempt_budget; ++b) {
      ++attempts;
      Eigen::VectorXd t(k);
      for (int d = 0; d < k; ++d) t(d) = rng.gaussian();
      const double nrm = t.norm();
      if (nrm == 0.0) continue;
      t *= radius * std::pow(rng.uniform(), 1.0 / k) / nrm;
      double score = std::numeric_limits<double>::infinity();
      for (const auto& s : shifts) score = std::min(score, (t - s).norm());
      if (score >= min_sep && score > best_score) {
        best_score = score;
        best = t;
      }
    }
    if (best_score < 0) {
      if (attempts >= attempt_budget)
        throw PackingBudgetExceeded(
            static_cast<int>(shifts.size()),
            "fano packing stalled; achieved " +
                std::to_string(shifts.size()) + " of " + std::to_string(m));
      continue;
    }
    shifts.push_back(best);
  }
  HypothesisFamily fam;
  fam.construction = Construction::fano_translate;
  fam.zeta = zeta;
  fam.dim = k;
  const Simplex base = standard_simplex(k);
  for (const auto& t : shifts) fam.members.push_back(translate(base, t));
  return fam;
}

// K-bit TV-mode decode: bit i pulls vertex i radially, v_i = (1 - zeta b_i) e_i
// with v_0 = 0. The all-zero code is Delta_K and flipping one bit moves one
// vertex by zeta along its own axis.
inline Simplex assouad_decode_tv(int k, double zeta, const BitCode& code) {
  if (static_cast<int>(code.size()) != k)
    throw InvalidConfig("tv-mode code needs K bits");
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(k, k + 1);
  for (int i = 1; i <= k; ++i)
    v(i - 1, i) = 1.0 - zeta * (code[i - 1] ? 1.0 : 0.0);
  Simplex s(std::move(v));
  if (is_degenerate(s)) throw DegenerateSimplex("zeta too large for decode");
  return s;
}

// K^2-bit vertex-distance decode: vertex i (i = 1..K) carries its own bit
// row b_i, v_i = e_i + zeta (1 - 2 b_i) entrywise; v_0 = 0. Code layout is
// row-major: bit (i-1)*K + (j-1) controls coordinate j of vertex i.
inline Simplex assouad_decode_l1(int k, double zeta, const BitCode& code) {
  if (static_cast<int>(code.size()) != k * k)
    throw InvalidConfig("vertex_l1 code needs K^2 bits");
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(k, k + 1);
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= k; ++j)
      v(j - 1, i) = (i == j ? 1.0 : 0.0) +
                    zeta * (1.0 - 2.0 * code[(i - 1) * k + (j - 1)]);
  Simplex s(std::move(v));
  if (is_degenerate(s)) throw DegenerateSimplex("zeta too large for decode");
  return s;
}

// Sign map recovering the code from a decoded simplex (vertices in decode
// order): b_i^j = (1 - sign(v_i^j - delta_ij)) / 2.
inline BitCode assouad_encode_l1(const Simplex& s, int k) {
  if (s.dim() != k) throw DimMismatch();
  BitCode code(k * k, 0);
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= k; ++j) {
      const double off = s.vertices(j - 1, i) - (i == j ? 1.0 : 0.0);
      code[(i - 1) * k + (j - 1)] = off < 0.0 ? 1 : 0;
    }
  return code;
}

inline std::vector<BitCode> hamming_neighbors(const BitCode& code) {
  std::vector<BitCode> out;
  out.reserve(code.size());
  for (std::size_t b = 0; b < code.size(); ++b) {
    BitCode c = code;
    c[b] ^= 1;
    out.push_back(std::move(c));
  }
  return out;
}

inline HypothesisFamily assouad_family(int k, double zeta, AssouadMode mode) {
  if (k < 1) throw InvalidConfig("K must be positive");
  if (zeta <= 0) throw InvalidConfig("zeta must be positive");
  HypothesisFamily fam;
  fam.construction = Construction::assouad_bits;
  fam.zeta = zeta;
  fam.dim = k;
  if (mode == AssouadMode::tv) {
    if (k > 12) throw UnsupportedDimension("tv-mode materializes 2^K members");
    std::vector<BitCode> codes;
    for (std::uint64_t bits = 0; bits < (1ULL << k); ++bits) {
      BitCode code(k);
      for (int b = 0; b < k; ++b) code[b] = (bits >> b) & 1;
      fam.members.push_back(assouad_decode_tv(k, zeta, code));
      codes.push_back(std::move(code));
    }
    fam.codes = std::move(codes);
  } else {
    fam.lazy = true;  // 2^{K^2} members; decode on demand
  }
  return fam;
}

// Materializes a random code subsample of the lazy vertex_l1 family.
inline HypothesisFamily materialize_l1_subsample(const HypothesisFamily& lazy,
                                                 int count,
                                                 std::uint64_t seed) {
  if (!lazy.lazy) throw InvalidConfig("family is not lazy");
  HypothesisFamily fam;
  fam.construction = Construction::assouad_bits;
  fam.zeta = lazy.zeta;
  fam.dim = lazy.dim;
  const int nbits = lazy.dim * lazy.dim;
  Rng rng(derive_seed(seed, "l1-codes"));
  std::vector<BitCode> codes;
  for (int i = 0; i < count; ++i) {
    BitCode code(nbits);
    for (int b = 0; b < nbits; ++b) code[b] = rng.next_u64() & 1;
    fam.members.push_back(assouad_decode_l1(lazy.dim, lazy.zeta, code));
    codes.push_back(std::move(code));
  }
  fam.codes = std::move(codes);
  return fam;
}

namespace detail {

// Unit inward altitude direction from the largest facet of s: the normal of
// the facet hyperplane, signed towards the opposite vertex.
inline Eigen::VectorXd inward_altitude(const Simplex& s, int* facet_out) {
  const int k = s.dim();
  if (k == 1) {
    // facets are points (counting measure 1); take the facet at vertex 0
    if (facet_out) *facet_out = 0;
    const double dir = s.vertices(0, 1) - s.vertices(0, 0);
    return Eigen::VectorXd::Constant(1, dir >= 0 ? 1.0 : -1.0);
  }
  int facet = 0;
  double best = -1.0;
  for (int f = 0; f < k + 1; ++f) {
    const double a = facet_measure(s, f);
    if (a > best) {
      best = a;
      facet = f;
    }
  }
  if (facet_out) *facet_out = facet;
  const int base = (facet == 0) ? 1 : 0;
  Eigen::MatrixXd edges(k - 1, k);
  int r = 0;
  for (int i = 0; i < k + 1; ++i) {
    if (i == facet || i == base) continue;
    edges.row(r++) = (s.vertices.col(i) - s.vertices.col(base)).transpose();
  }
  // normal = last right-singular vector of the (K-1) x K edge matrix
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(edges, Eigen::ComputeFullV);
  Eigen::VectorXd n = svd.matrixV().col(k - 1);
  const Eigen::VectorXd to_opposite =
      s.vertices.col(facet) - s.vertices.col(base);
  if (n.dot(to_opposite) < 0) n = -n;
  return n;
}

}  // namespace detail

// The two-point family {S, S + zeta u} with u the unit inward altitude from
// the largest facet; carries the proof-side TV lower bound K zeta / h with
// altitude h = K Vol / A_max.
inline HypothesisFamily lecam_pair(const Simplex& s, double zeta) {
  if (zeta < 0) throw InvalidConfig("zeta must be nonnegative");
  if (is_degenerate(s)) throw DegenerateSimplex();
  HypothesisFamily fam;
  fam.construction = Construction::lecam_pair;
  fam.zeta = zeta;
  fam.dim = s.dim();
  const Eigen::VectorXd u = detail::inward_altitude(s, nullptr);
  fam.members.push_back(s);
  fam.members.push_back(translate(s, zeta * u));
  const GeometrySummary g = geometry_summary(s);
  const double h = s.dim() * g.volume / g.a_max;
  fam.lecam_tv_bound = s.dim() * zeta / h;
  return fam;
}

struct MinimaxCell {
  int member = 0;
  int trial = 0;
  double tv_error = 0.0;
};

struct MinimaxReport {
  std::vector<MinimaxCell> cells;
  std::vector<double> member_mean;  // mean TV error per member
  std::vector<double> member_se;
  double max_risk = 0.0;            // max over members of the mean error
  double max_risk_se = 0.0;
  // The theoretical sample-size forms solved for epsilon at the given n:
  double eps_noisy_bound = 0.0;     // sqrt(K^3 sigma^2 / n)
  double eps_noiseless_bound = 0.0; // K / n
};

// Runs the configured learner `trials` times per member on fresh noisy
// samples and reports the worst member's mean TV error. tv_mc controls the
// error-measurement Monte Carlo size.
inline MinimaxReport empirical_minimax(const HypothesisFamily& family,
                                       double sigma, int n, int trials,
                                       const LearnConfig& learner,
                                       std::uint64_t seed, int tv_mc = 20000) {
  if (trials < 1) throw InvalidConfig("trials must be >= 1");
  if (family.members.empty())
    throw EmptyFamily("materialize the family before risk estimation");
  MinimaxReport rep;
  const int m = static_cast<int>(family.members.size());
  rep.member_mean.assign(m, 0.0);
  rep.member_se.assign(m, 0.0);
  for (int mi = 0; mi < m; ++mi) {
    double sum = 0.0, sumsq = 0.0;
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t cell_seed =
          derive_seed(seed, "minimax", std::uint64_t(mi), std::uint64_t(t));
      const SampleSet data =
          sample(NoisyModel(family.members[mi], sigma), n, cell_seed);
      LearnConfig cfg = learner;
      cfg.seed = derive_seed(cell_seed, "learner");
      const LearnResult res = learn(data, cfg);
      const double err = tv_uniform(res.simplex, family.members[mi], tv_mc,
                                    derive_seed(cell_seed, "tv"))
                             .value;
      rep.cells.push_back({mi, t, err});
      sum += err;
      sumsq += err * err;
    }
    rep.member_mean[mi] = sum / trials;
    rep.member_se[mi] = trials > 1
                            ? std::sqrt(std::max(sumsq / trials -
                                                     rep.member_mean[mi] *
                                                         rep.member_mean[mi],
                                                 0.0) /
                                        trials)
                            : 0.0;
    if (rep.member_mean[mi] >= rep.max_risk) {
      rep.max_risk = rep.member_mean[mi];
      rep.max_risk_se = rep.member_se[mi];
    }
  }
  const int k = family.dim;
  rep.eps_noisy_bound = std::sqrt(double(k) * k * k * sigma * sigma / n);
  rep.eps_noiseless_bound = double(k) / n;
  return rep;
}

}  // namespace slx
