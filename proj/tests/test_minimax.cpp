#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "slx/metrics.hpp"
#include "slx/minimax.hpp"

using slx::AssouadMode;
using slx::BitCode;
using slx::Simplex;
using slx::standard_simplex;

TEST_CASE("fano translates pack inside the prescribed shell") {
  const int k = 2;
  const double zeta = 0.3;
  const auto fam = slx::fano_family(k, zeta, 8, 5);
  REQUIRE(fam.members.size() == 8);
  const auto base = standard_simplex(k);
  std::vector<Eigen::VectorXd> shifts;
  for (const auto& m : fam.members)
    shifts.push_back(m.vertices.col(0) - base.vertices.col(0));
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    REQUIRE(shifts[i].norm() <= zeta / k + 1e-12);
    for (std::size_t j = i + 1; j < shifts.size(); ++j) {
      const double d = (shifts[i] - shifts[j]).norm();
      REQUIRE(d >= zeta / (2.0 * k) - 1e-12);
      REQUIRE(d <= 2.0 * zeta / k + 1e-12);
      REQUIRE(d > 0.0);
    }
  }
}

TEST_CASE("fano pair at M=2 and packing failure reporting") {
  const auto fam = slx::fano_family(3, 0.4, 2, 7);
  REQUIRE(fam.members.size() == 2);
  // an impossible request exhausts the attempt budget and reports progress
  try {
    slx::fano_family(1, 0.5, 1000, 9, 20000);
    FAIL("expected PackingBudgetExceeded");
  } catch (const slx::PackingBudgetExceeded& e) {
    REQUIRE(e.achieved >= 2);
    REQUIRE(e.achieved < 1000);
  }
}

TEST_CASE("fano pairwise TV clears zeta/2 within MC error") {
  const double zeta = 0.3;
  const auto fam = slx::fano_family(2, zeta, 8, 11);
  for (std::size_t i = 0; i < fam.members.size(); ++i)
    for (std::size_t j = i + 1; j < fam.members.size(); ++j) {
      const auto tv =
          slx::tv_uniform(fam.members[i], fam.members[j], 20000,
                          1000 + 31 * i + j);
      REQUIRE(tv.value >= zeta / 2.0 - 3.0 * tv.std_error);
    }
}

TEST_CASE("assouad tv-mode family enumerates 2^K radial codes") {
  const auto fam = slx::assouad_family(3, 0.1, AssouadMode::tv);
  REQUIRE(fam.members.size() == 8);
  REQUIRE(fam.codes.has_value());
  // all-zero code is the standard simplex
  REQUIRE((*fam.codes)[0] == BitCode{0, 0, 0});
  REQUIRE(fam.members[0].vertices == standard_simplex(3).vertices);
  // distinct codes give distinct vertex matrices
  for (std::size_t i = 0; i < fam.members.size(); ++i)
    for (std::size_t j = i + 1; j < fam.members.size(); ++j)
      REQUIRE(fam.members[i].vertices != fam.members[j].vertices);
}

TEST_CASE("assouad tv-mode Hamming-1 pairs stay within 2 zeta in TV") {
  const double zeta = 0.1;
  for (int k : {2, 3}) {
    const auto fam = slx::assouad_family(k, zeta, AssouadMode::tv);
    const auto& codes = *fam.codes;
    for (std::size_t a = 0; a < codes.size(); ++a)
      for (std::size_t b = a + 1; b < codes.size(); ++b) {
        int dist = 0;
        for (int bit = 0; bit < k; ++bit) dist += codes[a][bit] != codes[b][bit];
        if (dist != 1) continue;
        const auto tv = slx::tv_uniform(fam.members[a], fam.members[b],
                                        20000, 7000 + 17 * a + b);
        REQUIRE(tv.value <= 2.0 * zeta + 3.0 * tv.std_error);
      }
  }
}

TEST_CASE("assouad vertex_l1 decode/encode round trip") {
  const int k = 3;
  const double zeta = 0.08;
  slx::Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    BitCode code(k * k);
    for (auto& b : code) b = rng.next_u64() & 1;
    const Simplex s = slx::assouad_decode_l1(k, zeta, code);
    REQUIRE(slx::assouad_encode_l1(s, k) == code);
  }
}

TEST_CASE("assouad vertex_l1 decode is injective on random code pairs") {
  const int k = 3;
  slx::Rng rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    BitCode a(k * k), b(k * k);
    for (auto& x : a) x = rng.next_u64() & 1;
    do {
      for (auto& x : b) x = rng.next_u64() & 1;
    } while (a == b);
    REQUIRE(slx::assouad_decode_l1(k, 0.08, a).vertices !=
            slx::assouad_decode_l1(k, 0.08, b).vertices);
  }
}

TEST_CASE("hamming neighbors and lazy family materialization") {
  const BitCode code{0, 1, 0, 0};
  const auto nb = slx::hamming_neighbors(code);
  REQUIRE(nb.size() == 4);
  for (std::size_t i = 0; i < nb.size(); ++i) {
    int dist = 0;
    for (std::size_t b = 0; b < code.size(); ++b) dist += nb[i][b] != code[b];
    REQUIRE(dist == 1);
  }

  const auto lazy = slx::assouad_family(2, 0.05, AssouadMode::vertex_l1);
  REQUIRE(lazy.lazy);
  REQUIRE(lazy.members.empty());
  const auto sub = slx::materialize_l1_subsample(lazy, 16, 19);
  REQUIRE(sub.members.size() == 16);
  REQUIRE(sub.codes->size() == 16);
  for (std::size_t i = 0; i < sub.members.size(); ++i)
    REQUIRE(slx::assouad_encode_l1(sub.members[i], 2) == (*sub.codes)[i]);
}

TEST_CASE("lecam pair geometry at K=1 and K=2") {
  Eigen::MatrixXd v(1, 2);
  v << 0.0, 1.0;
  const auto pair1 = slx::lecam_pair(Simplex(v), 0.2);
  REQUIRE(pair1.members.size() == 2);
  REQUIRE(pair1.lecam_tv_bound == Catch::Approx(0.2));  // K zeta / h, h = 1
  const auto tv1 = slx::tv_uniform(pair1.members[0], pair1.members[1],
                                   40000, 23);
  REQUIRE(tv1.value == Catch::Approx(0.2).margin(3.0 * tv1.std_error + 1e-9));

  const double zeta = 0.05;
  const auto pair2 = slx::lecam_pair(standard_simplex(2), zeta);
  const double h = 2.0 * 0.5 / std::sqrt(2.0);
  REQUIRE(pair2.lecam_tv_bound == Catch::Approx(2.0 * zeta / h));
  // shifted along the inward altitude: same shape, moved by zeta
  const auto diff =
      pair2.members[1].vertices.col(0) - pair2.members[0].vertices.col(0);
  REQUIRE(diff.norm() == Catch::Approx(zeta));
}

TEST_CASE("lecam zero zeta duplicates the simplex") {
  const auto pair = slx::lecam_pair(standard_simplex(2), 0.0);
  REQUIRE(pair.lecam_tv_bound == 0.0);
  REQUIRE(pair.members[0].vertices == pair.members[1].vertices);
}

TEST_CASE("lecam TV clears the K zeta / h bound within MC error") {
  const double zeta = 0.05;
  const auto pair = slx::lecam_pair(standard_simplex(2), zeta);
  const auto tv = slx::tv_uniform(pair.members[0], pair.members[1], 10000, 29);
  REQUIRE(tv.value >= pair.lecam_tv_bound - 3.0 * tv.std_error - 2 * zeta * zeta);
}

TEST_CASE("empirical minimax over a single member equals its mean error") {
  Eigen::MatrixXd v(1, 2);
  v << 0.0, 3.0;
  slx::HypothesisFamily fam;
  fam.construction = slx::Construction::lecam_pair;
  fam.dim = 1;
  fam.members.push_back(Simplex(v));

  slx::LearnConfig cfg;
  cfg.epsilon = 0.2;
  cfg.theta_lo = cfg.theta_hi = 5.0;
  cfg.vol_floor = 0.5;
  cfg.point_budget = 2000;
  cfg.tuple_budget = 30;
  cfg.eps_cov = 0.5;
  cfg.sigma_max = 0.0;
  cfg.quad_size = 64;
  cfg.mc_mass = 200;

  const auto rep = slx::empirical_minimax(fam, 0.0, 600, 3, cfg, 31, 4000);
  REQUIRE(rep.cells.size() == 3);
  double mean = 0.0;
  for (const auto& c : rep.cells) mean += c.tv_error;
  mean /= 3.0;
  REQUIRE(rep.max_risk == Catch::Approx(mean));
  REQUIRE(rep.eps_noiseless_bound == Catch::Approx(1.0 / 600.0));
  REQUIRE(rep.eps_noisy_bound == 0.0);
}
