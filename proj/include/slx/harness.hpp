#pragma once

// Experiment orchestration: validated configs, seeded trial grids over one
// sweep axis (n or sigma), CSV/JSON reports with embedded provenance, and
// the error-vs-SNR phase sweep.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "slx/jsonio.hpp"
#include "slx/metrics.hpp"
#include "slx/scheffe.hpp"

namespace slx {

struct ExperimentConfig {
  int dim = 2;
  std::vector<int> n_values{2000};
  std::vector<double> sigma_values{0.1};
  int trials = 5;
  std::uint64_t seed = 0;
  std::string out_prefix = "experiment";
  std::optional<Simplex> simplex;  // default: standard simplex
  LearnConfig learner;             // epsilon/delta/budgets/etc.
  int tv_mc = 20000;
  int threads = 1;

  void validate() const {
    if (dim < 1) throw InvalidConfig("K must be positive");
    if (n_values.empty() || sigma_values.empty())
      throw InvalidConfig("need at least one n and one sigma");
    if (n_values.size() > 1 && sigma_values.size() > 1)
      throw InvalidConfig("exactly one sweep axis per run");
    for (int n : n_values)
      if (n < 4) throw InvalidConfig("n must be >= 4");
    for (double s : sigma_values)
      if (s < 0) throw InvalidConfig("sigma must be nonnegative");
    if (trials < 1) throw InvalidConfig("trials must be >= 1");
    if (tv_mc < 1000) throw InvalidConfig("tv_mc must be >= 1000");
    if (!(learner.epsilon > 0 && learner.epsilon < 1))
      throw InvalidConfig("epsilon must lie in (0,1)");
    if (!(learner.delta > 0 && learner.delta < 1))
      throw InvalidConfig("delta must lie in (0,1)");
  }

  Json to_json() const {
    Json j{{"schema", kSchemaVersion},
           {"K", dim},
           {"n", n_values},
           {"sigma", sigma_values},
           {"trials", trials},
           {"seed", seed},
           {"epsilon", learner.epsilon},
           {"delta", learner.delta},
           {"theta_lo", learner.theta_lo},
           {"theta_hi", learner.theta_hi},
           {"vol_floor", learner.vol_floor},
           {"point_budget", learner.point_budget},
           {"tuple_budget", learner.tuple_budget},
           {"eps_cov", learner.eps_cov},
           {"alpha", learner.alpha},
           {"count_factor", learner.count_factor},
           {"sigma_max", learner.sigma_max},
           {"quad", learner.quad_size},
           {"mc_mass", learner.mc_mass},
           {"seed_candidates", learner.seed_candidates},
           {"tv_mc", tv_mc}};
    if (simplex) j["simplex"] = simplex_to_json(*simplex);
    return j;
  }
};

inline ExperimentConfig experiment_config_from_json(const Json& j) {
  ExperimentConfig cfg;
  cfg.dim = j.value("K", 2);
  if (j.contains("n")) {
    if (j["n"].is_array())
      cfg.n_values = j["n"].get<std::vector<int>>();
    else
      cfg.n_values = {j["n"].get<int>()};
  }
  if (j.contains("sigma")) {
    if (j["sigma"].is_array())
      cfg.sigma_values = j["sigma"].get<std::vector<double>>();
    else
      cfg.sigma_values = {j["sigma"].get<double>()};
  }
  cfg.trials = j.value("trials", 5);
  cfg.seed = j.value("seed", std::uint64_t(0));
  cfg.learner.epsilon = j.value("epsilon", 0.1);
  cfg.learner.delta = j.value("delta", 0.1);
  cfg.learner.theta_lo = j.value("theta_lo", 5.0);
  cfg.learner.theta_hi = j.value("theta_hi", 5.0);
  cfg.learner.vol_floor = j.value("vol_floor", 0.05);
  cfg.learner.point_budget = j.value("point_budget", std::int64_t(5000));
  cfg.learner.tuple_budget = j.value("tuple_budget", std::int64_t(200));
  cfg.learner.eps_cov = j.value("eps_cov", 0.0);
  cfg.learner.alpha = j.value("alpha", 0.0);
  cfg.learner.count_factor = j.value("count_factor", 2.0);
  cfg.learner.sigma_max = j.value("sigma_max", -1.0);
  cfg.learner.quad_size = j.value("quad", 256);
  cfg.learner.mc_mass = j.value("mc_mass", 512);
  cfg.learner.seed_candidates = j.value("seed_candidates", true);
  cfg.tv_mc = j.value("tv_mc", 20000);
  cfg.threads = j.value("threads", 1);
  if (j.contains("simplex")) cfg.simplex = simplex_from_json(j["simplex"]);
  return cfg;
}

inline std::uint64_t config_hash(const Json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : s) h = splitmix64(h ^ std::uint64_t(std::uint8_t(c)));
  return h;
}

struct ExperimentRow {
  int trial = 0;
  int n = 0;
  double sigma = 0.0;
  double snr = 0.0;
  double tv_error = 0.0;
  double l2_error = 0.0;
  double vertex_l1_error = 0.0;
  std::int64_t runtime_ms = 0;
};

struct CellSummary {
  int n = 0;
  double sigma = 0.0, snr = 0.0;
  double median_tv = 0.0, iqr_tv = 0.0;
  double median_l2 = 0.0, median_vertex_l1 = 0.0;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
  std::vector<CellSummary> cells;
  Json summary;
};

namespace detail {

inline double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.empty()) return 0.0;
  const double pos = q * (v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - double(lo);
  return v[lo] * (1 - frac) + v[hi] * frac;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, 0.5);
}

inline double iqr(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, 0.75) - quantile_sorted(v, 0.25);
}

// Static round-robin split; each cell owns its seed so ordering never
// matters, and rows land in a preallocated slot per index.
template <typename Fn>
inline void parallel_cells(int count, int threads, Fn&& fn) {
  threads = std::max(1, threads);
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < count; i += threads) fn(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

inline ExperimentReport run_experiment(const ExperimentConfig& cfg,
                                       bool write_files = true) {
  cfg.validate();
  const Simplex truth =
      cfg.simplex ? *cfg.simplex : standard_simplex(cfg.dim);
  if (truth.dim() != cfg.dim)
    throw InvalidConfig("simplex dimension does not match K");

  struct Cell {
    int n;
    double sigma;
  };
  std::vector<Cell> grid;
  for (int n : cfg.n_values)
    for (double s : cfg.sigma_values) grid.push_back({n, s});

  ExperimentReport rep;
  rep.rows.resize(grid.size() * cfg.trials);
  detail::parallel_cells(
      static_cast<int>(rep.rows.size()), cfg.threads, [&](int idx) {
        const Cell& cell = grid[idx / cfg.trials];
        const int trial = idx % cfg.trials;
        const std::uint64_t cell_seed =
            derive_seed(cfg.seed, "trial", std::uint64_t(idx / cfg.trials),
                        std::uint64_t(trial));
        const auto t0 = std::chrono::steady_clock::now();
        const SampleSet data =
            sample(NoisyModel(truth, cell.sigma), cell.n, cell_seed);
        LearnConfig lc = cfg.learner;
        lc.seed = derive_seed(cell_seed, "learn");
        const LearnResult res = learn(data, lc);
        const auto t1 = std::chrono::steady_clock::now();
        ExperimentRow row;
        row.trial = trial;
        row.n = cell.n;
        row.sigma = cell.sigma;
        row.snr = snr(truth, cell.sigma);
        row.tv_error = tv_uniform(res.simplex, truth, cfg.tv_mc,
                                  derive_seed(cell_seed, "tv"))
                           .value;
        row.l2_error = l2_uniform(res.simplex, truth, cfg.tv_mc,
                                  derive_seed(cell_seed, "l2"))
                           .value;
        row.vertex_l1_error = vertex_l1(res.simplex, truth).cost;
        row.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             t1 - t0)
                             .count();
        rep.rows[idx] = row;
      });

  const std::uint64_t chash = config_hash(cfg.to_json());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> tv, l2, v1;
    for (int t = 0; t < cfg.trials; ++t) {
      const ExperimentRow& r = rep.rows[g * cfg.trials + t];
      tv.push_back(r.tv_error);
      l2.push_back(r.l2_error);
      v1.push_back(r.vertex_l1_error);
    }
    CellSummary cs;
    cs.n = grid[g].n;
    cs.sigma = grid[g].sigma;
    cs.snr = snr(truth, grid[g].sigma);
    cs.median_tv = detail::median(tv);
    cs.iqr_tv = detail::iqr(tv);
    cs.median_l2 = detail::median(l2);
    cs.median_vertex_l1 = detail::median(v1);
    rep.cells.push_back(cs);
  }

  Json cells = Json::array();
  for (const CellSummary& c : rep.cells)
    cells.push_back(Json{{"n", c.n},
                         {"sigma", c.sigma},
                         {"snr", c.snr},
                         {"median_tv", c.median_tv},
                         {"iqr_tv", c.iqr_tv},
                         {"median_l2", c.median_l2},
                         {"median_vertex_l1", c.median_vertex_l1}});
  rep.summary = Json{{"schema", kSchemaVersion},
                     {"build", kBuildTag},
                     {"config_hash", chash},
                     {"seed", cfg.seed},
                     {"cells", std::move(cells)}};

  if (write_files) {
    std::string csv = "# build=" + std::string(kBuildTag) +
                      " config_hash=" + std::to_string(chash) +
                      " seed=" + std::to_string(cfg.seed) + "\n";
    csv += "trial,n,sigma,snr,tv_error,l2_error,vertex_l1_error,runtime_ms\n";
    for (const ExperimentRow& r : rep.rows) {
      csv += std::to_string(r.trial) + ',' + std::to_string(r.n) + ',' +
             fmt_g17(r.sigma) + ',' + fmt_g17(r.snr) + ',' +
             fmt_g17(r.tv_error) + ',' + fmt_g17(r.l2_error) + ',' +
             fmt_g17(r.vertex_l1_error) + ',' + std::to_string(r.runtime_ms) +
             '\n';
    }
    write_text(cfg.out_prefix + ".csv", csv);
    write_json(cfg.out_prefix + ".json", rep.summary);
  }
  return rep;
}

struct PhaseReport {
  ExperimentReport experiment;
  double baseline_median = 0.0;
  std::optional<double> knee_snr;  // largest SNR whose error exceeds 2x baseline
  bool knee_in_expected_band = true;
};

// Error-vs-SNR sweep. The noiseless-regime baseline is the median at
// sigma = 0 when present, otherwise at the largest SNR; the knee is the
// largest SNR whose median error exceeds twice the baseline. Whether the
// knee lies in [sqrt(K)/4, 4 sqrt(K)] is reported as a warning flag only.
inline PhaseReport sweep_phase_transition(const ExperimentConfig& cfg,
                                          bool write_files = true) {
  if (cfg.sigma_values.size() < 2 && cfg.sigma_values[0] != 0.0)
    throw InvalidConfig("phase sweep needs a sigma sweep");
  PhaseReport rep;
  rep.experiment = run_experiment(cfg, false);

  std::vector<CellSummary> cells = rep.experiment.cells;
  std::sort(cells.begin(), cells.end(),
            [](const CellSummary& a, const CellSummary& b) {
              return a.snr > b.snr;
            });
  rep.baseline_median = cells.front().median_tv;
  for (const CellSummary& c : cells)
    if (c.sigma == 0.0) rep.baseline_median = c.median_tv;
  for (const CellSummary& c : cells) {
    if (std::isinf(c.snr)) continue;
    if (c.median_tv > 2.0 * rep.baseline_median) {
      rep.knee_snr = c.snr;
      break;
    }
  }
  const double rootk = std::sqrt(double(cfg.dim));
  if (rep.knee_snr)
    rep.knee_in_expected_band =
        *rep.knee_snr >= rootk / 4.0 && *rep.knee_snr <= 4.0 * rootk;

  Json summary = rep.experiment.summary;
  summary["baseline_median_tv"] = rep.baseline_median;
  summary["knee_snr"] = rep.knee_snr ? Json(*rep.knee_snr) : Json(nullptr);
  summary["knee_in_expected_band"] = rep.knee_in_expected_band;
  rep.experiment.summary = summary;

  if (write_files) {
    const std::uint64_t chash = config_hash(cfg.to_json());
    std::string csv = "# build=" + std::string(kBuildTag) +
                      " config_hash=" + std::to_string(chash) +
                      " seed=" + std::to_string(cfg.seed) + "\n";
    csv += "trial,n,sigma,snr,tv_error,l2_error,vertex_l1_error,runtime_ms\n";
    for (const ExperimentRow& r : rep.experiment.rows) {
      csv += std::to_string(r.trial) + ',' + std::to_string(r.n) + ',' +
             fmt_g17(r.sigma) + ',' + fmt_g17(r.snr) + ',' +
             fmt_g17(r.tv_error) + ',' + fmt_g17(r.l2_error) + ',' +
             fmt_g17(r.vertex_l1_error) + ',' + std::to_string(r.runtime_ms) +
             '\n';
    }
    write_text(cfg.out_prefix + ".csv", csv);
    write_json(cfg.out_prefix + ".json", summary);
  }
  return rep;
}

}  // namespace slx
