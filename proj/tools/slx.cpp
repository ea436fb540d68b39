// Command-line front end. Subcommands map onto the library stages:
// generate / localize / cover / learn cover the pipeline, spectrum / tail
// expose the frequency-domain checks, minimax the lower-bound families, and
// experiment / phase the sweep harness. Exit codes: 0 ok, 2 invalid
// configuration, 1 any other stage failure.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "slx/harness.hpp"
#include "slx/jsonio.hpp"
#include "slx/minimax.hpp"
#include "slx/spectral.hpp"

namespace {

slx::Simplex load_simplex(const std::string& path) {
  return slx::simplex_from_json(slx::load_json(path));
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

void fill_learner_flags(CLI::App* cmd, slx::LearnConfig& lc) {
  cmd->add_option("--eps", lc.epsilon, "target TV accuracy");
  cmd->add_option("--delta", lc.delta, "failure probability");
  cmd->add_option("--theta-lo", lc.theta_lo, "diameter isoperimetricity bound");
  cmd->add_option("--theta-hi", lc.theta_hi, "facet isoperimetricity bound");
  cmd->add_option("--vol-floor", lc.vol_floor, "candidate volume floor");
  cmd->add_option("--point-budget", lc.point_budget, "cover point budget");
  cmd->add_option("--tuple-budget", lc.tuple_budget, "candidate tuple budget");
  cmd->add_option("--eps-cov", lc.eps_cov, "cover resolution override");
  cmd->add_option("--alpha", lc.alpha, "vertex perturbation scale override");
  cmd->add_option("--count-factor", lc.count_factor,
                  "cover count base factor (2 or 4)");
  cmd->add_option("--sigma-max", lc.sigma_max, "sigma grid upper bound");
  cmd->add_option("--quad", lc.quad_size, "density quadrature size");
  cmd->add_option("--mc-mass", lc.mc_mass, "per-hypothesis mass samples");
  cmd->add_flag("--no-seed-candidates",
                [&lc](std::int64_t) { lc.seed_candidates = false; },
                "disable data-driven candidate seeding");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simplex learning from noisy samples"};
  app.require_subcommand(1);
  app.fallthrough();  // global --seed/--out usable after the subcommand

  std::uint64_t seed = 0;
  std::string out = "out";
  std::string global_config;
  app.add_option("--seed", seed, "master seed")->capture_default_str();
  app.add_option("--out", out, "output path or prefix")->capture_default_str();
  app.add_option("--config", global_config,
                 "config JSON (experiment/phase subcommands)");

  // generate
  auto* gen = app.add_subcommand("generate", "draw samples from a noisy model");
  int gen_k = 2, gen_n = 1000;
  double gen_sigma = 0.1;
  std::string gen_simplex;
  gen->add_option("--K", gen_k, "dimension (standard simplex default)");
  gen->add_option("--n", gen_n, "sample count");
  gen->add_option("--sigma", gen_sigma, "noise standard deviation");
  gen->add_option("--simplex", gen_simplex, "simplex JSON file");

  // localize
  auto* loc = app.add_subcommand("localize", "ball containing the simplex");
  std::string loc_in;
  double loc_delta = 0.1;
  bool loc_proof_rn = false;
  loc->add_option("--in", loc_in, "samples.csv")->required();
  loc->add_option("--delta", loc_delta, "confidence parameter");
  loc->add_flag("--rn-proof-variant", loc_proof_rn,
                "use the D/(K-3) noise-bound denominator");

  // cover
  auto* cov = app.add_subcommand("cover", "candidate family from a ball");
  std::string cov_ball;
  slx::CoverSpec cov_spec;
  double cov_eps_cov = 0.0;
  double cov_theta_lo = 5.0, cov_theta_hi = 5.0, cov_vol_floor = 0.05;
  std::string cov_sigmas;
  cov->add_option("--ball", cov_ball, "ball JSON from localize")->required();
  cov->add_option("--eps", cov_spec.epsilon, "TV target");
  cov->add_option("--eps-cov", cov_eps_cov, "cover resolution override");
  cov->add_option("--point-budget", cov_spec.point_budget, "point budget");
  cov->add_option("--tuple-budget", cov_spec.tuple_budget, "tuple budget");
  cov->add_option("--count-factor", cov_spec.count_factor, "count base factor");
  cov->add_option("--theta-lo", cov_theta_lo, "diameter bound");
  cov->add_option("--theta-hi", cov_theta_hi, "facet bound");
  cov->add_option("--vol-floor", cov_vol_floor, "volume floor");
  cov->add_option("--sigmas", cov_sigmas, "comma list overriding the grid");

  // learn
  auto* lrn = app.add_subcommand("learn", "full pipeline on a sample file");
  std::string lrn_in;
  slx::LearnConfig lrn_cfg;
  lrn->add_option("--in", lrn_in, "samples.csv")->required();
  fill_learner_flags(lrn, lrn_cfg);

  // spectrum
  auto* spec = app.add_subcommand("spectrum", "characteristic function value");
  std::string spec_simplex, spec_omega;
  double spec_sigma = 0.0;
  spec->add_option("--simplex", spec_simplex, "simplex JSON")->required();
  spec->add_option("--omega", spec_omega, "comma-separated frequency")
      ->required();
  spec->add_option("--sigma", spec_sigma, "noise level (0 = plain CF)");

  // tail
  auto* tail = app.add_subcommand("tail", "band-energy split of |F|^2");
  std::string tail_simplex;
  double tail_alpha = 50.0;
  int tail_grid = 0, tail_mc = 200000;
  bool tail_use_mc = false;
  tail->add_option("--simplex", tail_simplex, "simplex JSON")->required();
  tail->add_option("--alpha", tail_alpha, "band half-width");
  tail->add_option("--grid", tail_grid, "per-axis quadrature grid");
  tail->add_flag("--mc", tail_use_mc, "Monte Carlo in-band estimate");
  tail->add_option("--mc-samples", tail_mc, "MC frequency draws");

  // minimax
  auto* mmx = app.add_subcommand("minimax", "lower-bound family risk");
  std::string mmx_construction = "fano";
  int mmx_k = 2, mmx_n = 2000, mmx_trials = 5, mmx_m = 8, mmx_codes = 64;
  double mmx_zeta = 0.3, mmx_sigma = 0.3;
  slx::LearnConfig mmx_learner;
  mmx->add_option("--construction", mmx_construction,
                  "fano | assouad-tv | assouad-l1 | lecam");
  mmx->add_option("--K", mmx_k, "dimension");
  mmx->add_option("--zeta", mmx_zeta, "perturbation scale");
  mmx->add_option("--sigma", mmx_sigma, "noise level");
  mmx->add_option("--n", mmx_n, "samples per trial");
  mmx->add_option("--trials", mmx_trials, "trials per member");
  mmx->add_option("--M", mmx_m, "fano family size");
  mmx->add_option("--codes", mmx_codes, "assouad-l1 code subsample");
  fill_learner_flags(mmx, mmx_learner);

  // experiment / phase
  auto* exp = app.add_subcommand("experiment", "trial grid over one sweep");
  std::string exp_config;
  exp->add_option("--config", exp_config, "config JSON");
  auto* pha = app.add_subcommand("phase", "error-vs-SNR sweep with knee flag");
  std::string pha_config;
  pha->add_option("--config", pha_config, "config JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      slx::Simplex s = gen_simplex.empty() ? slx::standard_simplex(gen_k)
                                           : load_simplex(gen_simplex);
      const slx::NoisyModel model(s, gen_sigma);
      slx::SampleSet set = slx::sample(model, gen_n, seed);
      slx::write_samples_csv(out + ".csv", set, &model);
      std::cout << out << ".csv\n";
    } else if (*loc) {
      const slx::SampleSet set = slx::read_samples_csv(loc_in);
      const slx::LocalizationBall ball = slx::localize(
          set, loc_proof_rn ? slx::NoiseBoundVariant::proof
                            : slx::NoiseBoundVariant::statement);
      slx::Json j = slx::ball_to_json(ball);
      j["build"] = slx::kBuildTag;
      j["min_pairs_for_delta"] =
          slx::min_samples_localize(set.dim(), loc_delta);
      slx::write_json(out + ".json", j);
      std::cout << j.dump(2) << "\n";
    } else if (*cov) {
      const slx::LocalizationBall ball =
          slx::ball_from_json(slx::load_json(cov_ball));
      cov_spec.seed = seed;
      if (!cov_sigmas.empty()) cov_spec.sigmas = parse_list(cov_sigmas);
      const int k = static_cast<int>(ball.center.size());
      const double alpha =
          slx::default_alpha(cov_vol_floor, k, cov_theta_hi);
      const double eps_cov = cov_eps_cov > 0
                                 ? cov_eps_cov
                                 : alpha * cov_spec.epsilon / (k + 1);
      const slx::CoverPoints pts = slx::cover_sphere(ball, eps_cov, cov_spec);
      const slx::CandidateFamily fam = slx::enumerate_candidates(
          pts, ball, cov_spec, cov_theta_lo, cov_theta_hi, cov_vol_floor);
      slx::Json j = slx::family_to_json(fam);
      j["build"] = slx::kBuildTag;
      j["seed"] = seed;
      slx::write_json(out + ".json", j);
      std::cout << "M=" << fam.size() << " truncated=" << fam.truncated
                << "\n";
    } else if (*lrn) {
      const slx::SampleSet set = slx::read_samples_csv(lrn_in);
      lrn_cfg.seed = seed;
      const slx::LearnResult res = slx::learn(set, lrn_cfg);
      slx::Json j{{"schema", slx::kSchemaVersion},
                  {"build", slx::kBuildTag},
                  {"seed", seed},
                  {"simplex", slx::simplex_to_json(res.simplex)},
                  {"sigma", res.sigma},
                  {"ball", slx::ball_to_json(res.ball)},
                  {"tournament",
                   {{"winner", res.outcome.winner},
                    {"n_used", res.outcome.n_used},
                    {"family_size", res.family_size},
                    {"family_truncated", res.family_truncated}}}};
      slx::write_json(out + ".json", j);
      std::cout << j.dump(2) << "\n";
    } else if (*spec) {
      const slx::Simplex s = load_simplex(spec_simplex);
      const std::vector<double> w = parse_list(spec_omega);
      Eigen::VectorXd omega(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) omega(i) = w[i];
      const slx::Complex v =
          spec_sigma > 0 ? slx::cf_noisy(slx::NoisyModel(s, spec_sigma), omega)
                         : slx::cf_simplex(s, omega);
      const slx::Json j{{"schema", slx::kSchemaVersion},
                        {"build", slx::kBuildTag},
                        {"re", v.real()},
                        {"im", v.imag()},
                        {"modulus", std::abs(v)}};
      slx::write_json(out + ".json", j);
      std::cout << j.dump(2) << "\n";
    } else if (*tail) {
      const slx::Simplex s = load_simplex(tail_simplex);
      const slx::TailReport rep = slx::tail_energy(
          s, tail_alpha, tail_grid,
          tail_use_mc ? slx::TailMethod::monte_carlo
                      : slx::TailMethod::closed_form_quadrature,
          tail_mc, seed);
      const slx::Json j{
          {"schema", slx::kSchemaVersion},
          {"build", slx::kBuildTag},
          {"alpha", rep.alpha},
          {"in_band_energy", rep.in_band_energy},
          {"out_band_energy", rep.out_band_energy},
          {"total_energy", rep.total_energy},
          {"normalized_tail", rep.normalized_tail()},
          {"method", tail_use_mc ? "monte_carlo" : "closed_form_quadrature"}};
      slx::write_json(out + ".json", j);
      std::cout << j.dump(2) << "\n";
    } else if (*mmx) {
      slx::HypothesisFamily fam;
      if (mmx_construction == "fano")
        fam = slx::fano_family(mmx_k, mmx_zeta, mmx_m, seed);
      else if (mmx_construction == "assouad-tv")
        fam = slx::assouad_family(mmx_k, mmx_zeta, slx::AssouadMode::tv);
      else if (mmx_construction == "assouad-l1")
        fam = slx::materialize_l1_subsample(
            slx::assouad_family(mmx_k, mmx_zeta, slx::AssouadMode::vertex_l1),
            mmx_codes, seed);
      else if (mmx_construction == "lecam")
        fam = slx::lecam_pair(slx::standard_simplex(mmx_k), mmx_zeta);
      else
        throw slx::InvalidConfig("unknown construction: " + mmx_construction);
      const slx::MinimaxReport rep = slx::empirical_minimax(
          fam, mmx_sigma, mmx_n, mmx_trials, mmx_learner, seed);
      std::string csv = "member_id,trial,tv_error\n";
      for (const auto& c : rep.cells)
        csv += std::to_string(c.member) + ',' + std::to_string(c.trial) + ',' +
               slx::fmt_g17(c.tv_error) + '\n';
      slx::write_text(out + ".csv", csv);
      slx::Json j{{"schema", slx::kSchemaVersion},
                  {"build", slx::kBuildTag},
                  {"seed", seed},
                  {"construction", mmx_construction},
                  {"members", fam.members.size()},
                  {"max_risk", rep.max_risk},
                  {"max_risk_se", rep.max_risk_se},
                  {"eps_noisy_bound", rep.eps_noisy_bound},
                  {"eps_noiseless_bound", rep.eps_noiseless_bound}};
      if (fam.construction == slx::Construction::lecam_pair)
        j["lecam_tv_bound"] = fam.lecam_tv_bound;
      slx::write_json(out + ".json", j);
      std::cout << j.dump(2) << "\n";
    } else if (*exp) {
      const std::string path =
          exp_config.empty() ? global_config : exp_config;
      if (path.empty()) throw slx::InvalidConfig("experiment needs --config");
      slx::ExperimentConfig cfg =
          slx::experiment_config_from_json(slx::load_json(path));
      if (app.count("--seed")) cfg.seed = seed;
      cfg.out_prefix = out;
      slx::run_experiment(cfg);
      std::cout << out << ".csv\n";
    } else if (*pha) {
      const std::string path =
          pha_config.empty() ? global_config : pha_config;
      if (path.empty()) throw slx::InvalidConfig("phase needs --config");
      slx::ExperimentConfig cfg =
          slx::experiment_config_from_json(slx::load_json(path));
      if (app.count("--seed")) cfg.seed = seed;
      cfg.out_prefix = out;
      const slx::PhaseReport rep = slx::sweep_phase_transition(cfg);
      std::cout << (rep.knee_snr ? "knee_snr=" + slx::fmt_g17(*rep.knee_snr)
                                 : std::string("knee_snr=none"))
                << "\n";
    }
  } catch (const slx::InvalidConfig& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  } catch (const slx::InvalidConfidence& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
