#pragma once

// JSON and CSV serialization. Every JSON document carries "schema": 1 and
// the shared simplex encoding {"dim": K, "vertices": [[...], ...]} with one
// row per vertex. Doubles in CSV go through fmt_g17 so that re-running a
// command with the same seed is byte-identical.

#include <json.hpp>

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <string>

#include "slx/cover.hpp"
#include "slx/geometry.hpp"
#include "slx/localization.hpp"
#include "slx/sampler.hpp"
#include "slx/scheffe.hpp"

namespace slx {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kBuildTag = "slx-1.0.0";

inline std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline Json simplex_to_json(const Simplex& s) {
  Json rows = Json::array();
  for (int c = 0; c < s.vertices.cols(); ++c) {
    Json row = Json::array();
    for (int r = 0; r < s.vertices.rows(); ++r) row.push_back(s.vertices(r, c));
    rows.push_back(std::move(row));
  }
  return Json{{"dim", s.dim()}, {"vertices", std::move(rows)}};
}

inline Simplex simplex_from_json(const Json& j) {
  const int k = j.at("dim").get<int>();
  const auto& rows = j.at("vertices");
  if (static_cast<int>(rows.size()) != k + 1)
    throw InvalidConfig("simplex JSON needs K+1 vertices");
  Eigen::MatrixXd v(k, k + 1);
  for (int c = 0; c < k + 1; ++c) {
    if (static_cast<int>(rows[c].size()) != k)
      throw InvalidConfig("vertex row has wrong dimension");
    for (int r = 0; r < k; ++r) v(r, c) = rows[c][r].get<double>();
  }
  return Simplex(std::move(v));
}

inline Json ball_to_json(const LocalizationBall& ball) {
  Json center = Json::array();
  for (int i = 0; i < ball.center.size(); ++i) center.push_back(ball.center(i));
  Json j{{"schema", kSchemaVersion},
         {"p", std::move(center)},
         {"R", ball.radius},
         {"D", ball.statistic},
         {"m", ball.pairs}};
  if (ball.noise_bound)
    j["R_n"] = *ball.noise_bound;
  else
    j["R_n"] = nullptr;
  return j;
}

inline LocalizationBall ball_from_json(const Json& j) {
  LocalizationBall ball;
  const auto& p = j.at("p");
  ball.center.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) ball.center(i) = p[i].get<double>();
  ball.radius = j.at("R").get<double>();
  ball.statistic = j.at("D").get<double>();
  ball.pairs = j.at("m").get<int>();
  if (j.contains("R_n") && !j.at("R_n").is_null())
    ball.noise_bound = j.at("R_n").get<double>();
  return ball;
}

inline Json family_to_json(const CandidateFamily& fam) {
  Json hyps = Json::array();
  for (const auto& h : fam.hypotheses)
    hyps.push_back(Json{{"simplex", simplex_to_json(h.simplex)},
                        {"sigma", h.sigma}});
  return Json{{"schema", kSchemaVersion},
              {"M", fam.size()},
              {"cover_points_used", fam.cover_points_used},
              {"truncated", fam.truncated},
              {"points_truncated", fam.points_truncated},
              {"tuples_truncated", fam.tuples_truncated},
              {"hypotheses", std::move(hyps)}};
}

inline CandidateFamily family_from_json(const Json& j) {
  CandidateFamily fam;
  for (const auto& h : j.at("hypotheses"))
    fam.hypotheses.push_back(
        {simplex_from_json(h.at("simplex")), h.at("sigma").get<double>()});
  fam.cover_points_used = j.value("cover_points_used", std::int64_t(0));
  fam.truncated = j.value("truncated", false);
  fam.points_truncated = j.value("points_truncated", false);
  fam.tuples_truncated = j.value("tuples_truncated", false);
  return fam;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidConfig("cannot open for writing: " + path);
  out << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidConfig("cannot open for reading: " + path);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

inline void write_json(const std::string& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

inline Json load_json(const std::string& path) {
  return Json::parse(read_text(path));
}

// Sample CSV: header "x0,...,x{K-1}", one row per sample, with a JSON
// sidecar {seed, n, model} next to it.
inline void write_samples_csv(const std::string& path, const SampleSet& set,
                              const NoisyModel* model = nullptr) {
  std::string text;
  for (int d = 0; d < set.dim(); ++d) {
    if (d) text += ',';
    text += "x" + std::to_string(d);
  }
  text += '\n';
  for (int i = 0; i < set.n(); ++i) {
    for (int d = 0; d < set.dim(); ++d) {
      if (d) text += ',';
      text += fmt_g17(set.points(i, d));
    }
    text += '\n';
  }
  write_text(path, text);
  Json sidecar{{"schema", kSchemaVersion},
               {"build", kBuildTag},
               {"seed", set.seed},
               {"n", set.n()},
               {"model", nullptr}};
  if (model)
    sidecar["model"] = Json{{"simplex", simplex_to_json(model->simplex)},
                            {"sigma", model->sigma}};
  if (!set.model_tag.empty()) sidecar["tag"] = set.model_tag;
  write_json(path + ".json", sidecar);
}

inline SampleSet read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw InvalidConfig("empty sample file");
  int k = 1;
  for (char c : line)
    if (c == ',') ++k;
  std::vector<double> values;
  int n = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t pos = 0;
    for (int d = 0; d < k; ++d) {
      std::size_t next = line.find(',', pos);
      values.push_back(std::stod(line.substr(pos, next - pos)));
      pos = (next == std::string::npos) ? line.size() : next + 1;
    }
    ++n;
  }
  SampleSet set;
  set.points.resize(n, k);
  for (int i = 0; i < n; ++i)
    for (int d = 0; d < k; ++d) set.points(i, d) = values[i * k + d];
  std::ifstream side(path + ".json");
  if (side) {
    const Json j = Json::parse(side);
    set.seed = j.value("seed", std::uint64_t(0));
    set.model_tag = j.value("tag", std::string());
  }
  return set;
}

}  // namespace slx
