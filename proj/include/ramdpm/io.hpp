#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ramdpm/core_model.hpp"
#include "ramdpm/types.hpp"

namespace ramdpm {

using nlohmann::json;

/// Errors that should surface as usage/config failures (exit 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// dataset CSV: header y,r,x_cat,x_cont,z; empty cells for missing y / x_cont
// ---------------------------------------------------------------------------

inline void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "y,r,x_cat,x_cont,z\n";
  for (const auto& rec : data.records) {
    if (rec.y) os << format_double(*rec.y);
    os << ',' << rec.r << ',' << rec.x_cat << ',';
    if (rec.x_cont) os << format_double(*rec.x_cont);
    os << ',' << rec.z << '\n';
  }
}

inline Dataset read_dataset_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open dataset: " + path);
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty dataset file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "y,r,x_cat,x_cont,z")
    throw ConfigError("dataset header must be 'y,r,x_cat,x_cont,z', got '" + line + "'");
  Dataset data;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    while (fields.size() < 5) fields.emplace_back();
    if (fields.size() != 5)
      throw ConfigError("dataset line " + std::to_string(lineno) + ": expected 5 fields");
    AttemptRecord rec;
    try {
      if (!fields[0].empty()) rec.y = std::stod(fields[0]);
      rec.r = std::stoi(fields[1]);
      rec.x_cat = std::stoi(fields[2]);
      if (!fields[3].empty()) rec.x_cont = std::stod(fields[3]);
      rec.z = std::stoi(fields[4]);
    } catch (const std::exception&) {
      throw ConfigError("dataset line " + std::to_string(lineno) + ": parse error");
    }
    data.records.push_back(rec);
  }
  data.refresh_layout();
  return data;
}

// ---------------------------------------------------------------------------
// JSON (de)serialization of the model objects
// ---------------------------------------------------------------------------

inline json to_json(const StandardizationRecord& s) {
  return json{{"y_center", s.y_center},
              {"y_scale", s.y_scale},
              {"x_center", s.x_center},
              {"x_scale", s.x_scale}};
}

inline StandardizationRecord standardization_from_json(const json& j) {
  StandardizationRecord s;
  s.y_center = j.at("y_center").get<double>();
  s.y_scale = j.at("y_scale").get<double>();
  s.x_center = j.at("x_center").get<double>();
  s.x_scale = j.at("x_scale").get<double>();
  return s;
}

inline json to_json(const ModelConfig& cfg) {
  return json{{"K", cfg.K},         {"K_cond", cfg.K_cond},   {"merge_map", cfg.merge_map},
              {"H", cfg.H},         {"n_iter", cfg.n_iter},   {"n_burn", cfg.n_burn},
              {"thin", cfg.thin},   {"mc_draws", cfg.mc_draws}, {"seed", cfg.seed}};
}

inline ModelConfig model_config_from_json(const json& j) {
  ModelConfig cfg;
  cfg.K = j.at("K").get<int>();
  cfg.K_cond = j.at("K_cond").get<int>();
  cfg.merge_map = j.at("merge_map").get<std::vector<int>>();
  cfg.H = j.at("H").get<int>();
  cfg.n_iter = j.at("n_iter").get<int>();
  cfg.n_burn = j.at("n_burn").get<int>();
  cfg.thin = j.at("thin").get<int>();
  cfg.mc_draws = j.at("mc_draws").get<int>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.finalize();
  return cfg;
}

inline json to_json(const ClusterParams& cp) {
  return json{{"alpha0", cp.alpha[0]}, {"alpha1", cp.alpha[1]}, {"beta", cp.beta},
              {"sigma2", cp.sigma2},   {"xi", cp.xi},           {"eta_cat", cp.eta_cat},
              {"m", cp.m},             {"tau2", cp.tau2},       {"p_z", cp.p_z}};
}

inline ClusterParams cluster_params_from_json(const json& j) {
  ClusterParams cp;
  cp.alpha[0] = j.at("alpha0").get<std::vector<double>>();
  cp.alpha[1] = j.at("alpha1").get<std::vector<double>>();
  cp.beta = j.at("beta").get<std::vector<double>>();
  cp.sigma2 = j.at("sigma2").get<double>();
  cp.xi = j.at("xi").get<std::vector<double>>();
  cp.eta_cat = j.at("eta_cat").get<std::vector<double>>();
  cp.m = j.at("m").get<double>();
  cp.tau2 = j.at("tau2").get<double>();
  cp.p_z = j.at("p_z").get<double>();
  return cp;
}

inline json to_json(const HyperState& hy) {
  return json{{"mu_alpha0", hy.mu_alpha[0]},
              {"mu_alpha1", hy.mu_alpha[1]},
              {"sigma2_alpha", std::vector<double>{hy.sigma2_alpha[0], hy.sigma2_alpha[1]}},
              {"mu_beta", hy.mu_beta},
              {"var_beta", hy.var_beta},
              {"mu_m", hy.mu_m},
              {"sigma2_m", hy.sigma2_m},
              {"S1", hy.S1},
              {"W1", hy.W1},
              {"S2", hy.S2},
              {"W2", hy.W2},
              {"s_z", std::vector<double>{hy.s_z[0], hy.s_z[1]}},
              {"lambda_z", std::vector<double>{hy.lambda_z[0], hy.lambda_z[1]}},
              {"s_2", hy.s_2},
              {"lambda_2", hy.lambda_2},
              {"mass", hy.mass},
              {"G_Y", hy.G_Y},
              {"G_X2", hy.G_X2},
              {"g_z", std::vector<double>{hy.g_z[0], hy.g_z[1]}},
              {"c", hy.c}};
}

inline HyperState hyper_state_from_json(const json& j) {
  HyperState hy;
  hy.mu_alpha[0] = j.at("mu_alpha0").get<std::vector<double>>();
  hy.mu_alpha[1] = j.at("mu_alpha1").get<std::vector<double>>();
  auto sa = j.at("sigma2_alpha").get<std::vector<double>>();
  hy.sigma2_alpha = {sa.at(0), sa.at(1)};
  hy.mu_beta = j.at("mu_beta").get<std::vector<double>>();
  hy.var_beta = j.at("var_beta").get<std::vector<double>>();
  hy.mu_m = j.at("mu_m").get<double>();
  hy.sigma2_m = j.at("sigma2_m").get<double>();
  hy.S1 = j.at("S1").get<double>();
  hy.W1 = j.at("W1").get<double>();
  hy.S2 = j.at("S2").get<double>();
  hy.W2 = j.at("W2").get<double>();
  auto sz = j.at("s_z").get<std::vector<double>>();
  hy.s_z = {sz.at(0), sz.at(1)};
  auto lz = j.at("lambda_z").get<std::vector<double>>();
  hy.lambda_z = {lz.at(0), lz.at(1)};
  hy.s_2 = j.at("s_2").get<double>();
  hy.lambda_2 = j.at("lambda_2").get<double>();
  hy.mass = j.at("mass").get<double>();
  hy.G_Y = j.at("G_Y").get<double>();
  hy.G_X2 = j.at("G_X2").get<double>();
  auto gz = j.at("g_z").get<std::vector<double>>();
  hy.g_z = {gz.at(0), gz.at(1)};
  hy.c = j.at("c").get<double>();
  return hy;
}

/// Draws file: model + standardization header plus one object per retained
/// draw. Stick weights are stored as v and rebuilt with stick_break on load.
inline json draws_to_json(const std::vector<PosteriorDraw>& draws, const ModelConfig& cfg) {
  if (draws.empty()) throw std::invalid_argument("draws_to_json: no draws");
  json out;
  out["model"] = to_json(cfg);
  out["standardization"] = to_json(draws.front().standardization);
  json arr = json::array();
  for (const auto& d : draws) {
    json jd;
    jd["v"] = d.sticks.v;
    json cl = json::array();
    for (const auto& cp : d.clusters) cl.push_back(to_json(cp));
    jd["clusters"] = std::move(cl);
    jd["hypers"] = to_json(d.hypers);
    arr.push_back(std::move(jd));
  }
  out["draws"] = std::move(arr);
  return out;
}

inline std::pair<std::vector<PosteriorDraw>, ModelConfig> draws_from_json(const json& j) {
  ModelConfig cfg = model_config_from_json(j.at("model"));
  StandardizationRecord std_rec = standardization_from_json(j.at("standardization"));
  std::vector<PosteriorDraw> draws;
  for (const auto& jd : j.at("draws")) {
    PosteriorDraw d;
    d.sticks.v = jd.at("v").get<std::vector<double>>();
    d.sticks.pi = stick_break(d.sticks.v);
    for (const auto& jc : jd.at("clusters")) d.clusters.push_back(cluster_params_from_json(jc));
    d.hypers = hyper_state_from_json(jd.at("hypers"));
    d.standardization = std_rec;
    draws.push_back(std::move(d));
  }
  if (draws.empty()) throw ConfigError("draws file contains no draws");
  return {std::move(draws), cfg};
}

inline void write_json_file(const json& j, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << j.dump(2) << '\n';
}

inline json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open: " + path);
  json j;
  try {
    is >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

}  // namespace ramdpm
