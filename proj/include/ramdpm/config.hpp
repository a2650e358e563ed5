#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ramdpm/extrapolation.hpp"
#include "ramdpm/io.hpp"
#include "ramdpm/simulate.hpp"
#include "ramdpm/types.hpp"

namespace ramdpm {

enum class Command { simulate, fit, estimate, gof, bench };

inline std::string to_string(Command c) {
  switch (c) {
    case Command::simulate: return "simulate";
    case Command::fit: return "fit";
    case Command::estimate: return "estimate";
    case Command::gof: return "gof";
    case Command::bench: return "bench";
  }
  return "?";
}

struct BenchConfig {
  int n_reps = 100;
  std::uint64_t base_seed = 1000;
  std::vector<ExtrapolationPriorSpec> priors;
};

struct RunConfig {
  Command command = Command::fit;
  std::string data_path, draws_path, report_path;
  ModelConfig model;
  ExtrapolationPriorSpec prior;
  std::optional<ScenarioSpec> scenario;
  BenchConfig bench;
  std::string out_dir = ".";
};

namespace detail {

inline void check_keys(const json& j, const std::set<std::string>& allowed,
                       const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  std::string unknown;
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) unknown += (unknown.empty() ? "" : ", ") + it.key();
  if (!unknown.empty()) throw ConfigError("unknown keys in " + where + ": " + unknown);
}

template <typename T>
inline T get_or(const json& j, const char* key, T def) {
  if (!j.contains(key)) return def;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("invalid value for ") + key);
  }
}

inline ExtrapolationPriorSpec prior_from_json(const json& j, const std::string& where) {
  check_keys(j, {"kind", "P"}, where);
  ExtrapolationPriorSpec spec;
  try {
    spec.kind = prior_kind_from_string(get_or<std::string>(j, "kind", "pm"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  spec.P = get_or<double>(j, "P", 10.0);
  try {
    spec.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

inline ModelConfig model_from_json_cfg(const json& j) {
  check_keys(j, {"K", "K_cond", "merge_map", "H", "n_iter", "n_burn", "thin", "mc_draws", "seed"},
             "model");
  ModelConfig cfg;
  cfg.K = get_or<int>(j, "K", 9);
  cfg.K_cond = get_or<int>(j, "K_cond", 3);
  cfg.merge_map = get_or<std::vector<int>>(j, "merge_map", {});
  cfg.H = get_or<int>(j, "H", 20);
  cfg.n_iter = get_or<int>(j, "n_iter", 50000);
  cfg.n_burn = get_or<int>(j, "n_burn", 5000);
  cfg.thin = get_or<int>(j, "thin", 5);
  cfg.mc_draws = get_or<int>(j, "mc_draws", 10000);
  cfg.seed = get_or<std::uint64_t>(j, "seed", 1);
  try {
    cfg.finalize();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

inline ScenarioSpec scenario_from_json(const json& j) {
  check_keys(j, {"id", "n", "error", "sigma", "missing_frac", "attempt_probs", "coefficients"},
             "scenario");
  ScenarioSpec spec;
  try {
    spec.id = scenario_id_from_string(get_or<std::string>(j, "id", "s2"));
    spec.error = error_law_from_string(get_or<std::string>(j, "error", "normal"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  spec.n = get_or<int>(j, "n", 500);
  spec.sigma = get_or<double>(j, "sigma", 2.0);
  if (j.contains("missing_frac")) spec.missing_frac = j.at("missing_frac").get<double>();
  if (j.contains("attempt_probs")) {
    const auto& ap = j.at("attempt_probs");
    check_keys(ap, {"control", "treatment"}, "scenario.attempt_probs");
    spec.attempt_probs[0] = ap.at("control").get<std::vector<double>>();
    spec.attempt_probs[1] = ap.at("treatment").get<std::vector<double>>();
  }
  if (j.contains("coefficients")) {
    const auto& co = j.at("coefficients");
    if (spec.id == ScenarioId::s1_custom) {
      check_keys(co, {"alpha0", "alpha1", "beta", "sigma", "x_mean", "x_var"},
                 "scenario.coefficients");
      CustomS1 t;
      auto a0 = co.at("alpha0").get<std::vector<double>>();
      auto a1 = co.at("alpha1").get<std::vector<double>>();
      if (a0.size() != 4 || a1.size() != 4)
        throw ConfigError("s1_custom alpha tables must have 4 entries (merged patterns 1..3 + truth)");
      for (int i = 0; i < 4; ++i) {
        t.alpha[0][static_cast<std::size_t>(i)] = a0[static_cast<std::size_t>(i)];
        t.alpha[1][static_cast<std::size_t>(i)] = a1[static_cast<std::size_t>(i)];
      }
      t.beta = get_or<double>(co, "beta", 0.4);
      t.sigma = get_or<double>(co, "sigma", 2.0);
      t.x_mean = get_or<double>(co, "x_mean", 2.0);
      t.x_var = get_or<double>(co, "x_var", 0.2);
      spec.s1 = t;
    } else if (spec.id == ScenarioId::s4_custom) {
      check_keys(co,
                 {"beta0", "xi", "beta", "sigma", "lambda0", "gamma", "lambda", "delta1", "delta2",
                  "x_mean", "x_var"},
                 "scenario.coefficients");
      CustomS4 t;
      t.beta0 = get_or<double>(co, "beta0", 0.0);
      t.xi = get_or<double>(co, "xi", 0.0);
      t.beta = get_or<double>(co, "beta", 0.0);
      t.sigma = get_or<double>(co, "sigma", 1.0);
      auto fill8 = [&](const char* key, std::array<double, 8>& dst) {
        auto v = co.at(key).get<std::vector<double>>();
        if (v.size() != 8) throw ConfigError(std::string(key) + " must have 8 entries");
        for (int i = 0; i < 8; ++i) dst[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)];
      };
      fill8("lambda0", t.lambda0);
      fill8("gamma", t.gamma);
      fill8("lambda", t.lambda);
      t.delta1 = get_or<double>(co, "delta1", 0.0);
      t.delta2 = get_or<double>(co, "delta2", 0.0);
      t.x_mean = get_or<double>(co, "x_mean", 2.0);
      t.x_var = get_or<double>(co, "x_var", 0.2);
      spec.s4 = t;
    } else {
      throw ConfigError("scenario.coefficients is only valid for s1_custom / s4_custom");
    }
  }
  try {
    spec.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

}  // namespace detail

/// Strict parse: unknown keys anywhere are an error; enums report the allowed
/// values; documented defaults fill everything absent.
inline RunConfig parse_config(const json& j, Command command) {
  detail::check_keys(j, {"data", "draws", "report", "model", "extrapolation", "scenario", "bench"},
                     "config");
  RunConfig rc;
  rc.command = command;
  rc.data_path = detail::get_or<std::string>(j, "data", "");
  rc.draws_path = detail::get_or<std::string>(j, "draws", "");
  rc.report_path = detail::get_or<std::string>(j, "report", "");
  rc.model = j.contains("model") ? detail::model_from_json_cfg(j.at("model")) : [] {
    ModelConfig m;
    m.finalize();
    return m;
  }();
  rc.prior = j.contains("extrapolation")
                 ? detail::prior_from_json(j.at("extrapolation"), "extrapolation")
                 : ExtrapolationPriorSpec{};
  if (j.contains("scenario")) rc.scenario = detail::scenario_from_json(j.at("scenario"));
  if (j.contains("bench")) {
    const auto& b = j.at("bench");
    detail::check_keys(b, {"n_reps", "base_seed", "priors"}, "bench");
    rc.bench.n_reps = detail::get_or<int>(b, "n_reps", 100);
    rc.bench.base_seed = detail::get_or<std::uint64_t>(b, "base_seed", 1000);
    if (b.contains("priors"))
      for (const auto& pj : b.at("priors"))
        rc.bench.priors.push_back(detail::prior_from_json(pj, "bench.priors[]"));
  }
  if (rc.bench.priors.empty()) rc.bench.priors = {ExtrapolationPriorSpec{PriorKind::none, 10.0},
                                                  ExtrapolationPriorSpec{PriorKind::point_mass, 10.0}};

  switch (command) {
    case Command::simulate:
      if (!rc.scenario) throw ConfigError("simulate requires a scenario section");
      break;
    case Command::fit:
      if (rc.data_path.empty()) throw ConfigError("fit requires a data path");
      break;
    case Command::estimate:
      if (rc.draws_path.empty()) throw ConfigError("estimate requires a draws path");
      break;
    case Command::gof:
      if (rc.draws_path.empty() || rc.data_path.empty())
        throw ConfigError("gof requires draws and data paths");
      break;
    case Command::bench:
      if (!rc.scenario) throw ConfigError("bench requires a scenario section");
      break;
  }
  return rc;
}

}  // namespace ramdpm
