#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ramdpm/config.hpp"
#include "ramdpm/estimands.hpp"
#include "ramdpm/gibbs.hpp"
#include "ramdpm/io.hpp"
#include "ramdpm/metrics.hpp"
#include "ramdpm/simulate.hpp"

namespace ramdpm {

namespace detail {

inline std::string resolve_out(const RunConfig& rc, const std::string& configured,
                               const std::string& fallback_name) {
  namespace fs = std::filesystem;
  fs::path p = configured.empty() ? fs::path(rc.out_dir) / fallback_name : fs::path(configured);
  if (!configured.empty() && p.is_relative() && rc.out_dir != ".")
    p = fs::path(rc.out_dir) / p;
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p.string();
}

inline json scenario_to_json(const ScenarioSpec& s) {
  json j{{"id", to_string(s.id)}, {"n", s.n},         {"error", to_string(s.error)},
         {"sigma", s.sigma},      {"K", s.K}};
  if (s.missing_frac) j["missing_frac"] = *s.missing_frac;
  if (!s.attempt_probs[0].empty())
    j["attempt_probs"] = {{"control", s.attempt_probs[0]}, {"treatment", s.attempt_probs[1]}};
  if (s.s1) {
    const auto& t = *s.s1;
    j["coefficients"] = {{"alpha0", t.alpha[0]}, {"alpha1", t.alpha[1]}, {"beta", t.beta},
                         {"sigma", t.sigma},     {"x_mean", t.x_mean},   {"x_var", t.x_var}};
  }
  if (s.s4) {
    const auto& t = *s.s4;
    j["coefficients"] = {{"beta0", t.beta0},   {"xi", t.xi},         {"beta", t.beta},
                         {"sigma", t.sigma},   {"lambda0", t.lambda0}, {"gamma", t.gamma},
                         {"lambda", t.lambda}, {"delta1", t.delta1}, {"delta2", t.delta2},
                         {"x_mean", t.x_mean}, {"x_var", t.x_var}};
  }
  return j;
}

inline json metrics_to_json(const MetricsReport& r) {
  json per = json::array();
  for (const auto& o : r.per_rep) {
    json jo{{"ok", o.ok}};
    if (o.ok) {
      jo["theta_hat"] = o.theta_hat;
      jo["ci_low"] = o.ci_low;
      jo["ci_high"] = o.ci_high;
    } else {
      jo["error"] = o.error;
    }
    per.push_back(std::move(jo));
  }
  return json{{"scenario", r.scenario_id},
              {"prior", r.prior_label},
              {"n_reps", r.n_reps},
              {"n_failed", r.n_failed},
              {"theta_true", r.theta_true},
              {"bias", r.bias},
              {"mse", r.mse},
              {"coverage", r.coverage},
              {"mean_ci_length", r.mean_ci_length},
              {"per_rep", std::move(per)}};
}

}  // namespace detail

inline void run_simulate(const RunConfig& rc) {
  const ScenarioSpec& spec = *rc.scenario;
  Rng rng(rc.model.seed);
  Dataset data = gen_scenario(spec, rng);
  std::string data_path = detail::resolve_out(rc, rc.data_path, "data.csv");
  write_dataset_csv(data, data_path);
  json meta;
  meta["scenario"] = detail::scenario_to_json(spec);
  meta["seed"] = rc.model.seed;
  meta["theta_true"] = true_theta(spec);
  meta["theta_true_completers"] = true_theta_completers(spec);
  write_json_file(meta, data_path + ".meta.json");
}

inline void run_fit(const RunConfig& rc) {
  Dataset data = read_dataset_csv(rc.data_path);
  normalize_attempts(data, rc.model.K);
  validate_normalized(data, rc.model);
  StandardizationRecord std_rec = standardize(data);
  Rng rng(rc.model.seed);
  std::vector<PosteriorDraw> draws = run_chain(data, rc.model, std_rec, rng);
  std::string draws_path = detail::resolve_out(rc, rc.draws_path, "draws.json");
  write_json_file(draws_to_json(draws, rc.model), draws_path);
}

inline void run_estimate(const RunConfig& rc) {
  auto [draws, file_cfg] = draws_from_json(read_json_file(rc.draws_path));
  ModelConfig cfg = file_cfg;  // layout from the fit
  cfg.mc_draws = rc.model.mc_draws;
  cfg.seed = rc.model.seed;
  auto [samples, summary] = treatment_effect(draws, rc.prior, cfg.mc_draws, cfg, cfg.seed);
  (void)samples;
  auto gof = gof_table(draws, cfg.mc_draws, cfg, substream_seed(cfg.seed, 0x676f66ULL));
  json rep;
  rep["prior_kind"] = to_string(rc.prior.kind);
  rep["P"] = rc.prior.P;
  rep["theta_mean"] = summary.mean;
  rep["ci_low"] = summary.ci_low;
  rep["ci_high"] = summary.ci_high;
  rep["ci_length"] = summary.ci_length;
  rep["n_draws"] = summary.n_draws;
  json grows = json::array();
  for (const auto& row : gof)
    grows.push_back(json{{"z", row.z},
                         {"r_star", row.r_star},
                         {"mean", row.summary.mean},
                         {"ci_low", row.summary.ci_low},
                         {"ci_high", row.summary.ci_high}});
  rep["gof"] = std::move(grows);
  write_json_file(rep, detail::resolve_out(rc, rc.report_path, "estimate.json"));
}

inline void run_gof(const RunConfig& rc) {
  auto [draws, file_cfg] = draws_from_json(read_json_file(rc.draws_path));
  ModelConfig cfg = file_cfg;
  cfg.mc_draws = rc.model.mc_draws;
  cfg.seed = rc.model.seed;
  Dataset data = read_dataset_csv(rc.data_path);
  normalize_attempts(data, cfg.K);

  auto gof = gof_table(draws, cfg.mc_draws, cfg, substream_seed(cfg.seed, 0x676f66ULL));
  // observed cell means on the raw scale
  std::map<std::pair<int, int>, std::pair<double, int>> observed;
  for (const auto& rec : data.records) {
    if (!rec.y.has_value()) continue;
    auto key = std::make_pair(rec.z, cfg.merge(rec.r));
    auto& cell = observed[key];
    cell.first += *rec.y;
    cell.second += 1;
  }
  json rows = json::array();
  for (const auto& row : gof) {
    json jr{{"z", row.z},
            {"r_star", row.r_star},
            {"mean", row.summary.mean},
            {"ci_low", row.summary.ci_low},
            {"ci_high", row.summary.ci_high}};
    auto it = observed.find({row.z, row.r_star});
    jr["n_obs"] = it == observed.end() ? 0 : it->second.second;
    if (it != observed.end() && it->second.second > 0)
      jr["observed_mean"] = it->second.first / it->second.second;
    rows.push_back(std::move(jr));
  }
  json rep;
  rep["gof"] = std::move(rows);
  write_json_file(rep, detail::resolve_out(rc, rc.report_path, "gof.json"));
}

inline void run_bench(const RunConfig& rc) {
  auto reports = replicate_study_multi(*rc.scenario, rc.model, rc.bench.priors, rc.bench.n_reps,
                                       rc.bench.base_seed);
  json rep;
  rep["scenario"] = detail::scenario_to_json(*rc.scenario);
  rep["n_reps"] = rc.bench.n_reps;
  rep["base_seed"] = rc.bench.base_seed;
  json arr = json::array();
  for (const auto& r : compare_priors(reports)) arr.push_back(detail::metrics_to_json(r));
  rep["results"] = std::move(arr);
  std::string report_path = detail::resolve_out(rc, rc.report_path, "bench.json");
  write_json_file(rep, report_path);
  std::string csv_path = report_path;
  auto pos = csv_path.rfind(".json");
  csv_path = (pos == std::string::npos ? csv_path : csv_path.substr(0, pos)) + ".csv";
  std::ofstream os(csv_path);
  os << render_metrics_csv(reports);
}

/// Dispatch a parsed run configuration. Throws ConfigError for usage problems
/// and std exceptions for numeric failures.
inline void run(const RunConfig& rc) {
  switch (rc.command) {
    case Command::simulate: run_simulate(rc); return;
    case Command::fit: run_fit(rc); return;
    case Command::estimate: run_estimate(rc); return;
    case Command::gof: run_gof(rc); return;
    case Command::bench: run_bench(rc); return;
  }
  throw ConfigError("unknown command");
}

}  // namespace ramdpm
