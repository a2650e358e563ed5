#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ramdpm/core_model.hpp"
#include "ramdpm/estimands.hpp"
#include "ramdpm/extrapolation.hpp"
#include "ramdpm/gibbs.hpp"
#include "ramdpm/parallel.hpp"
#include "ramdpm/simulate.hpp"

namespace ramdpm {

struct RepOutcome {
  bool ok = false;
  double theta_hat = 0.0;
  double ci_low = 0.0, ci_high = 0.0;
  std::string error;
};

struct MetricsReport {
  std::string scenario_id;
  std::string prior_label;
  int n_reps = 0;
  int n_failed = 0;
  double theta_true = 0.0;
  double bias = 0.0, mse = 0.0, coverage = 0.0, mean_ci_length = 0.0;
  std::vector<RepOutcome> per_rep;
};

/// Bias/MSE/coverage/CI-length over successful replications. Fails the study
/// if more than 1% of replications had to be excluded.
inline MetricsReport aggregate_replications(const std::string& scenario_id,
                                            const std::string& prior_label, double theta_true,
                                            std::vector<RepOutcome> per_rep) {
  MetricsReport rep;
  rep.scenario_id = scenario_id;
  rep.prior_label = prior_label;
  rep.theta_true = theta_true;
  rep.n_reps = static_cast<int>(per_rep.size());
  double sum_d = 0.0, sum_d2 = 0.0, sum_len = 0.0;
  int covered = 0, ok = 0;
  for (const auto& r : per_rep) {
    if (!r.ok) {
      ++rep.n_failed;
      continue;
    }
    ++ok;
    double d = r.theta_hat - theta_true;
    sum_d += d;
    sum_d2 += d * d;
    sum_len += r.ci_high - r.ci_low;
    if (r.ci_low <= theta_true && theta_true <= r.ci_high) ++covered;
  }
  if (rep.n_failed > 0.01 * rep.n_reps)
    throw std::runtime_error("replicate_study: " + std::to_string(rep.n_failed) + " of " +
                             std::to_string(rep.n_reps) + " replications failed (> 1%)");
  if (ok == 0) throw std::runtime_error("replicate_study: no successful replications");
  rep.bias = sum_d / ok;
  rep.mse = sum_d2 / ok;
  rep.coverage = static_cast<double>(covered) / ok;
  rep.mean_ci_length = sum_len / ok;
  rep.per_rep = std::move(per_rep);
  return rep;
}

/// One replication's estimates for each prior, in the priors' order.
using RepEstimator =
    std::function<std::vector<RepOutcome>(int rep_index, std::uint64_t rep_seed)>;

/// The default pipeline: generate -> normalize -> standardize -> fit once ->
/// estimate theta under every prior from the shared draws.
inline RepEstimator default_rep_estimator(const ScenarioSpec& scenario, const ModelConfig& cfg,
                                          const std::vector<ExtrapolationPriorSpec>& priors) {
  return [scenario, cfg, priors](int /*rep_index*/, std::uint64_t rep_seed) {
    Rng gen_rng(rep_seed);
    Dataset data = gen_scenario(scenario, gen_rng);
    normalize_attempts(data, cfg.K);
    StandardizationRecord std_rec = standardize(data);
    Rng chain_rng(substream_seed(rep_seed, 0x636861696eULL));
    std::vector<PosteriorDraw> draws = run_chain(data, cfg, std_rec, chain_rng);
    std::uint64_t est_seed = substream_seed(rep_seed, 0x657374ULL);
    std::vector<RepOutcome> out;
    out.reserve(priors.size());
    for (const auto& prior : priors) {
      auto [samples, summary] = treatment_effect(draws, prior, cfg.mc_draws, cfg, est_seed);
      (void)samples;
      out.push_back(RepOutcome{true, summary.mean, summary.ci_low, summary.ci_high, {}});
    }
    return out;
  };
}

/// Run n_reps replications (replication k uses seed base_seed + k) and
/// aggregate one report per prior. The "none" prior is scored against the
/// completers-only truth; all others against the full-theta truth.
inline std::vector<MetricsReport> replicate_study_multi(
    const ScenarioSpec& scenario, const ModelConfig& cfg,
    const std::vector<ExtrapolationPriorSpec>& priors, int n_reps, std::uint64_t base_seed,
    const RepEstimator& estimator_override = nullptr) {
  if (n_reps < 1) throw std::invalid_argument("replicate_study: n_reps must be >= 1");
  if (priors.empty()) throw std::invalid_argument("replicate_study: no priors given");
  scenario.validate();
  double theta_full = true_theta(scenario);
  double theta_none = true_theta_completers(scenario);

  RepEstimator estimator =
      estimator_override ? estimator_override : default_rep_estimator(scenario, cfg, priors);

  std::vector<std::vector<RepOutcome>> results(
      static_cast<std::size_t>(n_reps), std::vector<RepOutcome>(priors.size(), RepOutcome{}));
  parallel_for(static_cast<std::size_t>(n_reps), [&](std::size_t k) {
    std::uint64_t rep_seed = base_seed + static_cast<std::uint64_t>(k) + 1;
    try {
      auto per_prior = estimator(static_cast<int>(k) + 1, rep_seed);
      if (per_prior.size() != priors.size())
        throw std::runtime_error("rep estimator returned wrong number of outcomes");
      results[k] = std::move(per_prior);
    } catch (const std::exception& e) {
      for (auto& o : results[k]) {
        o.ok = false;
        o.error = e.what();
      }
    }
  });

  std::vector<MetricsReport> reports;
  reports.reserve(priors.size());
  for (std::size_t p = 0; p < priors.size(); ++p) {
    std::vector<RepOutcome> per_rep(static_cast<std::size_t>(n_reps));
    for (std::size_t k = 0; k < results.size(); ++k) per_rep[k] = results[k][p];
    double truth = priors[p].kind == PriorKind::none ? theta_none : theta_full;
    reports.push_back(aggregate_replications(to_string(scenario.id), priors[p].label(), truth,
                                             std::move(per_rep)));
  }
  return reports;
}

inline MetricsReport replicate_study(const ScenarioSpec& scenario, const ModelConfig& cfg,
                                     const ExtrapolationPriorSpec& prior, int n_reps,
                                     std::uint64_t base_seed,
                                     const RepEstimator& estimator_override = nullptr) {
  return replicate_study_multi(scenario, cfg, {prior}, n_reps, base_seed,
                               estimator_override)[0];
}

namespace detail {
inline const std::vector<std::string>& canonical_prior_order() {
  static const std::vector<std::string> order = {"none",   "pm",     "unif10", "unif20",
                                                 "tri110", "tri120", "tri210", "tri220"};
  return order;
}
}  // namespace detail

/// Aligned rows over prior kinds, canonical order first.
inline std::vector<MetricsReport> compare_priors(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("compare_priors: no reports");
  for (const auto& r : reports) {
    if (r.scenario_id != reports[0].scenario_id)
      throw std::invalid_argument("compare_priors: reports from different scenarios");
    if (r.n_reps != reports[0].n_reps)
      throw std::invalid_argument("compare_priors: reports with different replication counts");
  }
  std::vector<MetricsReport> out;
  std::vector<bool> used(reports.size(), false);
  for (const auto& label : detail::canonical_prior_order())
    for (std::size_t i = 0; i < reports.size(); ++i)
      if (!used[i] && reports[i].prior_label == label) {
        out.push_back(reports[i]);
        used[i] = true;
      }
  for (std::size_t i = 0; i < reports.size(); ++i)
    if (!used[i]) out.push_back(reports[i]);
  return out;
}

/// CSV in the supplement tables' column layout.
inline std::string render_metrics_csv(const std::vector<MetricsReport>& reports) {
  std::ostringstream os;
  os.precision(17);
  os << "prior,bias,mse,coverage,mean_ci_length\n";
  for (const auto& r : compare_priors(reports))
    os << r.prior_label << ',' << r.bias << ',' << r.mse << ',' << r.coverage << ','
       << r.mean_ci_length << '\n';
  return os.str();
}

}  // namespace ramdpm
