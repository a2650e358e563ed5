#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ramdpm/core_model.hpp"
#include "ramdpm/extrapolation.hpp"
#include "ramdpm/math_utils.hpp"
#include "ramdpm/parallel.hpp"
#include "ramdpm/rng.hpp"
#include "ramdpm/types.hpp"

namespace ramdpm {

struct EstimandSummary {
  double mean = 0.0;
  double ci_low = 0.0, ci_high = 0.0;
  double ci_length = 0.0;
  int n_draws = 0;
};

/// Posterior mean and equal-tail 95% interval (interpolated order statistics).
inline EstimandSummary summarize_posterior(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("summarize_posterior: empty sample");
  EstimandSummary s;
  s.n_draws = static_cast<int>(samples.size());
  s.mean = mean_of(samples);
  std::sort(samples.begin(), samples.end());
  s.ci_low = quantile_sorted(samples, 0.025);
  s.ci_high = quantile_sorted(samples, 0.975);
  s.ci_length = s.ci_high - s.ci_low;
  return s;
}

namespace detail {

/// Per-draw scratch for the MC integrals. The linear-space component weights
/// are always renormalized against the running max, so they cannot all
/// underflow at once.
struct McWorkspace {
  const PosteriorDraw* draw = nullptr;
  const ModelConfig* cfg = nullptr;
  int H = 0, L = 0, K = 0;
  bool has_x = false;
  std::vector<double> lc;   // log pi_h + log p(x, z; eta_h), current x sample
  std::vector<double> elc;  // exp(lc - max)
  std::vector<double> xb;   // x . beta_h, current x sample
  std::vector<double> ek;   // conditional means at k = 1..K

  McWorkspace(const PosteriorDraw& d, const ModelConfig& c) : draw(&d), cfg(&c) {
    H = d.H();
    if (H == 0) throw std::invalid_argument("estimand: draw has no components");
    L = d.clusters[0].L();
    has_x = d.clusters[0].has_x_cont();
    K = c.K;
    lc.resize(static_cast<std::size_t>(H));
    elc.resize(static_cast<std::size_t>(H));
    xb.resize(static_cast<std::size_t>(H));
    ek.resize(static_cast<std::size_t>(K));
  }

  /// Fill lc/elc/xb for covariates (x_cat, x) and arm z.
  void set_covariates(int x_cat, double x, int z) {
    double mx = kNegInf;
    for (int h = 0; h < H; ++h) {
      const auto& cp = draw->clusters[static_cast<std::size_t>(h)];
      double v = std::log(draw->sticks.pi[static_cast<std::size_t>(h)]) + cp.log_pz(z) +
                 std::log(cp.eta_cat[static_cast<std::size_t>(x_cat - 1)]);
      if (has_x) v += normal_logpdf(x, cp.m, cp.tau2);
      lc[static_cast<std::size_t>(h)] = v;
      if (v > mx) mx = v;
      xb[static_cast<std::size_t>(h)] =
          cp.beta.empty() ? 0.0 : design_dot(x_cat, x, has_x, L, cp.beta);
    }
    for (int h = 0; h < H; ++h)
      elc[static_cast<std::size_t>(h)] = std::exp(lc[static_cast<std::size_t>(h)] - mx);
  }

  /// E[Y | z, r, x] for the current covariates: the w_h(r, x, z)-weighted sum
  /// of component regression means.
  double conditional_mean(int r, int z) const {
    int rs = cfg->merge(r);
    double num = 0.0, den = 0.0;
    for (int h = 0; h < H; ++h) {
      const auto& cp = draw->clusters[static_cast<std::size_t>(h)];
      double w = elc[static_cast<std::size_t>(h)] * cp.xi[static_cast<std::size_t>(r - 1)];
      num += w * (cp.alpha[static_cast<std::size_t>(z)][static_cast<std::size_t>(rs - 1)] +
                  xb[static_cast<std::size_t>(h)]);
      den += w;
    }
    return num / den;
  }

  /// Same but for a merged pattern cell (all r sharing one r*).
  double conditional_mean_cell(std::span<const int> r_cell, int z) const {
    int rs = cfg->merge(r_cell.front());
    double num = 0.0, den = 0.0;
    for (int h = 0; h < H; ++h) {
      const auto& cp = draw->clusters[static_cast<std::size_t>(h)];
      double mass = 0.0;
      for (int r : r_cell) mass += cp.xi[static_cast<std::size_t>(r - 1)];
      double w = elc[static_cast<std::size_t>(h)] * mass;
      num += w * (cp.alpha[static_cast<std::size_t>(z)][static_cast<std::size_t>(rs - 1)] +
                  xb[static_cast<std::size_t>(h)]);
      den += w;
    }
    return num / den;
  }
};

inline std::pair<int, double> draw_covariates(const PosteriorDraw& draw, int l, bool has_x, int L,
                                              Rng& rng) {
  const auto& cp = draw.clusters[static_cast<std::size_t>(l)];
  int x_cat = L > 1 ? 1 + rng.categorical(cp.eta_cat) : 1;
  double x = has_x ? rng.normal(cp.m, std::sqrt(cp.tau2)) : 0.0;
  return {x_cat, x};
}

}  // namespace detail

/// One draw's MC estimate of E(Y | Z = z) under the extrapolation prior,
/// averaged over S samples of the supplement's six-step recipe. Returned on
/// the original outcome scale.
inline double mc_expectation_y_given_z(const PosteriorDraw& draw, int z,
                                       const ExtrapolationPriorSpec& spec, int S,
                                       const ModelConfig& cfg, Rng& rng) {
  if (S < 1) throw std::invalid_argument("mc_expectation_y_given_z: S must be >= 1");
  spec.validate();
  detail::McWorkspace ws(draw, cfg);
  const int K = cfg.K;
  double acc = 0.0;
  for (int s = 0; s < S; ++s) {
    int l = rng.categorical(draw.sticks.pi);
    auto [x_cat, x] = detail::draw_covariates(draw, l, ws.has_x, ws.L, rng);
    ws.set_covariates(x_cat, x, z);
    int mcomp = rng.categorical_logits(ws.lc);
    const auto& xi = draw.clusters[static_cast<std::size_t>(mcomp)].xi;
    int r;
    if (spec.kind == PriorKind::none) {
      r = 1 + rng.categorical(std::span<const double>(xi.data(), static_cast<std::size_t>(K)));
    } else {
      r = 1 + rng.categorical(xi);
    }
    if (r <= K) {
      acc += ws.conditional_mean(r, z);
    } else {
      for (int k = 1; k <= K; ++k) ws.ek[static_cast<std::size_t>(k - 1)] = ws.conditional_mean(k, z);
      ExtrapolationBounds b = compute_bounds(ws.ek, spec.P);
      acc += sample_extrapolation_mean(spec, b, rng);
    }
  }
  return draw.standardization.y_from_std(acc / S);
}

/// theta samples (one per retained draw) and their posterior summary.
/// RNG substreams are keyed by (draw index, arm) so the result is independent
/// of evaluation order and shared across priors.
inline std::pair<std::vector<double>, EstimandSummary> treatment_effect(
    const std::vector<PosteriorDraw>& draws, const ExtrapolationPriorSpec& spec, int S,
    const ModelConfig& cfg, std::uint64_t base_seed) {
  if (draws.size() < 2) throw std::invalid_argument("treatment_effect: need at least 2 draws");
  std::vector<double> theta(draws.size());
  parallel_for(draws.size(), [&](std::size_t d) {
    Rng rng1(substream_seed(base_seed, d, 1));
    Rng rng0(substream_seed(base_seed, d, 0));
    theta[d] = mc_expectation_y_given_z(draws[d], 1, spec, S, cfg, rng1) -
               mc_expectation_y_given_z(draws[d], 0, spec, S, cfg, rng0);
  });
  EstimandSummary summary = summarize_posterior(theta);
  return {std::move(theta), summary};
}

/// One draw's MC estimate of E(Y | Z = z, R in cell) by the supplement's
/// three-step goodness-of-fit recipe (original outcome scale).
inline double gof_expectation_cell(const PosteriorDraw& draw, int z, std::span<const int> r_cell,
                                   int S, const ModelConfig& cfg, Rng& rng) {
  if (S < 1) throw std::invalid_argument("gof_expectation: S must be >= 1");
  for (int r : r_cell)
    if (r == cfg.K + 1)
      throw std::invalid_argument("gof_expectation: pattern K+1 has no identified mean");
  detail::McWorkspace ws(draw, cfg);
  std::vector<double> u = pattern_mixture_weights_cell(z, r_cell, draw, cfg);
  double acc = 0.0;
  for (int s = 0; s < S; ++s) {
    int l = rng.categorical(u);
    auto [x_cat, x] = detail::draw_covariates(draw, l, ws.has_x, ws.L, rng);
    ws.set_covariates(x_cat, x, z);
    acc += ws.conditional_mean_cell(r_cell, z);
  }
  return draw.standardization.y_from_std(acc / S);
}

inline double gof_expectation(const PosteriorDraw& draw, int z, int r, int S,
                              const ModelConfig& cfg, Rng& rng) {
  if (r < 1 || r > cfg.K) throw std::invalid_argument("gof_expectation: r must be in 1..K");
  int cell[1] = {r};
  return gof_expectation_cell(draw, z, cell, S, cfg, rng);
}

struct GofRow {
  int z = 0;
  int r_star = 1;
  EstimandSummary summary;
};

/// Posterior table of E(Y | Z, R* ) over all (arm, merged pattern) cells.
inline std::vector<GofRow> gof_table(const std::vector<PosteriorDraw>& draws, int S,
                                     const ModelConfig& cfg, std::uint64_t base_seed) {
  if (draws.empty()) throw std::invalid_argument("gof_table: no draws");
  std::vector<GofRow> rows;
  for (int rs = 1; rs <= cfg.K_cond; ++rs)
    for (int z = 0; z < 2; ++z) rows.push_back(GofRow{z, rs, {}});

  std::vector<std::vector<double>> cell_samples(rows.size(),
                                                std::vector<double>(draws.size(), 0.0));
  std::vector<std::vector<int>> cells(rows.size());
  for (std::size_t c = 0; c < rows.size(); ++c)
    for (int r = 1; r <= cfg.K; ++r)
      if (cfg.merge(r) == rows[c].r_star) cells[c].push_back(r);

  parallel_for(draws.size(), [&](std::size_t d) {
    for (std::size_t c = 0; c < rows.size(); ++c) {
      Rng rng(substream_seed(base_seed, d, 1000 + static_cast<std::uint64_t>(c)));
      cell_samples[c][d] = gof_expectation_cell(draws[d], rows[c].z, cells[c], S, cfg, rng);
    }
  });
  for (std::size_t c = 0; c < rows.size(); ++c)
    rows[c].summary = summarize_posterior(cell_samples[c]);
  return rows;
}

}  // namespace ramdpm
