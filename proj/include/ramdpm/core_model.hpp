#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ramdpm/math_utils.hpp"
#include "ramdpm/types.hpp"

namespace ramdpm {

/// pi[j] = v[j] * prod_{s<j} (1 - v[s]). The last stick must equal 1 so the
/// weights close to a simplex.
inline std::vector<double> stick_break(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("stick_break: empty stick vector");
  for (double x : v)
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("stick_break: stick fraction outside [0,1]");
  if (v.back() != 1.0) throw std::invalid_argument("stick_break: final stick fraction must be 1");
  std::vector<double> pi(v.size());
  double remaining = 1.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    pi[j] = v[j] * remaining;
    remaining *= (1.0 - v[j]);
  }
  return pi;
}

/// log of the covariate-and-arm factor p(x, z; eta) of one component.
/// A missing x_cont contributes no factor.
inline double log_covariate_factor(const ClusterParams& cp, int x_cat,
                                   const std::optional<double>& x_cont, int z) {
  if (x_cat < 1 || x_cat > cp.L()) throw std::domain_error("covariate factor: x_cat out of range");
  double lp = std::log(cp.eta_cat[static_cast<std::size_t>(x_cat - 1)]) + cp.log_pz(z);
  if (x_cont.has_value()) lp += normal_logpdf(*x_cont, cp.m, cp.tau2);
  return lp;
}

/// log p(y, r, x, z | component) for a normalized record (y present iff r <= K).
inline double log_cluster_kernel(const AttemptRecord& rec, const ClusterParams& cp,
                                 const ModelConfig& cfg) {
  if (rec.r < 1 || rec.r > cfg.K + 1) throw std::domain_error("cluster_kernel: r out of range");
  if (rec.y.has_value() && rec.r == cfg.K + 1)
    throw std::domain_error("cluster_kernel: record not normalized (y present at pattern K+1)");
  double lp = std::log(cp.xi[static_cast<std::size_t>(rec.r - 1)]) +
              log_covariate_factor(cp, rec.x_cat, rec.x_cont, rec.z);
  if (rec.y.has_value()) {
    int rs = cfg.merge(rec.r);
    double xb = cp.beta.empty()
                    ? 0.0
                    : design_dot(rec.x_cat, rec.x_cont.value_or(0.0), cp.has_x_cont(), cp.L(), cp.beta);
    double mean = cp.alpha[static_cast<std::size_t>(rec.z)][static_cast<std::size_t>(rs - 1)] + xb;
    lp += normal_logpdf(*rec.y, mean, cp.sigma2);
  }
  return lp;
}

inline double cluster_kernel(const AttemptRecord& rec, const ClusterParams& cp,
                             const ModelConfig& cfg) {
  return std::exp(log_cluster_kernel(rec, cp, cfg));
}

namespace detail {

inline std::vector<double> normalized_weights_from_logs(std::vector<double> lw,
                                                        const char* what) {
  double lse = log_sum_exp(lw);
  if (lse == kNegInf) throw std::domain_error(what);
  for (double& x : lw) x = std::exp(x - lse);
  return lw;
}

}  // namespace detail

/// w_j(r, x, z) from the draw, normalized over the truncated components.
inline std::vector<double> conditional_outcome_weights(int r, int x_cat,
                                                       const std::optional<double>& x_cont, int z,
                                                       const PosteriorDraw& draw,
                                                       const ModelConfig& cfg) {
  if (r < 1 || r > cfg.K + 1) throw std::domain_error("conditional_outcome_weights: r out of range");
  std::vector<double> lw(draw.clusters.size());
  for (std::size_t h = 0; h < draw.clusters.size(); ++h) {
    const auto& cp = draw.clusters[h];
    lw[h] = std::log(draw.sticks.pi[h]) + log_covariate_factor(cp, x_cat, x_cont, z) +
            std::log(cp.xi[static_cast<std::size_t>(r - 1)]);
  }
  return detail::normalized_weights_from_logs(std::move(lw),
                                              "conditional_outcome_weights: impossible covariate profile");
}

/// v_m(x, z): component weights given covariates and arm only.
inline std::vector<double> covariate_mixture_weights(int x_cat, const std::optional<double>& x_cont,
                                                     int z, const PosteriorDraw& draw) {
  std::vector<double> lw(draw.clusters.size());
  for (std::size_t h = 0; h < draw.clusters.size(); ++h) {
    lw[h] = std::log(draw.sticks.pi[h]) + log_covariate_factor(draw.clusters[h], x_cat, x_cont, z);
  }
  return detail::normalized_weights_from_logs(std::move(lw),
                                              "covariate_mixture_weights: impossible covariate profile");
}

/// u_h(z, r): component weights given arm and an attempt-pattern cell
/// (a set of r values sharing one merged level).
inline std::vector<double> pattern_mixture_weights_cell(int z, std::span<const int> r_cell,
                                                        const PosteriorDraw& draw,
                                                        const ModelConfig& cfg) {
  if (r_cell.empty()) throw std::invalid_argument("pattern_mixture_weights: empty pattern cell");
  std::vector<double> lw(draw.clusters.size());
  for (std::size_t h = 0; h < draw.clusters.size(); ++h) {
    const auto& cp = draw.clusters[h];
    double mass = 0.0;
    for (int r : r_cell) {
      if (r < 1 || r > cfg.K + 1) throw std::domain_error("pattern_mixture_weights: r out of range");
      mass += cp.xi[static_cast<std::size_t>(r - 1)];
    }
    lw[h] = std::log(draw.sticks.pi[h]) + cp.log_pz(z) + std::log(mass);
  }
  return detail::normalized_weights_from_logs(std::move(lw),
                                              "pattern_mixture_weights: zero-mass pattern");
}

inline std::vector<double> pattern_mixture_weights(int z, int r, const PosteriorDraw& draw,
                                                   const ModelConfig& cfg) {
  int cell[1] = {r};
  return pattern_mixture_weights_cell(z, cell, draw, cfg);
}

/// Every record with a missing outcome is moved to the K+1 pattern. Idempotent.
inline void normalize_attempts(Dataset& data, int K) {
  for (auto& rec : data.records)
    if (!rec.y.has_value()) rec.r = K + 1;
}

/// Records must satisfy the normalized-pattern and range invariants before fitting.
inline void validate_normalized(const Dataset& data, const ModelConfig& cfg) {
  for (const auto& rec : data.records) {
    if (rec.r < 1 || rec.r > cfg.K + 1) throw std::domain_error("dataset: r out of range");
    if (rec.z != 0 && rec.z != 1) throw std::domain_error("dataset: z must be 0 or 1");
    if (rec.x_cat < 1 || rec.x_cat > data.L) throw std::domain_error("dataset: x_cat out of range");
    if (rec.y.has_value() != (rec.r <= cfg.K))
      throw std::domain_error("dataset: y must be present exactly when r <= K");
  }
}

/// Shift/scale observed Y and x_cont so each has mean 0 and variance 0.5
/// (population convention). Statistics use observed values only.
inline StandardizationRecord standardize(Dataset& data) {
  StandardizationRecord rec;
  std::vector<double> ys;
  for (const auto& r : data.records)
    if (r.y.has_value()) ys.push_back(*r.y);
  if (ys.size() < 2) throw std::domain_error("standardize: need at least 2 observed outcomes");
  double vy = variance_pop(ys);
  if (vy <= 0.0) throw std::domain_error("standardize: constant outcome column");
  rec.y_center = mean_of(ys);
  rec.y_scale = std::sqrt(vy / 0.5);

  if (data.has_x_cont) {
    std::vector<double> xs;
    for (const auto& r : data.records)
      if (r.x_cont.has_value()) xs.push_back(*r.x_cont);
    if (xs.size() < 2) throw std::domain_error("standardize: need at least 2 observed x_cont values");
    double vx = variance_pop(xs);
    if (vx <= 0.0) throw std::domain_error("standardize: constant x_cont column");
    rec.x_center = mean_of(xs);
    rec.x_scale = std::sqrt(vx / 0.5);
  }

  for (auto& r : data.records) {
    if (r.y.has_value()) r.y = rec.y_to_std(*r.y);
    if (r.x_cont.has_value()) r.x_cont = rec.x_to_std(*r.x_cont);
  }
  return rec;
}

}  // namespace ramdpm
