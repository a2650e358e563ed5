#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace ramdpm {

inline constexpr double kLog2Pi = 1.8378770664093454836;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_sum_exp(std::span<const double> x) {
  double mx = kNegInf;
  for (double v : x)
    if (v > mx) mx = v;
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (double v : x) s += std::exp(v - mx);
  return mx + std::log(s);
}

/// log N(x | mean, var). var is a variance, not an SD.
inline double normal_logpdf(double x, double mean, double var) {
  double d = x - mean;
  return -0.5 * (kLog2Pi + std::log(var) + d * d / var);
}

inline double expit(double u) { return 1.0 / (1.0 + std::exp(-u)); }

inline double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

/// Population variance (divide by n).
inline double variance_pop(std::span<const double> x) {
  double mu = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - mu) * (v - mu);
  return s / static_cast<double>(x.size());
}

/// Unbiased sample variance (divide by n-1).
inline double variance_sample(std::span<const double> x) {
  double mu = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - mu) * (v - mu);
  return s / static_cast<double>(x.size() - 1);
}

/// Linear interpolation between order statistics (R type 7). Input must be sorted.
inline double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty sample");
  if (sorted.size() == 1) return sorted[0];
  double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo >= sorted.size() - 1) return sorted.back();
  double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

/// In-place softmax of log-weights; returns log of the normalizer.
inline double normalize_log_weights(std::span<double> lw) {
  double lse = log_sum_exp(lw);
  if (lse == kNegInf) throw std::domain_error("normalize_log_weights: all weights are -inf");
  for (double& v : lw) v = std::exp(v - lse);
  return lse;
}

}  // namespace ramdpm
