#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

#include "ramdpm/rng.hpp"

namespace ramdpm {

enum class PriorKind { none, point_mass, unif, tri1, tri2 };

inline std::string to_string(PriorKind k) {
  switch (k) {
    case PriorKind::none: return "none";
    case PriorKind::point_mass: return "pm";
    case PriorKind::unif: return "unif";
    case PriorKind::tri1: return "tri1";
    case PriorKind::tri2: return "tri2";
  }
  return "?";
}

inline PriorKind prior_kind_from_string(const std::string& s) {
  if (s == "none") return PriorKind::none;
  if (s == "pm" || s == "point_mass") return PriorKind::point_mass;
  if (s == "unif") return PriorKind::unif;
  if (s == "tri1") return PriorKind::tri1;
  if (s == "tri2") return PriorKind::tri2;
  throw std::invalid_argument("extrapolation.kind must be one of none|pm|unif|tri1|tri2, got '" + s +
                              "'");
}

/// Which prior identifies the extrapolation mean, and the sensitivity percent P.
struct ExtrapolationPriorSpec {
  PriorKind kind = PriorKind::point_mass;
  double P = 10.0;

  void validate() const {
    if (P < 0.0) throw std::domain_error("extrapolation.P must be >= 0");
  }

  std::string label() const {
    std::string s = to_string(kind);
    if (kind == PriorKind::unif || kind == PriorKind::tri1 || kind == PriorKind::tri2)
      s += std::to_string(static_cast<int>(std::lround(P)));
    return s;
  }
};

struct ExtrapolationBounds {
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  double C = 0.0;
};

/// Bounds over the identified conditional means, C = range * P%.
inline ExtrapolationBounds compute_bounds(std::span<const double> cond_means, double P) {
  if (cond_means.empty()) throw std::invalid_argument("compute_bounds: no conditional means");
  if (P < 0.0) throw std::domain_error("compute_bounds: P must be >= 0");
  ExtrapolationBounds b;
  b.alpha_min = *std::min_element(cond_means.begin(), cond_means.end());
  b.alpha_max = *std::max_element(cond_means.begin(), cond_means.end());
  if (!std::isfinite(b.alpha_min) || !std::isfinite(b.alpha_max))
    throw std::domain_error("compute_bounds: non-finite conditional mean");
  b.C = (b.alpha_max - b.alpha_min) * P / 100.0;
  return b;
}

/// Inverse-CDF draw from Triangular(lower a, upper b, mode c).
inline double triangular_sample(double a, double b, double c, Rng& rng) {
  if (!(a <= c && c <= b)) throw std::domain_error("triangular: need a <= c <= b");
  if (a == b) return a;
  double u = rng.uniform();
  double fc = (c - a) / (b - a);
  if (u < fc) return a + std::sqrt(u * (b - a) * (c - a));
  return b - std::sqrt((1.0 - u) * (b - a) * (b - c));
}

/// One draw of the unidentified mean alpha^{(z,K+1)} given the bounds.
inline double sample_extrapolation_mean(const ExtrapolationPriorSpec& spec,
                                        const ExtrapolationBounds& b, Rng& rng) {
  if (spec.kind == PriorKind::none)
    throw std::invalid_argument("sample_extrapolation_mean: kind=none excludes the K+1 pattern");
  if (b.C <= 0.0 || spec.kind == PriorKind::point_mass) return b.alpha_min;
  double lo = b.alpha_min - b.C;
  switch (spec.kind) {
    case PriorKind::unif: return rng.uniform(lo, b.alpha_min);
    case PriorKind::tri1: return triangular_sample(lo, b.alpha_min, lo, rng);
    case PriorKind::tri2: return triangular_sample(lo, b.alpha_min, b.alpha_min, rng);
    default: return b.alpha_min;  // unreachable
  }
}

}  // namespace ramdpm
