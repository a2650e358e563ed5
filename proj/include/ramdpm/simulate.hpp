#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ramdpm/math_utils.hpp"
#include "ramdpm/rng.hpp"
#include "ramdpm/types.hpp"

namespace ramdpm {

enum class ScenarioId { s2, s3, s5, s6, s1_custom, s4_custom };
enum class ErrorLaw { normal, t3, skew_normal };

inline std::string to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::s2: return "s2";
    case ScenarioId::s3: return "s3";
    case ScenarioId::s5: return "s5";
    case ScenarioId::s6: return "s6";
    case ScenarioId::s1_custom: return "s1_custom";
    case ScenarioId::s4_custom: return "s4_custom";
  }
  return "?";
}

inline ScenarioId scenario_id_from_string(const std::string& s) {
  if (s == "s2") return ScenarioId::s2;
  if (s == "s3") return ScenarioId::s3;
  if (s == "s5") return ScenarioId::s5;
  if (s == "s6") return ScenarioId::s6;
  if (s == "s1_custom") return ScenarioId::s1_custom;
  if (s == "s4_custom") return ScenarioId::s4_custom;
  throw std::invalid_argument("scenario.id must be one of s2|s3|s5|s6|s1_custom|s4_custom, got '" +
                              s + "'");
}

inline std::string to_string(ErrorLaw e) {
  switch (e) {
    case ErrorLaw::normal: return "normal";
    case ErrorLaw::t3: return "t3";
    case ErrorLaw::skew_normal: return "skew_normal";
  }
  return "?";
}

inline ErrorLaw error_law_from_string(const std::string& s) {
  if (s == "normal") return ErrorLaw::normal;
  if (s == "t3") return ErrorLaw::t3;
  if (s == "skew_normal") return ErrorLaw::skew_normal;
  throw std::invalid_argument("scenario.error must be one of normal|t3|skew_normal, got '" + s +
                              "'");
}

/// Pattern-mixture coefficients for the configurable scenario 1 generator:
/// intercepts by (arm, merged pattern 1..3) plus the pattern-4 truth.
struct CustomS1 {
  std::array<std::array<double, 4>, 2> alpha{};
  double beta = 0.4;
  double sigma = 2.0;
  double x_mean = 2.0, x_var = 0.2;
};

/// Selection-model coefficients for the configurable scenario 4 generator.
struct CustomS4 {
  double beta0 = 0.0, xi = 0.0, beta = 0.0, sigma = 1.0;
  std::array<double, 8> lambda0{}, gamma{}, lambda{};
  double delta1 = 0.0, delta2 = 0.0;
  double x_mean = 2.0, x_var = 0.2;
};

struct ScenarioSpec {
  ScenarioId id = ScenarioId::s2;
  int n = 500;
  ErrorLaw error = ErrorLaw::normal;
  double sigma = 2.0;
  int K = 9;
  std::array<std::vector<double>, 2> attempt_probs;  // empty = QUATRO Table 1
  std::optional<double> missing_frac;
  std::optional<CustomS1> s1;
  std::optional<CustomS4> s4;

  void validate() const {
    if (n < 2) throw std::invalid_argument("scenario.n must be >= 2");
    if (sigma <= 0.0) throw std::invalid_argument("scenario.sigma must be > 0");
    if (missing_frac && !(*missing_frac > 0.0 && *missing_frac < 1.0))
      throw std::invalid_argument("scenario.missing_frac must be in (0,1)");
    if (id == ScenarioId::s1_custom && !s1)
      throw std::invalid_argument("scenario s1_custom requires a coefficient table");
    if (id == ScenarioId::s4_custom && !s4)
      throw std::invalid_argument("scenario s4_custom requires a coefficient table");
    if (id == ScenarioId::s4_custom && error != ErrorLaw::normal)
      throw std::invalid_argument("scenario s4_custom is defined for normal errors only");
  }
};

/// Attempt-probability simplexes (control, treatment) from the QUATRO counts:
/// the mass observed at attempts 4-9 is split equally over those six levels.
inline std::array<std::vector<double>, 2> quatro_attempt_probs() {
  std::array<std::vector<double>, 2> p;
  p[0] = {77.0 / 205, 94.0 / 205, 7.0 / 205,
          14.0 / (6 * 205.0), 14.0 / (6 * 205.0), 14.0 / (6 * 205.0),
          14.0 / (6 * 205.0), 14.0 / (6 * 205.0), 14.0 / (6 * 205.0),
          13.0 / 205};
  p[1] = {73.0 / 204, 90.0 / 204, 7.0 / 204,
          5.0 / (6 * 204.0), 5.0 / (6 * 204.0), 5.0 / (6 * 204.0),
          5.0 / (6 * 204.0), 5.0 / (6 * 204.0), 5.0 / (6 * 204.0),
          29.0 / 204};
  return p;
}

/// Set p(K+1) to target and rescale the identified patterns proportionally.
inline std::vector<double> rescale_missingness(std::vector<double> probs, double target) {
  if (!(target > 0.0 && target < 1.0))
    throw std::domain_error("rescale_missingness: target must be in (0,1)");
  double old = probs.back();
  if (old >= 1.0) throw std::domain_error("rescale_missingness: no identified mass to rescale");
  double scale = (1.0 - target) / (1.0 - old);
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) probs[i] *= scale;
  probs.back() = target;
  return probs;
}

inline std::array<std::vector<double>, 2> effective_attempt_probs(const ScenarioSpec& spec) {
  auto p = spec.attempt_probs[0].empty() ? quatro_attempt_probs() : spec.attempt_probs;
  if (spec.missing_frac)
    for (auto& arm : p) arm = rescale_missingness(arm, *spec.missing_frac);
  return p;
}

inline int merge_attempts(int r, const std::vector<int>& merge_map) {
  if (r < 1 || r > static_cast<int>(merge_map.size()))
    throw std::domain_error("merge_attempts: r out of range");
  return merge_map[static_cast<std::size_t>(r - 1)];
}

namespace scenario_detail {

inline double h_star(int z, int c) {
  return z * (27.24 - 1.91 * c) + (1 - z) * (25.58 - 1.65 * c);
}

inline double h_exp(int z, int r) {
  return z * 30.0 * std::exp(-0.13 * r) + (1 - z) * 29.0 * std::exp(-0.15 * r);
}

inline double g_lin(int z, int r) {
  return (60.24 - 1.91 * r) * z + (60.58 - 1.65 * r) * (1 - z);
}

inline double pi_m1(int z, int r) { return expit(2.0 * z - 0.2 * r - 1.0); }

/// p(C = c | R = r) rows of the scenario-6 latent class table.
inline std::array<double, 4> class_probs(int r) {
  if (r == 1) return {0.8, 0.1, 0.1, 0.0};
  if (r == 2) return {0.1, 0.8, 0.1, 0.0};
  if (r <= 9) return {0.1, 0.1, 0.8, 0.0};
  return {0.0, 0.0, 0.0, 1.0};
}

/// Additive noise with location 0 and the scenario's scale parameter.
inline double noise(ErrorLaw law, double sigma, Rng& rng) {
  switch (law) {
    case ErrorLaw::normal: return sigma * rng.normal();
    case ErrorLaw::t3: return sigma * rng.student_t(3.0);
    case ErrorLaw::skew_normal: {
      // shape 3 via the |N| + N construction
      constexpr double delta = 3.0 / 3.1622776601683795;  // 3/sqrt(10)
      double u0 = rng.normal(), u1 = rng.normal();
      return sigma * (delta * std::abs(u0) + std::sqrt(1.0 - delta * delta) * u1);
    }
  }
  return 0.0;
}

}  // namespace scenario_detail

/// E[Y | Z=z, R=r, x = E[x]] including the extrapolation truth at r = K+1,
/// with error-law location offsets omitted (they cancel in theta).
inline double scenario_cell_mean(const ScenarioSpec& spec, int z, int r) {
  using namespace scenario_detail;
  switch (spec.id) {
    case ScenarioId::s2:
      return (r <= 9 ? h_star(z, std::min(r, 3)) : h_star(z, 4)) + 0.4 * 2.0;
    case ScenarioId::s3:
      return h_exp(z, r) + 0.4 * 2.0;  // r = 10 is the stated truth one past the last pattern
    case ScenarioId::s5: {
      double w = pi_m1(z, r);
      return w * (g_lin(z, r) + 0.4 * 2.0) + (1.0 - w) * (h_exp(z, r) + 1.0 * 2.0);
    }
    case ScenarioId::s6: {
      auto pc = class_probs(r);
      double mu = 0.0;
      for (int c = 1; c <= 4; ++c) mu += pc[static_cast<std::size_t>(c - 1)] * h_star(z, c);
      return mu + 0.4 * 2.0;
    }
    case ScenarioId::s1_custom: {
      if (!spec.s1) throw std::invalid_argument("scenario s1_custom requires coefficients");
      const auto& t = *spec.s1;
      int cell = r <= 9 ? std::min(r, 3) : 4;
      return t.alpha[static_cast<std::size_t>(z)][static_cast<std::size_t>(cell - 1)] +
             t.beta * t.x_mean;
    }
    case ScenarioId::s4_custom:
      throw std::invalid_argument("scenario s4_custom has no per-pattern mean table");
  }
  throw std::invalid_argument("scenario_cell_mean: unknown scenario");
}

/// True marginal treatment effect theta = E(Y|Z=1) - E(Y|Z=0) over all
/// patterns, with the paper's extrapolation truths at the K+1 pattern.
inline double true_theta(const ScenarioSpec& spec) {
  spec.validate();
  if (spec.id == ScenarioId::s4_custom) return spec.s4->xi;
  auto p = effective_attempt_probs(spec);
  double e[2] = {0.0, 0.0};
  for (int z = 0; z < 2; ++z)
    for (int r = 1; r <= 10; ++r)
      e[z] += p[static_cast<std::size_t>(z)][static_cast<std::size_t>(r - 1)] *
              scenario_cell_mean(spec, z, r);
  return e[1] - e[0];
}

/// Completers-only treatment effect: the estimand targeted by the
/// kind = none prior (patterns 1..K, renormalized).
inline double true_theta_completers(const ScenarioSpec& spec) {
  spec.validate();
  if (spec.id == ScenarioId::s4_custom) {
    // hazard reweights completers toward particular (x, y); integrate on a grid
    const auto& t = *spec.s4;
    double e[2];
    const int nx = 401, ny = 801;
    double sx = std::sqrt(t.x_var);
    for (int z = 0; z < 2; ++z) {
      double num = 0.0, den = 0.0;
      for (int ix = 0; ix < nx; ++ix) {
        double x = t.x_mean + sx * (-8.0 + 16.0 * ix / (nx - 1.0));
        double wx = std::exp(normal_logpdf(x, t.x_mean, t.x_var));
        double mu = t.beta0 + t.xi * z + t.beta * x;
        for (int iy = 0; iy < ny; ++iy) {
          double y = mu + t.sigma * (-8.0 + 16.0 * iy / (ny - 1.0));
          double wy = std::exp(normal_logpdf(y, mu, t.sigma * t.sigma));
          double surv = 1.0;
          for (int r = 0; r < 8; ++r)
            surv *= 1.0 - expit(t.lambda0[static_cast<std::size_t>(r)] +
                                t.gamma[static_cast<std::size_t>(r)] * z +
                                t.lambda[static_cast<std::size_t>(r)] * x + t.delta1 * y +
                                t.delta2 * y * z);
          double w = wx * wy * (1.0 - surv);
          num += w * y;
          den += w;
        }
      }
      e[z] = num / den;
    }
    return e[1] - e[0];
  }
  auto p = effective_attempt_probs(spec);
  double e[2];
  for (int z = 0; z < 2; ++z) {
    double num = 0.0, den = 0.0;
    for (int r = 1; r <= 9; ++r) {
      double pr = p[static_cast<std::size_t>(z)][static_cast<std::size_t>(r - 1)];
      num += pr * scenario_cell_mean(spec, z, r);
      den += pr;
    }
    e[z] = num / den;
  }
  return e[1] - e[0];
}

namespace scenario_detail {

inline AttemptRecord make_record(int z, double x, int r, std::optional<double> y) {
  AttemptRecord rec;
  rec.z = z;
  rec.x_cat = 1;
  rec.x_cont = x;
  rec.r = r;
  rec.y = y;
  return rec;
}

}  // namespace scenario_detail

inline Dataset gen_scenario2(const ScenarioSpec& spec, Rng& rng) {
  using namespace scenario_detail;
  auto p = effective_attempt_probs(spec);
  Dataset data;
  data.records.reserve(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) {
    int z = rng.bernoulli(0.5);
    double x = rng.normal(2.0, std::sqrt(0.2));
    int r = 1 + rng.categorical(p[static_cast<std::size_t>(z)]);
    std::optional<double> y;
    if (r <= 9) y = h_star(z, std::min(r, 3)) + 0.4 * x + noise(spec.error, spec.sigma, rng);
    data.records.push_back(make_record(z, x, r, y));
  }
  data.refresh_layout();
  return data;
}

inline Dataset gen_scenario3(const ScenarioSpec& spec, Rng& rng) {
  using namespace scenario_detail;
  auto p = effective_attempt_probs(spec);
  Dataset data;
  data.records.reserve(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) {
    int z = rng.bernoulli(0.5);
    double x = rng.normal(2.0, std::sqrt(0.2));
    int r = 1 + rng.categorical(p[static_cast<std::size_t>(z)]);
    std::optional<double> y;
    if (r <= 9) y = h_exp(z, r) + 0.4 * x + noise(spec.error, spec.sigma, rng);
    data.records.push_back(make_record(z, x, r, y));
  }
  data.refresh_layout();
  return data;
}

inline Dataset gen_scenario5(const ScenarioSpec& spec, Rng& rng) {
  using namespace scenario_detail;
  auto p = effective_attempt_probs(spec);
  Dataset data;
  data.records.reserve(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) {
    int z = rng.bernoulli(0.5);
    double x = rng.normal(2.0, std::sqrt(0.2));
    int r = 1 + rng.categorical(p[static_cast<std::size_t>(z)]);
    std::optional<double> y;
    if (r <= 9) {
      bool comp1 = rng.bernoulli(pi_m1(z, r)) == 1;
      double mean = comp1 ? g_lin(z, r) + 0.4 * x : h_exp(z, r) + 1.0 * x;
      y = mean + noise(spec.error, spec.sigma, rng);
    }
    data.records.push_back(make_record(z, x, r, y));
  }
  data.refresh_layout();
  return data;
}

inline Dataset gen_scenario6(const ScenarioSpec& spec, Rng& rng) {
  using namespace scenario_detail;
  auto p = effective_attempt_probs(spec);
  Dataset data;
  data.records.reserve(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) {
    int z = rng.bernoulli(0.5);
    double x = rng.normal(2.0, std::sqrt(0.2));
    int r = 1 + rng.categorical(p[static_cast<std::size_t>(z)]);
    auto pc = class_probs(r);
    int c = 1 + rng.categorical(pc);
    std::optional<double> y;
    if (r <= 9) y = h_star(z, c) + 0.4 * x + noise(spec.error, spec.sigma, rng);
    data.records.push_back(make_record(z, x, r, y));
  }
  data.refresh_layout();
  return data;
}

inline Dataset gen_scenario1_custom(const ScenarioSpec& spec, Rng& rng) {
  using namespace scenario_detail;
  if (!spec.s1) throw std::invalid_argument("gen_scenario1_custom: missing coefficient table");
  const auto& t = *spec.s1;
  auto p = effective_attempt_probs(spec);
  Dataset data;
  data.records.reserve(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) {
    int z = rng.bernoulli(0.5);
    double x = rng.normal(t.x_mean, std::sqrt(t.x_var));
    int r = 1 + rng.categorical(p[static_cast<std::size_t>(z)]);
    std::optional<double> y;
    if (r <= 9)
      y = t.alpha[static_cast<std::size_t>(z)][static_cast<std::size_t>(std::min(r, 3) - 1)] +
          t.beta * x + noise(spec.error, t.sigma, rng);
    data.records.push_back(make_record(z, x, r, y));
  }
  data.refresh_layout();
  return data;
}

/// Sequential outcome-then-attempts generator; subjects not responding within
/// 8 attempts land in the K+1 = 10 pattern with y missing.
inline Dataset gen_scenario4_custom(const ScenarioSpec& spec, Rng& rng) {
  using namespace scenario_detail;
  if (!spec.s4) throw std::invalid_argument("gen_scenario4_custom: missing coefficient table");
  const auto& t = *spec.s4;
  Dataset data;
  data.records.reserve(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) {
    int z = rng.bernoulli(0.5);
    double x = rng.normal(t.x_mean, std::sqrt(t.x_var));
    double y = t.beta0 + t.xi * z + t.beta * x + t.sigma * rng.normal();
    int r = 10;
    for (int rr = 1; rr <= 8; ++rr) {
      double hz = expit(t.lambda0[static_cast<std::size_t>(rr - 1)] +
                        t.gamma[static_cast<std::size_t>(rr - 1)] * z +
                        t.lambda[static_cast<std::size_t>(rr - 1)] * x + t.delta1 * y +
                        t.delta2 * y * z);
      if (rng.bernoulli(hz) == 1) {
        r = rr;
        break;
      }
    }
    data.records.push_back(make_record(z, x, r, r <= 8 ? std::optional<double>(y) : std::nullopt));
  }
  data.refresh_layout();
  return data;
}

inline Dataset gen_scenario(const ScenarioSpec& spec, Rng& rng) {
  spec.validate();
  switch (spec.id) {
    case ScenarioId::s2: return gen_scenario2(spec, rng);
    case ScenarioId::s3: return gen_scenario3(spec, rng);
    case ScenarioId::s5: return gen_scenario5(spec, rng);
    case ScenarioId::s6: return gen_scenario6(spec, rng);
    case ScenarioId::s1_custom: return gen_scenario1_custom(spec, rng);
    case ScenarioId::s4_custom: return gen_scenario4_custom(spec, rng);
  }
  throw std::invalid_argument("gen_scenario: unknown scenario");
}

}  // namespace ramdpm
