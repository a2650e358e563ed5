#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ramdpm {

/// One subject. y and x_cont are on whatever scale the surrounding pipeline
/// has put them (raw from CSV/generators, standardized inside the sampler).
struct AttemptRecord {
  std::optional<double> y;       // outcome; absent when not collected
  int r = 1;                     // attempt pattern, 1..K+1
  int x_cat = 1;                 // categorical covariate level, 1..L
  std::optional<double> x_cont;  // continuous baseline covariate
  int z = 0;                     // arm, 0/1
};

/// Records plus the covariate layout facts derived from them.
struct Dataset {
  std::vector<AttemptRecord> records;

  int L = 1;
  bool has_x_cont = false;

  void refresh_layout() {
    L = 1;
    has_x_cont = false;
    for (const auto& rec : records) {
      if (rec.x_cat > L) L = rec.x_cat;
      if (rec.x_cont.has_value()) has_x_cont = true;
    }
  }

  std::size_t size() const { return records.size(); }

  /// Regression design dimension: L-1 level dummies plus the continuous column.
  int design_dim() const { return (L - 1) + (has_x_cont ? 1 : 0); }
};

/// x . beta for the dummy(2..L) + continuous design. x_val must be present
/// whenever the dataset has a continuous column.
inline double design_dot(int x_cat, double x_val, bool has_x_cont, int L,
                         const std::vector<double>& beta) {
  double s = 0.0;
  if (x_cat >= 2) s += beta[static_cast<std::size_t>(x_cat - 2)];
  if (has_x_cont) s += beta[static_cast<std::size_t>(L - 1)] * x_val;
  return s;
}

struct ModelConfig {
  int K = 9;       // max attempts; pattern K+1 = outcome never collected
  int K_cond = 3;  // attempt levels the outcome conditional depends on (K = full)
  std::vector<int> merge_map;  // merge_map[r-1] = r*, size K+1; empty = default
  int H = 20;                  // truncation level
  int n_iter = 50000;
  int n_burn = 5000;
  int thin = 5;
  int mc_draws = 10000;  // S for the estimand integrals
  std::uint64_t seed = 1;

  static std::vector<int> default_merge_map(int K, int K_cond) {
    std::vector<int> m(static_cast<std::size_t>(K + 1));
    for (int r = 1; r <= K; ++r) m[static_cast<std::size_t>(r - 1)] = std::min(r, K_cond);
    m[static_cast<std::size_t>(K)] = K_cond + 1;
    return m;
  }

  int merge(int r) const {
    if (r < 1 || r > K + 1) throw std::domain_error("merge: attempt index out of range");
    if (merge_map.empty()) return r == K + 1 ? K_cond + 1 : std::min(r, K_cond);
    return merge_map[static_cast<std::size_t>(r - 1)];
  }

  void finalize() {
    if (merge_map.empty()) merge_map = default_merge_map(K, K_cond);
    validate();
  }

  void validate() const {
    if (K < 1) throw std::invalid_argument("ModelConfig: K must be >= 1");
    if (K_cond < 1 || K_cond > K) throw std::invalid_argument("ModelConfig: K_cond must be in 1..K");
    if (H < 2) throw std::invalid_argument("ModelConfig: H must be >= 2");
    if (thin < 1) throw std::invalid_argument("ModelConfig: thin must be >= 1");
    if (n_burn >= n_iter) throw std::invalid_argument("ModelConfig: n_burn must be < n_iter");
    if (mc_draws < 1) throw std::invalid_argument("ModelConfig: mc_draws must be >= 1");
    if (!merge_map.empty()) {
      if (static_cast<int>(merge_map.size()) != K + 1)
        throw std::invalid_argument("ModelConfig: merge_map must have K+1 entries");
      std::vector<bool> seen(static_cast<std::size_t>(K_cond + 1), false);
      int prev = 0;
      for (int r = 1; r <= K + 1; ++r) {
        int rs = merge_map[static_cast<std::size_t>(r - 1)];
        if (rs < 1 || rs > K_cond + 1)
          throw std::invalid_argument("ModelConfig: merge_map value out of range");
        if (rs < prev) throw std::invalid_argument("ModelConfig: merge_map must be non-decreasing");
        prev = rs;
        seen[static_cast<std::size_t>(rs - 1)] = true;
      }
      if (merge_map.back() != K_cond + 1)
        throw std::invalid_argument("ModelConfig: merge_map must send K+1 to K_cond+1");
      for (bool s : seen)
        if (!s) throw std::invalid_argument("ModelConfig: merge_map must be surjective");
    }
  }
};

/// Affine transforms taking raw data to the mean-0 / variance-0.5 scale.
struct StandardizationRecord {
  double y_center = 0.0, y_scale = 1.0;
  double x_center = 0.0, x_scale = 1.0;

  double y_to_std(double y) const { return (y - y_center) / y_scale; }
  double y_from_std(double s) const { return y_center + y_scale * s; }
  double x_to_std(double x) const { return (x - x_center) / x_scale; }
  double x_from_std(double s) const { return x_center + x_scale * s; }
};

/// One mixture component's full parameter block (standardized scale).
struct ClusterParams {
  std::array<std::vector<double>, 2> alpha;  // alpha[z][r*-1], r* in 1..K_cond
  std::vector<double> beta;                  // design coefficients
  double sigma2 = 1.0;                       // outcome variance
  std::vector<double> xi;                    // attempt simplex over 1..K+1
  std::vector<double> eta_cat;               // categorical-covariate simplex over 1..L
  double m = 0.0;                            // continuous-covariate mean
  double tau2 = 1.0;                         // continuous-covariate variance
  double p_z = 0.5;                          // treatment probability

  int L() const { return static_cast<int>(eta_cat.size()); }
  bool has_x_cont() const { return static_cast<int>(beta.size()) == L(); }

  double log_pz(int z) const { return z == 1 ? std::log(p_z) : std::log1p(-p_z); }
};

struct StickWeights {
  std::vector<double> v;   // stick fractions, v.back() == 1
  std::vector<double> pi;  // mixture weights
};

/// Hierarchical prior state plus the fixed empirical constants that anchor it.
struct HyperState {
  std::array<std::vector<double>, 2> mu_alpha;     // per (z, r*)
  std::array<double, 2> sigma2_alpha{1.0, 1.0};    // per arm
  std::vector<double> mu_beta, var_beta;           // fixed, from the completer OLS
  double mu_m = 0.0, sigma2_m = 1.0;
  double S1 = 3.0, W1 = 0.25;
  double S2 = 3.0, W2 = 0.25;
  std::array<double, 2> s_z{3.0, 3.0};
  std::array<double, 2> lambda_z{1.0, 1.0};
  double s_2 = 3.0, lambda_2 = 1.0;
  double mass = 1.0;  // DP concentration

  // empirical constants (fixed after init)
  double G_Y = 0.5, G_X2 = 0.5;
  std::array<double, 2> g_z{0.5, 0.5};
  double c = 1.0;
};

/// One retained Gibbs state.
struct PosteriorDraw {
  StickWeights sticks;
  std::vector<ClusterParams> clusters;
  HyperState hypers;
  StandardizationRecord standardization;

  int H() const { return static_cast<int>(clusters.size()); }
};

}  // namespace ramdpm
