#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace ramdpm {

// splitmix64 finalizer, used to derive decorrelated substream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for the substream identified by (a, b) under a base seed.
inline std::uint64_t substream_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  return mix64(base ^ mix64(a ^ mix64(b ^ 0x5bf0'3635'dee3'9a69ULL)));
}

/// Owns a mt19937_64 engine; every draw constructs its distribution fresh so a
/// given call sequence is reproducible from the seed alone.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Gamma(shape, rate).
  double gamma(double shape, double rate) {
    if (shape <= 0.0 || rate <= 0.0) throw std::domain_error("gamma: shape and rate must be > 0");
    return std::gamma_distribution<double>(shape, 1.0 / rate)(gen_);
  }

  /// Inverse-gamma(shape, scale); 1/X ~ Gamma(shape, rate=scale).
  double inv_gamma(double shape, double scale) {
    double g = gamma(shape, scale);
    if (g < 1e-300) g = 1e-300;  // tiny-shape underflow guard
    return 1.0 / g;
  }

  double beta(double a, double b) {
    double x = gamma(a, 1.0), y = gamma(b, 1.0);
    if (x < 1e-300) x = 1e-300;
    if (y < 1e-300) y = 1e-300;
    double r = x / (x + y);
    if (r >= 1.0) r = 1.0 - 1e-16;  // keep draws in the open interval
    if (r <= 0.0) r = 1e-300;
    return r;
  }

  double student_t(double dof) { return std::student_t_distribution<double>(dof)(gen_); }

  int bernoulli(double p) { return uniform() < p ? 1 : 0; }

  std::vector<double> dirichlet(std::span<const double> conc) {
    std::vector<double> out(conc.size());
    double tot = 0.0;
    for (std::size_t i = 0; i < conc.size(); ++i) {
      double g = gamma(conc[i], 1.0);
      if (g < 1e-300) g = 1e-300;
      out[i] = g;
      tot += g;
    }
    for (auto& o : out) o /= tot;
    return out;
  }

  /// Index draw from unnormalized nonnegative weights (0-based).
  int categorical(std::span<const double> w) {
    double tot = 0.0;
    for (double x : w) {
      if (x < 0.0) throw std::domain_error("categorical: negative weight");
      tot += x;
    }
    if (!(tot > 0.0)) throw std::domain_error("categorical: all weights zero");
    double u = uniform() * tot;
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      acc += w[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(w.size()) - 1;
  }

  /// Index draw from unnormalized log-weights (0-based), stable in log space.
  int categorical_logits(std::span<const double> lw) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : lw)
      if (x > mx) mx = x;
    if (!(mx > -std::numeric_limits<double>::infinity()))
      throw std::domain_error("categorical_logits: all weights are -inf");
    double tot = 0.0;
    for (double x : lw) tot += std::exp(x - mx);
    double u = uniform() * tot;
    double acc = 0.0;
    for (std::size_t i = 0; i < lw.size(); ++i) {
      acc += std::exp(lw[i] - mx);
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(lw.size()) - 1;
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace ramdpm
