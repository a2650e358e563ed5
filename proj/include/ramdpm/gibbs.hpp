#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <set>
#include <vector>

#include "ramdpm/core_model.hpp"
#include "ramdpm/math_utils.hpp"
#include "ramdpm/rng.hpp"
#include "ramdpm/types.hpp"

namespace ramdpm {

/// Data-driven constants anchoring the hierarchical priors.
struct EmpiricalConstants {
  double G_Y = 0.5;
  double G_X2 = 0.5;
  std::array<double, 2> g_z{0.5, 0.5};
  std::vector<double> mu_beta, var_beta;
  double c = 1.0;
};

/// Variances of the observed data and the completer OLS fit, on the scale the
/// dataset currently carries (call after standardize for the model defaults).
inline EmpiricalConstants empirical_hyperconstants(const Dataset& data) {
  EmpiricalConstants out;

  std::vector<double> ys;
  std::array<std::vector<double>, 2> ys_arm;
  for (const auto& rec : data.records) {
    if (!rec.y.has_value()) continue;
    ys.push_back(*rec.y);
    ys_arm[static_cast<std::size_t>(rec.z)].push_back(*rec.y);
  }
  if (ys_arm[0].size() < 2 || ys_arm[1].size() < 2)
    throw std::domain_error("empirical_hyperconstants: need >= 2 completers per arm");
  out.G_Y = variance_pop(ys);
  for (int z = 0; z < 2; ++z) {
    out.g_z[static_cast<std::size_t>(z)] = variance_pop(ys_arm[static_cast<std::size_t>(z)]);
    if (out.g_z[static_cast<std::size_t>(z)] <= 0.0)
      throw std::domain_error("empirical_hyperconstants: constant outcome in one arm");
  }

  if (data.has_x_cont) {
    std::vector<double> xs;
    for (const auto& rec : data.records)
      if (rec.x_cont.has_value()) xs.push_back(*rec.x_cont);
    out.G_X2 = variance_pop(xs);
  }

  // OLS of Y on [1, level dummies, x_cont] among complete cases.
  const int p = data.design_dim();
  std::vector<const AttemptRecord*> cc;
  for (const auto& rec : data.records) {
    if (!rec.y.has_value()) continue;
    if (data.has_x_cont && !rec.x_cont.has_value()) continue;
    cc.push_back(&rec);
  }
  const int n = static_cast<int>(cc.size());
  const int df = n - (p + 1);
  if (df < 1) throw std::domain_error("empirical_hyperconstants: too few complete cases");

  if (p > 0) {
    Eigen::MatrixXd X(n, p + 1);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      const auto& rec = *cc[static_cast<std::size_t>(i)];
      X(i, 0) = 1.0;
      for (int l = 2; l <= data.L; ++l) X(i, l - 1) = rec.x_cat == l ? 1.0 : 0.0;
      if (data.has_x_cont) X(i, p) = *rec.x_cont;
      y(i) = *rec.y;
    }
    Eigen::MatrixXd xtx = X.transpose() * X;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(xtx);
    if (!lu.isInvertible()) throw std::domain_error("empirical_hyperconstants: singular design matrix");
    Eigen::MatrixXd xtx_inv = lu.inverse();
    Eigen::VectorXd coef = xtx_inv * (X.transpose() * y);
    double rss = (y - X * coef).squaredNorm();
    double s2 = rss / df;
    out.mu_beta.resize(static_cast<std::size_t>(p));
    out.var_beta.resize(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) {
      out.mu_beta[static_cast<std::size_t>(j)] = coef(j + 1);
      out.var_beta[static_cast<std::size_t>(j)] = std::max(s2 * xtx_inv(j + 1, j + 1), 1e-12);
    }
  }
  out.c = std::ceil(static_cast<double>(df) / 5.0);
  return out;
}

/// Full sampler state. Component indices are 0-based internally.
struct GibbsState {
  std::vector<int> assignments;
  StickWeights sticks;
  std::vector<ClusterParams> clusters;
  HyperState hypers;
  std::vector<int> missing_x_rows;
  std::vector<double> imputed_x;
  std::vector<double> x_work;  // per-record current x_cont (observed or imputed)
};

namespace detail {

inline ClusterParams draw_from_base(const HyperState& hy, const ModelConfig& cfg, int L,
                                    Rng& rng) {
  ClusterParams cp;
  for (int z = 0; z < 2; ++z) {
    auto& az = cp.alpha[static_cast<std::size_t>(z)];
    az.resize(static_cast<std::size_t>(cfg.K_cond));
    for (int rs = 0; rs < cfg.K_cond; ++rs)
      az[static_cast<std::size_t>(rs)] =
          rng.normal(hy.mu_alpha[static_cast<std::size_t>(z)][static_cast<std::size_t>(rs)],
                     std::sqrt(hy.sigma2_alpha[static_cast<std::size_t>(z)]));
  }
  cp.beta.resize(hy.mu_beta.size());
  for (std::size_t j = 0; j < hy.mu_beta.size(); ++j)
    cp.beta[j] = rng.normal(hy.mu_beta[j], std::sqrt(hy.c * hy.var_beta[j]));
  cp.sigma2 = rng.inv_gamma(hy.S1, hy.S1 * hy.W1);
  std::vector<double> conc_xi(static_cast<std::size_t>(cfg.K + 1), 1.0 / (cfg.K + 1));
  cp.xi = rng.dirichlet(conc_xi);
  std::vector<double> conc_eta(static_cast<std::size_t>(L), 1.0 / L);
  cp.eta_cat = rng.dirichlet(conc_eta);
  cp.m = rng.normal(hy.mu_m, std::sqrt(hy.sigma2_m));
  cp.tau2 = rng.inv_gamma(hy.S2, hy.S2 * hy.W2);
  cp.p_z = rng.beta(1.0, 1.0);
  return cp;
}

/// Stepping-out slice sampler on a log density; step size doubles each
/// expansion, bounded at 100 doublings per side. Exact for unimodal targets.
inline double slice_sample(double x0, const std::function<double(double)>& logf, double width,
                           Rng& rng) {
  double f0 = logf(x0);
  if (!std::isfinite(f0)) throw std::runtime_error("slice sampler: non-finite density at state");
  double logy = f0 + std::log(std::max(rng.uniform(), 1e-300));
  double u = rng.uniform();
  double lo = x0 - width * u;
  double hi = lo + width;
  double step = width;
  for (int i = 0;; ++i) {
    if (i >= 100) throw std::runtime_error("slice sampler: step-out exceeded 100 doublings");
    if (logf(lo) <= logy) break;
    lo -= step;
    step *= 2.0;
  }
  step = width;
  for (int i = 0;; ++i) {
    if (i >= 100) throw std::runtime_error("slice sampler: step-out exceeded 100 doublings");
    if (logf(hi) <= logy) break;
    hi += step;
    step *= 2.0;
  }
  for (int it = 0; it < 1000; ++it) {
    double x1 = rng.uniform(lo, hi);
    if (logf(x1) > logy) return x1;
    if (x1 < x0)
      lo = x1;
    else
      hi = x1;
  }
  throw std::runtime_error("slice sampler: shrinkage did not terminate");
}

}  // namespace detail

/// Initial state: uniform assignments, prior sticks, base-measure clusters,
/// hyperparameters from their priors with empirical constants from the data.
inline GibbsState init_state(const Dataset& data, const ModelConfig& cfg, Rng& rng) {
  GibbsState st;
  EmpiricalConstants ec = empirical_hyperconstants(data);

  std::set<int> distinct;
  for (const auto& rec : data.records) distinct.insert(rec.r);
  if (static_cast<int>(distinct.size()) < cfg.K_cond + 1)
    std::cerr << "ramdpm: warning: only " << distinct.size()
              << " distinct attempt patterns observed (< K_cond+1 = " << cfg.K_cond + 1 << ")\n";

  HyperState& hy = st.hypers;
  hy.G_Y = ec.G_Y;
  hy.G_X2 = ec.G_X2;
  hy.g_z = ec.g_z;
  hy.mu_beta = ec.mu_beta;
  hy.var_beta = ec.var_beta;
  hy.c = ec.c;
  hy.mass = rng.gamma(1.0, 1.0);
  hy.S1 = 2.0 + rng.inv_gamma(1.0, 1.0);
  hy.S2 = 2.0 + rng.inv_gamma(1.0, 1.0);
  hy.W1 = rng.gamma(1.0, 2.0 / hy.G_Y);
  hy.W2 = rng.gamma(1.0, 2.0 / hy.G_X2);
  for (int z = 0; z < 2; ++z) {
    auto zz = static_cast<std::size_t>(z);
    hy.s_z[zz] = 2.0 + rng.inv_gamma(1.0, 1.0);
    hy.lambda_z[zz] = rng.gamma(1.0, 1.0);
    hy.sigma2_alpha[zz] = rng.inv_gamma(hy.s_z[zz], hy.s_z[zz] * hy.lambda_z[zz] * hy.g_z[zz]);
    hy.mu_alpha[zz].resize(static_cast<std::size_t>(cfg.K_cond));
    for (int rs = 0; rs < cfg.K_cond; ++rs)
      hy.mu_alpha[zz][static_cast<std::size_t>(rs)] = rng.normal(0.0, std::sqrt(0.5));
  }
  hy.s_2 = 2.0 + rng.inv_gamma(1.0, 1.0);
  hy.lambda_2 = rng.gamma(1.0, 1.0);
  hy.sigma2_m = rng.inv_gamma(hy.s_2, hy.s_2 * hy.lambda_2 * hy.G_X2);
  hy.mu_m = rng.normal(0.0, std::sqrt(0.5));

  st.sticks.v.resize(static_cast<std::size_t>(cfg.H));
  for (int h = 0; h < cfg.H - 1; ++h)
    st.sticks.v[static_cast<std::size_t>(h)] = std::min(rng.beta(1.0, hy.mass), 1.0 - 1e-16);
  st.sticks.v.back() = 1.0;
  st.sticks.pi = stick_break(st.sticks.v);

  st.clusters.reserve(static_cast<std::size_t>(cfg.H));
  for (int h = 0; h < cfg.H; ++h)
    st.clusters.push_back(detail::draw_from_base(hy, cfg, data.L, rng));

  st.assignments.resize(data.size());
  for (auto& a : st.assignments) a = static_cast<int>(rng.uniform() * cfg.H);

  st.x_work.assign(data.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& rec = data.records[i];
    if (rec.x_cont.has_value()) {
      st.x_work[i] = *rec.x_cont;
    } else if (data.has_x_cont) {
      st.missing_x_rows.push_back(static_cast<int>(i));
      const auto& cp = st.clusters[static_cast<std::size_t>(st.assignments[i])];
      double x = rng.normal(cp.m, std::sqrt(cp.tau2));
      st.imputed_x.push_back(x);
      st.x_work[i] = x;
    }
  }
  return st;
}

/// Redraw every record's component index from pi_h * kernel_h, in log space.
inline void sample_assignments(GibbsState& st, const Dataset& data, const ModelConfig& cfg,
                               Rng& rng) {
  const int H = static_cast<int>(st.clusters.size());
  const int L = data.L;
  const bool has_x = data.has_x_cont;

  struct Cache {
    double log_pi;
    double log_sig2, inv_sig2;
    double log_tau2, inv_tau2, m;
    double log_pz1, log_pz0;
    std::vector<double> log_xi, log_eta;
  };
  std::vector<Cache> cache(static_cast<std::size_t>(H));
  for (int h = 0; h < H; ++h) {
    const auto& cp = st.clusters[static_cast<std::size_t>(h)];
    auto& c = cache[static_cast<std::size_t>(h)];
    c.log_pi = std::log(st.sticks.pi[static_cast<std::size_t>(h)]);
    c.log_sig2 = std::log(cp.sigma2);
    c.inv_sig2 = 1.0 / cp.sigma2;
    c.log_tau2 = std::log(cp.tau2);
    c.inv_tau2 = 1.0 / cp.tau2;
    c.m = cp.m;
    c.log_pz1 = std::log(cp.p_z);
    c.log_pz0 = std::log1p(-cp.p_z);
    c.log_xi.resize(cp.xi.size());
    for (std::size_t k = 0; k < cp.xi.size(); ++k) c.log_xi[k] = std::log(cp.xi[k]);
    c.log_eta.resize(cp.eta_cat.size());
    for (std::size_t k = 0; k < cp.eta_cat.size(); ++k) c.log_eta[k] = std::log(cp.eta_cat[k]);
  }

  std::vector<double> lp(static_cast<std::size_t>(H));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& rec = data.records[i];
    const double x = st.x_work[i];
    const int rs = rec.y.has_value() ? cfg.merge(rec.r) : 0;
    for (int h = 0; h < H; ++h) {
      const auto& c = cache[static_cast<std::size_t>(h)];
      const auto& cp = st.clusters[static_cast<std::size_t>(h)];
      double v = c.log_pi + c.log_xi[static_cast<std::size_t>(rec.r - 1)] +
                 c.log_eta[static_cast<std::size_t>(rec.x_cat - 1)] +
                 (rec.z == 1 ? c.log_pz1 : c.log_pz0);
      if (has_x) {
        double dx = x - c.m;
        v += -0.5 * (kLog2Pi + c.log_tau2 + dx * dx * c.inv_tau2);
      }
      if (rec.y.has_value()) {
        double mean = cp.alpha[static_cast<std::size_t>(rec.z)][static_cast<std::size_t>(rs - 1)] +
                      (cp.beta.empty() ? 0.0 : design_dot(rec.x_cat, x, has_x, L, cp.beta));
        double dy = *rec.y - mean;
        v += -0.5 * (kLog2Pi + c.log_sig2 + dy * dy * c.inv_sig2);
      }
      lp[static_cast<std::size_t>(h)] = v;
    }
    st.assignments[i] = rng.categorical_logits(lp);
  }
}

/// Blocked stick update: v_h ~ Beta(1 + n_h, mass + sum_{l>h} n_l), v_H = 1.
inline void sample_sticks(GibbsState& st, const ModelConfig& cfg, Rng& rng) {
  const int H = cfg.H;
  std::vector<double> n(static_cast<std::size_t>(H), 0.0);
  for (int a : st.assignments) n[static_cast<std::size_t>(a)] += 1.0;
  double tail = 0.0;
  std::vector<double> tail_after(static_cast<std::size_t>(H), 0.0);
  for (int h = H - 1; h >= 0; --h) {
    tail_after[static_cast<std::size_t>(h)] = tail;
    tail += n[static_cast<std::size_t>(h)];
  }
  for (int h = 0; h < H - 1; ++h) {
    double v = rng.beta(1.0 + n[static_cast<std::size_t>(h)],
                        st.hypers.mass + tail_after[static_cast<std::size_t>(h)]);
    st.sticks.v[static_cast<std::size_t>(h)] = std::min(v, 1.0 - 1e-16);
  }
  st.sticks.v[static_cast<std::size_t>(H - 1)] = 1.0;
  st.sticks.pi = stick_break(st.sticks.v);
}

/// Conjugate block updates for every component; empty components reduce to
/// fresh base-measure draws.
inline void sample_cluster_params(GibbsState& st, const Dataset& data, const ModelConfig& cfg,
                                  Rng& rng) {
  const int H = static_cast<int>(st.clusters.size());
  const int L = data.L;
  const bool has_x = data.has_x_cont;
  const int p = data.design_dim();
  const HyperState& hy = st.hypers;

  std::vector<std::vector<int>> members(static_cast<std::size_t>(H));
  for (std::size_t i = 0; i < data.size(); ++i)
    members[static_cast<std::size_t>(st.assignments[i])].push_back(static_cast<int>(i));

  auto design_fill = [&](const AttemptRecord& rec, double xval, Eigen::VectorXd& phi) {
    phi.setZero();
    if (rec.x_cat >= 2) phi(rec.x_cat - 2) = 1.0;
    if (has_x) phi(p - 1) = xval;
  };

  Eigen::VectorXd phi(p > 0 ? p : 1);
  for (int h = 0; h < H; ++h) {
    auto& cp = st.clusters[static_cast<std::size_t>(h)];
    const auto& mem = members[static_cast<std::size_t>(h)];

    // alpha | beta, sigma2
    for (int z = 0; z < 2; ++z) {
      for (int rs = 1; rs <= cfg.K_cond; ++rs) {
        double sum_resid = 0.0;
        int cnt = 0;
        for (int i : mem) {
          const auto& rec = data.records[static_cast<std::size_t>(i)];
          if (!rec.y.has_value() || rec.z != z || cfg.merge(rec.r) != rs) continue;
          double xb = cp.beta.empty() ? 0.0
                                      : design_dot(rec.x_cat, st.x_work[static_cast<std::size_t>(i)],
                                                   has_x, L, cp.beta);
          sum_resid += *rec.y - xb;
          ++cnt;
        }
        auto zz = static_cast<std::size_t>(z);
        double prior_var = hy.sigma2_alpha[zz];
        double prec = 1.0 / prior_var + cnt / cp.sigma2;
        double mean = (hy.mu_alpha[zz][static_cast<std::size_t>(rs - 1)] / prior_var +
                       sum_resid / cp.sigma2) /
                      prec;
        cp.alpha[zz][static_cast<std::size_t>(rs - 1)] = rng.normal(mean, std::sqrt(1.0 / prec));
      }
    }

    // beta | alpha, sigma2
    if (p > 0) {
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p, p);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
      for (int j = 0; j < p; ++j) {
        double pv = hy.c * hy.var_beta[static_cast<std::size_t>(j)];
        A(j, j) = 1.0 / pv;
        b(j) = hy.mu_beta[static_cast<std::size_t>(j)] / pv;
      }
      for (int i : mem) {
        const auto& rec = data.records[static_cast<std::size_t>(i)];
        if (!rec.y.has_value()) continue;
        design_fill(rec, st.x_work[static_cast<std::size_t>(i)], phi);
        double resid = *rec.y - cp.alpha[static_cast<std::size_t>(rec.z)]
                                        [static_cast<std::size_t>(cfg.merge(rec.r) - 1)];
        A.noalias() += (phi * phi.transpose()) / cp.sigma2;
        b.noalias() += phi * (resid / cp.sigma2);
      }
      Eigen::LLT<Eigen::MatrixXd> llt(A);
      Eigen::VectorXd mean = llt.solve(b);
      Eigen::VectorXd zdraw(p);
      for (int j = 0; j < p; ++j) zdraw(j) = rng.normal();
      Eigen::VectorXd sample = mean + llt.matrixU().solve(zdraw);
      for (int j = 0; j < p; ++j) cp.beta[static_cast<std::size_t>(j)] = sample(j);
    } else {
      cp.beta.clear();
    }

    // sigma2 | alpha, beta
    {
      double ss = 0.0;
      int cnt = 0;
      for (int i : mem) {
        const auto& rec = data.records[static_cast<std::size_t>(i)];
        if (!rec.y.has_value()) continue;
        double mean = cp.alpha[static_cast<std::size_t>(rec.z)]
                              [static_cast<std::size_t>(cfg.merge(rec.r) - 1)] +
                      (cp.beta.empty() ? 0.0
                                       : design_dot(rec.x_cat, st.x_work[static_cast<std::size_t>(i)],
                                                    has_x, L, cp.beta));
        double d = *rec.y - mean;
        ss += d * d;
        ++cnt;
      }
      cp.sigma2 = rng.inv_gamma(hy.S1 + 0.5 * cnt, hy.S1 * hy.W1 + 0.5 * ss);
    }

    // xi, eta_cat
    {
      std::vector<double> conc(static_cast<std::size_t>(cfg.K + 1), 1.0 / (cfg.K + 1));
      for (int i : mem) conc[static_cast<std::size_t>(data.records[static_cast<std::size_t>(i)].r - 1)] += 1.0;
      cp.xi = rng.dirichlet(conc);
    }
    {
      std::vector<double> conc(static_cast<std::size_t>(L), 1.0 / L);
      for (int i : mem)
        conc[static_cast<std::size_t>(data.records[static_cast<std::size_t>(i)].x_cat - 1)] += 1.0;
      cp.eta_cat = rng.dirichlet(conc);
    }

    // (m, tau2)
    if (has_x) {
      double sum_x = 0.0;
      int nx = static_cast<int>(mem.size());
      for (int i : mem) sum_x += st.x_work[static_cast<std::size_t>(i)];
      double prec = 1.0 / hy.sigma2_m + nx / cp.tau2;
      double mean = (hy.mu_m / hy.sigma2_m + sum_x / cp.tau2) / prec;
      cp.m = rng.normal(mean, std::sqrt(1.0 / prec));
      double ss = 0.0;
      for (int i : mem) {
        double d = st.x_work[static_cast<std::size_t>(i)] - cp.m;
        ss += d * d;
      }
      cp.tau2 = rng.inv_gamma(hy.S2 + 0.5 * nx, hy.S2 * hy.W2 + 0.5 * ss);
    } else {
      cp.m = rng.normal(hy.mu_m, std::sqrt(hy.sigma2_m));
      cp.tau2 = rng.inv_gamma(hy.S2, hy.S2 * hy.W2);
    }

    // p_z
    {
      int n1 = 0;
      for (int i : mem) n1 += data.records[static_cast<std::size_t>(i)].z;
      cp.p_z = rng.beta(1.0 + n1, 1.0 + static_cast<int>(mem.size()) - n1);
    }
  }
}

/// Hierarchical updates; shifted shape parameters move by slice sampling on
/// log(S - 2), everything else is conjugate.
inline void sample_hypers(GibbsState& st, const ModelConfig& cfg, Rng& rng) {
  HyperState& hy = st.hypers;
  const int H = static_cast<int>(st.clusters.size());

  for (int z = 0; z < 2; ++z) {
    auto zz = static_cast<std::size_t>(z);
    for (int rs = 0; rs < cfg.K_cond; ++rs) {
      double sum_a = 0.0;
      for (const auto& cp : st.clusters) sum_a += cp.alpha[zz][static_cast<std::size_t>(rs)];
      double prec = 1.0 / 0.5 + H / hy.sigma2_alpha[zz];
      double mean = (sum_a / hy.sigma2_alpha[zz]) / prec;
      hy.mu_alpha[zz][static_cast<std::size_t>(rs)] = rng.normal(mean, std::sqrt(1.0 / prec));
    }
    double ss = 0.0;
    for (const auto& cp : st.clusters)
      for (int rs = 0; rs < cfg.K_cond; ++rs) {
        double d = cp.alpha[zz][static_cast<std::size_t>(rs)] -
                   hy.mu_alpha[zz][static_cast<std::size_t>(rs)];
        ss += d * d;
      }
    double n_a = static_cast<double>(H) * cfg.K_cond;
    hy.sigma2_alpha[zz] = rng.inv_gamma(hy.s_z[zz] + 0.5 * n_a,
                                        hy.s_z[zz] * hy.lambda_z[zz] * hy.g_z[zz] + 0.5 * ss);
    hy.lambda_z[zz] =
        rng.gamma(1.0 + hy.s_z[zz], 1.0 + hy.s_z[zz] * hy.g_z[zz] / hy.sigma2_alpha[zz]);
  }

  {
    double sum_m = 0.0;
    for (const auto& cp : st.clusters) sum_m += cp.m;
    double prec = 1.0 / 0.5 + H / hy.sigma2_m;
    double mean = (sum_m / hy.sigma2_m) / prec;
    hy.mu_m = rng.normal(mean, std::sqrt(1.0 / prec));
    double ss = 0.0;
    for (const auto& cp : st.clusters) {
      double d = cp.m - hy.mu_m;
      ss += d * d;
    }
    hy.sigma2_m =
        rng.inv_gamma(hy.s_2 + 0.5 * H, hy.s_2 * hy.lambda_2 * hy.G_X2 + 0.5 * ss);
    hy.lambda_2 = rng.gamma(1.0 + hy.s_2, 1.0 + hy.s_2 * hy.G_X2 / hy.sigma2_m);
  }

  double sum_inv_sig = 0.0, sum_log_sig = 0.0;
  for (const auto& cp : st.clusters) {
    sum_inv_sig += 1.0 / cp.sigma2;
    sum_log_sig += std::log(cp.sigma2);
  }
  hy.W1 = rng.gamma(1.0 + H * hy.S1, 2.0 / hy.G_Y + hy.S1 * sum_inv_sig);

  double sum_inv_tau = 0.0, sum_log_tau = 0.0;
  for (const auto& cp : st.clusters) {
    sum_inv_tau += 1.0 / cp.tau2;
    sum_log_tau += std::log(cp.tau2);
  }
  hy.W2 = rng.gamma(1.0 + H * hy.S2, 2.0 / hy.G_X2 + hy.S2 * sum_inv_tau);

  // prior on u = log(S-2) from S-2 ~ InvGamma(1,1): log p(u) = -u - exp(-u).
  // Capped at u = 40 so the target stays finite even for degenerate variance sets.
  auto shape_logpost = [](double u, double w, int n, double sum_log, double sum_inv) {
    if (u > 40.0) return kNegInf;
    double s = 2.0 + std::exp(u);
    double v = -u - std::exp(-u) +
               n * (s * std::log(s * w) - std::lgamma(s)) - (s + 1.0) * sum_log - s * w * sum_inv;
    return std::isfinite(v) ? v : kNegInf;
  };
  {
    double u = detail::slice_sample(
        std::log(hy.S1 - 2.0),
        [&](double u_) { return shape_logpost(u_, hy.W1, H, sum_log_sig, sum_inv_sig); }, 1.0, rng);
    hy.S1 = 2.0 + std::exp(u);
  }
  {
    double u = detail::slice_sample(
        std::log(hy.S2 - 2.0),
        [&](double u_) { return shape_logpost(u_, hy.W2, H, sum_log_tau, sum_inv_tau); }, 1.0, rng);
    hy.S2 = 2.0 + std::exp(u);
  }
  for (int z = 0; z < 2; ++z) {
    auto zz = static_cast<std::size_t>(z);
    double u = detail::slice_sample(
        std::log(hy.s_z[zz] - 2.0),
        [&](double u_) {
          return shape_logpost(u_, hy.lambda_z[zz] * hy.g_z[zz], 1,
                               std::log(hy.sigma2_alpha[zz]), 1.0 / hy.sigma2_alpha[zz]);
        },
        1.0, rng);
    hy.s_z[zz] = 2.0 + std::exp(u);
  }
  {
    double u = detail::slice_sample(
        std::log(hy.s_2 - 2.0),
        [&](double u_) {
          return shape_logpost(u_, hy.lambda_2 * hy.G_X2, 1, std::log(hy.sigma2_m),
                               1.0 / hy.sigma2_m);
        },
        1.0, rng);
    hy.s_2 = 2.0 + std::exp(u);
  }

  double sum_log1mv = 0.0;
  for (int h = 0; h < H - 1; ++h) sum_log1mv += std::log1p(-st.sticks.v[static_cast<std::size_t>(h)]);
  hy.mass = rng.gamma(1.0 + H - 1.0, 1.0 - sum_log1mv);
}

/// Redraw missing x_cont from its full conditional within the assigned component.
inline void impute_missing_covariates(GibbsState& st, const Dataset& data, const ModelConfig& cfg,
                                      Rng& rng) {
  if (st.missing_x_rows.empty()) return;
  const int L = data.L;
  for (std::size_t k = 0; k < st.missing_x_rows.size(); ++k) {
    int i = st.missing_x_rows[k];
    const auto& rec = data.records[static_cast<std::size_t>(i)];
    const auto& cp = st.clusters[static_cast<std::size_t>(st.assignments[static_cast<std::size_t>(i)])];
    double x;
    if (rec.y.has_value()) {
      double beta_x = cp.beta[static_cast<std::size_t>(L - 1)];
      double alpha_cell = cp.alpha[static_cast<std::size_t>(rec.z)]
                                  [static_cast<std::size_t>(cfg.merge(rec.r) - 1)];
      double dummy_part = rec.x_cat >= 2 ? cp.beta[static_cast<std::size_t>(rec.x_cat - 2)] : 0.0;
      double resid = *rec.y - alpha_cell - dummy_part;
      double prec = 1.0 / cp.tau2 + beta_x * beta_x / cp.sigma2;
      double mean = (cp.m / cp.tau2 + beta_x * resid / cp.sigma2) / prec;
      x = rng.normal(mean, std::sqrt(1.0 / prec));
    } else {
      x = rng.normal(cp.m, std::sqrt(cp.tau2));
    }
    st.imputed_x[k] = x;
    st.x_work[static_cast<std::size_t>(i)] = x;
  }
}

/// One full sweep in the fixed scan order.
inline void gibbs_sweep(GibbsState& st, const Dataset& data, const ModelConfig& cfg, Rng& rng) {
  sample_assignments(st, data, cfg, rng);
  sample_sticks(st, cfg, rng);
  sample_cluster_params(st, data, cfg, rng);
  sample_hypers(st, cfg, rng);
  impute_missing_covariates(st, data, cfg, rng);
}

/// Run the blocked Gibbs sampler on a normalized, standardized dataset and
/// return the retained draws. Deterministic given the rng seed.
inline std::vector<PosteriorDraw> run_chain(const Dataset& data, const ModelConfig& cfg,
                                            const StandardizationRecord& std_rec, Rng& rng) {
  validate_normalized(data, cfg);
  GibbsState st = init_state(data, cfg, rng);
  std::vector<PosteriorDraw> draws;
  draws.reserve(static_cast<std::size_t>((cfg.n_iter - cfg.n_burn) / cfg.thin + 1));
  for (int iter = 1; iter <= cfg.n_iter; ++iter) {
    gibbs_sweep(st, data, cfg, rng);
    if (iter > cfg.n_burn && (iter - cfg.n_burn) % cfg.thin == 0)
      draws.push_back(PosteriorDraw{st.sticks, st.clusters, st.hypers, std_rec});
  }
  return draws;
}

}  // namespace ramdpm
