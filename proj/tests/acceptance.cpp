// Acceptance suite: one criterion per command-line argument (1..9, or "all").
// Prints one PASS/FAIL line per criterion; exits nonzero on any failure.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ramdpm/cli.hpp"
#include "ramdpm/estimands.hpp"
#include "ramdpm/gibbs.hpp"
#include "ramdpm/metrics.hpp"
#include "ramdpm/simulate.hpp"

using namespace ramdpm;
namespace fs = std::filesystem;

namespace {

bool g_all_pass = true;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  if (!pass) g_all_pass = false;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

ModelConfig reduced_schedule() {
  ModelConfig cfg;
  cfg.K = 9;
  cfg.K_cond = 3;
  cfg.H = 20;
  cfg.n_iter = 5000;
  cfg.n_burn = 1000;
  cfg.thin = 5;
  cfg.mc_draws = 5000;
  cfg.finalize();
  return cfg;
}

// The supplement's scenario-2/6 MSE and CI lengths correspond to the
// QUATRO-scale outcome noise (sigma ~ 10), not the sigma = 2 printed for
// scenario 5.
ScenarioSpec paper_scale_scenario(ScenarioId id, int n) {
  ScenarioSpec spec;
  spec.id = id;
  spec.n = n;
  spec.sigma = 10.0;
  return spec;
}

// ---------------------------------------------------------------------------

bool criterion1() {
  auto spec = paper_scale_scenario(ScenarioId::s2, 500);
  auto cfg = reduced_schedule();
  std::vector<ExtrapolationPriorSpec> priors{{PriorKind::none, 10.0},
                                             {PriorKind::point_mass, 10.0}};
  auto reports = replicate_study_multi(spec, cfg, priors, 100, 74123);
  bool pass = true;
  std::string detail = "scenario-2 reproduction, 100 reps:";
  for (const auto& r : reports) {
    bool ok = std::abs(r.bias) <= 0.15 && r.mse >= 0.55 && r.mse <= 1.15 && r.coverage >= 0.89 &&
              r.coverage <= 0.99;
    pass = pass && ok;
    detail += fmt(" [%s bias=%+.3f mse=%.3f cov=%.3f len=%.2f %s]", r.prior_label.c_str(), r.bias,
                  r.mse, r.coverage, r.mean_ci_length, ok ? "ok" : "OUT");
  }
  report(1, pass, detail);
  return pass;
}

bool criterion2() {
  auto spec = paper_scale_scenario(ScenarioId::s6, 500);
  spec.missing_frac = 0.10;
  auto cfg = reduced_schedule();
  auto r = replicate_study(spec, cfg, {PriorKind::point_mass, 10.0}, 50, 98765);
  bool pass = std::abs(r.bias) <= 0.2 && r.coverage >= 0.88;
  report(2, pass,
         fmt("scenario-6 LCM robustness, 50 reps: pm bias=%+.3f (<=0.2) cov=%.3f (>=0.88) "
             "mse=%.3f len=%.2f",
             r.bias, r.coverage, r.mse, r.mean_ci_length));
  return pass;
}

bool criterion3() {
  auto cfg = reduced_schedule();
  const std::uint64_t seed = 74555;
  std::vector<double> unif_len;
  double len_none35 = 0.0, len_pm35 = 0.0;
  for (double miss : {0.10, 0.25, 0.35}) {
    auto spec = paper_scale_scenario(ScenarioId::s2, 500);
    spec.missing_frac = miss;
    std::vector<ExtrapolationPriorSpec> priors{{PriorKind::unif, 20.0}};
    if (miss == 0.35) {
      priors.push_back({PriorKind::none, 10.0});
      priors.push_back({PriorKind::point_mass, 10.0});
    }
    auto reports = replicate_study_multi(spec, cfg, priors, 50, seed);
    unif_len.push_back(reports[0].mean_ci_length);
    if (miss == 0.35) {
      len_none35 = reports[1].mean_ci_length;
      len_pm35 = reports[2].mean_ci_length;
    }
  }
  bool increasing = unif_len[0] < unif_len[1] && unif_len[1] < unif_len[2];
  bool pm_wider = len_pm35 > len_none35;
  bool pass = increasing && pm_wider;
  report(3, pass,
         fmt("missingness trend, 50 reps/level: unif20 len 10%%=%.3f < 25%%=%.3f < 35%%=%.3f "
             "(%s); at 35%%: pm len=%.3f > none len=%.3f (%s)",
             unif_len[0], unif_len[1], unif_len[2], increasing ? "ok" : "OUT", len_pm35,
             len_none35, pm_wider ? "ok" : "OUT"));
  return pass;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

bool criterion4() {
  const int n = 200;
  Rng gen(909);
  Dataset data;
  for (int i = 0; i < n; ++i) {
    AttemptRecord rec;
    rec.y = gen.normal(0.5, 1.2);
    rec.r = 1;
    data.records.push_back(rec);
  }
  data.refresh_layout();

  ModelConfig cfg;
  cfg.K = 2;
  cfg.K_cond = 2;
  cfg.H = 2;
  cfg.finalize();

  GibbsState st;
  st.hypers.mu_alpha[0].assign(2, 0.0);
  st.hypers.mu_alpha[1].assign(2, 0.0);
  st.hypers.sigma2_alpha = {1e8, 1e8};  // effectively flat intercept prior
  st.hypers.S1 = 3.0;
  st.hypers.W1 = 0.25;
  st.sticks.v = {1.0};
  st.sticks.pi = {1.0};
  Rng init_rng(1);
  st.clusters.push_back(detail::draw_from_base(st.hypers, cfg, 1, init_rng));
  st.assignments.assign(data.size(), 0);
  st.x_work.assign(data.size(), std::numeric_limits<double>::quiet_NaN());

  const int draws = 10000, burn = 200;
  std::vector<double> g_alpha, g_sigma;
  Rng rng(11);
  for (int t = 0; t < draws + burn; ++t) {
    sample_cluster_params(st, data, cfg, rng);
    if (t >= burn) {
      g_alpha.push_back(st.clusters[0].alpha[0][0]);
      g_sigma.push_back(st.clusters[0].sigma2);
    }
  }

  double ybar = 0.0, ss = 0.0;
  for (const auto& r : data.records) ybar += *r.y;
  ybar /= n;
  for (const auto& r : data.records) ss += (*r.y - ybar) * (*r.y - ybar);
  std::vector<double> a_alpha, a_sigma;
  Rng rng2(12);
  for (int t = 0; t < draws; ++t) {
    double s2 = rng2.inv_gamma(3.0 + 0.5 * (n - 1), 3.0 * 0.25 + 0.5 * ss);
    a_sigma.push_back(s2);
    a_alpha.push_back(rng2.normal(ybar, std::sqrt(s2 / n)));
  }
  double ks_a = ks_distance(g_alpha, a_alpha);
  double ks_s = ks_distance(g_sigma, a_sigma);
  bool pass = ks_a < 0.05 && ks_s < 0.05;
  report(4, pass,
         fmt("conjugacy oracle (H=1, n=200, 10^4 draws): KS(alpha)=%.4f KS(sigma2)=%.4f (< 0.05)",
             ks_a, ks_s));
  return pass;
}

bool criterion5() {
  ModelConfig cfg;
  cfg.K = 2;
  cfg.K_cond = 2;
  cfg.H = 2;
  cfg.finalize();
  ClusterParams cp;
  cp.alpha[0] = {1.0, 2.0};
  cp.alpha[1] = {1.0, 2.0};
  cp.sigma2 = 1.0;
  cp.eta_cat = {1.0};
  cp.m = 0.0;
  cp.tau2 = 1.0;
  cp.p_z = 0.5;
  PosteriorDraw draw;
  draw.clusters = {cp};
  draw.sticks.v = {1.0};
  draw.sticks.pi = {1.0};

  const int S = 1000000;
  bool pass = true;
  std::string detail = "estimand oracle, S=10^6:";

  draw.clusters[0].xi = {0.5, 0.5, 0.0};
  Rng r1(1);
  double none = mc_expectation_y_given_z(draw, 1, {PriorKind::none, 10.0}, S, cfg, r1);
  bool ok = std::abs(none - 1.5) <= 3 * 0.5 / std::sqrt(static_cast<double>(S));
  pass = pass && ok;
  detail += fmt(" none=%.5f (want 1.5 %s)", none, ok ? "ok" : "OUT");

  draw.clusters[0].xi = {0.4, 0.4, 0.2};
  Rng r2(2);
  double pm = mc_expectation_y_given_z(draw, 1, {PriorKind::point_mass, 10.0}, S, cfg, r2);
  ok = std::abs(pm - 1.4) <= 3 * std::sqrt(0.24 / S);
  pass = pass && ok;
  detail += fmt(" pm=%.5f (want 1.4 %s)", pm, ok ? "ok" : "OUT");

  Rng r3(3);
  double un = mc_expectation_y_given_z(draw, 1, {PriorKind::unif, 100.0}, S, cfg, r3);
  ok = std::abs(un - 1.3) <= 3 * std::sqrt(0.38 / S);
  pass = pass && ok;
  detail += fmt(" unif100=%.5f (want 1.3 %s)", un, ok ? "ok" : "OUT");

  report(5, pass, detail);
  return pass;
}

bool criterion6() {
  const int n = 100000;
  auto b = compute_bounds(std::vector<double>{40.0, 38.0, 42.0}, 20.0);  // C = 0.8
  bool pass = true;
  std::string detail = "extrapolation laws, 10^5 draws:";

  Rng rpm(1);
  bool pm_exact = true;
  for (int i = 0; i < n; ++i)
    pm_exact = pm_exact && sample_extrapolation_mean({PriorKind::point_mass, 20.0}, b, rpm) == 38.0;
  pass = pass && pm_exact;
  detail += fmt(" pm exact=%s", pm_exact ? "yes" : "NO");

  struct Case {
    PriorKind kind;
    const char* name;
    double mean, sd;
  };
  for (const auto& c : {Case{PriorKind::unif, "unif", b.alpha_min - b.C / 2, b.C / std::sqrt(12.0)},
                        Case{PriorKind::tri1, "tri1", b.alpha_min - 2 * b.C / 3, b.C / std::sqrt(18.0)},
                        Case{PriorKind::tri2, "tri2", b.alpha_min - b.C / 3, b.C / std::sqrt(18.0)}}) {
    Rng rng(7);
    double sum = 0.0;
    bool support = true;
    for (int i = 0; i < n; ++i) {
      double x = sample_extrapolation_mean({c.kind, 20.0}, b, rng);
      support = support && x >= b.alpha_min - b.C && x <= b.alpha_min;
      sum += x;
    }
    double mean = sum / n;
    bool ok = support && std::abs(mean - c.mean) <= 3 * c.sd / std::sqrt(static_cast<double>(n));
    pass = pass && ok;
    detail += fmt(" %s mean=%.4f (want %.4f %s)", c.name, mean, c.mean, ok ? "ok" : "OUT");
  }
  report(6, pass, detail);
  return pass;
}

bool criterion7() {
  // known 2-component mixture over K = 3 patterns (+1 missing), 6 (z, r*) cells
  ModelConfig cfg;
  cfg.K = 3;
  cfg.K_cond = 3;
  cfg.H = 2;
  cfg.finalize();

  ClusterParams c0, c1;
  c0.alpha[0] = {0.6, -0.2, 0.1};
  c0.alpha[1] = {1.0, 0.3, -0.4};
  c0.beta = {0.5};
  c0.sigma2 = 0.8;
  c0.xi = {0.35, 0.25, 0.2, 0.2};
  c0.eta_cat = {1.0};
  c0.m = 0.2;
  c0.tau2 = 0.5;
  c0.p_z = 0.4;
  c1.alpha[0] = {-0.5, 0.1, 0.7};
  c1.alpha[1] = {0.2, -0.6, 0.5};
  c1.beta = {-0.3};
  c1.sigma2 = 1.2;
  c1.xi = {0.15, 0.35, 0.3, 0.2};
  c1.eta_cat = {1.0};
  c1.m = -0.4;
  c1.tau2 = 1.1;
  c1.p_z = 0.7;
  PosteriorDraw truth;
  truth.clusters = {c0, c1};
  truth.sticks.v = {0.55, 1.0};
  truth.sticks.pi = stick_break(truth.sticks.v);
  const double pi0 = truth.sticks.pi[0], pi1 = truth.sticks.pi[1];

  auto quadrature = [&](int z, int r) {
    auto pzf = [&](const ClusterParams& cp) { return z == 1 ? cp.p_z : 1.0 - cp.p_z; };
    double u0 = pi0 * pzf(c0) * c0.xi[static_cast<std::size_t>(r - 1)];
    double u1 = pi1 * pzf(c1) * c1.xi[static_cast<std::size_t>(r - 1)];
    const int npts = 40001;
    const double lo = -14.0, hi = 14.0, step = (hi - lo) / (npts - 1);
    double acc = 0.0;
    for (int i = 0; i < npts; ++i) {
      double x = lo + i * step;
      double px0 = std::exp(normal_logpdf(x, c0.m, c0.tau2));
      double px1 = std::exp(normal_logpdf(x, c1.m, c1.tau2));
      double w0 = pi0 * pzf(c0) * px0 * c0.xi[static_cast<std::size_t>(r - 1)];
      double w1 = pi1 * pzf(c1) * px1 * c1.xi[static_cast<std::size_t>(r - 1)];
      double cond =
          (w0 * (c0.alpha[static_cast<std::size_t>(z)][static_cast<std::size_t>(r - 1)] + 0.5 * x) +
           w1 * (c1.alpha[static_cast<std::size_t>(z)][static_cast<std::size_t>(r - 1)] - 0.3 * x)) /
          (w0 + w1);
      double fx = (u0 * px0 + u1 * px1) / (u0 + u1);
      acc += ((i == 0 || i == npts - 1) ? 0.5 : 1.0) * cond * fx * step;
    }
    return acc;
  };

  bool pass = true;
  std::string detail = "gof oracle:";
  for (int z = 0; z < 2; ++z)
    for (int r = 1; r <= 3; ++r) {
      double want = quadrature(z, r);
      const int M = 12, S = 20000;
      std::vector<double> est(M);
      for (int m = 0; m < M; ++m) {
        Rng rng(substream_seed(552200, static_cast<std::uint64_t>(m),
                               static_cast<std::uint64_t>(z * 10 + r)));
        est[static_cast<std::size_t>(m)] = gof_expectation(truth, z, r, S, cfg, rng);
      }
      double se = std::sqrt(variance_sample(est) / M) + 1e-7;
      bool ok = std::abs(mean_of(est) - want) <= 3 * se;
      pass = pass && ok;
      if (!ok) detail += fmt(" [cell z=%d r=%d got %.4f want %.4f OUT]", z, r, mean_of(est), want);
    }
  detail += " MC-vs-quadrature ok across 6 cells;";

  // generate from the mixture, fit, and check the interval coverage pattern
  Rng gen(31415);
  Dataset data;
  for (int i = 0; i < 600; ++i) {
    int comp = gen.uniform() < pi0 ? 0 : 1;
    const auto& cp = comp == 0 ? c0 : c1;
    AttemptRecord rec;
    rec.z = gen.bernoulli(cp.p_z);
    rec.x_cont = gen.normal(cp.m, std::sqrt(cp.tau2));
    rec.r = 1 + gen.categorical(cp.xi);
    if (rec.r <= 3)
      rec.y = cp.alpha[static_cast<std::size_t>(rec.z)][static_cast<std::size_t>(rec.r - 1)] +
              cp.beta[0] * *rec.x_cont + gen.normal(0.0, std::sqrt(cp.sigma2));
    data.records.push_back(rec);
  }
  data.refresh_layout();
  normalize_attempts(data, cfg.K);

  std::array<std::array<std::pair<double, int>, 3>, 2> cells{};
  for (const auto& r : data.records)
    if (r.y) {
      cells[static_cast<std::size_t>(r.z)][static_cast<std::size_t>(r.r - 1)].first += *r.y;
      cells[static_cast<std::size_t>(r.z)][static_cast<std::size_t>(r.r - 1)].second += 1;
    }

  auto srec = standardize(data);
  ModelConfig fit_cfg = cfg;
  fit_cfg.H = 15;
  fit_cfg.n_iter = 3000;
  fit_cfg.n_burn = 600;
  fit_cfg.thin = 4;
  fit_cfg.mc_draws = 2000;
  Rng chain_rng(2718);
  auto draws = run_chain(data, fit_cfg, srec, chain_rng);
  auto rows = gof_table(draws, fit_cfg.mc_draws, fit_cfg, 998877);
  int covered = 0;
  for (const auto& row : rows) {
    auto cell = cells[static_cast<std::size_t>(row.z)][static_cast<std::size_t>(row.r_star - 1)];
    double emp = cell.first / cell.second;
    if (row.summary.ci_low <= emp && emp <= row.summary.ci_high) ++covered;
  }
  bool cover_ok = covered >= 5;
  pass = pass && cover_ok;
  detail += fmt(" fitted 95%% GOF intervals cover empirical means in %d/6 cells (need >=5)", covered);
  report(7, pass, detail);
  return pass;
}

bool criterion8() {
  bool pass = true;
  std::string detail = "generator fidelity:";

  auto p = quatro_attempt_probs();
  bool exact = p[0][9] == 13.0 / 205 && p[0][0] == 77.0 / 205 && p[0][3] == 14.0 / (6 * 205.0) &&
               p[1][9] == 29.0 / 204 && p[1][3] == 5.0 / (6 * 204.0);
  pass = pass && exact;
  detail += fmt(" table-1 rationals %s;", exact ? "exact" : "WRONG");

  {
    ScenarioSpec spec;
    spec.id = ScenarioId::s2;
    spec.n = 100000;
    Rng rng(5150);
    Dataset data = gen_scenario(spec, rng);
    std::array<std::array<int, 10>, 2> counts{};
    std::array<int, 2> arm_n{};
    for (const auto& rec : data.records) {
      ++counts[static_cast<std::size_t>(rec.z)][static_cast<std::size_t>(rec.r - 1)];
      ++arm_n[static_cast<std::size_t>(rec.z)];
    }
    bool freq_ok = true;
    for (int z = 0; z < 2; ++z)
      for (int r = 1; r <= 10; ++r) {
        double want = p[static_cast<std::size_t>(z)][static_cast<std::size_t>(r - 1)];
        double got =
            static_cast<double>(counts[static_cast<std::size_t>(z)][static_cast<std::size_t>(r - 1)]) /
            arm_n[static_cast<std::size_t>(z)];
        double se = std::sqrt(want * (1 - want) / arm_n[static_cast<std::size_t>(z)]);
        if (std::abs(got - want) > 3 * se + 1e-12) freq_ok = false;
      }
    pass = pass && freq_ok;
    detail += fmt(" empirical pattern frequencies at n=10^5 %s;", freq_ok ? "within 3sd" : "OUT");
  }

  struct ThetaCase {
    ScenarioId id;
    double theta;
  };
  for (const auto& tc : {ThetaCase{ScenarioId::s2, 0.926624820659967},
                         ThetaCase{ScenarioId::s3, 0.7746229877102628},
                         ThetaCase{ScenarioId::s6, 0.89050609756098}}) {
    ScenarioSpec spec;
    spec.id = tc.id;
    double lib = true_theta(spec);
    Rng rng(substream_seed(626, static_cast<std::uint64_t>(tc.id)));
    const int n = 1000000;
    auto probs = quatro_attempt_probs();
    using namespace scenario_detail;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
      double x = rng.normal(2.0, std::sqrt(0.2));
      double y[2];
      for (int z = 0; z < 2; ++z) {
        int r = 1 + rng.categorical(probs[static_cast<std::size_t>(z)]);
        double mu;
        if (tc.id == ScenarioId::s2)
          mu = (r <= 9 ? h_star(z, std::min(r, 3)) : h_star(z, 4)) + 0.4 * x;
        else if (tc.id == ScenarioId::s3)
          mu = h_exp(z, r) + 0.4 * x;
        else {
          auto pc = class_probs(r);
          mu = h_star(z, 1 + rng.categorical(pc)) + 0.4 * x;
        }
        y[z] = mu + rng.normal();
      }
      double d = y[1] - y[0];
      sum += d;
      sumsq += d * d;
    }
    double mean = sum / n;
    double se = std::sqrt((sumsq / n - mean * mean) / n);
    bool ok = std::abs(mean - tc.theta) <= 3 * se && std::abs(lib - tc.theta) < 1e-9;
    pass = pass && ok;
    detail += fmt(" %s theta mc=%.4f lib=%.4f (want %.4f %s);", to_string(tc.id).c_str(), mean,
                  lib, tc.theta, ok ? "ok" : "OUT");
  }
  report(8, pass, detail);
  return pass;
}

bool criterion9() {
  std::string bin;
  if (const char* env = std::getenv("RAM_DPM_BIN")) bin = env;
  for (const char* cand : {"./tools/ram-dpm", "../tools/ram-dpm", "./build/tools/ram-dpm"})
    if (bin.empty() && fs::exists(cand)) bin = cand;
  if (bin.empty()) {
    report(9, false, "determinism: ram-dpm binary not found (set RAM_DPM_BIN)");
    return false;
  }

  fs::path dir = fs::temp_directory_path() / "ramdpm_acceptance_c9";
  fs::remove_all(dir);
  fs::create_directories(dir);
  json cfg;
  cfg["scenario"] = {{"id", "s2"}, {"n", 120}, {"sigma", 10.0}};
  cfg["model"] = {{"H", 6},     {"n_iter", 400},   {"n_burn", 100},
                  {"thin", 10}, {"mc_draws", 300}, {"seed", 7}};
  cfg["bench"] = {{"n_reps", 6},
                  {"base_seed", 99},
                  {"priors", json::array({{{"kind", "none"}},
                                          {{"kind", "pm"}},
                                          {{"kind", "unif"}, {"P", 20}}})}};
  cfg["report"] = "bench.json";
  write_json_file(cfg, (dir / "cfg.json").string());

  auto slurp = [](const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
  };
  std::vector<std::string> outputs;
  int runidx = 0;
  for (const char* threads : {"1", "1", "8", "8"}) {
    fs::path out = dir / ("run" + std::to_string(runidx++));
    std::string cmd = "RAM_DPM_THREADS=" + std::string(threads) + " \"" + bin +
                      "\" bench --config \"" + (dir / "cfg.json").string() + "\" --out \"" +
                      out.string() + "\" >/dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) {
      report(9, false, "determinism: bench run failed");
      return false;
    }
    outputs.push_back(slurp(out / "bench.json"));
  }
  bool same11 = outputs[0] == outputs[1];
  bool same88 = outputs[2] == outputs[3];
  bool same18 = outputs[0] == outputs[2];
  bool pass = same11 && same88 && same18 && !outputs[0].empty();
  report(9, pass,
         fmt("determinism: bench JSON byte-identical (threads 1 vs 1: %s, 8 vs 8: %s, 1 vs 8: %s)",
             same11 ? "yes" : "NO", same88 ? "yes" : "NO", same18 ? "yes" : "NO"));
  fs::remove_all(dir);
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::string which = argc > 1 ? argv[1] : "all";
  bool (*criteria[])() = {criterion1, criterion2, criterion3, criterion4, criterion5,
                          criterion6, criterion7, criterion8, criterion9};
  if (which == "all") {
    for (auto* c : criteria) c();
  } else {
    int idx = std::atoi(which.c_str());
    if (idx < 1 || idx > 9) {
      std::fprintf(stderr, "usage: acceptance [1-9|all]\n");
      return 2;
    }
    criteria[idx - 1]();
  }
  return g_all_pass ? 0 : 1;
}
