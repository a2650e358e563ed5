#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "ramdpm/cli.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  // simulate flag overrides
  std::optional<std::string> scenario_id, error_law;
  std::optional<int> n;
  std::optional<double> sigma, missing;
};

ramdpm::RunConfig build_config(ramdpm::Command cmd, const CliOptions& opt) {
  ramdpm::json j = ramdpm::json::object();
  if (!opt.config_path.empty()) j = ramdpm::read_json_file(opt.config_path);
  if (cmd == ramdpm::Command::simulate && !j.contains("scenario"))
    j["scenario"] = ramdpm::json::object();
  ramdpm::RunConfig rc = ramdpm::parse_config(j, cmd);
  rc.out_dir = opt.out_dir;
  if (opt.seed) rc.model.seed = *opt.seed;
  if (cmd == ramdpm::Command::simulate) {
    ramdpm::json sj = j.contains("scenario") ? j["scenario"] : ramdpm::json::object();
    if (opt.scenario_id) sj["id"] = *opt.scenario_id;
    if (opt.n) sj["n"] = *opt.n;
    if (opt.error_law) sj["error"] = *opt.error_law;
    if (opt.sigma) sj["sigma"] = *opt.sigma;
    if (opt.missing) sj["missing_frac"] = *opt.missing;
    rc.scenario = ramdpm::detail::scenario_from_json(sj);
  }
  return rc;
}

int dispatch(ramdpm::Command cmd, const CliOptions& opt) {
  try {
    ramdpm::RunConfig rc = build_config(cmd, opt);
    ramdpm::run(rc);
    return 0;
  } catch (const ramdpm::ConfigError& e) {
    std::cerr << ramdpm::json{{"error", {{"type", "config"}, {"message", e.what()}}}}.dump()
              << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << ramdpm::json{{"error", {{"type", "numeric"}, {"message", e.what()}}}}.dump()
              << '\n';
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet-process-mixture analysis of repeated attempt designs"};
  app.require_subcommand(1);

  CliOptions opt;
  std::map<std::string, ramdpm::Command> cmds = {
      {"simulate", ramdpm::Command::simulate}, {"fit", ramdpm::Command::fit},
      {"estimate", ramdpm::Command::estimate}, {"gof", ramdpm::Command::gof},
      {"bench", ramdpm::Command::bench}};

  for (auto& [name, cmd] : cmds) {
    CLI::App* sub = app.add_subcommand(name);
    auto* copt = sub->add_option("--config", opt.config_path, "JSON config file");
    sub->add_option("--seed", opt.seed, "override the RNG seed from the config");
    sub->add_option("--out", opt.out_dir, "output directory for artifacts");
    if (cmd == ramdpm::Command::simulate) {
      sub->add_option("--scenario", opt.scenario_id, "scenario id (s2|s3|s5|s6|s1_custom|s4_custom)");
      sub->add_option("--n", opt.n, "sample size");
      sub->add_option("--error", opt.error_law, "error law (normal|t3|skew_normal)");
      sub->add_option("--sigma", opt.sigma, "outcome scale");
      sub->add_option("--missing", opt.missing, "target missingness fraction in (0,1)");
    } else {
      copt->required();
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  for (auto& [name, cmd] : cmds)
    if (app.got_subcommand(name)) return dispatch(cmd, opt);
  return 1;
}
