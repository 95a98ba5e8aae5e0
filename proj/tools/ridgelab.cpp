#include <cmath>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ridgelab/harness.hpp"

using namespace ridgelab;

namespace {

nlohmann::json load_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path);
  nlohmann::json j;
  is >> j;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ridgelab: simulation laboratory for non-linear ridge bandits"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
  run->add_option("config", config_path, "path to config.json")->required();

  std::string link_name = "cubic", out_path = "curves.csv";
  int theory_d = 256;
  double theory_c = 1.0, theory_delta = 0.1;
  long long theory_T = 1000000;
  auto* theory = app.add_subcommand(
      "theory", "export predicted trajectory curves (no simulation)");
  theory->add_option("--link", link_name, "link function kind")
      ->default_val("cubic");
  theory->add_option("--d", theory_d, "ambient dimension")->default_val(256);
  theory->add_option("--out", out_path, "output CSV path")
      ->default_val("curves.csv");
  theory->add_option("--c", theory_c, "recursion constant")->default_val(1.0);
  theory->add_option("--delta", theory_delta, "failure probability")
      ->default_val(0.1);
  theory->add_option("--T", theory_T, "horizon")->default_val(1000000);

  std::string validate_path;
  auto* validate =
      app.add_subcommand("validate", "check a config without running it");
  validate->add_option("config", validate_path, "path to config.json")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ExperimentConfig cfg = ExperimentConfig::from_json(load_json(config_path));
      ExperimentResult res = run_experiment(cfg);
      std::cout << res.summary.dump(2) << '\n';
      std::cout << "wrote " << res.records.size() << " trial records to "
                << cfg.output_dir << "/records.csv\n";
    } else if (theory->parsed()) {
      LinkFunction link = LinkFunction::from_json({{"kind", link_name}});
      if (theory_d < 16) throw ConfigError("--d must be >= 16");
      std::ofstream os(out_path);
      if (!os) throw ConfigError("cannot open " + out_path);
      TrajectoryCurve lb = lb_epsilon_sequence(link, theory_d, theory_c,
                                               theory_delta, theory_T);
      export_curve_csv(lb, os);
      TrajectoryCurve ub = ub_trajectory_ode(
          link, theory_d, std::sqrt(theory_c / theory_d), theory_T,
          std::max<long long>(1, theory_T / 4096));
      export_curve_csv(ub, os, /*header=*/false);
      std::cout << "wrote " << (lb.points.size() + ub.points.size())
                << " curve points to " << out_path << '\n';
    } else if (validate->parsed()) {
      ExperimentConfig cfg =
          ExperimentConfig::from_json(load_json(validate_path));
      cfg.validate();
      std::cout << "config ok: " << validate_path << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
