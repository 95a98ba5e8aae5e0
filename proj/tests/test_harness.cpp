#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ridgelab/harness.hpp"

using namespace ridgelab;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}
// records.csv with the wall-time column stripped.
std::string stable_csv(const fs::path& p) {
  std::istringstream is(slurp(p));
  std::string line, out;
  while (std::getline(is, line)) {
    auto pos = line.rfind(',');
    out += line.substr(0, pos);
    out += '\n';
  }
  return out;
}
}  // namespace

TEST_CASE("config parsing, defaults, and field-level validation") {
  nlohmann::json j{{"experiment", "burnin_cost"},
                   {"link", {{"kind", "identity"}}},
                   {"d_list", {32}},
                   {"trials", 2},
                   {"seed", 7}};
  auto cfg = ExperimentConfig::from_json(j);
  CHECK(cfg.trials == 2);
  CHECK(cfg.delta == 0.1);
  CHECK(cfg.sigma == 1.0);
  cfg.validate();

  nlohmann::json bad = j;
  bad["trials"] = 0;
  bad["delta"] = 0.9;
  bad["d_list"] = {8};
  auto c2 = ExperimentConfig::from_json(bad);
  try {
    c2.validate();
    FAIL("expected validation failure");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("trials") != std::string::npos);
    CHECK(msg.find("delta") != std::string::npos);
    CHECK(msg.find("d_list") != std::string::npos);
  }
  CHECK_THROWS_AS(ExperimentConfig::from_json({{"experiment", "bogus"}}),
                  ConfigError);
}

TEST_CASE("deterministic noiseless run succeeds and files appear") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::burnin_cost;
  cfg.link_json = {{"kind", "identity"}};
  cfg.d_list = {256};
  cfg.trials = 1;
  cfg.sigma = 0.0;
  cfg.seed = 42;
  cfg.T = 0;
  cfg.output_dir = "harness_test_out/a";
  auto res = run_experiment(cfg);
  REQUIRE(res.records.size() == 1);
  CHECK(res.records[0].success);
  CHECK(res.records[0].final_inner_product >= 0.5);
  CHECK(res.records[0].queries > 0);
  CHECK(fs::exists("harness_test_out/a/records.csv"));
  CHECK(fs::exists("harness_test_out/a/summary.json"));
}

TEST_CASE("same seed twice gives identical records modulo wall time") {
  for (const char* dir : {"harness_test_out/b1", "harness_test_out/b2"}) {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::burnin_cost;
    cfg.link_json = {{"kind", "identity"}};
    cfg.d_list = {64, 96};
    cfg.trials = 3;
    cfg.sigma = 1.0;
    cfg.seed = 99;
    cfg.output_dir = dir;
    run_experiment(cfg);
  }
  CHECK(stable_csv("harness_test_out/b1/records.csv") ==
        stable_csv("harness_test_out/b2/records.csv"));
}

TEST_CASE("serial run matches the threaded run") {
  auto run_with_threads = [&](const char* n, const char* dir) {
    setenv("RIDGELAB_THREADS", n, 1);
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::burnin_cost;
    cfg.link_json = {{"kind", "identity"}};
    cfg.d_list = {64};
    cfg.trials = 4;
    cfg.sigma = 1.0;
    cfg.seed = 5;
    cfg.output_dir = dir;
    run_experiment(cfg);
    unsetenv("RIDGELAB_THREADS");
  };
  run_with_threads("1", "harness_test_out/s1");
  run_with_threads("4", "harness_test_out/s4");
  CHECK(stable_csv("harness_test_out/s1/records.csv") ==
        stable_csv("harness_test_out/s4/records.csv"));
}

TEST_CASE("worker count honors the environment override") {
  setenv("RIDGELAB_THREADS", "3", 1);
  CHECK(worker_count() == 3);
  unsetenv("RIDGELAB_THREADS");
  CHECK(worker_count() >= 1);
}

TEST_CASE("burn-in cost estimator") {
  auto rec = [](long long q, bool ok) {
    TrialRecord r;
    r.queries = q;
    r.success = ok;
    return r;
  };
  std::vector<TrialRecord> recs;
  for (long long q : {10, 20, 30, 40, 50}) recs.push_back(rec(q, true));
  auto est = estimate_burnin_cost(recs);
  CHECK(est.median == doctest::Approx(30.0));
  CHECK(est.successes == 5);
  // Identical counts collapse the CI.
  std::vector<TrialRecord> same(6, rec(7, true));
  auto e2 = estimate_burnin_cost(same);
  CHECK(e2.ci_lo == doctest::Approx(7.0));
  CHECK(e2.ci_hi == doctest::Approx(7.0));
  // Too few successes.
  std::vector<TrialRecord> few{rec(1, true), rec(2, true), rec(3, false)};
  CHECK_THROWS_AS(estimate_burnin_cost(few), InsufficientSuccessError);
  // Low success rate.
  std::vector<TrialRecord> low;
  for (int i = 0; i < 6; ++i) low.push_back(rec(10, true));
  for (int i = 0; i < 6; ++i) low.push_back(rec(10, false));
  CHECK_THROWS_AS(estimate_burnin_cost(low), InsufficientSuccessError);
}

TEST_CASE("dimension scaling of the measured cost, identity link") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::burnin_cost;
  cfg.link_json = {{"kind", "identity"}};
  cfg.d_list = {256, 1024};
  cfg.trials = 8;
  cfg.sigma = 1.0;
  cfg.seed = 11;
  cfg.budget = 100000000000LL;  // the d=1024 cost (~2e10) exceeds the default
  cfg.output_dir = "harness_test_out/c";
  auto res = run_experiment(cfg);
  std::vector<TrialRecord> lo, hi;
  for (const auto& r : res.records) (r.d == 256 ? lo : hi).push_back(r);
  double m_lo = estimate_burnin_cost(lo).median;
  double m_hi = estimate_burnin_cost(hi).median;
  double ratio = m_hi / m_lo;
  CHECK(ratio >= 8.0);
  CHECK(ratio <= 32.0);
}

TEST_CASE("phase report on synthetic curves") {
  SUBCASE("two-phase curve") {
    std::vector<std::pair<double, double>> curve;
    for (double t = 1; t <= 100000; t *= 1.05)
      curve.emplace_back(t, std::min(t, 100.0 + 3.0 * std::sqrt(t)));
    auto rep = regret_phase_report(curve, 16);
    CHECK_FALSE(rep.single_phase);
    CHECK(rep.knee1 >= 80.0);
    CHECK(rep.knee1 <= 125.0);
    CHECK(rep.knee2 > rep.knee1);
  }
  SUBCASE("pure linear curve") {
    std::vector<std::pair<double, double>> curve;
    for (double t = 1; t <= 100000; t *= 1.05) curve.emplace_back(t, 2.0 * t);
    auto rep = regret_phase_report(curve, 16);
    CHECK(rep.single_phase);
    CHECK(rep.slope_linear == doctest::Approx(2.0).epsilon(1e-6));
  }
}

TEST_CASE("theory-curve experiment writes overlay files") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::theory_curves;
  cfg.link_json = {{"kind", "cubic"}};
  cfg.d_list = {100};
  cfg.T = 100000;
  cfg.output_dir = "harness_test_out/d";
  auto res = run_experiment(cfg);
  CHECK(res.records.empty());
  CHECK(fs::exists("harness_test_out/d/curves/lb_d100.csv"));
  CHECK(fs::exists("harness_test_out/d/curves/ub_d100.csv"));
  auto text = slurp("harness_test_out/d/curves/lb_d100.csv");
  CHECK(text.rfind("t,x,kind,d,link,c,delta", 0) == 0);
}

TEST_CASE("summary statistics round-trip against the raw records") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::burnin_cost;
  cfg.link_json = {{"kind", "identity"}};
  cfg.d_list = {64};
  cfg.trials = 6;
  cfg.sigma = 1.0;
  cfg.seed = 13;
  cfg.output_dir = "harness_test_out/e";
  auto res = run_experiment(cfg);
  int succ = 0;
  for (const auto& r : res.records) {
    succ += r.success ? 1 : 0;
    CHECK(r.final_inner_product >= -1.0);
    CHECK(r.final_inner_product <= 1.0);
    CHECK(r.queries > 0);
  }
  auto per_d = res.summary.at("per_d").at(0);
  CHECK(per_d.at("n").get<int>() == 6);
  CHECK(per_d.at("success_rate").get<double>() ==
        doctest::Approx(static_cast<double>(succ) / 6.0));
}
