#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ridgelab/baselines.hpp"
#include "ridgelab/burnin.hpp"
#include "ridgelab/learning.hpp"
#include "ridgelab/theory.hpp"

#include <json.hpp>

namespace ridgelab {

enum class ExperimentKind {
  burnin_cost,
  regret_curve,
  trajectory_overlay,
  baseline_headtohead,
  theory_curves,
};

enum class AlgorithmKind { two_stage, eluder_ucb, oracle_learner, nonadaptive };

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::burnin_cost;
  nlohmann::json link_json = {{"kind", "cubic"}};
  std::vector<int> d_list = {256};
  long long T = 0;          // learning-phase horizon (two_stage) or run length
  double delta = 0.1;
  double sigma = 1.0;
  int trials = 1;
  uint64_t seed = 1;
  AlgorithmKind algorithm = AlgorithmKind::two_stage;
  TieBreak tie_break = TieBreak::optimistic_search;
  OracleKind oracle = OracleKind::zero_online;
  OraclePolicy policy = OraclePolicy::play_estimate;
  LearnMode mode = LearnMode::regret_min;
  int packing_T0 = 10000;
  // constants
  double c = 1.0;
  double kappa = 4.0;
  std::optional<double> cf_lower_override;
  long long budget = 1000000000LL;  // per-trial query guard
  std::string output_dir = "out";

  static ExperimentConfig from_json(const nlohmann::json& j);
  // Throws ConfigError listing every offending field.
  void validate() const;
  LinkFunction link() const { return LinkFunction::from_json(link_json); }
};

struct TrialRecord {
  long long trial_id = 0;
  uint64_t seed = 0;
  int d = 0;
  std::string algorithm;
  long long queries = 0;
  bool success = false;
  double final_inner_product = 0.0;
  double max_inner_product = 0.0;
  double cum_regret = 0.0;
  double wall_time_ms = 0.0;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  nlohmann::json summary;
};

// Runs trials*|d_list| independent environments (trial k seeded with
// config.seed XOR hash(k)), in parallel across RIDGELAB_THREADS workers, and
// writes records.csv / summary.json / curves/*.csv under output_dir.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct BurninCostEstimate {
  double median = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  int successes = 0;
};
// Median and bootstrap 90% CI of query counts among successful records.
// Throws InsufficientSuccessError below 5 successes or 60% success rate.
BurninCostEstimate estimate_burnin_cost(const std::vector<TrialRecord>& records);

struct PhaseReport {
  double knee1 = 0.0;      // end of the linear segment
  double knee2 = 0.0;      // where sqrt growth overtakes the plateau level
  bool single_phase = false;
  double slope_linear = 0.0;
  double plateau = 0.0;
  double sqrt_coef = 0.0;
};
// Fits R(t) ~ min(a*t, P + c*sqrt(t)) on log-spaced knots of the curve.
PhaseReport regret_phase_report(
    const std::vector<std::pair<double, double>>& curve, int d);

std::string records_csv(const std::vector<TrialRecord>& records,
                        bool include_wall_time = true);
int worker_count();

}  // namespace ridgelab
