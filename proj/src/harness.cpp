#include "ridgelab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace ridgelab {

namespace {

const char* experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::burnin_cost: return "burnin_cost";
    case ExperimentKind::regret_curve: return "regret_curve";
    case ExperimentKind::trajectory_overlay: return "trajectory_overlay";
    case ExperimentKind::baseline_headtohead: return "baseline_headtohead";
    case ExperimentKind::theory_curves: return "theory_curves";
  }
  return "?";
}

const char* algorithm_name(AlgorithmKind a) {
  switch (a) {
    case AlgorithmKind::two_stage: return "two_stage";
    case AlgorithmKind::eluder_ucb: return "eluder_ucb";
    case AlgorithmKind::oracle_learner: return "oracle_learner";
    case AlgorithmKind::nonadaptive: return "nonadaptive";
  }
  return "?";
}

template <typename T>
T parse_enum(const std::string& v, std::initializer_list<std::pair<const char*, T>> names,
             const std::string& field, std::vector<std::string>& errors) {
  for (const auto& [n, val] : names)
    if (v == n) return val;
  errors.push_back(field + ": unknown value \"" + v + "\"");
  return names.begin()->second;
}

struct WilsonCI {
  double lo, hi;
};
WilsonCI wilson(int successes, int n, double z = 1.96) {
  if (n == 0) return {0.0, 1.0};
  double p = static_cast<double>(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double fitted_loglog_slope(const std::vector<std::pair<double, double>>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& [x, y] : pts) {
    if (!(x > 0) || !(y > 0)) continue;
    double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  std::vector<std::string> errors;
  ExperimentConfig c;
  auto has = [&](const char* k) { return j.contains(k); };
  try {
    if (has("experiment"))
      c.experiment = parse_enum<ExperimentKind>(
          j.at("experiment").get<std::string>(),
          {{"burnin_cost", ExperimentKind::burnin_cost},
           {"regret_curve", ExperimentKind::regret_curve},
           {"trajectory_overlay", ExperimentKind::trajectory_overlay},
           {"baseline_headtohead", ExperimentKind::baseline_headtohead},
           {"theory_curves", ExperimentKind::theory_curves}},
          "experiment", errors);
    if (has("link")) c.link_json = j.at("link");
    if (has("d_list")) c.d_list = j.at("d_list").get<std::vector<int>>();
    if (has("T")) c.T = j.at("T").get<long long>();
    if (has("delta")) c.delta = j.at("delta").get<double>();
    if (has("sigma")) c.sigma = j.at("sigma").get<double>();
    if (has("trials")) c.trials = j.at("trials").get<int>();
    if (has("seed")) c.seed = j.at("seed").get<uint64_t>();
    if (has("algorithm"))
      c.algorithm = parse_enum<AlgorithmKind>(
          j.at("algorithm").get<std::string>(),
          {{"two_stage", AlgorithmKind::two_stage},
           {"eluder_ucb", AlgorithmKind::eluder_ucb},
           {"oracle_learner", AlgorithmKind::oracle_learner},
           {"nonadaptive", AlgorithmKind::nonadaptive}},
          "algorithm", errors);
    if (has("tie_break"))
      c.tie_break = parse_enum<TieBreak>(
          j.at("tie_break").get<std::string>(),
          {{"optimistic_search", TieBreak::optimistic_search},
           {"adversarial_packing", TieBreak::adversarial_packing}},
          "tie_break", errors);
    if (has("oracle"))
      c.oracle = parse_enum<OracleKind>(
          j.at("oracle").get<std::string>(),
          {{"zero_online", OracleKind::zero_online},
           {"random_offline", OracleKind::random_offline}},
          "oracle", errors);
    if (has("policy"))
      c.policy = parse_enum<OraclePolicy>(
          j.at("policy").get<std::string>(),
          {{"play_estimate", OraclePolicy::play_estimate},
           {"estimate_plus_perturbation",
            OraclePolicy::estimate_plus_perturbation}},
          "policy", errors);
    if (has("mode"))
      c.mode = parse_enum<LearnMode>(
          j.at("mode").get<std::string>(),
          {{"estimation", LearnMode::estimation},
           {"regret", LearnMode::regret_min}},
          "mode", errors);
    if (has("packing_T0")) c.packing_T0 = j.at("packing_T0").get<int>();
    if (has("constants")) {
      const auto& k = j.at("constants");
      if (k.contains("c")) c.c = k.at("c").get<double>();
      if (k.contains("kappa")) c.kappa = k.at("kappa").get<double>();
      if (k.contains("cf_lower"))
        c.cf_lower_override = k.at("cf_lower").get<double>();
    }
    if (has("budget")) c.budget = j.at("budget").get<long long>();
    if (has("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!errors.empty()) {
    std::string msg = "config errors:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  return c;
}

void ExperimentConfig::validate() const {
  std::vector<std::string> errors;
  if (trials < 1) errors.push_back("trials: must be >= 1");
  if (d_list.empty()) errors.push_back("d_list: must be nonempty");
  for (int d : d_list)
    if (d < 16) errors.push_back("d_list: dimensions must be >= 16");
  if (!(delta > 0 && delta < 0.5))
    errors.push_back("delta: must lie in (0, 1/2)");
  if (sigma < 0) errors.push_back("sigma: must be >= 0");
  if (T < 0) errors.push_back("T: must be >= 0");
  if (budget < 1) errors.push_back("budget: must be >= 1");
  if (!(c > 0)) errors.push_back("constants.c: must be > 0");
  if (!(kappa > 0)) errors.push_back("constants.kappa: must be > 0");
  if (cf_lower_override && !(*cf_lower_override > 0))
    errors.push_back("constants.cf_lower: must be > 0");
  if (packing_T0 < 1) errors.push_back("packing_T0: must be >= 1");
  try {
    (void)link();
  } catch (const std::exception& e) {
    errors.push_back(std::string("link: ") + e.what());
  }
  if (!errors.empty()) {
    std::string msg = "config errors:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
}

int worker_count() {
  if (const char* env = std::getenv("RIDGELAB_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

namespace {

struct TrialOutput {
  TrialRecord record;
  std::vector<TrajectoryEntry> trajectory;  // captured for trial 0 per d
};

TrialOutput run_one_trial(const ExperimentConfig& cfg, const LinkFunction& link,
                          long long trial_id, int d, bool capture_curve) {
  auto t0 = std::chrono::steady_clock::now();
  uint64_t trial_seed = cfg.seed ^ Rng::hash(static_cast<uint64_t>(trial_id));
  Rng env_rng(trial_seed);
  Rng algo_rng(Rng::hash(trial_seed ^ 0x5eedULL));
  RidgeEnvironment env =
      RidgeEnvironment::spawn(d, link, cfg.sigma, env_rng);
  bool even = link.parity() == LinkParity::even;
  long long thin = std::max<long long>(1, cfg.T / 4096);
  if (!capture_curve) thin = std::max<long long>(thin, 1 << 20);
  env.set_log_every(thin);

  TrialRecord rec;
  rec.trial_id = trial_id;
  rec.seed = trial_seed;
  rec.d = d;
  rec.algorithm = algorithm_name(cfg.algorithm);

  switch (cfg.algorithm) {
    case AlgorithmKind::two_stage: {
      BurninOptions bopts;
      bopts.budget = cfg.budget;
      BurninResult br = even ? run_burnin_even(env, algo_rng, cfg.delta, bopts)
                             : run_burnin(env, algo_rng, cfg.delta, bopts);
      double a0_inner = br.failed ? 0.0 : env.inner(br.a0);
      rec.success = !br.failed && (even ? std::abs(a0_inner) : a0_inner) >= 0.5;
      rec.final_inner_product = a0_inner;
      if (rec.success && cfg.T > 0) {
        Vec anchor = br.a0;
        if (even && a0_inner < 0)
          for (auto& x : anchor) x = -x;
        LearnOutcome lo = run_learning(env, anchor, cfg.T, cfg.mode,
                                       cfg.cf_lower_override, algo_rng);
        rec.final_inner_product = env.inner(lo.theta_hat);
      }
      break;
    }
    case AlgorithmKind::eluder_ucb: {
      long long T = std::max<long long>(1, cfg.T);
      EluderUcbOptions opts;
      opts.kappa = cfg.kappa;
      opts.refit_interval = static_cast<int>(std::max<long long>(1, T / 256));
      std::optional<PackingSet> packing;
      if (cfg.tie_break == TieBreak::adversarial_packing) {
        Rng prng(Rng::hash(trial_seed ^ 0x9ac81e5eULL));
        packing = PackingSet::build(prng, d, cfg.packing_T0, 16.0,
                                    &env.theta_star());
      }
      UcbRunSummary s = run_eluder_ucb(env, T, cfg.tie_break, algo_rng, opts,
                                       packing ? &*packing : nullptr);
      rec.success = s.max_inner >= 0.5;
      rec.final_inner_product = s.final_inner;
      break;
    }
    case AlgorithmKind::oracle_learner: {
      long long T = std::max<long long>(1, cfg.T);
      OracleRunSummary s =
          run_oracle_learner(env, cfg.oracle, cfg.policy, T, algo_rng);
      rec.success = s.max_inner >= 0.5;
      rec.final_inner_product = s.final_inner;
      break;
    }
    case AlgorithmKind::nonadaptive: {
      long long T = std::max<long long>(d, cfg.T);
      NonadaptiveSummary s = run_nonadaptive(env, T, algo_rng);
      rec.success = s.final_inner >= 0.5;
      rec.final_inner_product = s.final_inner;
      break;
    }
  }
  rec.queries = env.queries();
  rec.max_inner_product = env.max_inner();
  rec.cum_regret = env.cumulative_regret();
  auto t1 = std::chrono::steady_clock::now();
  rec.wall_time_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  TrialOutput out;
  out.record = std::move(rec);
  if (capture_curve) out.trajectory = env.trajectory();
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  LinkFunction link = cfg.link();
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  fs::create_directories(fs::path(cfg.output_dir) / "curves");

  ExperimentResult result;
  const bool run_trials = cfg.experiment != ExperimentKind::theory_curves;

  std::vector<std::pair<int, int>> tasks;  // (d_index, trial)
  if (run_trials) {
    for (size_t di = 0; di < cfg.d_list.size(); ++di)
      for (int t = 0; t < cfg.trials; ++t)
        tasks.emplace_back(static_cast<int>(di), t);
  }
  std::vector<TrialOutput> outputs(tasks.size());
  if (!tasks.empty()) {
    // Pre-warm the (d, m) calibration cache serially so workers share it.
    if (cfg.algorithm == AlgorithmKind::two_stage)
      for (int d : cfg.d_list) (void)anticoncentration_constant(d, (d + 15) / 16);
    std::atomic<size_t> next{0};
    int workers = std::min<int>(worker_count(), static_cast<int>(tasks.size()));
    auto work = [&]() {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= tasks.size()) break;
        auto [di, t] = tasks[i];
        long long trial_id =
            static_cast<long long>(di) * cfg.trials + t;
        outputs[i] = run_one_trial(cfg, link, trial_id, cfg.d_list[di], t == 0);
      }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
  }
  for (auto& o : outputs) result.records.push_back(o.record);
  std::sort(result.records.begin(), result.records.end(),
            [](const TrialRecord& a, const TrialRecord& b) {
              return a.trial_id < b.trial_id;
            });

  // Summary statistics.
  nlohmann::json summary;
  summary["experiment"] = experiment_name(cfg.experiment);
  summary["algorithm"] = algorithm_name(cfg.algorithm);
  summary["link"] = cfg.link_json;
  summary["seed"] = cfg.seed;
  summary["trials"] = cfg.trials;
  nlohmann::json per_d = nlohmann::json::array();
  std::vector<std::pair<double, double>> slope_pts;
  for (size_t di = 0; di < cfg.d_list.size() && run_trials; ++di) {
    int d = cfg.d_list[di];
    std::vector<TrialRecord> recs;
    for (const auto& r : result.records)
      if (r.d == d) recs.push_back(r);
    int succ = 0;
    double mean_final = 0, mean_regret = 0;
    for (const auto& r : recs) {
      succ += r.success ? 1 : 0;
      mean_final += r.final_inner_product;
      mean_regret += r.cum_regret;
    }
    int n = static_cast<int>(recs.size());
    if (n > 0) {
      mean_final /= n;
      mean_regret /= n;
    }
    WilsonCI ci = wilson(succ, n);
    nlohmann::json jd;
    jd["d"] = d;
    jd["n"] = n;
    jd["success_rate"] = n ? static_cast<double>(succ) / n : 0.0;
    jd["success_ci"] = {ci.lo, ci.hi};
    jd["mean_final_inner"] = mean_final;
    jd["mean_cum_regret"] = mean_regret;
    try {
      BurninCostEstimate est = estimate_burnin_cost(recs);
      jd["median_queries"] = est.median;
      jd["queries_ci90"] = {est.ci_lo, est.ci_hi};
      slope_pts.emplace_back(static_cast<double>(d), est.median);
    } catch (const InsufficientSuccessError&) {
      jd["median_queries"] = nullptr;
      jd["flagged_low_success"] = true;
    }
    per_d.push_back(jd);
  }
  summary["per_d"] = per_d;
  if (slope_pts.size() >= 2)
    summary["fitted_slope"] = fitted_loglog_slope(slope_pts);

  // Curves.
  for (size_t i = 0; i < tasks.size(); ++i) {
    if (tasks[i].second != 0) continue;
    int d = cfg.d_list[tasks[i].first];
    std::ofstream os(fs::path(cfg.output_dir) / "curves" /
                     ("measured_d" + std::to_string(d) + ".csv"));
    os << "t,x,kind,d,link,c,delta\n";
    double running_max = -1.0;
    for (const auto& e : outputs[i].trajectory) {
      running_max = std::max(running_max, e.inner);
      os << e.t << ',' << running_max << ",measured," << d << ','
         << link.name() << ',' << cfg.c << ',' << cfg.delta << '\n';
    }
  }
  if (cfg.experiment == ExperimentKind::theory_curves ||
      cfg.experiment == ExperimentKind::trajectory_overlay) {
    for (int d : cfg.d_list) {
      long long t_max = cfg.T > 0 ? cfg.T : 1000000;
      TrajectoryCurve lb =
          lb_epsilon_sequence(link, d, cfg.c, std::max(cfg.delta, 1e-6), t_max);
      std::ofstream lbos(fs::path(cfg.output_dir) / "curves" /
                         ("lb_d" + std::to_string(d) + ".csv"));
      export_curve_csv(lb, lbos);
      TrajectoryCurve ub = ub_trajectory_ode(
          link, d, std::sqrt(cfg.c / d), t_max,
          std::max<long long>(1, t_max / 4096));
      std::ofstream ubos(fs::path(cfg.output_dir) / "curves" /
                         ("ub_d" + std::to_string(d) + ".csv"));
      export_curve_csv(ub, ubos);
    }
  }

  // records.csv
  {
    std::ofstream os(fs::path(cfg.output_dir) / "records.csv");
    os << records_csv(result.records);
  }
  result.summary = summary;
  {
    std::ofstream os(fs::path(cfg.output_dir) / "summary.json");
    os << summary.dump(2) << '\n';
  }
  return result;
}

std::string records_csv(const std::vector<TrialRecord>& records,
                        bool include_wall_time) {
  std::ostringstream os;
  os << "trial_id,seed,d,algorithm,queries,success,final_inner_product,"
        "max_inner_product,cum_regret";
  if (include_wall_time) os << ",wall_time_ms";
  os << '\n';
  os.precision(17);
  for (const auto& r : records) {
    os << r.trial_id << ',' << r.seed << ',' << r.d << ',' << r.algorithm
       << ',' << r.queries << ',' << (r.success ? 1 : 0) << ','
       << r.final_inner_product << ',' << r.max_inner_product << ','
       << r.cum_regret;
    if (include_wall_time) os << ',' << r.wall_time_ms;
    os << '\n';
  }
  return os.str();
}

BurninCostEstimate estimate_burnin_cost(
    const std::vector<TrialRecord>& records) {
  std::vector<double> q;
  for (const auto& r : records)
    if (r.success) q.push_back(static_cast<double>(r.queries));
  int n = static_cast<int>(records.size());
  if (static_cast<int>(q.size()) < 5 ||
      (n > 0 && q.size() < 0.6 * n))
    throw InsufficientSuccessError(
        "estimate_burnin_cost: fewer than 5 successes or <60% success rate");
  std::sort(q.begin(), q.end());
  auto median_of = [](std::vector<double>& v) {
    size_t k = v.size();
    std::sort(v.begin(), v.end());
    return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
  };
  std::vector<double> tmp = q;
  BurninCostEstimate est;
  est.median = median_of(tmp);
  est.successes = static_cast<int>(q.size());
  Rng rng(1234);
  std::vector<double> medians;
  std::vector<double> sample(q.size());
  for (int b = 0; b < 1000; ++b) {
    for (auto& s : sample)
      s = q[static_cast<size_t>(rng.next_u64() % q.size())];
    medians.push_back(median_of(sample));
  }
  std::sort(medians.begin(), medians.end());
  est.ci_lo = medians[static_cast<size_t>(0.05 * (medians.size() - 1))];
  est.ci_hi = medians[static_cast<size_t>(0.95 * (medians.size() - 1))];
  return est;
}

PhaseReport regret_phase_report(
    const std::vector<std::pair<double, double>>& curve, int d) {
  (void)d;
  if (curve.size() < 8)
    throw PreconditionError("regret_phase_report: curve too short");
  // Log-spaced knots over the curve.
  std::vector<std::pair<double, double>> knots;
  double t_lo = std::max(1.0, curve.front().first);
  double t_hi = curve.back().first;
  const int K = 128;
  size_t j = 0;
  for (int k = 0; k <= K; ++k) {
    double t = t_lo * std::pow(t_hi / t_lo, static_cast<double>(k) / K);
    while (j + 1 < curve.size() && curve[j + 1].first <= t) ++j;
    if (knots.empty() || curve[j].first > knots.back().first)
      knots.push_back(curve[j]);
  }
  auto linear_fit_through_origin = [](const std::vector<std::pair<double, double>>& pts,
                                      size_t lo, size_t hi) {
    double num = 0, den = 0;
    for (size_t i = lo; i < hi; ++i) {
      num += pts[i].first * pts[i].second;
      den += pts[i].first * pts[i].first;
    }
    return den > 0 ? num / den : 0.0;
  };
  auto sse_linear = [&](double a, size_t lo, size_t hi) {
    double s = 0;
    for (size_t i = lo; i < hi; ++i) {
      double e = knots[i].second - a * knots[i].first;
      s += e * e;
    }
    return s;
  };
  // Pure linear baseline.
  double a_all = linear_fit_through_origin(knots, 0, knots.size());
  double sse_all = sse_linear(a_all, 0, knots.size());

  PhaseReport best;
  double best_sse = std::numeric_limits<double>::infinity();
  for (size_t split = 2; split + 2 < knots.size(); ++split) {
    double a = linear_fit_through_origin(knots, 0, split);
    // Fit P + c*sqrt(t) on the tail.
    double s1 = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (size_t i = split; i < knots.size(); ++i) {
      double x = std::sqrt(knots[i].first), y = knots[i].second;
      s1 += 1;
      sx += x;
      sxx += x * x;
      sy += y;
      sxy += x * y;
    }
    double det = s1 * sxx - sx * sx;
    if (std::abs(det) < 1e-12) continue;
    double P = (sy * sxx - sx * sxy) / det;
    double cc = (s1 * sxy - sx * sy) / det;
    if (cc < 0) cc = 0, P = sy / s1;
    double sse = sse_linear(a, 0, split);
    for (size_t i = split; i < knots.size(); ++i) {
      double e = knots[i].second - (P + cc * std::sqrt(knots[i].first));
      e = std::min(std::abs(e), std::abs(knots[i].second - a * knots[i].first));
      sse += e * e;
    }
    if (sse < best_sse && a > 0 && P > 0) {
      best_sse = sse;
      best.slope_linear = a;
      best.plateau = P;
      best.sqrt_coef = cc;
      best.knee1 = P / a;
      best.knee2 = cc > 0 ? (P / cc) * (P / cc) : t_hi;
    }
  }
  if (!(best_sse < 0.95 * sse_all)) {
    best.single_phase = true;
    best.slope_linear = a_all;
    best.knee1 = best.knee2 = 0.0;
  }
  return best;
}

}  // namespace ridgelab
