#include "ridgelab/baselines.hpp"

#include <cmath>

namespace ridgelab {

double ConfidenceSet::membership_lhs(const LinkFunction& f,
                                     const Vec& theta) const {
  double s = 0.0;
  for (const auto& [a, r] : history) {
    (void)r;
    double diff = f(std::clamp(dot(a, theta), -1.0, 1.0)) -
                  f(std::clamp(dot(a, center), -1.0, 1.0));
    s += diff * diff;
  }
  return s;
}

PackingSet PackingSet::build(Rng& rng, int d, int count, double c,
                             const Vec* theta_star) {
  if (count < 1 || d < 2) throw PreconditionError("PackingSet: bad parameters");
  PackingSet set;
  set.pairwise_bound = std::sqrt(c * std::log(static_cast<double>(count)) / d);
  set.points.reserve(count + 1);
  set.points.push_back(theta_star ? *theta_star : sample_sphere(rng, d));
  long long draw_cap = 10LL * (count + 1);
  long long draws = 0;
  while (static_cast<int>(set.points.size()) < count + 1) {
    if (++draws > draw_cap)
      throw SolverError("PackingSet: rejection sampling exceeded 10x budget");
    Vec cand = sample_sphere(rng, d);
    bool ok = true;
    for (const auto& p : set.points) {
      if (std::abs(dot(cand, p)) > set.pairwise_bound) {
        ok = false;
        break;
      }
    }
    if (ok) set.points.push_back(std::move(cand));
  }
  // Invariant assert: pairwise bound holds across the finished set (the
  // incremental checks above already cover all pairs; this re-verifies).
  for (size_t i = 0; i + 1 < set.points.size(); i += set.points.size() / 64 + 1)
    for (size_t j = i + 1; j < set.points.size(); ++j)
      if (std::abs(dot(set.points[i], set.points[j])) >
          set.pairwise_bound + 1e-12)
        throw SolverError("PackingSet: pairwise bound violated");
  return set;
}

namespace {

// Random-restart feasibility search: descend membership_lhs from a start
// until it drops inside the budget.
std::optional<Vec> find_member(const LinkFunction& f, const ConfidenceSet& set,
                               Vec start, int iters = 200) {
  if (set.history.empty()) return start;
  Vec theta = std::move(start);
  double obj = set.membership_lhs(f, theta);
  double step = 0.25;
  Vec grad(theta.size()), trial(theta.size());
  for (int it = 0; it < iters && obj > set.est_budget; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (const auto& [a, r] : set.history) {
      (void)r;
      double u = std::clamp(dot(a, theta), -1.0, 1.0);
      double uc = std::clamp(dot(a, set.center), -1.0, 1.0);
      double h = 1e-6;
      double fp = (f(std::min(u + h, 1.0)) - f(std::max(u - h, -1.0))) /
                  (std::min(u + h, 1.0) - std::max(u - h, -1.0));
      double ccoef = 2.0 * (f(u) - f(uc)) * fp;
      for (size_t i = 0; i < grad.size(); ++i) grad[i] += ccoef * a[i];
    }
    bool moved = false;
    for (int bt = 0; bt < 40; ++bt) {
      for (size_t i = 0; i < theta.size(); ++i)
        trial[i] = theta[i] - step * grad[i];
      double n = norm(trial);
      if (n < 1e-12) break;
      for (auto& x : trial) x /= n;
      double tobj = set.membership_lhs(f, trial);
      if (tobj < obj) {
        theta = trial;
        obj = tobj;
        step *= 1.3;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  if (obj <= set.est_budget) return theta;
  return std::nullopt;
}

}  // namespace

Vec eluder_ucb_step(const LinkFunction& f, const ConfidenceSet& set,
                    TieBreak tie_break, Rng& rng, const EluderUcbOptions& opts,
                    const PackingSet* packing, int* packing_cursor,
                    const Vec* theta_star, double t, bool* used_packing) {
  (void)t;
  if (used_packing) *used_packing = false;
  if (tie_break == TieBreak::adversarial_packing) {
    if (!packing || !packing_cursor || !theta_star)
      throw PreconditionError(
          "eluder_ucb_step: adversarial packing needs the packing set and "
          "theta*");
    // Enlarged-set test centered at theta* (the C_t' of the construction).
    while (*packing_cursor < static_cast<int>(packing->points.size())) {
      const Vec& cand = packing->points[*packing_cursor];
      double lhs = 0.0;
      for (const auto& [a, r] : set.history) {
        (void)r;
        double diff = f(std::clamp(dot(a, cand), -1.0, 1.0)) -
                      f(std::clamp(dot(a, *theta_star), -1.0, 1.0));
        lhs += diff * diff;
      }
      if (lhs <= set.est_budget) {
        ++*packing_cursor;
        if (used_packing) *used_packing = true;
        return cand;
      }
      ++*packing_cursor;  // infeasible point is burned, fall through
      break;
    }
  }
  // Optimistic search: any member of C_t is a valid argmax for monotone f
  // (theta itself attains f(1)). The center is always a member (lhs = 0).
  std::vector<Vec> found;
  for (int r = 0; r < opts.search_restarts; ++r) {
    auto cand =
        find_member(f, set, sample_sphere(rng, static_cast<int>(set.center.size())));
    if (cand) found.push_back(std::move(*cand));
  }
  if (!found.empty())
    return found[static_cast<size_t>(rng.next_u64() % found.size())];
  if (!set.center.empty() && norm(set.center) > 0.5) return set.center;
  throw SolverError("eluder_ucb_step: no confidence-set member found");
}

UcbRunSummary run_eluder_ucb(RidgeEnvironment& env, long long T,
                             TieBreak tie_break, Rng& rng,
                             const EluderUcbOptions& opts,
                             const PackingSet* packing) {
  if (T < 1) throw PreconditionError("run_eluder_ucb: T < 1");
  const LinkFunction& f = env.link();
  const int d = env.dim();
  ConfidenceSet set;
  set.center = sample_sphere(rng, d);
  UcbRunSummary summary;
  int cursor = (tie_break == TieBreak::adversarial_packing) ? 1 : 0;
  double regret0 = env.cumulative_regret();
  LsqOptions solver_opts;
  solver_opts.max_iters = 200;
  Vec last_action;
  for (long long t = 1; t <= T; ++t) {
    set.est_budget = opts.kappa * d * std::log(M_E * static_cast<double>(t));
    bool used_packing = false;
    Vec a = eluder_ucb_step(f, set, tie_break, rng, opts, packing, &cursor,
                            packing ? &env.theta_star() : nullptr,
                            static_cast<double>(t), &used_packing);
    if (tie_break == TieBreak::adversarial_packing) {
      if (used_packing)
        ++summary.packing_used;
      else {
        ++summary.fallbacks;
        summary.all_packing_feasible = false;
      }
    }
    double r = env.query(a);
    double ip = env.inner(a);
    summary.max_inner = std::max(summary.max_inner, ip);
    summary.final_inner = ip;
    set.history.emplace_back(std::move(a), r);
    if (t % opts.refit_interval == 0) {
      set.center = sphere_least_squares(set.history, f, opts.solver_restarts,
                                        rng, solver_opts, &set.center);
    }
  }
  summary.steps = T;
  summary.cum_regret = env.cumulative_regret() - regret0;
  return summary;
}

Vec zero_online_oracle(int d) { return Vec(d, 0.0); }

Vec random_offline_oracle(Rng& rng, int d) { return sample_sphere(rng, d); }

OracleRunSummary run_oracle_learner(RidgeEnvironment& env, OracleKind oracle,
                                    OraclePolicy policy, long long T,
                                    Rng& rng) {
  if (T < 1) throw PreconditionError("run_oracle_learner: T < 1");
  const int d = env.dim();
  const LinkFunction& f = env.link();
  OracleRunSummary summary;
  summary.est_budget = 4.0 * d * std::log(M_E * static_cast<double>(T));
  Vec estimate(d, 0.0);  // theta_hat available when the action is chosen
  bool have_estimate = (oracle == OracleKind::zero_online);
  for (long long t = 1; t <= T; ++t) {
    Vec base = have_estimate ? estimate : Vec(d, 0.0);
    Vec a;
    if (policy == OraclePolicy::play_estimate) {
      a = base;
    } else {
      // Perturbation of weight 1/sqrt(d) orthogonal to the estimate.
      Vec u;
      double bn = norm(base);
      if (bn > 1e-9) {
        DirectionBasis basis(d);
        Vec bu = base;
        for (auto& x : bu) x /= bn;
        basis.insert(bu);
        u = sample_complement(rng, basis);
        double w = 1.0 / std::sqrt(static_cast<double>(d));
        a = add_scaled(base, std::sqrt(std::max(0.0, 1.0 - w * w)) / bn, u, w);
      } else {
        u = sample_sphere(rng, d);
        double w = 1.0 / std::sqrt(static_cast<double>(d));
        a = add_scaled(u, w, u, 0.0);  // w * u
      }
    }
    (void)env.query(a);  // reward observed by the environment, never used
    double ip = env.inner(a);
    summary.max_inner = std::max(summary.max_inner, ip);
    summary.final_inner = ip;
    // Oracle emits its estimate: online before the round (already had it),
    // offline at the end of the round.
    Vec emitted;
    if (oracle == OracleKind::zero_online) {
      emitted = estimate;  // zero
    } else {
      estimate = random_offline_oracle(rng, d);
      have_estimate = true;
      emitted = estimate;
    }
    double diff = f(std::clamp(ip, -1.0, 1.0)) -
                  f(std::clamp(dot(a, emitted), -1.0, 1.0));
    summary.residual += diff * diff;
  }
  summary.steps = T;
  summary.residual_ok = summary.residual <= summary.est_budget;
  return summary;
}

NonadaptiveSummary run_nonadaptive(RidgeEnvironment& env, long long T, Rng& rng,
                                   int restarts) {
  const int d = env.dim();
  if (T < d) throw PreconditionError("run_nonadaptive: T < d");
  std::vector<Vec> actions;
  actions.reserve(T);
  for (long long t = 0; t < T; ++t) actions.push_back(sample_sphere(rng, d));
  std::vector<std::pair<Vec, double>> history;
  history.reserve(T);
  for (auto& a : actions) {
    double r = env.query(a);
    history.emplace_back(std::move(a), r);
  }
  NonadaptiveSummary out;
  out.theta_hat = sphere_least_squares(history, env.link(), restarts, rng);
  out.final_inner = env.inner(out.theta_hat);
  out.queries = T;
  return out;
}

}  // namespace ridgelab
