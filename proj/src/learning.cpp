#include "ridgelab/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace ridgelab {

Vec explore_action(const Vec& a0, int d, long long t) {
  if (static_cast<int>(a0.size()) != d)
    throw PreconditionError("explore_action: dimension mismatch");
  Vec a(d);
  for (int i = 0; i < d; ++i) a[i] = 0.75 * a0[i];
  a[static_cast<int>(t % d)] += 0.25;
  return a;
}

namespace {

struct Group {
  Vec a;
  double w;     // multiplicity
  double rbar;  // mean reward over the multiplicity
};

double fd_slope(const LinkFunction& f, double u, double h) {
  double hi = std::min(u + h, 1.0);
  double lo = std::max(u - h, -1.0);
  return (f(hi) - f(lo)) / (hi - lo);
}

double objective(const std::vector<Group>& groups, const LinkFunction& f,
                 const Vec& theta) {
  double obj = 0.0;
  for (const auto& g : groups) {
    double u = std::clamp(dot(theta, g.a), -1.0, 1.0);
    double r = f(u) - g.rbar;
    obj += g.w * r * r;
  }
  return obj;
}

void gradient(const std::vector<Group>& groups, const LinkFunction& f,
              const Vec& theta, double fd_h, Vec& out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& g : groups) {
    double u = std::clamp(dot(theta, g.a), -1.0, 1.0);
    double c = 2.0 * g.w * (f(u) - g.rbar) * fd_slope(f, u, fd_h);
    for (size_t i = 0; i < out.size(); ++i) out[i] += c * g.a[i];
  }
}

// Project onto {||theta|| = 1} and, unless sphere_only, onto the half-space
// <theta, a0> >= 1/2 by rotating within span(theta, a0) to the boundary.
void project_feasible(Vec& theta, const Vec* a0, bool sphere_only) {
  double n = norm(theta);
  if (n <= 1e-300) {
    theta.assign(theta.size(), 0.0);
    theta[0] = 1.0;
    if (!sphere_only && a0) theta = *a0;
    return;
  }
  for (auto& x : theta) x /= n;
  if (sphere_only || !a0) return;
  double c = dot(theta, *a0);
  if (c >= 0.5) return;
  Vec w = add_scaled(theta, 1.0, *a0, -c);
  double wn = norm(w);
  if (wn <= 1e-12) {
    // theta is (anti)parallel to a0; pick a deterministic orthogonal
    // direction to rotate through.
    w.assign(theta.size(), 0.0);
    size_t k = 0;
    for (size_t i = 1; i < a0->size(); ++i)
      if (std::abs((*a0)[i]) < std::abs((*a0)[k])) k = i;
    w[k] = 1.0;
    double p = dot(w, *a0);
    for (size_t i = 0; i < w.size(); ++i) w[i] -= p * (*a0)[i];
    wn = norm(w);
  }
  const double t = std::sqrt(3.0) / 2.0;  // sin of the boundary angle
  for (size_t i = 0; i < theta.size(); ++i)
    theta[i] = 0.5 * (*a0)[i] + t * w[i] / wn;
}

Vec descend(const std::vector<Group>& groups, const LinkFunction& f, Vec theta,
            const Vec* a0, const LsqOptions& opts) {
  project_feasible(theta, a0, opts.sphere_only);
  double obj = objective(groups, f, theta);
  const size_t n = theta.size();
  Vec grad(n), trial(n), rgrad(n), prev_theta, prev_rgrad;
  double step = 0.25;
  for (int it = 0; it < opts.max_iters; ++it) {
    gradient(groups, f, theta, opts.fd_h, grad);
    // Riemannian (tangential) gradient as the descent direction and
    // stationarity measure.
    double gc = dot(grad, theta);
    double rg2 = 0.0;
    for (size_t i = 0; i < n; ++i) {
      rgrad[i] = grad[i] - gc * theta[i];
      rg2 += rgrad[i] * rgrad[i];
    }
    if (std::sqrt(rg2) <= opts.grad_tol) break;
    // Barzilai-Borwein spectral step (long form); it adapts to the strong
    // anisotropy of anchored designs far better than a fixed schedule.
    if (!prev_theta.empty()) {
      double sy = 0.0, ss = 0.0;
      for (size_t i = 0; i < n; ++i) {
        double s = theta[i] - prev_theta[i];
        double y = rgrad[i] - prev_rgrad[i];
        ss += s * s;
        sy += s * y;
      }
      if (sy > 1e-300) step = std::clamp(ss / sy, 1e-12, 1e6);
    }
    prev_theta = theta;
    prev_rgrad = rgrad;
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (size_t i = 0; i < n; ++i) trial[i] = theta[i] - step * rgrad[i];
      project_feasible(trial, a0, opts.sphere_only);
      double trial_obj = objective(groups, f, trial);
      if (trial_obj < obj) {
        theta = trial;
        obj = trial_obj;
        moved = true;
        break;
      }
      step *= 0.5;
      if (step < 1e-18) break;
    }
    if (!moved) break;
  }
  return theta;
}

Vec solve_groups(const std::vector<Group>& groups, const LinkFunction& f,
                 const Vec* a0, int restarts, Rng& rng, const LsqOptions& opts,
                 const Vec* warm_start) {
  if (groups.empty())
    throw PreconditionError("least squares: empty history");
  int d = static_cast<int>(groups.front().a.size());
  std::vector<Vec> starts;
  if (a0 && !opts.sphere_only) starts.push_back(*a0);
  if (warm_start) starts.push_back(*warm_start);
  for (int r = 0; r < restarts; ++r) starts.push_back(sample_sphere(rng, d));
  if (starts.empty()) starts.push_back(sample_sphere(rng, d));
  Vec best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (auto& s : starts) {
    Vec theta = descend(groups, f, std::move(s), a0, opts);
    double obj = objective(groups, f, theta);
    if (obj < best_obj) {
      best_obj = obj;
      best = std::move(theta);
    }
  }
  return best;
}

std::vector<Group> group_history(
    const std::vector<std::pair<Vec, double>>& history, bool clip) {
  std::map<Vec, std::pair<double, double>> merged;  // action -> (count, sum r)
  for (const auto& [a, r] : history) {
    double rr = clip ? std::clamp(r, -10.0, 10.0) : r;
    auto& slot = merged[a];
    slot.first += 1.0;
    slot.second += rr;
  }
  std::vector<Group> groups;
  groups.reserve(merged.size());
  for (auto& [a, cs] : merged)
    groups.push_back({a, cs.first, cs.second / cs.first});
  return groups;
}

double estimate_cf_lower(const LinkFunction& f) {
  double best = std::numeric_limits<double>::infinity();
  const double h = 1e-3;
  for (int i = 0; i < 512; ++i) {
    double z = 0.1 + (0.9 - h) * i / 511.0;
    best = std::min(best, (f(z + h) - f(z)) / h);
  }
  return std::max(best, 1e-6);
}

}  // namespace

Vec constrained_least_squares(const std::vector<std::pair<Vec, double>>& history,
                              const LinkFunction& link, const Vec& a0,
                              int restarts, Rng& rng, const LsqOptions& opts,
                              const Vec* warm_start) {
  auto groups = group_history(history, opts.clip_rewards);
  LsqOptions o = opts;
  o.sphere_only = false;
  return solve_groups(groups, link, &a0, restarts, rng, o, warm_start);
}

Vec sphere_least_squares(const std::vector<std::pair<Vec, double>>& history,
                         const LinkFunction& link, int restarts, Rng& rng,
                         const LsqOptions& opts, const Vec* warm_start) {
  auto groups = group_history(history, opts.clip_rewards);
  LsqOptions o = opts;
  o.sphere_only = true;
  return solve_groups(groups, link, nullptr, restarts, rng, o, warm_start);
}

LearnOutcome run_learning(QueryInterface& env, const Vec& a0, long long T,
                          LearnMode mode, std::optional<double> cf_lower,
                          Rng& rng, const LsqOptions& opts) {
  if (T < 1) throw PreconditionError("run_learning: T < 1");
  const int d = env.dim();
  const LinkFunction& f = env.link();
  long long m = T;
  if (mode == LearnMode::regret_min) {
    double cf = cf_lower ? *cf_lower
                         : (f.cf_lower() ? *f.cf_lower() : estimate_cf_lower(f));
    double bound = std::ceil(d * std::sqrt(static_cast<double>(T)) / cf);
    m = std::min<long long>(T, static_cast<long long>(bound));
  }
  const long long start_queries = env.queries();

  // The cyclic explore schedule revisits exactly d actions; accumulate the
  // sufficient statistics directly.
  std::vector<Group> groups;
  groups.reserve(d);
  for (int k = 0; k < d; ++k) groups.push_back({Vec(), 0.0, 0.0});
  for (long long t = 1; t <= m; ++t) {
    int k = static_cast<int>(t % d);
    Vec a = explore_action(a0, d, t);
    double r = env.query(a);
    if (opts.clip_rewards) r = std::clamp(r, -10.0, 10.0);
    if (groups[k].a.empty()) groups[k].a = std::move(a);
    groups[k].w += 1.0;
    groups[k].rbar += r;
  }
  std::vector<Group> used;
  for (auto& g : groups) {
    if (g.w > 0) {
      g.rbar /= g.w;
      used.push_back(std::move(g));
    }
  }
  LsqOptions o = opts;
  o.sphere_only = false;
  Vec theta_hat = solve_groups(used, f, &a0, opts.restarts, rng, o, &a0);

  if (T > m) env.query_batch(theta_hat, T - m);

  LearnOutcome out;
  out.theta_hat = std::move(theta_hat);
  out.m_explore = m;
  out.total_queries = env.queries() - start_queries;
  // cumulative_regret / estimation_gap are diagnostics the harness fills from
  // the environment ledger; a learner cannot compute them.
  out.cumulative_regret = 0.0;
  out.estimation_gap = std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace ridgelab
