#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ridgelab/env.hpp"
#include "ridgelab/geometry.hpp"

namespace ridgelab {

// t-th explore action (3*a0 + e_{t mod d})/4, t >= 1; period exactly d.
Vec explore_action(const Vec& a0, int d, long long t);

struct LsqOptions {
  int restarts = 8;       // random feasible starts, besides a0 and warm start
  int max_iters = 2000;
  double grad_tol = 1e-8;
  double fd_h = 1e-6;     // finite-difference step for f'
  bool clip_rewards = false;  // clip to [-10, 10] before fitting
  // When true the half-space constraint <theta, a0> >= 1/2 is dropped and the
  // fit runs over the whole sphere (used by baselines).
  bool sphere_only = false;
};

// argmin over {theta on the sphere, <theta, a0> >= 1/2} of
// sum_t (f(<theta, a_t>) - r_t)^2 by projected gradient descent with
// restarts. Identical actions are merged into weighted groups internally
// (same argmin, large speedup for cyclic explore histories).
Vec constrained_least_squares(const std::vector<std::pair<Vec, double>>& history,
                              const LinkFunction& link, const Vec& a0,
                              int restarts, Rng& rng,
                              const LsqOptions& opts = {},
                              const Vec* warm_start = nullptr);

// Sphere-constrained fit with no half-space (baseline regression).
Vec sphere_least_squares(const std::vector<std::pair<Vec, double>>& history,
                         const LinkFunction& link, int restarts, Rng& rng,
                         const LsqOptions& opts = {},
                         const Vec* warm_start = nullptr);

enum class LearnMode { estimation, regret_min };

struct LearnOutcome {
  Vec theta_hat;
  long long m_explore = 0;
  long long total_queries = 0;
  double cumulative_regret = 0.0;  // regret accrued during this phase
  double estimation_gap = 0.0;     // 1 - <theta*, theta_hat>, harness-filled
};

// Explore-then-commit: m = T (estimation) or min{T, ceil(d*sqrt(T)/c_f)}
// (regret minimization) explore rounds, then the constrained LS estimate is
// played for the remaining rounds.
LearnOutcome run_learning(QueryInterface& env, const Vec& a0, long long T,
                          LearnMode mode, std::optional<double> cf_lower,
                          Rng& rng, const LsqOptions& opts = {});

}  // namespace ridgelab
