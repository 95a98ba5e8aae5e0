#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ridgelab/env.hpp"
#include "ridgelab/learning.hpp"

namespace ridgelab {

struct ConfidenceSet {
  Vec center;  // unconstrained-sphere LS estimate
  std::vector<std::pair<Vec, double>> history;
  double est_budget = 0.0;
  // sum over history of (f(<a_s, theta>) - f(<a_s, center>))^2
  double membership_lhs(const LinkFunction& f, const Vec& theta) const;
  bool contains(const LinkFunction& f, const Vec& theta) const {
    return membership_lhs(f, theta) <= est_budget;
  }
};

struct PackingSet {
  std::vector<Vec> points;  // points[0] reserved as theta*
  double pairwise_bound = 0.0;
  // Rejection-sample count+1 unit vectors with pairwise |<.,.>| <=
  // sqrt(c*ln(count)/d). Throws if sampling exceeds 10x the expected draws.
  static PackingSet build(Rng& rng, int d, int count, double c = 16.0,
                          const Vec* theta_star = nullptr);
};

enum class TieBreak { optimistic_search, adversarial_packing };

struct EluderUcbOptions {
  double kappa = 4.0;       // Est_t = kappa * d * ln(e*t)
  int refit_interval = 1;
  int search_restarts = 4;  // random starts for the feasibility search
  int solver_restarts = 2;  // restarts for the center refit
};

struct UcbRunSummary {
  long long steps = 0;
  double max_inner = -1.0;
  double final_inner = 0.0;
  double cum_regret = 0.0;
  bool all_packing_feasible = true;  // every played packing point passed the
                                     // theta*-centered test
  int packing_used = 0;
  int fallbacks = 0;
};

// One action choice. For adversarial_packing the next unused packing point is
// played if it passes the theta*-centered (enlarged-set) membership test —
// this consults theta*, which is legitimate only because the construction
// quantifies over tie-breaking rules; it is a harness capability, not a
// learner. Falls back to optimistic search otherwise.
Vec eluder_ucb_step(const LinkFunction& f, const ConfidenceSet& set,
                    TieBreak tie_break, Rng& rng,
                    const EluderUcbOptions& opts,
                    const PackingSet* packing = nullptr,
                    int* packing_cursor = nullptr,
                    const Vec* theta_star = nullptr, double t = 1.0,
                    bool* used_packing = nullptr);

UcbRunSummary run_eluder_ucb(RidgeEnvironment& env, long long T,
                             TieBreak tie_break, Rng& rng,
                             const EluderUcbOptions& opts = {},
                             const PackingSet* packing = nullptr);

Vec zero_online_oracle(int d);
Vec random_offline_oracle(Rng& rng, int d);

enum class OracleKind { zero_online, random_offline };
enum class OraclePolicy { play_estimate, estimate_plus_perturbation };

struct OracleRunSummary {
  long long steps = 0;
  double max_inner = -1.0;
  double final_inner = 0.0;
  double residual = 0.0;     // cumulative squared estimation residual
  double est_budget = 0.0;   // 4 d ln(eT)
  bool residual_ok = true;   // residual <= est_budget
};

OracleRunSummary run_oracle_learner(RidgeEnvironment& env, OracleKind oracle,
                                    OraclePolicy policy, long long T,
                                    Rng& rng);

struct NonadaptiveSummary {
  Vec theta_hat;
  double final_inner = 0.0;
  long long queries = 0;
};

// Pre-draws all T actions uniformly before seeing any reward, queries them,
// and fits by unconstrained-sphere least squares.
NonadaptiveSummary run_nonadaptive(RidgeEnvironment& env, long long T,
                                   Rng& rng, int restarts = 2);

}  // namespace ridgelab
