#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ridgelab/env.hpp"
#include "ridgelab/geometry.hpp"

namespace ridgelab {

struct HypTestVerdict {
  bool accepted = false;
  long long queries_used = 0;
  // (z, x) certificate; present only on good-action-test acceptance.
  std::optional<std::pair<double, double>> witness;
};

struct BurninResult {
  Vec a0;
  int epochs_completed = 0;
  long long queries_used = 0;
  DirectionBasis accepted{1};
  std::vector<long long> per_epoch_loops;
  bool failed = true;
  std::string reason;
};

struct BurninOptions {
  std::optional<long long> budget;       // abort (failed=true) when exceeded
  std::optional<double> c_hat_override;  // skip the Monte Carlo calibration
};

// Certify that <theta*, v> lies in ~[2/sqrt(d), 3/sqrt(d)] by direct queries.
HypTestVerdict initial_action_hyp_test(QueryInterface& env, const Vec& v,
                                       double delta);

// Same certification at higher SNR using a previously certified anchor
// direction v_pre with <theta*, v_pre> ~ x_pre; requires v orthogonal to
// v_pre and x_pre >= 20/sqrt(d).
HypTestVerdict good_action_hyp_test(QueryInterface& env, const Vec& v,
                                    double delta, const Vec& v_pre,
                                    double x_pre);

// Iterative direction search: accumulates m = ceil(d/16) certified
// directions and outputs a0 = (1/sqrt(m)) sum v_i.
BurninResult run_burnin(QueryInterface& env, Rng& rng, double delta,
                        const BurninOptions& opts = {});

// Even-link variant: after each accepted direction (i >= 2) a sign test
// against v_1 orients v so the certified inner products share a sign; the
// guarantee becomes |<theta*, a0>| >= 1/2.
BurninResult run_burnin_even(QueryInterface& env, Rng& rng, double delta,
                             const BurninOptions& opts = {});

}  // namespace ridgelab
