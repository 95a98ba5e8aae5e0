#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ridgelab/linkfn.hpp"

namespace ridgelab {

struct TrajectoryCurve {
  enum class Kind { lower_bound_recursion, upper_bound_ode, measured };
  Kind kind;
  std::vector<std::pair<long long, double>> points;  // (t, x_t)
  int d = 0;
  double c = 1.0;
  double delta = 0.0;
  std::string link_name;
};

// eps_1 = sqrt(c ln(1/delta)/d); eps_{t+1}^2 = eps_t^2 + (c/d) g(eps_t)^2,
// truncated at eps >= 1 (or t_max points).
TrajectoryCurve lb_epsilon_sequence(const LinkFunction& link, int d, double c,
                                    double delta, long long t_max);

// Explicit Euler, step 1, on u = x^2 with
// du/dt = max_{y<=x} min_{z in [y/2,y]} f'(z)^2 / d^2.
TrajectoryCurve ub_trajectory_ode(const LinkFunction& link, int d, double x0,
                                  long long t_max,
                                  long long record_every = 1);

// d^2 * integral over x in [sqrt(c/d), eps_target] of
// d(x^2) / [max_{sqrt(c/d)<=y<=x} min_{z in [y/2,y]} f'(z)^2],
// composite trapezoid uniform in u = x^2.
double burnin_integral_ub(const LinkFunction& link, int d, double eps_target,
                          double c = 1.0, int panels = 2048);

// d * integral over x in [sqrt(c*logT/d), eps_target] of d(x^2) / g(x)^2.
double burnin_integral_lb(const LinkFunction& link, int d, double eps_target,
                          double logT, double c = 1.0, int panels = 2048);

struct BridgeReport {
  double schedule_sum;  // sum of 1/eps_i^2 over the burn-in schedule
  double integral;      // burn-in upper-bound integral to target 1/2
  double ratio;         // schedule_sum / integral
};
// The two burn-in cost expressions agree up to absolute constants; reports
// their ratio (checked in [1/64, 64] by tests).
BridgeReport lemma_c1_bridge_check(const LinkFunction& link, int d);

void export_curve_csv(const TrajectoryCurve& curve, std::ostream& os,
                      bool header = true);

}  // namespace ridgelab
