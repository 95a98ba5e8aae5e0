#include "ridgelab/theory.hpp"

#include <cmath>
#include <ostream>

namespace ridgelab {

namespace {

double fd_deriv(const LinkFunction& f, double z) {
  const double h = 1e-6;
  double hi = std::min(z + h, 1.0);
  double lo = std::max(z - h, -1.0);
  return (f(hi) - f(lo)) / (hi - lo);
}

// min over z in [y/2, y] of f'(z)^2 (grid + refinement).
double min_deriv_sq(const LinkFunction& f, double y, int n = 256) {
  double zl = 0.5 * y, zh = std::min(y, 1.0);
  double best = 1e300, best_z = zl;
  for (int pass = 0; pass < 2; ++pass) {
    double a = pass == 0 ? zl : std::max(zl, best_z - (zh - zl) / (n - 1));
    double b = pass == 0 ? zh : std::min(zh, best_z + (zh - zl) / (n - 1));
    double s = (b - a) / std::max(1, n - 1);
    for (int i = 0; i < n; ++i) {
      double z = a + s * i;
      double v = fd_deriv(f, z);
      v *= v;
      if (v < best) {
        best = v;
        best_z = z;
      }
    }
  }
  return best;
}

// max over y in [y_lo, x] of min_deriv_sq.
double maxmin_deriv_sq(const LinkFunction& f, double y_lo, double x,
                       int n = 256) {
  if (x <= y_lo) return min_deriv_sq(f, std::max(x, y_lo));
  double best = -1.0, best_y = y_lo;
  for (int pass = 0; pass < 2; ++pass) {
    double a = pass == 0 ? y_lo : std::max(y_lo, best_y - (x - y_lo) / (n - 1));
    double b = pass == 0 ? x : std::min(x, best_y + (x - y_lo) / (n - 1));
    double s = (b - a) / std::max(1, n - 1);
    for (int i = 0; i < n; ++i) {
      double y = a + s * i;
      double v = min_deriv_sq(f, y);
      if (v > best) {
        best = v;
        best_y = y;
      }
    }
  }
  return best;
}

}  // namespace

TrajectoryCurve lb_epsilon_sequence(const LinkFunction& link, int d, double c,
                                    double delta, long long t_max) {
  if (!(c > 0) || !(delta > 0 && delta < 1) || d < 2)
    throw PreconditionError("lb_epsilon_sequence: bad parameters");
  TrajectoryCurve curve;
  curve.kind = TrajectoryCurve::Kind::lower_bound_recursion;
  curve.d = d;
  curve.c = c;
  curve.delta = delta;
  curve.link_name = link.name();
  double u = c * std::log(1.0 / delta) / d;
  // Record sparsely for very long sequences; always record the first and the
  // crossing point.
  long long stride = std::max<long long>(1, t_max / 4096);
  for (long long t = 1; t <= t_max; ++t) {
    double x = std::sqrt(u);
    bool done = x >= 1.0;
    if (done) x = 1.0;
    if (t == 1 || done || t == t_max || t % stride == 0)
      curve.points.push_back({t, x});
    if (done) break;
    double g = link.envelope(std::min(x, 1.0));
    u += (c / d) * g * g;
  }
  return curve;
}

TrajectoryCurve ub_trajectory_ode(const LinkFunction& link, int d, double x0,
                                  long long t_max, long long record_every) {
  if (!(x0 > 0 && x0 < 1))
    throw PreconditionError("ub_trajectory_ode: x0 outside (0,1)");
  TrajectoryCurve curve;
  curve.kind = TrajectoryCurve::Kind::upper_bound_ode;
  curve.d = d;
  curve.link_name = link.name();
  double u = x0 * x0;
  double d2 = static_cast<double>(d) * d;
  // The drift is smooth in x; recompute it only when x^2 has moved 0.1%
  // since the last evaluation.
  double drift = maxmin_deriv_sq(link, x0 / 256.0, x0) / d2;
  double u_at_drift = u;
  if (record_every < 1) record_every = 1;
  curve.points.push_back({0, x0});
  for (long long t = 1; t <= t_max; ++t) {
    u += drift;
    double x = std::sqrt(u);
    if (x >= 1.0) {
      curve.points.push_back({t, 1.0});
      break;
    }
    if (u > u_at_drift * 1.001) {
      drift = maxmin_deriv_sq(link, x0 / 256.0, x) / d2;
      u_at_drift = u;
    }
    if (t % record_every == 0 || t == t_max) curve.points.push_back({t, x});
  }
  return curve;
}

double burnin_integral_ub(const LinkFunction& link, int d, double eps_target,
                          double c, int panels) {
  double u_lo = c / d;
  double u_hi = eps_target * eps_target;
  if (!(u_lo <= u_hi + 1e-15) || !(eps_target <= 0.5 + 1e-12))
    throw PreconditionError("burnin_integral_ub: target outside range");
  if (u_hi <= u_lo) return 0.0;
  double y_lo = std::sqrt(u_lo);
  double du = (u_hi - u_lo) / panels;
  auto integrand = [&](double u) {
    double denom = maxmin_deriv_sq(link, y_lo, std::sqrt(u));
    if (!(denom > 1e-300))
      throw DivergentIntegrandError(
          "burnin_integral_ub: flat derivative on the range");
    return 1.0 / denom;
  };
  double sum = 0.5 * (integrand(u_lo) + integrand(u_hi));
  for (int k = 1; k < panels; ++k) sum += integrand(u_lo + k * du);
  return static_cast<double>(d) * d * sum * du;
}

double burnin_integral_lb(const LinkFunction& link, int d, double eps_target,
                          double logT, double c, int panels) {
  double u_lo = c * logT / d;
  double u_hi = eps_target * eps_target;
  if (u_hi < u_lo - 1e-15)
    throw PreconditionError("burnin_integral_lb: target below the lower limit");
  if (u_hi <= u_lo) return 0.0;
  double du = (u_hi - u_lo) / panels;
  auto integrand = [&](double u) {
    double g = link.envelope(std::min(std::sqrt(u), 1.0));
    if (!(g > 1e-300))
      throw DivergentIntegrandError("burnin_integral_lb: g vanishes on range");
    return 1.0 / (g * g);
  };
  double sum = 0.5 * (integrand(u_lo) + integrand(u_hi));
  for (int k = 1; k < panels; ++k) sum += integrand(u_lo + k * du);
  return static_cast<double>(d) * sum * du;
}

BridgeReport lemma_c1_bridge_check(const LinkFunction& link, int d) {
  EpsilonSchedule sched = burnin_schedule(link, d);
  double sum = 0.0;
  for (double e : sched.values) sum += 1.0 / (e * e);
  double integral = burnin_integral_ub(link, d, 0.5);
  return {sum, integral, sum / integral};
}

void export_curve_csv(const TrajectoryCurve& curve, std::ostream& os,
                      bool header) {
  if (header) os << "t,x,kind,d,link,c,delta\n";
  const char* kind = curve.kind == TrajectoryCurve::Kind::lower_bound_recursion
                         ? "lower_bound_recursion"
                     : curve.kind == TrajectoryCurve::Kind::upper_bound_ode
                         ? "upper_bound_ode"
                         : "measured";
  for (const auto& [t, x] : curve.points) {
    os << t << ',' << x << ',' << kind << ',' << curve.d << ','
       << curve.link_name << ',' << curve.c << ',' << curve.delta << '\n';
  }
}

}  // namespace ridgelab
