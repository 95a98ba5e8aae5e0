#include "ridgelab/burnin.hpp"

#include <cmath>

namespace ridgelab {

namespace {

long long ceil_count(double x) {
  if (x < 1.0) return 1;
  return static_cast<long long>(std::ceil(x));
}

// Bracket [A, B] of q >= 0 such that f(q) is within eps of rbar, using the
// monotone inverse. Empty bracket encoded as A > B.
std::pair<double, double> value_bracket(const LinkFunction& f, double rbar,
                                        double eps) {
  auto a = link_inverse_min(f, rbar - eps);
  auto b = link_inverse_max(f, rbar + eps);
  if (!a || !b) return {1.0, 0.0};
  return {*a, *b};
}

}  // namespace

HypTestVerdict initial_action_hyp_test(QueryInterface& env, const Vec& v,
                                       double delta) {
  if (!(delta > 0 && delta < 0.5))
    throw PreconditionError("initial_action_hyp_test: delta outside (0, 1/2)");
  const int d = env.dim();
  const LinkFunction& f = env.link();
  double eps = iaht_epsilon(f, d);
  long long n = ceil_count(2.0 * std::log(2.0 / delta) / (eps * eps));
  double rbar = env.query_batch(v, n);
  // Accept iff some x in [2.2/sqrt(d), 2.8/sqrt(d)] has |rbar - f(x)| <= eps;
  // by monotonicity on [0,1] this is a window comparison.
  double s = std::sqrt(static_cast<double>(d));
  bool ok = rbar >= f(2.2 / s) - eps && rbar <= f(2.8 / s) + eps;
  return {ok, n, std::nullopt};
}

HypTestVerdict good_action_hyp_test(QueryInterface& env, const Vec& v,
                                    double delta, const Vec& v_pre,
                                    double x_pre) {
  if (!(delta > 0 && delta < 0.5))
    throw PreconditionError("good_action_hyp_test: delta outside (0, 1/2)");
  if (std::abs(dot(v, v_pre)) > 1e-9)
    throw PreconditionError("good_action_hyp_test: v not orthogonal to v_pre");
  const int d = env.dim();
  const LinkFunction& f = env.link();
  auto [eps, y_star] = gaht_epsilon(f, d, x_pre);  // checks x_pre >= 20/sqrt(d)
  double lambda = std::sqrt(2.0) * y_star / x_pre;
  if (lambda > 1.0 + 1e-12)
    throw PreconditionError("good_action_hyp_test: lambda > 1");
  lambda = std::min(lambda, 1.0);
  const double r2 = std::sqrt(2.0);
  Vec a_minus = combine_scaled(v_pre, v, lambda / r2, -1.0 / r2);
  Vec a_plus = combine_scaled(v_pre, v, lambda / r2, 1.0 / r2);
  long long n = ceil_count(2.0 * std::log(4.0 / delta) / (eps * eps));
  double rm = env.query_batch(a_minus, n);
  double rp = env.query_batch(a_plus, n);

  // Feasibility: exist z in [y*, 3y*/2], x in [2.2/sqrt(2d), 2.8/sqrt(2d)]
  // with |rm - f(z-x)| <= eps and |rp - f(z+x)| <= eps. Both f-arguments are
  // positive (z - x >= y* - 2.8/sqrt(2d) > 0), so each condition brackets
  // z-x resp. z+x in an interval via the monotone inverse, and the joint test
  // reduces to intersecting constraints linear in x.
  double s2 = std::sqrt(2.0 * static_cast<double>(d));
  double x_lo = 2.2 / s2, x_hi = 2.8 / s2;
  double z_lo = y_star, z_hi = 1.5 * y_star;
  auto [am, bm] = value_bracket(f, rm, eps);  // bracket for z - x
  auto [ap, bp] = value_bracket(f, rp, eps);  // bracket for z + x
  HypTestVerdict verdict{false, 2 * n, std::nullopt};
  if (am > bm || ap > bp) return verdict;
  double lo = x_lo, hi = x_hi;
  lo = std::max(lo, (ap - bm) / 2.0);
  hi = std::min(hi, (bp - am) / 2.0);
  lo = std::max(lo, ap - z_hi);
  hi = std::min(hi, z_hi - am);
  lo = std::max(lo, z_lo - bm);
  hi = std::min(hi, bp - z_lo);
  if (lo <= hi) {
    double x = 0.5 * (lo + hi);
    double zl = std::max({z_lo, am + x, ap - x});
    double zh = std::min({z_hi, bm + x, bp - x});
    verdict.accepted = true;
    verdict.witness = std::make_pair(0.5 * (zl + zh), x);
  }
  return verdict;
}

namespace {

BurninResult run_burnin_impl(QueryInterface& env, Rng& rng, double delta,
                             const BurninOptions& opts, bool even_variant) {
  if (!(delta > 0 && delta < 0.5))
    throw PreconditionError("run_burnin: delta outside (0, 1/2)");
  const int d = env.dim();
  const LinkFunction& f = env.link();
  if (even_variant && f.parity() != LinkParity::even)
    throw PreconditionError("run_burnin_even: link parity is not even");
  const int m = (d + 15) / 16;

  double c_hat = opts.c_hat_override ? *opts.c_hat_override
                                     : anticoncentration_constant(d, m);
  // Per-call failure budget delta/L; L uses c_hat/2 as a safety margin (an
  // underestimate only enlarges L).
  double L = std::ceil(2.0 * m * std::log(2.0 * m / delta) / (c_hat / 2.0));
  double delta_call = delta / L;
  long long loop_cap = ceil_count(20.0 * std::log(2.0 * m / delta) / c_hat);

  const long long start_queries = env.queries();
  BurninResult res;
  res.accepted = DirectionBasis(d);
  res.failed = false;

  double iaht_eps = iaht_epsilon(f, d);

  for (int i = 1; i <= m; ++i) {
    Vec v_pre;
    double x_pre = 0.0;
    if (i > 100) {
      v_pre = res.accepted.normalized_sum();
      x_pre = 2.0 * std::sqrt(static_cast<double>(i - 1) / d);
    }
    long long loops = 0;
    bool epoch_done = false;
    while (!epoch_done) {
      ++loops;
      if (loops > loop_cap) {
        res.failed = true;
        res.reason = "loop cap exceeded in epoch " + std::to_string(i);
        break;
      }
      if (opts.budget && env.queries() - start_queries > *opts.budget) {
        res.failed = true;
        res.reason = "query budget exhausted in epoch " + std::to_string(i);
        break;
      }
      Vec v = sample_complement(rng, res.accepted);
      HypTestVerdict verdict =
          (i <= 100) ? initial_action_hyp_test(env, v, delta_call)
                     : good_action_hyp_test(env, v, delta_call, v_pre, x_pre);
      if (!verdict.accepted) continue;
      if (even_variant && i >= 2 && i <= 100) {
        // Sign test against v_1: the same-sign combination has roughly 4x the
        // inner product of the opposite-sign one, so the larger sample mean
        // identifies the orientation.
        const Vec& v1 = res.accepted.vector(0);
        const double r2 = std::sqrt(2.0);
        long long ns = ceil_count(2.0 * std::log(4.0 / delta_call) /
                                  (iaht_eps * iaht_eps));
        double rp = env.query_batch(combine_scaled(v, v1, 1.0 / r2, 1.0 / r2), ns);
        double rm = env.query_batch(combine_scaled(v, v1, 1.0 / r2, -1.0 / r2), ns);
        if (rp < rm)
          for (auto& x : v) x = -x;
      }
      res.accepted.insert(std::move(v));
      res.per_epoch_loops.push_back(loops);
      res.epochs_completed = i;
      epoch_done = true;
    }
    if (res.failed) break;
  }

  res.queries_used = env.queries() - start_queries;
  if (!res.failed) res.a0 = res.accepted.normalized_sum();
  return res;
}

}  // namespace

BurninResult run_burnin(QueryInterface& env, Rng& rng, double delta,
                        const BurninOptions& opts) {
  return run_burnin_impl(env, rng, delta, opts, /*even_variant=*/false);
}

BurninResult run_burnin_even(QueryInterface& env, Rng& rng, double delta,
                             const BurninOptions& opts) {
  return run_burnin_impl(env, rng, delta, opts, /*even_variant=*/true);
}

}  // namespace ridgelab
