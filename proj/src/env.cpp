#include "ridgelab/env.hpp"

#include <cmath>

namespace ridgelab {

RidgeEnvironment::RidgeEnvironment(int d, LinkFunction link, double sigma,
                                   Rng rng, Vec theta)
    : d_(d),
      link_(std::move(link)),
      sigma_(sigma),
      rng_(rng),
      theta_star_(std::move(theta)),
      f1_(0.0) {
  f1_ = link_(1.0);
}

RidgeEnvironment RidgeEnvironment::spawn(int d, LinkFunction link,
                                         double noise_sigma, Rng rng,
                                         std::optional<Vec> theta_star) {
  if (d < 1) throw PreconditionError("spawn: d < 1");
  if (noise_sigma < 0) throw PreconditionError("spawn: negative noise sigma");
  Vec theta;
  if (theta_star) {
    theta = std::move(*theta_star);
    if (static_cast<int>(theta.size()) != d)
      throw PreconditionError("spawn: theta_star dimension mismatch");
    if (std::abs(norm(theta) - 1.0) > 1e-12)
      throw PreconditionError("spawn: theta_star is not a unit vector");
  } else {
    theta = sample_sphere(rng, d);
  }
  return RidgeEnvironment(d, std::move(link), noise_sigma, rng,
                          std::move(theta));
}

double RidgeEnvironment::observe(const Vec& a, long long n) {
  if (static_cast<int>(a.size()) != d_)
    throw PreconditionError("query: action dimension mismatch");
  double an = norm(a);
  if (an > 1.0 + 1e-9)
    throw BallViolationError("query: action outside the unit ball");
  double ip = dot(theta_star_, a);
  ip = std::clamp(ip, -1.0, 1.0);
  double mean = link_(ip);
  // The mean of n i.i.d. N(f, sigma^2) observations is N(f, sigma^2/n);
  // drawing it directly keeps large batches O(1) while the ledger stays exact.
  double observed = mean;
  if (sigma_ > 0)
    observed += sigma_ * rng_.normal() / std::sqrt(static_cast<double>(n));
  queries_ += n;
  events_ += 1;
  cum_regret_ += static_cast<double>(n) * (f1_ - mean);
  if (ip > max_inner_) max_inner_ = ip;
  if (n > 1 || events_ % log_every_ == 0) {
    trajectory_.push_back({queries_, ip, observed, n, cum_regret_});
  }
  return observed;
}

double RidgeEnvironment::query(const Vec& a) { return observe(a, 1); }

double RidgeEnvironment::query_batch(const Vec& a, long long n) {
  if (n < 1) throw PreconditionError("query_batch: n < 1");
  return observe(a, n);
}

void RidgeEnvironment::export_trajectory_csv(std::ostream& os) const {
  os << "t,inner_product,reward,cum_regret,cum_queries\n";
  for (const auto& e : trajectory_) {
    os << e.t << ',' << e.inner << ',' << e.reward << ',' << e.cum_regret
       << ',' << e.t << '\n';
  }
}

}  // namespace ridgelab
