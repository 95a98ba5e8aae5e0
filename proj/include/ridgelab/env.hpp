#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "ridgelab/geometry.hpp"
#include "ridgelab/linkfn.hpp"

namespace ridgelab {

// The capability learners hold: reward queries only. Ground truth (theta*)
// and the diagnostic ledger live on RidgeEnvironment and are reserved for the
// harness.
class QueryInterface {
 public:
  virtual ~QueryInterface() = default;
  virtual int dim() const = 0;
  virtual const LinkFunction& link() const = 0;
  virtual double noise_sigma() const = 0;
  // One noisy reward f(<theta*, a>) + sigma*Z.
  virtual double query(const Vec& a) = 0;
  // Sample mean of n independent queries at a; the ledger advances by n.
  virtual double query_batch(const Vec& a, long long n) = 0;
  virtual long long queries() const = 0;
};

struct TrajectoryEntry {
  long long t;       // query count after this entry
  double inner;      // <theta*, a>
  double reward;     // observed reward (batch mean when batch > 1)
  long long batch;   // number of queries this entry accounts for
  double cum_regret;
};

class RidgeEnvironment final : public QueryInterface {
 public:
  static RidgeEnvironment spawn(int d, LinkFunction link, double noise_sigma,
                                Rng rng, std::optional<Vec> theta_star = {});

  int dim() const override { return d_; }
  const LinkFunction& link() const override { return link_; }
  double noise_sigma() const override { return sigma_; }
  double query(const Vec& a) override;
  double query_batch(const Vec& a, long long n) override;
  long long queries() const override { return queries_; }

  // --- diagnostics / harness-only surface ---
  const Vec& theta_star() const { return theta_star_; }
  double inner(const Vec& a) const { return dot(theta_star_, a); }
  double cumulative_regret() const { return cum_regret_; }
  double max_inner() const { return max_inner_; }
  const std::vector<TrajectoryEntry>& trajectory() const { return trajectory_; }
  // Log only every k-th query-event (batches always log once). Counts and
  // cumulative regret stay exact regardless.
  void set_log_every(long long k) { log_every_ = k < 1 ? 1 : k; }
  void export_trajectory_csv(std::ostream& os) const;

 private:
  RidgeEnvironment(int d, LinkFunction link, double sigma, Rng rng, Vec theta);
  double observe(const Vec& a, long long n);

  int d_;
  LinkFunction link_;
  double sigma_;
  Rng rng_;
  Vec theta_star_;
  long long queries_ = 0;
  long long events_ = 0;
  double cum_regret_ = 0.0;
  double max_inner_ = -1.0;
  double f1_;
  long long log_every_ = 1;
  std::vector<TrajectoryEntry> trajectory_;
};

}  // namespace ridgelab
