#pragma once

#include <cstdint>
#include <vector>

#include "ridgelab/common.hpp"

namespace ridgelab {

// Deterministic splittable RNG (xoshiro256++ seeded via splitmix64).
// Same seed => bit-identical streams on every platform we target.
class Rng {
 public:
  explicit Rng(uint64_t seed);
  uint64_t next_u64();
  double uniform();  // [0,1), 53-bit
  double normal();   // N(0,1), Box-Muller with spare caching
  // splitmix64 finalizer; used to derive independent per-trial seeds.
  static uint64_t hash(uint64_t x);

 private:
  uint64_t s_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Dense-vector helpers.
double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);
void normalize(Vec& a);
Vec add_scaled(const Vec& u, double a, const Vec& v, double b);  // a*u + b*v

// Growing orthonormal set {v_1,...,v_k} in R^d with its complement sampler.
class DirectionBasis {
 public:
  explicit DirectionBasis(int dim);
  int dim() const { return dim_; }
  int size() const { return static_cast<int>(vectors_.size()); }
  const Vec& vector(int i) const { return vectors_.at(i); }
  const std::vector<Vec>& vectors() const { return vectors_; }
  // Re-orthogonalizes v against the current set, renormalizes, asserts
  // orthonormality, and appends. Throws if the basis is full (>= ceil(d/16)).
  void insert(Vec v);
  // Subtracts the projection onto the span from v (in place).
  void project_out(Vec& v) const;
  // Normalized sum (1/sqrt(k)) * sum v_i.
  Vec normalized_sum() const;

 private:
  int dim_;
  std::vector<Vec> vectors_;
};

Vec sample_sphere(Rng& rng, int d);
Vec sample_complement(Rng& rng, const DirectionBasis& basis);
// a*u + b*v with a ball-membership check (|a|^2+|b|^2 <= 1 for orthonormal
// u,v keeps the result in B^d).
Vec combine_scaled(const Vec& u, const Vec& v, double a, double b);

// Monte Carlo estimate of the anti-concentration constant: the probability
// that a complement-sphere sample v (after removing a random m-frame
// independent of theta) has <theta, v> in [2.2/sqrt(d), 2.8/sqrt(d)].
// Deterministic given (d, m); cached. `draws` defaults to 1e5.
double anticoncentration_constant(int d, int m, int draws = 100000);

}  // namespace ridgelab
