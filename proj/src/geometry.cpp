#include "ridgelab/geometry.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace ridgelab {

uint64_t Rng::hash(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(uint64_t seed) {
  uint64_t sm = seed;
  for (auto& s : s_) {
    sm += 0x9e3779b97f4a7c15ULL;
    uint64_t z = sm;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    s = z ^ (z >> 31);
  }
}

static inline uint64_t rotl(uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

uint64_t Rng::next_u64() {
  const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

void normalize(Vec& a) {
  double n = norm(a);
  if (n <= 0) throw PreconditionError("normalize: zero vector");
  for (auto& x : a) x /= n;
}

Vec add_scaled(const Vec& u, double a, const Vec& v, double b) {
  Vec out(u.size());
  for (size_t i = 0; i < u.size(); ++i) out[i] = a * u[i] + b * v[i];
  return out;
}

DirectionBasis::DirectionBasis(int dim) : dim_(dim) {
  if (dim < 1) throw PreconditionError("DirectionBasis: dim < 1");
}

void DirectionBasis::project_out(Vec& v) const {
  for (const auto& b : vectors_) {
    double c = dot(v, b);
    for (size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
  }
}

void DirectionBasis::insert(Vec v) {
  if (size() >= dim_)
    throw PreconditionError("DirectionBasis: already spans R^d");
  // Two Gram-Schmidt passes for numerical drift control.
  project_out(v);
  project_out(v);
  normalize(v);
  for (const auto& b : vectors_) {
    if (std::abs(dot(v, b)) > 1e-9)
      throw PreconditionError("DirectionBasis: orthonormality lost");
  }
  vectors_.push_back(std::move(v));
}

Vec DirectionBasis::normalized_sum() const {
  if (vectors_.empty())
    throw PreconditionError("DirectionBasis: empty normalized_sum");
  Vec out(dim_, 0.0);
  for (const auto& b : vectors_)
    for (int i = 0; i < dim_; ++i) out[i] += b[i];
  double s = 1.0 / std::sqrt(static_cast<double>(vectors_.size()));
  for (auto& x : out) x *= s;
  return out;
}

Vec sample_sphere(Rng& rng, int d) {
  if (d < 1) throw PreconditionError("sample_sphere: d < 1");
  Vec v(d);
  while (true) {
    for (auto& x : v) x = rng.normal();
    double n = norm(v);
    if (n > 1e-12) {
      for (auto& x : v) x /= n;
      return v;
    }
  }
}

Vec sample_complement(Rng& rng, const DirectionBasis& basis) {
  if (basis.size() >= basis.dim())
    throw PreconditionError("sample_complement: basis already spans R^d");
  while (true) {
    Vec v(basis.dim());
    for (auto& x : v) x = rng.normal();
    basis.project_out(v);
    basis.project_out(v);
    double n = norm(v);
    if (n > 1e-12) {
      for (auto& x : v) x /= n;
      return v;
    }
  }
}

Vec combine_scaled(const Vec& u, const Vec& v, double a, double b) {
  Vec out = add_scaled(u, a, v, b);
  if (norm(out) > 1.0 + 1e-9)
    throw BallViolationError("combine_scaled: result leaves the unit ball");
  return out;
}

double anticoncentration_constant(int d, int m, int draws) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, double> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({d, m});
    if (it != cache.end()) return it->second;
  }
  // By rotation invariance, take the removed frame to be e_1..e_m; theta is a
  // fresh uniform sphere point, v uniform on the complement sphere. Seed
  // depends only on (d, m) so the estimate is config-independent.
  Rng rng(Rng::hash(0xA17C0415ULL ^ (static_cast<uint64_t>(d) << 20) ^
                    static_cast<uint64_t>(m)));
  double lo = 2.2 / std::sqrt(static_cast<double>(d));
  double hi = 2.8 / std::sqrt(static_cast<double>(d));
  int hits = 0;
  Vec theta(d), v(d);
  for (int k = 0; k < draws; ++k) {
    for (auto& x : theta) x = rng.normal();
    double nt = norm(theta);
    double s = 0.0, nv = 0.0;
    for (int i = m; i < d; ++i) {
      double g = rng.normal();
      s += g * theta[i];
      nv += g * g;
    }
    double ip = s / (nt * std::sqrt(nv));
    if (ip >= lo && ip <= hi) ++hits;
  }
  double c = std::max(static_cast<double>(hits) / draws, 1e-6);
  std::lock_guard<std::mutex> lock(mu);
  cache[{d, m}] = c;
  return c;
}

}  // namespace ridgelab
