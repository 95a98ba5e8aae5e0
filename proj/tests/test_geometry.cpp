#include <doctest.h>

#include <cmath>

#include "ridgelab/geometry.hpp"

using namespace ridgelab;

TEST_CASE("rng determinism and normal moments") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng r(7);
  double mean = 0, var = 0;
  const int n = 100000;
  std::vector<double> z(n);
  for (auto& x : z) x = r.normal(), mean += x;
  mean /= n;
  for (auto x : z) var += (x - mean) * (x - mean);
  var /= n - 1;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(n));
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("sphere sampling is unit and symmetric") {
  Rng r(1);
  SUBCASE("d=1 is a fair coin") {
    int pos = 0;
    for (int i = 0; i < 1000; ++i) {
      Vec v = sample_sphere(r, 1);
      CHECK(std::abs(std::abs(v[0]) - 1.0) < 1e-12);
      pos += v[0] > 0;
    }
    CHECK(pos > 400);
    CHECK(pos < 600);
  }
  SUBCASE("d=64 first-coordinate mean vanishes") {
    const int n = 10000;
    double mean = 0;
    for (int i = 0; i < n; ++i) {
      Vec v = sample_sphere(r, 64);
      CHECK(norm(v) == doctest::Approx(1.0).epsilon(1e-12));
      mean += v[0];
    }
    mean /= n;
    CHECK(std::abs(mean) < 3.0 / std::sqrt(64.0 * n));
  }
  SUBCASE("marginal window probability") {
    const int n = 100000;
    int hits = 0;
    double lo = 2.2 / 8.0, hi = 2.8 / 8.0;
    for (int i = 0; i < n; ++i) {
      Vec v = sample_sphere(r, 64);
      if (v[0] >= lo && v[0] <= hi) ++hits;
    }
    double p = static_cast<double>(hits) / n;
    CHECK(p >= 0.01);
    CHECK(p <= 0.25);
  }
}

TEST_CASE("complement sampling stays orthogonal") {
  Rng r(3);
  DirectionBasis basis(3);
  basis.insert(Vec{1, 0, 0});
  for (int i = 0; i < 200; ++i) {
    Vec v = sample_complement(r, basis);
    CHECK(norm(v) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(v[0]) <= 1e-9);
  }
  basis.insert(Vec{0, 1, 0});
  // One-dimensional complement: v = +/- e3.
  for (int i = 0; i < 20; ++i) {
    Vec v = sample_complement(r, basis);
    CHECK(std::abs(std::abs(v[2]) - 1.0) < 1e-9);
  }
  basis.insert(Vec{0, 0, 1});
  CHECK_THROWS(basis.insert(Vec{1, 0, 0}));
}

TEST_CASE("basis insertion preserves orthonormality") {
  Rng r(9);
  DirectionBasis basis(256);
  for (int k = 0; k < 16; ++k) basis.insert(sample_sphere(r, 256));
  for (int i = 0; i < basis.size(); ++i) {
    CHECK(norm(basis.vector(i)) == doctest::Approx(1.0).epsilon(1e-9));
    for (int j = 0; j < i; ++j)
      CHECK(std::abs(dot(basis.vector(i), basis.vector(j))) <= 1e-9);
  }
  Vec s = basis.normalized_sum();
  CHECK(norm(s) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("scaled combination and ball check") {
  Vec e1{1, 0}, e2{0, 1};
  double s = 1.0 / std::sqrt(2.0);
  CHECK(norm(combine_scaled(e1, e2, s, s)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(norm(combine_scaled(e1, e2, 0.5 * s, s)) ==
        doctest::Approx(std::sqrt(0.625)).epsilon(1e-12));
  CHECK_THROWS_AS(combine_scaled(e1, e1, 1.0, 1.0), BallViolationError);
}

TEST_CASE("window anti-concentration after removing a frame") {
  // Complement samples still land in the acceptance window with constant
  // probability once <= d/16 directions are projected out.
  double c = anticoncentration_constant(256, 16);
  CHECK(c >= 0.01);
  CHECK(c <= 0.25);
  // Cache is deterministic.
  CHECK(anticoncentration_constant(256, 16) == c);
}

TEST_CASE("sphere tail concentration") {
  Rng r(17);
  const int n = 100000, d = 256;
  double thresh = std::sqrt(std::log(1000.0) * 16.0 / d);
  Vec theta = sample_sphere(r, d);
  int exceed = 0;
  for (int i = 0; i < n; ++i)
    if (std::abs(dot(theta, sample_sphere(r, d))) > thresh) ++exceed;
  CHECK(static_cast<double>(exceed) / n <= 2e-3);
}
