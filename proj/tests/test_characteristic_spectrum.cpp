#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "emx/characteristic_spectrum.hpp"

using namespace emx;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> k(n);
  for (int i = 0; i < n; ++i) k[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
  return k;
}

}  // namespace

TEST_CASE("cubic values at the bracket ends") {
  CHECK(characteristic_value(Family::Longitudinal, -1.0, 2.0) == doctest::Approx(-8.0 / 3.0).epsilon(1e-15));
  for (double k : {0.0, 0.5, 7.0, 300.0})
    CHECK(characteristic_value(Family::Longitudinal, -0.6, k) ==
          doctest::Approx(38.0 / 125.0).epsilon(1e-9));
  CHECK(characteristic_value(Family::Transverse, 0.0, 3.0) == 9.0);
}

TEST_CASE("k = 0 limits") {
  const SpectralRoots l = longitudinal_roots(0.0);
  CHECK(l.sigma == -1.0);
  CHECK(l.beta == -0.5);
  CHECK(l.omega == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-15));
  const SpectralRoots t = transverse_roots(0.0);
  CHECK(t.sigma == 0.0);
  CHECK(t.beta == -0.5);
  CHECK(t.omega == doctest::Approx(0.8660254037844386).epsilon(1e-15));
}

TEST_CASE("golden roots at |k| = 1") {
  // 30-digit reference values from an independent arbitrary precision solve
  CHECK(std::abs(longitudinal_roots(1.0).sigma - (-0.73004960114229162639)) < 1e-14);
  CHECK(std::abs(transverse_roots(1.0).sigma - (-0.56984029099805326591)) < 1e-14);
}

TEST_CASE("large-k limits") {
  CHECK(std::abs(longitudinal_roots(1e3).sigma + 0.6) < 1e-4);
  CHECK(std::abs(transverse_roots(1e3).sigma + 1.0) < 1e-4);
}

TEST_CASE("root invariants on the log grid") {
  const auto ks = log_grid(1e-3, 1e3, 1000);
  double prev_l = -2, prev_t = 2;
  for (double k : ks) {
    const SpectralRoots l = longitudinal_roots(k), t = transverse_roots(k);
    REQUIRE(l.sigma > -1.0);
    REQUIRE(l.sigma < -0.6);
    REQUIRE(t.sigma > -1.0);
    REQUIRE(t.sigma < 0.0);
    REQUIRE(l.beta > -0.7);
    REQUIRE(l.beta < -0.5);
    REQUIRE(t.beta > -0.5);
    REQUIRE(t.beta < 0.0);
    REQUIRE(l.omega > std::sqrt(6.0) / 3.0);
    REQUIRE(t.omega > std::sqrt(6.0) / 3.0);
    REQUIRE(l.sigma > prev_l);
    REQUIRE(t.sigma < prev_t);
    prev_l = l.sigma;
    prev_t = t.sigma;
    const double tol = 1e-12 * (1 + k * k * k);
    REQUIRE(root_residual(l, k) <= tol);
    REQUIRE(root_residual(t, k) <= tol);
    REQUIRE(std::abs(l.beta - (-1 - l.sigma / 2)) <= 1e-12);
    REQUIRE(std::abs(t.beta - (-(1 + t.sigma) / 2)) <= 1e-12);
  }
}

TEST_CASE("small-k stabilization of (sigma + 1) / k^2") {
  const double a = (longitudinal_roots(1e-2).sigma + 1) / 1e-4;
  const double b = (longitudinal_roots(1e-3).sigma + 1) / 1e-6;
  CHECK(a > 0);
  CHECK(b > 0);
  CHECK(std::abs(a - b) / b < 0.05);
  const double c = -transverse_roots(1e-2).sigma / 1e-4;
  const double d = -transverse_roots(1e-3).sigma / 1e-6;
  CHECK(c > 0);
  CHECK(std::abs(c - d) / d < 0.05);
}

TEST_CASE("root set reproduces the cubic coefficients") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> e(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double k = std::pow(10.0, e(rng));
    for (Family f : {Family::Longitudinal, Family::Transverse}) {
      const SpectralRoots r = roots(f, k);
      // (X - s)(X^2 - 2 b X + b^2 + w^2)
      const double q1 = -2 * r.beta, q0 = r.beta * r.beta + r.omega * r.omega;
      const double a2 = q1 - r.sigma, a1 = q0 - r.sigma * q1, a0 = -r.sigma * q0;
      const double k2 = k * k;
      const double e2 = f == Family::Longitudinal ? 2.0 : 1.0;
      const double e1 = f == Family::Longitudinal ? 2.0 + 5.0 / 3.0 * k2 : 1.0 + k2;
      const double e0 = f == Family::Longitudinal ? 1.0 + k2 : k2;
      CHECK(std::abs(a2 - e2) <= 1e-10 * e2);
      CHECK(std::abs(a1 - e1) <= 1e-10 * e1);
      CHECK(std::abs(a0 - e0) <= 1e-10 * e0);
    }
  }
}

TEST_CASE("asymptotic roots") {
  const SpectralRoots s = asymptotic_roots(Family::Longitudinal, 1e-3, Regime::Small);
  CHECK(s.sigma == doctest::Approx(-1.0).epsilon(1e-5));
  CHECK(s.beta == doctest::Approx(-0.5).epsilon(1e-5));
  CHECK(s.omega == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-5));
  const SpectralRoots L = asymptotic_roots(Family::Longitudinal, 1e3, Regime::Large);
  CHECK(L.omega == doctest::Approx(std::sqrt(5.0 / 3.0) * 1e3).epsilon(1e-5));
  const SpectralRoots t = asymptotic_roots(Family::Transverse, 1e-3, Regime::Small);
  CHECK(std::abs(t.sigma) < 1e-5);
  CHECK(t.beta == doctest::Approx(-0.5).epsilon(1e-5));
  CHECK(t.omega == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-5));
  // seeds agree with the exact solver to leading order
  CHECK(std::abs(asymptotic_roots(Family::Longitudinal, 1e-2, Regime::Small).sigma -
                 longitudinal_roots(1e-2).sigma) < 1e-7);
  CHECK(std::abs(asymptotic_roots(Family::Transverse, 1e-2, Regime::Small).sigma -
                 transverse_roots(1e-2).sigma) < 1e-7);
  CHECK(std::abs(asymptotic_roots(Family::Transverse, 1e3, Regime::Large).omega /
                     transverse_roots(1e3).omega - 1.0) < 1e-6);
  CHECK_THROWS_AS(asymptotic_roots(Family::Transverse, 2.0, Regime::Small), InvalidArgument);
  CHECK_THROWS_AS(asymptotic_roots(Family::Longitudinal, 0.5, Regime::Large), InvalidArgument);
}

TEST_CASE("long double instantiation") {
  const auto r = longitudinal_roots<long double>(1.0L);
  CHECK(std::abs(static_cast<double>(r.sigma) - (-0.73004960114229162639)) < 1e-14);
  CHECK_THROWS_AS(longitudinal_roots(-1.0), InvalidArgument);
}
