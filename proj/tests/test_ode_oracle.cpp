#include <doctest.h>

#include <cmath>
#include <random>

#include "emx/mode_propagator.hpp"
#include "emx/ode_oracle.hpp"

using namespace emx;

TEST_CASE("rhs fixtures") {
  const ModeState z = rhs(ModeState{}, WaveVector::along_z(2.0));
  CHECK(z.norm() == 0.0);

  ModeState m;
  m.u = CVec3(1, 0, 0);
  const ModeState d = rhs(m, WaveVector::along_z(0.0));
  CHECK((d.u - CVec3(-1, 0, 0)).norm() == 0.0);
  CHECK((d.E - CVec3(1, 0, 0)).norm() == 0.0);
  CHECK(std::abs(d.rho) + std::abs(d.theta) + d.B.norm() == 0.0);

  ModeState b;
  b.B = CVec3(1, 0, 0);
  const ModeState db = rhs(b, WaveVector::along_z(1.0));
  CHECK((db.E - CVec3(0, I, 0)).norm() == 0.0);
}

TEST_CASE("constraints are conserved by the vector field") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int i = 0; i < 100; ++i) {
    const WaveVector k = WaveVector::from(Vec3(g(rng), g(rng), g(rng)));
    const ModeState m = random_compatible_mode(k, rng);
    const ModeState d = rhs(m, k);
    CHECK(constraint_residual(d, k).max() <= 1e-13 * (1 + k.kmag) * (1 + k.kmag) * m.norm());
  }
}

TEST_CASE("base energy identity") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int i = 0; i < 100; ++i) {
    const WaveVector k = WaveVector::from(Vec3(g(rng), g(rng), g(rng)));
    const ModeState m = random_compatible_mode(k, rng);
    const ModeState d = rhs(m, k);
    const double rate = 2 * (std::conj(m.rho) * d.rho).real() + 2 * m.u.dot(d.u).real() +
                        3 * (std::conj(m.theta) * d.theta).real() + 2 * m.E.dot(d.E).real() +
                        2 * m.B.dot(d.B).real();
    const double expect = -2 * m.u.squaredNorm() - 3 * std::norm(m.theta);
    CHECK(std::abs(rate - expect) <= 1e-12 * (1 + k.kmag) * m.squared_norm());
  }
}

TEST_CASE("integrate bookkeeping") {
  const WaveVector k = WaveVector::along_z(1.0);
  std::mt19937_64 rng(3);
  const ModeState m = random_compatible_mode(k, rng);
  const ModeTrajectory t0 = integrate(m, k, 0.0, 1e-4);
  CHECK(t0.states.size() == 1);
  CHECK((t0.states[0] - m).norm() == 0.0);

  const ModeTrajectory tr = integrate(m, k, 10.0, 1e-4, 1000);
  CHECK(tr.times.size() == 101);
  CHECK(tr.times.back() == 10.0);
  CHECK(tr.constraint_drift <= 1e-9);
  CHECK((tr.states.back() - propagate_mode(m, k, 10.0)).norm() <= 1e-8 * propagate_mode(m, k, 10.0).norm());

  CHECK_THROWS_AS(integrate(m, k, 1.0, 1e-3), StepSizeError);
  ModeState bad = m;
  bad.rho += 1.0;
  CHECK_THROWS_AS(integrate(bad, k, 1.0, 1e-4), ConstraintViolation);
}

TEST_CASE("fourth-order convergence") {
  const WaveVector k = WaveVector::from(Vec3(1.0, 2.0, 2.0));
  std::mt19937_64 rng(4);
  const ModeState m = random_compatible_mode(k, rng);
  const ModeState exact = propagate_mode(m, k, 2.0);
  // coarse steps so truncation dominates rounding
  auto err = [&](double h) {
    ModeState x = m;
    const int n = static_cast<int>(std::lround(2.0 / h));
    for (int i = 0; i < n; ++i) x = rk4_step<double>(x, k.k, h);
    return (x - exact).norm();
  };
  const double e1 = err(0.04), e2 = err(0.02);
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.1));
}

TEST_CASE("generator matrix matches rhs") {
  const WaveVector k = WaveVector::from(Vec3(0.2, -0.7, 1.1));
  std::mt19937_64 rng(5);
  const ModeState m = random_compatible_mode(k, rng);
  CHECK((generator_matrix(k) * m.packed() - rhs(m, k).packed()).norm() <= 1e-14 * m.norm());
}

TEST_CASE("matrix form of the RK4 step") {
  const WaveVector k = WaveVector::from(Vec3(1.5, 0.3, -2.0));
  std::mt19937_64 rng(8);
  const ModeState m = random_compatible_mode(k, rng);
  const double h = 1e-3 / (1 + k.kmag);
  const ModeState a = rk4_step<double>(m, k.k, h);
  CHECK((rk4_matrix(k, h) * m.packed() - a.packed()).norm() <= 1e-14 * m.norm());
  // the sampled path agrees with the stepped one
  const ModeTrajectory tr = integrate(m, k, 2.0, h);
  const ModeState s = sample_oracle(m, k, {0.5, 2.0}, h).back();
  CHECK((s - tr.states.back()).norm() <= 1e-12 * m.norm());
}
