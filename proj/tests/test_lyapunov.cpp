#include <doctest.h>

#include <cmath>
#include <random>

#include "emx/lyapunov.hpp"
#include "emx/mode_propagator.hpp"
#include "emx/ode_oracle.hpp"

using namespace emx;

TEST_CASE("functional fixtures") {
  const LyapunovWeights w{0.1, 0.01, 0.002, 0.0};
  CHECK(w.ordered());
  CHECK_FALSE(LyapunovWeights{1.0, 0.01, 0.002, 0}.ordered());
  CHECK_FALSE(LyapunovWeights{0.1, 0.01, 0.0005, 0}.ordered());
  CHECK(lyapunov_value(ModeState{}, WaveVector::along_z(1.0), w) == 0.0);
  ModeState th;
  th.theta = 1.0;
  CHECK(lyapunov_value(th, WaveVector::along_z(3.0), LyapunovWeights{0, 0, 0, 0}) == 1.5);
}

TEST_CASE("quadratic form agrees with the direct definition") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  const LyapunovWeights w{0.2, 0.03, 0.01, 0.0};
  for (int i = 0; i < 50; ++i) {
    const WaveVector k = WaveVector::from(Vec3(g(rng), g(rng), g(rng)));
    const ModeState m = random_compatible_mode(k, rng);
    const double k2 = k.kmag * k.kmag, a = 1 + k2;
    const CVec3 kc = k.k.cast<Complex>();
    auto pair = [](const CVec3& x, const CVec3& y) { return y.dot(x).real(); };  // Re(x | y)
    const double direct = std::norm(m.rho) + m.u.squaredNorm() + 1.5 * std::norm(m.theta) +
                          m.E.squaredNorm() + m.B.squaredNorm() +
                          w.K1 / a * pair(m.u, I * kc * (m.rho + m.theta)) +
                          w.K2 * k2 / (a * a) * pair(m.u, m.E) +
                          w.K3 / (a * a) * pair(-I * cross<double>(kc, m.B), m.E);
    CHECK(lyapunov_value(m, k, w) == doctest::Approx(direct).epsilon(1e-13));
    // exact rate against a centered difference of the closed form
    const double h = 1e-5;
    const double fd = (lyapunov_value(propagate_mode(m, k, 1 + h), k, w) -
                       lyapunov_value(propagate_mode(m, k, 1 - h), k, w)) / (2 * h);
    CHECK(lyapunov_rate(propagate_mode(m, k, 1.0), k, w) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("equivalence for the reference weights") {
  std::mt19937_64 rng(8);
  const LyapunovWeights w{0.1, 0.01, 0.002, 0.0};
  for (const WaveVector& k : log_spaced_waves(1e-2, 1e2, 30, 3)) {
    for (int j = 0; j < 5; ++j) {
      const ModeState m = random_compatible_mode(k, rng);
      const double r = lyapunov_value(m, k, w) / m.squared_norm();
      CHECK(r >= 0.5);
      CHECK(r <= 1.5);
    }
  }
}

TEST_CASE("weight search and held-out decay") {
  const auto train = log_spaced_waves(1e-2, 1e2, 21, 5);
  const WeightSearchResult res = weight_search(train, 1, 11, 3.0);
  CHECK(res.ok);
  CHECK(res.weights.ordered());
  CHECK(res.weights.gamma > 0.0);
  CHECK(res.c_eq > 0.0);
  CHECK(res.C_eq >= res.c_eq);

  std::mt19937_64 rng(99);
  for (const WaveVector& k : log_spaced_waves(1.3e-2, 0.8e2, 12, 6)) {
    const ModeState m = random_compatible_mode(k, rng);
    CHECK(lyapunov_decay_check(m, k, res.weights, 3.0, max_oracle_dt(k.kmag)).pass);
  }

  // doubling the sample grid does not invalidate the weights
  for (const WaveVector& k : log_spaced_waves(1e-2, 1e2, 42, 7))
    CHECK(form_bounds(k, res.weights).gamma_max >= res.weights.gamma);
}

TEST_CASE("k = 0 samples accept any admissible weights") {
  const LyapunovWeights w{0.3, 0.05, 0.02, 0.0};
  const FormBounds fb = form_bounds(WaveVector::along_z(0.0), w);
  CHECK(std::isinf(fb.gamma_max));
  CHECK(fb.gamma_max > 0);
}

TEST_CASE("counterexample scan for oversized K1") {
  // K1 = 1 alone does not break the inequality for these K2, K3; K1 = 2 does.
  auto scan = [](double K1) {
    const LyapunovWeights w{K1, 0.01, 0.002, 0.0015};
    for (const WaveVector& k : log_spaced_waves(0.1, 10.0, 21, 1)) {
      const ModeState m = worst_mode(k, w);
      if (!lyapunov_decay_check(m, k, w, 0.5, max_oracle_dt(k.kmag)).pass) return true;
    }
    return false;
  };
  CHECK_FALSE(scan(1.0));
  CHECK(scan(2.0));
}
