#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "emx/linear_decay.hpp"
#include "emx/radial_quadrature.hpp"

using namespace emx;

namespace {

constexpr double kPi = std::numbers::pi;
const double kNorm = 1.0 / (2 * kPi * kPi);

// (2 pi)^-3 int |a g|^2 dk for g = exp(-k^2 / (2 w^2))
double gaussian_l2(double a, double w) { return std::sqrt(kNorm * a * a * std::sqrt(kPi) / 4 * w * w * w); }

}  // namespace

TEST_CASE("Gauss-Legendre is exact for degree 2n - 1") {
  std::vector<double> x, w;
  gauss_legendre(16, x, w);
  for (int d = 0; d <= 31; ++d) {
    double s = 0;
    for (int i = 0; i < 16; ++i) s += w[i] * std::pow(x[i], d);
    const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
    CHECK(std::abs(s - exact) < 1e-14);
  }
  for (int i = 0; i < 8; ++i) CHECK(x[i] == doctest::Approx(-x[15 - i]).epsilon(1e-15));
}

TEST_CASE("radial rule layout and refinement") {
  const RadialQuadrature q(10.0);
  CHECK(q.breaks().front() == 0.0);
  CHECK(q.kmax() == doctest::Approx(10.0));
  for (std::size_t i = 1; i < q.breaks().size(); ++i) {
    CHECK(q.breaks()[i] > q.breaks()[i - 1]);
    CHECK(q.breaks()[i] - q.breaks()[i - 1] <= 0.1 + 1e-12);
  }
  CHECK(q.breaks()[1] < 1e-3);
  const RadialQuadrature r = q.refined();
  CHECK(r.nodes().size() == 2 * q.nodes().size());
  const double exact = std::sqrt(kPi) / 4;
  CHECK(std::abs(q.integrate([](double k) { return k * k * std::exp(-k * k); }) - exact) < 1e-14);
  // a narrow bump near the origin is what graded panels are for
  const double narrow = q.integrate([](double k) { return k * k * std::exp(-k * k * 1e4); });
  CHECK(std::abs(narrow / (exact * 1e-6) - 1) < 1e-12);
  CHECK_THROWS_AS(RadialQuadrature(-1.0), InvalidArgument);
}

TEST_CASE("hat profile") {
  const RadialProfile p{ProfileComponent::Rho, 2.5, 0.8};
  CHECK(hat_profile(p, 0.0) == Complex(2.5));
  const RadialProfile u{ProfileComponent::Rho, 1.0, 0.8};
  CHECK(hat_profile(u, 0.8).real() == doctest::Approx(0.6065306597126334).epsilon(1e-14));
  CHECK_THROWS_AS(hat_profile(p, -1.0), InvalidArgument);
}

TEST_CASE("Plancherel at t = 0 matches the Gaussian moments") {
  for (double w : {0.3, 0.5, 1.0, 2.0}) {
    const std::vector<RadialProfile> P{{ProfileComponent::Rho, 1.7, w}};
    const NormSeries s = l2_norm_series(P, Field::Rho, 0, {0.0});
    CHECK(std::abs(s.values[0] / gaussian_l2(1.7, w) - 1) < 1e-10);
    // |grad f|^2 carries k^2: int k^4 e^{-k^2/w^2} = 3 sqrt(pi) w^5 / 8
    const NormSeries g = l2_norm_series(P, Field::Rho, 1, {0.0});
    const double e1 = std::sqrt(kNorm * 1.7 * 1.7 * 3 * std::sqrt(kPi) / 8 * std::pow(w, 5));
    CHECK(std::abs(g.values[0] / e1 - 1) < 1e-10);
  }
  // transverse data: angular mean of |(I - k~k~) a|^2 is 2/3
  const std::vector<RadialProfile> B{{ProfileComponent::BTrans, 1.0, 0.5, Vec3(1, 2, 2)}};
  const NormSeries b = l2_norm_series(B, Field::B, 0, {0.0});
  CHECK(std::abs(b.values[0] / (std::sqrt(2.0 / 3.0) * gaussian_l2(1.0, 0.5)) - 1) < 1e-10);
}

TEST_CASE("property: L2 norm of a random two-profile sum") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.2, 1.5), A(-2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double w1 = U(rng), w2 = U(rng), a1 = A(rng), a2 = A(rng);
    const std::vector<RadialProfile> P{{ProfileComponent::Theta, a1, w1},
                                       {ProfileComponent::Theta, a2, w2}};
    const double W = std::sqrt(2 * w1 * w1 * w2 * w2 / (w1 * w1 + w2 * w2));
    const double exact2 = kNorm * std::sqrt(kPi) / 4 *
                          (a1 * a1 * std::pow(w1, 3) + a2 * a2 * std::pow(w2, 3) + 2 * a1 * a2 * std::pow(W, 3));
    const NormSeries s = l2_norm_series(P, Field::Theta, 0, {0.0});
    CHECK(std::abs(s.values[0] / std::sqrt(exact2) - 1) < 1e-10);
  }
}

TEST_CASE("sup norm at t = 0 for a positive radial profile sits at the origin") {
  const double w = 0.7;
  const std::vector<RadialProfile> P{{ProfileComponent::Rho, 1.3, w}};
  const NormSeries s = linf_norm_series(P, Field::Rho, {0.0});
  // (2 pi)^-3 int g dk = kNorm * sqrt(2 pi) w^3 / 2
  CHECK(std::abs(s.values[0] / (1.3 * kNorm * std::sqrt(2 * kPi) / 2 * w * w * w) - 1) < 1e-10);
}

TEST_CASE("sup norm of a gradient field against a direct radial scan") {
  const double w = 0.6;
  const std::vector<RadialProfile> P{{ProfileComponent::ULong, 1.0, w}};
  const NormSeries s = linf_norm_series(P, Field::U, {0.0});
  // u = u_r(r) x~ with u_r = -kNorm int k^2 g j1(kr) dk, scanned with Simpson's rule
  double best = 0;
  for (int i = 1; i <= 400; ++i) {
    const double r = 0.02 * i;
    const int n = 4000;
    const double h = 20 * w / n;
    double acc = 0;
    for (int j = 0; j <= n; ++j) {
      const double k = j * h;
      const double c = (j == 0 || j == n) ? 1 : (j % 2 ? 4 : 2);
      acc += c * k * k * std::exp(-k * k / (2 * w * w)) * std::sph_bessel(1, k * r);
    }
    best = std::max(best, std::abs(kNorm * acc * h / 3));
  }
  CHECK(std::abs(s.values[0] / best - 1) < 1e-3);
}

TEST_CASE("sup norm of a transverse field against a 3-D quadrature") {
  const double w = 0.6;
  const Vec3 a = Vec3::UnitZ();
  const std::vector<RadialProfile> P{{ProfileComponent::BTrans, 1.0, w, a}};
  const NormSeries s = linf_norm_series(P, Field::B, {0.0});

  std::vector<double> xk, wk, xm, wm;
  gauss_legendre(48, xk, wk);
  gauss_legendre(32, xm, wm);
  const double kmax = 8 * w;
  const int nphi = 32;
  auto field = [&](const Vec3& x) {
    Eigen::Vector3cd acc = Eigen::Vector3cd::Zero();
    for (int i = 0; i < 48; ++i) {
      const double k = 0.5 * kmax * (xk[i] + 1), wkk = 0.5 * kmax * wk[i];
      const double g = std::exp(-k * k / (2 * w * w));
      for (int j = 0; j < 32; ++j) {
        const double mu = xm[j], sn = std::sqrt(1 - mu * mu);
        for (int p = 0; p < nphi; ++p) {
          const double phi = 2 * kPi * p / nphi;
          const Vec3 kh(sn * std::cos(phi), sn * std::sin(phi), mu);
          const Vec3 v = g * (a - kh * kh.dot(a));
          const Complex e = std::exp(Complex(0, k * kh.dot(x)));
          acc += (wkk * wm[j] * 2 * kPi / nphi * k * k) * e * v.cast<Complex>();
        }
      }
    }
    return acc.norm() / std::pow(2 * kPi, 3);
  };
  double best = 0;
  for (int i = 0; i <= 24; ++i)
    for (int h = 0; h <= 6; ++h) {
      const double r = 0.25 * i, th = kPi / 2 * h / 6;
      best = std::max(best, field(r * Vec3(std::sin(th), 0, std::cos(th))));
    }
  CHECK(s.values[0] >= best * (1 - 1e-6));
  CHECK(s.values[0] <= best * 1.01);
}

TEST_CASE("fit_decay on synthetic series") {
  NormSeries s;
  s.times = log_times(50, 500, 30);
  for (double t : s.times) s.values.push_back(3.0 * std::pow(1 + t, -0.75));
  const DecayFit f = fit_decay(s, 50, 500, FitModel::PowerLaw);
  CHECK(std::abs(f.slope + 0.75) < 1e-3);
  CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));
  CHECK(f.rms_residual < 1e-12);
  CHECK(f.samples == 30);

  NormSeries e;
  for (int i = 0; i <= 40; ++i) {
    e.times.push_back(0.5 * i);
    e.values.push_back(std::exp(-0.5 * e.times.back()));
  }
  CHECK(std::abs(fit_decay(e, 0, 20, FitModel::Exponential).slope + 0.5) < 1e-3);

  CHECK_THROWS_AS(fit_decay(e, 0, 2, FitModel::Exponential), InvalidArgument);
  e.values[3] = 0.0;
  CHECK_THROWS_AS(fit_decay(e, 0, 20, FitModel::Exponential), InvalidArgument);
}

TEST_CASE("B-only data: algebraic rates on the default window") {
  const std::vector<RadialProfile> P{{ProfileComponent::BTrans, 1.0, 0.5, Vec3::UnitX()}};
  const auto ts = log_times(50, 500, 40);
  double l2[3];
  int i = 0;
  for (Field f : {Field::B, Field::E, Field::U}) {
    const NormSeries s = l2_norm_series(P, f, 0, ts);
    CHECK(s.quadrature_change <= 1e-8);
    l2[i++] = fit_decay(s, 50, 500, FitModel::PowerLaw).slope;
    const NormSeries m = linf_norm_series(P, f, ts);
    CHECK(m.refinement_change <= 0.01);
    const double sl = fit_decay(m, 50, 500, FitModel::PowerLaw).slope;
    CHECK(std::abs(sl - (f == Field::B ? -1.5 : -2.0)) <= 0.15);
  }
  CHECK(std::abs(l2[0] + 0.75) <= 0.1);
  CHECK(std::abs(l2[1] + 1.25) <= 0.1);
  CHECK(std::abs(l2[2] + 1.25) <= 0.1);
  // B is the slowest
  CHECK(l2[0] > l2[1]);
  CHECK(l2[0] > l2[2]);
}

TEST_CASE("longitudinal data decays exponentially") {
  const std::vector<RadialProfile> P{{ProfileComponent::Rho, 1.0, 1.0}, {ProfileComponent::Theta, 1.0, 1.0}};
  std::vector<double> ts;
  for (int i = 0; i <= 40; ++i) ts.push_back(0.5 * i);
  for (Field f : {Field::Rho, Field::Theta}) {
    const NormSeries s = l2_norm_series(P, f, 0, ts);
    CHECK(fit_decay(s, 0, 20, FitModel::Exponential).slope <= -0.45);
  }
  // no transverse data, no B
  const NormSeries b = l2_norm_series(P, Field::B, 0, {0.0, 1.0});
  CHECK(b.values[1] == 0.0);
}

TEST_CASE("argument checks") {
  const std::vector<RadialProfile> mixed{{ProfileComponent::BTrans, 1.0, 0.5, Vec3::UnitX()},
                                         {ProfileComponent::ETrans, 1.0, 0.5, Vec3::UnitY()}};
  CHECK_THROWS_AS(l2_norm_series(mixed, Field::B, 0, {0.0}), InvalidArgument);
  const std::vector<RadialProfile> P{{ProfileComponent::Rho, 1.0, 1.0}};
  CHECK_THROWS_AS(l2_norm_series(P, Field::Rho, 0, {1.0, 0.5}), InvalidArgument);
  CHECK_THROWS_AS(l2_norm_series(P, Field::Rho, -1, {1.0}), InvalidArgument);
  CHECK_THROWS_AS(field_from_string("q"), InvalidArgument);
  CHECK(field_from_string("E") == Field::E);
}
