#include "emx/energy.hpp"

#include <cmath>

namespace emx {

std::vector<std::array<int, 3>> multi_indices(int s) {
  if (s < 0) throw InvalidArgument("order must be >= 0");
  std::vector<std::array<int, 3>> out;
  for (int n = 0; n <= s; ++n)
    for (int a = n; a >= 0; --a)
      for (int b = n - a; b >= 0; --b) out.push_back({a, b, n - a - b});
  return out;
}

EnergyReport energy_functional(const SpectralGrid& g, const FieldState& u, int s,
                               const LyapunovWeights& w) {
  if (s < 2) throw InvalidArgument("energy functional needs s >= 2");
  const std::size_t S = g.spec_size(), R = g.real_size();
  const double dV = g.cell_volume();

  std::vector<double> rho(R), th(R);
  g.inverse(u.hat[0].data(), rho.data());
  g.inverse(u.hat[4].data(), th.data());

  EnergyReport rep;
  rep.weights = w;

  auto ipow = [](double x, int p) {
    double r = 1.0;
    while (p-- > 0) r *= x;
    return r;
  };
  // Constant-coefficient weights sum_{|alpha| <= j} k^{2 alpha}, accumulated per mode.
  std::vector<double> W[3];  // j = s, s - 1, s - 2
  for (auto& v : W) v.assign(S, 0.0);

  // Variable-coefficient parts need every derivative in physical space.
  std::vector<Complex> d(S), fac(S);
  std::vector<double> dr(R), dt(R), du(R);
  for (const auto& al : multi_indices(s)) {
    const int n = al[0] + al[1] + al[2];
    const Complex in = std::pow(I, n);
    for (std::size_t i = 0; i < S; ++i) {
      const Vec3& k = g.wavevector(i);
      const double m = ipow(k(0), al[0]) * ipow(k(1), al[1]) * ipow(k(2), al[2]);
      fac[i] = in * m;
      for (int j = 0; j < 3; ++j)
        if (n <= s - j) W[j][i] += m * m;
    }
    auto derive = [&](const std::vector<Complex>& f, std::vector<double>& out) {
      for (std::size_t i = 0; i < S; ++i) d[i] = fac[i] * f[i];
      g.inverse(d.data(), out.data());
    };
    derive(u.hat[0], dr);
    derive(u.hat[4], dt);
    double eI = 0.0, k1_local = 0.0;
    for (std::size_t x = 0; x < R; ++x) {
      const double a = 1.0 + rho[x], b = 1.0 + th[x];
      eI += b / a * dr[x] * dr[x] + 1.5 * a / b * dt[x] * dt[x];
      k1_local += dr[x] * dr[x] / (2.0 * a);
    }
    for (int i = 0; i < 3; ++i) {
      derive(u.hat[1 + i], du);
      for (std::size_t x = 0; x < R; ++x) eI += (1.0 + rho[x]) * du[x] * du[x];
    }
    double e = eI * dV;
    if (n <= s - 1) e += w.K1 * k1_local * dV;
    rep.E_s += e;
    if (n >= 1) rep.E_s_h += e;
  }

  std::vector<Complex> divu(S);
  std::array<std::vector<Complex>, 3> curl;
  for (auto& c : curl) c.resize(S);
  for (std::size_t i = 0; i < S; ++i) {
    const Vec3& k = g.wavevector(i);
    divu[i] = I * (k(0) * u.hat[1][i] + k(1) * u.hat[2][i] + k(2) * u.hat[3][i]);
    const CVec3 E(u.hat[5][i], u.hat[6][i], u.hat[7][i]);
    const CVec3 c = -I * cross(k, E);
    for (int j = 0; j < 3; ++j) curl[j][i] = c(j);
  }
  for (bool high : {false, true}) {
    // the alpha = 0 term has weight 1 in every sum
    const double drop = high ? 1.0 : 0.0;
    auto at = [&](int j) { return [&, j](std::size_t i) { return W[j][i] - drop; }; };
    double e = 0.0, uE = 0.0, cb = 0.0;
    for (int f = 5; f < kFields; ++f) e += g.inner_indexed(u.hat[f].data(), u.hat[f].data(), at(0));
    for (int i = 0; i < 3; ++i) {
      uE += g.inner_indexed(u.hat[1 + i].data(), u.hat[5 + i].data(), at(1));
      cb += g.inner_indexed(curl[i].data(), u.hat[8 + i].data(), at(2));
    }
    // K1 <-div u, rho>, K2 <u, E>, K3 <-curl E, B>
    e += -w.K1 * g.inner_indexed(divu.data(), u.hat[0].data(), at(1)) + w.K2 * uE + w.K3 * cb;
    (high ? rep.E_s_h : rep.E_s) += e;
  }

  // plain norms with |k|^{2j}
  std::vector<double> A(s + 1), EB(s + 1), E0(s + 1);
  for (int j = 0; j <= s; ++j) {
    auto kj = [j](const Vec3& k) { return std::pow(k.squaredNorm(), j); };
    for (int f = 0; f < kFields; ++f) {
      const double v = g.inner(u.hat[f].data(), u.hat[f].data(), kj);
      if (f <= 4)
        A[j] += v;
      else
        EB[j] += v;
      if (f >= 5 && f <= 7) E0[j] += v;
    }
    rep.order_norms.push_back(A[j] + EB[j]);
  }
  for (int j = 0; j <= s; ++j) {
    rep.plain_s += A[j] + EB[j];
    if (j >= 1) rep.plain_h += A[j] + EB[j];
    rep.D_s += A[j];
    if (j >= 1) rep.D_s_h += A[j];
    if (j >= 1 && j <= s - 1) {
      rep.D_s += EB[j];
      rep.D_s_h += EB[j];
    }
  }
  rep.D_s += E0[0];
  rep.equivalence_ratio = rep.plain_s > 0.0 ? rep.E_s / rep.plain_s : 0.0;
  return rep;
}

}  // namespace emx
