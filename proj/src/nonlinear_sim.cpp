#include "emx/nonlinear_sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>

namespace emx {

void SimConfig::validate() const {
  if (N < 16 || (N & (N - 1)) != 0) throw ManifestError("N", "N must be a power of two >= 16");
  if (!(L > 0.0)) throw ManifestError("L", "L must be positive");
  if (!(dt > 0.0)) throw ManifestError("dt", "dt must be positive");
  if (!(T_final >= 0.0)) throw ManifestError("T_final", "T_final must be >= 0");
  if (!(delta >= 0.0)) throw ManifestError("delta", "delta must be >= 0");
  if (s < 1) throw ManifestError("s", "s must be >= 1");
  if (!(dealias > 0.0 && dealias <= 1.0)) throw ManifestError("dealias", "dealias must be in (0, 1]");
  if (!(output_every > 0.0)) throw ManifestError("output_every", "output_every must be positive");
  if (!(density_floor > 0.0 && density_floor < 1.0))
    throw ManifestError("density_floor", "density_floor must be in (0, 1)");
  if (!(max_increment > 0.0)) throw ManifestError("max_increment", "max_increment must be positive");
}

const char* field_name(int f) {
  static const char* names[kFields] = {"rho", "u_x", "u_y", "u_z", "theta", "E_x",
                                       "E_y", "E_z", "B_x", "B_y", "B_z"};
  return f >= 0 && f < kFields ? names[f] : "?";
}

namespace {

ModeState load(const FieldState& u, std::size_t s) {
  ModeState m;
  m.rho = u.hat[0][s];
  m.theta = u.hat[4][s];
  for (int i = 0; i < 3; ++i) {
    m.u(i) = u.hat[1 + i][s];
    m.E(i) = u.hat[5 + i][s];
    m.B(i) = u.hat[8 + i][s];
  }
  return m;
}

void store(FieldState& u, std::size_t s, const ModeState& m) {
  u.hat[0][s] = m.rho;
  u.hat[4][s] = m.theta;
  for (int i = 0; i < 3; ++i) {
    u.hat[1 + i][s] = m.u(i);
    u.hat[5 + i][s] = m.E(i);
    u.hat[8 + i][s] = m.B(i);
  }
}

void add_sources(FieldState& u, const Sources& g, double c) {
  const std::size_t S = g.g1.size();
  for (std::size_t s = 0; s < S; ++s) {
    u.hat[0][s] += c * g.g1[s];
    u.hat[4][s] += c * g.g3[s];
    for (int i = 0; i < 3; ++i) {
      u.hat[1 + i][s] += c * g.g2[i][s];
      u.hat[5 + i][s] += c * g.g4[i][s];
    }
  }
}

}  // namespace

Simulator::Simulator(const SimConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  grid_ = std::make_unique<SpectralGrid>(cfg_.N, cfg_.L, cfg_.dealias);
}

FieldState Simulator::zero_state() const {
  FieldState u;
  for (int f = 0; f < kFields; ++f) {
    u.hat[f].assign(grid_->spec_size(), 0.0);
    u.phys[f].assign(grid_->real_size(), 0.0);
  }
  return u;
}

void Simulator::sync_physical(FieldState& u) const {
  for (int f = 0; f < kFields; ++f) {
    u.phys[f].resize(grid_->real_size());
    grid_->inverse(u.hat[f].data(), u.phys[f].data());
  }
}

void Simulator::sync_spectral(FieldState& u) const {
  for (int f = 0; f < kFields; ++f) {
    u.hat[f].resize(grid_->spec_size());
    grid_->forward(u.phys[f].data(), u.hat[f].data());
  }
}

FieldState Simulator::initial_state(unsigned seed, double delta) const {
  const SpectralGrid& g = *grid_;
  FieldState u = zero_state();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  const double k0 = 2.0 * std::numbers::pi / g.L(), nmax = g.N() / 6.0;
  for (int f = 0; f < kFields; ++f)
    for (std::size_t s = 0; s < g.spec_size(); ++s) {
      const double a = nd(rng), b = nd(rng);
      const double n = g.wavevector(s).norm() / k0;
      if (!g.kept(s) || n == 0.0 || n > nmax) continue;
      const double taper = 1.0 - (n / nmax) * (n / nmax);
      u.hat[f][s] = Complex(a, b) * taper * taper;
    }
  // round trip through physical space makes the spectrum Hermitian
  sync_physical(u);
  sync_spectral(u);
  u = enforce_compatibility(u);
  double sup = 0.0;
  for (int f = 0; f < kFields; ++f)
    for (double x : u.phys[f]) sup = std::max(sup, std::abs(x));
  const double c = sup > 0.0 ? delta / sup : 0.0;
  for (int f = 0; f < kFields; ++f) {
    for (auto& x : u.hat[f]) x *= c;
    for (auto& x : u.phys[f]) x *= c;
  }
  return u;
}

Sources Simulator::nonlinear_terms(const FieldState& st) const {
  const SpectralGrid& g = *grid_;
  const std::size_t R = g.real_size(), S = g.spec_size();
  auto phys = [&](const std::vector<Complex>& h) {
    std::vector<double> r(R);
    g.inverse(h.data(), r.data());
    return r;
  };
  std::vector<Complex> tmp(S);
  auto deriv = [&](const std::vector<Complex>& h, int j) {
    for (std::size_t s = 0; s < S; ++s) tmp[s] = I * g.wavevector(s)(j) * h[s];
    return phys(tmp);
  };

  const std::vector<double> rho = phys(st.hat[0]), th = phys(st.hat[4]);
  std::array<std::vector<double>, 3> u, B, drho, dth;
  std::array<std::array<std::vector<double>, 3>, 3> du;  // du[i][j] = d_j u_i
  for (int i = 0; i < 3; ++i) {
    u[i] = phys(st.hat[1 + i]);
    B[i] = phys(st.hat[8 + i]);
    drho[i] = deriv(st.hat[0], i);
    dth[i] = deriv(st.hat[4], i);
    for (int j = 0; j < 3; ++j) du[i][j] = deriv(st.hat[1 + i], j);
  }

  const double rmin = 1.0 + *std::min_element(rho.begin(), rho.end());
  const double tmin = 1.0 + *std::min_element(th.begin(), th.end());
  if (rmin < cfg_.density_floor)
    throw RegimeExit("1 + rho = " + std::to_string(rmin) + " below the density floor", rmin);
  if (tmin < cfg_.density_floor)
    throw RegimeExit("1 + Theta = " + std::to_string(tmin) + " below the floor", tmin);

  std::array<std::vector<double>, 3> q, G2;
  std::vector<double> G3(R);
  for (int i = 0; i < 3; ++i) {
    q[i].resize(R);
    G2[i].resize(R);
  }
  for (std::size_t x = 0; x < R; ++x) {
    const double f = (1.0 + th[x]) / (1.0 + rho[x]) - 1.0;
    const double divu = du[0][0][x] + du[1][1][x] + du[2][2][x];
    const Vec3 uv(u[0][x], u[1][x], u[2][x]), bv(B[0][x], B[1][x], B[2][x]);
    const Vec3 uxb = uv.cross(bv);
    for (int i = 0; i < 3; ++i) {
      const double adv = uv(0) * du[i][0][x] + uv(1) * du[i][1][x] + uv(2) * du[i][2][x];
      G2[i][x] = -adv - f * drho[i][x] - uxb(i);
      q[i][x] = rho[x] * uv(i);
    }
    G3[x] = -(uv(0) * dth[0][x] + uv(1) * dth[1][x] + uv(2) * dth[2][x]) - 2.0 / 3.0 * th[x] * divu +
            uv.squaredNorm() / 3.0;
  }

  Sources out;
  auto spec = [&](const std::vector<double>& r) {
    std::vector<Complex> h(S);
    g.forward(r.data(), h.data());
    g.truncate(h.data());
    return h;
  };
  for (int i = 0; i < 3; ++i) {
    out.g2[i] = spec(G2[i]);
    out.g4[i] = spec(q[i]);
  }
  out.g3 = spec(G3);
  // g1 = -div(rho u) = -div g4, exactly, so the sources keep div E = -rho
  out.g1.assign(S, 0.0);
  for (std::size_t s = 0; s < S; ++s) {
    const Vec3& k = g.wavevector(s);
    out.g1[s] = -I * (k(0) * out.g4[0][s] + k(1) * out.g4[1][s] + k(2) * out.g4[2][s]);
  }
  return out;
}

FieldState Simulator::enforce_compatibility(const FieldState& in) const {
  const SpectralGrid& g = *grid_;
  FieldState u = in;
  for (std::size_t s = 0; s < g.spec_size(); ++s) {
    const Vec3& k = g.wavevector(s);
    const double k2 = k.squaredNorm();
    if (k2 == 0.0) {
      u.hat[0][s] = 0.0;
      continue;
    }
    Complex kE = 0.0, kB = 0.0;
    for (int i = 0; i < 3; ++i) {
      kE += k(i) * u.hat[5 + i][s];
      kB += k(i) * u.hat[8 + i][s];
    }
    // longitudinal E replaced by i rho k / |k|^2
    const Complex rho = u.hat[0][s];
    for (int i = 0; i < 3; ++i) {
      u.hat[5 + i][s] += k(i) * (I * rho - kE) / k2;
      u.hat[8 + i][s] -= k(i) * kB / k2;
    }
  }
  sync_physical(u);
  return u;
}

const std::vector<LinearFlow>& Simulator::flows(double dt) const {
  if (dt == flow_dt_) return flows_;
  const SpectralGrid& g = *grid_;
  flows_.assign(g.spec_size(), LinearFlow{});
  for (std::size_t s = 0; s < g.spec_size(); ++s)
    if (g.kept(s)) flows_[s] = LinearFlow::build(WaveVector::from(g.wavevector(s)), dt);
  flow_dt_ = dt;
  return flows_;
}

void Simulator::apply_flow(FieldState& u, double dt) const {
  const SpectralGrid& g = *grid_;
  const std::vector<LinearFlow>& F = flows(dt);
  for (std::size_t s = 0; s < g.spec_size(); ++s) {
    if (!g.kept(s)) {
      for (int f = 0; f < kFields; ++f) u.hat[f][s] = 0.0;
      continue;
    }
    store(u, s, F[s].apply(load(u, s), WaveVector::from(g.wavevector(s))));
  }
}

FieldState Simulator::linear_step(const FieldState& in, double dt) const {
  FieldState u = in;
  apply_flow(u, dt);
  u.t = in.t + dt;
  sync_physical(u);
  return u;
}

double Simulator::spectral_norm(const FieldState& u) const {
  double s = 0.0;
  for (int f = 0; f < kFields; ++f)
    s += grid_->inner(u.hat[f].data(), u.hat[f].data(), [](const Vec3&) { return 1.0; });
  return std::sqrt(s);
}

FieldState Simulator::step(const FieldState& u, double dt) const {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  const Sources n0 = nonlinear_terms(u);
  FieldState probe = zero_state();
  add_sources(probe, n0, 1.0);
  const double nn = spectral_norm(probe), un = spectral_norm(u);
  if (dt * nn > cfg_.max_increment * un)
    throw StepRejected("nonlinear increment too large", un > 0 ? dt * nn / un : INFINITY);

  FieldState a = u;  // U* = Phi(U + h N(U))
  add_sources(a, n0, dt);
  apply_flow(a, dt);
  const Sources n1 = nonlinear_terms(a);

  FieldState b = u;  // Phi(U + h/2 N(U)) + h/2 N(U*)
  add_sources(b, n0, dt / 2);
  apply_flow(b, dt);
  add_sources(b, n1, dt / 2);
  b.t = u.t + dt;
  b = enforce_compatibility(b);
  sync_spectral(b);  // restores exact Hermitian symmetry
  return b;
}

GridResidual Simulator::constraint_residuals(const FieldState& u) const {
  const SpectralGrid& g = *grid_;
  const std::size_t S = g.spec_size(), R = g.real_size();
  std::vector<Complex> dE(S), dB(S);
  for (std::size_t s = 0; s < S; ++s) {
    const Vec3& k = g.wavevector(s);
    Complex e = u.hat[0][s], b = 0.0;
    for (int i = 0; i < 3; ++i) {
      e += I * k(i) * u.hat[5 + i][s];
      b += I * k(i) * u.hat[8 + i][s];
    }
    dE[s] = e;
    dB[s] = b;
  }
  std::vector<double> r(R);
  GridResidual out;
  g.inverse(dE.data(), r.data());
  for (double x : r) out.gauss = std::max(out.gauss, std::abs(x));
  g.inverse(dB.data(), r.data());
  for (double x : r) out.solenoidal = std::max(out.solenoidal, std::abs(x));
  return out;
}

double Simulator::reality_defect(const FieldState& u) const {
  const SpectralGrid& g = *grid_;
  const int N = g.N(), h = g.nzh();
  double d = 0.0, scale = 0.0;
  for (int f = 0; f < kFields; ++f) {
    for (const Complex& z : u.hat[f]) scale = std::max(scale, std::abs(z));
    for (int l : {0, N / 2})
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          const std::size_t s = (std::size_t(i) * N + j) * h + l;
          const std::size_t p = (std::size_t((N - i) % N) * N + (N - j) % N) * h + l;
          d = std::max(d, std::abs(u.hat[f][s] - std::conj(u.hat[f][p])));
        }
  }
  return scale > 0.0 ? d / scale : 0.0;
}

namespace {

constexpr char kMagic[8] = {'E', 'M', 'X', 'S', 'N', 'A', 'P', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}
void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}
void put_f64(std::ostream& os, double x) { put_u64(os, std::bit_cast<std::uint64_t>(x)); }

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw Error("truncated snapshot");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}
std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw Error("truncated snapshot");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}
double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

void write_snapshot(const std::string& path, const SpectralGrid& g, const FieldState& u) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path);
  os.write(kMagic, 8);
  for (int d = 0; d < 3; ++d) put_u32(os, static_cast<std::uint32_t>(g.N()));
  put_u32(os, kFields);
  put_f64(os, g.L());
  put_f64(os, u.t);
  for (int f = 0; f < kFields; ++f) {
    char name[8] = {};
    std::memcpy(name, field_name(f), std::min(sizeof name, std::strlen(field_name(f))));
    os.write(name, 8);
  }
  for (int f = 0; f < kFields; ++f)
    for (double x : u.phys[f]) put_f64(os, x);
  if (!os) throw Error("write failed for " + path);
}

FieldState read_snapshot(const std::string& path, const SpectralGrid& g) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw Error("not a snapshot: " + path);
  for (int d = 0; d < 3; ++d)
    if (get_u32(is) != static_cast<std::uint32_t>(g.N())) throw Error("snapshot grid size mismatch");
  if (get_u32(is) != kFields) throw Error("snapshot field count mismatch");
  const double L = get_f64(is);
  if (std::abs(L - g.L()) > 1e-12 * g.L()) throw Error("snapshot box length mismatch");
  FieldState u;
  u.t = get_f64(is);
  is.ignore(8 * kFields);
  for (int f = 0; f < kFields; ++f) {
    u.phys[f].resize(g.real_size());
    for (double& x : u.phys[f]) x = get_f64(is);
    u.hat[f].resize(g.spec_size());
    g.forward(u.phys[f].data(), u.hat[f].data());
  }
  return u;
}

}  // namespace emx
