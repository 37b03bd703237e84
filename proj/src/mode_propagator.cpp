#include "emx/mode_propagator.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace emx {

namespace {

void require_positive_k(const WaveVector& k, const char* where) {
  if (!(k.kmag > 0.0))
    throw InvalidArgument(std::string(where) + ": kmag = 0 needs the k = 0 path of propagate_mode");
}

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("t must be finite and >= 0");
}

CVec3 cross_ik(const Vec3& k, const CVec3& v) { return I * cross(k, v); }

const double kOmega0 = std::sqrt(3.0) / 2.0;

}  // namespace

std::pair<LongitudinalState, TransverseState> decompose(const ModeState& mode, const WaveVector& k) {
  require_positive_k(k, "decompose");
  const CVec3 kh = k.khat.cast<Complex>();
  LongitudinalState l;
  l.rho = mode.rho;
  l.theta = mode.theta;
  l.u_par = kh.dot(mode.u);
  l.E_par = kh.dot(mode.E);
  TransverseState tr;
  tr.M1 = mode.u - l.u_par * kh;
  tr.M2 = mode.E - l.E_par * kh;
  tr.M3 = mode.B - kh.dot(mode.B) * kh;
  return {l, tr};
}

ModeState recombine(const LongitudinalState& l, const TransverseState& tr, const WaveVector& k) {
  const CVec3 kh = k.khat.cast<Complex>();
  ModeState m;
  m.rho = l.rho;
  m.theta = l.theta;
  m.u = l.u_par * kh + tr.M1;
  m.E = l.E_par * kh + tr.M2;
  m.B = tr.M3;
  return m;
}

Eigen::Matrix3d interpolation_matrix(const SpectralRoots& r) {
  const double s = r.sigma, b = r.beta, w = r.omega;
  Eigen::Matrix3d A;
  A << 1.0, 1.0, 0.0,
       s, b, w,
       s * s, b * b - w * w, 2.0 * b * w;
  return A;
}

Eigen::Vector3d time_basis(const SpectralRoots& r, double t) {
  const double eb = std::exp(r.beta * t);
  return {std::exp(r.sigma * t), eb * std::cos(r.omega * t), eb * std::sin(r.omega * t)};
}

Eigen::Matrix3cd longitudinal_initial_derivatives(const LongitudinalState& l, double kmag) {
  const double k = kmag, k2 = k * k;
  const Complex rho = l.rho, v = l.u_par, th = l.theta, ep = l.E_par;
  Eigen::Matrix3cd D;
  // rho
  D(0, 0) = rho;
  D(1, 0) = -I * k * v;
  D(2, 0) = -(1.0 + k2) * rho + I * k * v - k2 * th;
  // Theta
  D(0, 1) = th;
  D(1, 1) = -2.0 / 3.0 * I * k * v - th;
  D(2, 1) = -2.0 / 3.0 * (1.0 + k2) * rho + 4.0 / 3.0 * I * k * v + (1.0 - 2.0 / 3.0 * k2) * th;
  // k~.u, with i rho/|k| carried by E_par
  D(0, 2) = v;
  D(1, 2) = -ep - I * k * rho - v - I * k * th;
  D(2, 2) = ep + I * k * rho - 5.0 / 3.0 * k2 * v + 2.0 * I * k * th;
  return D;
}

Eigen::Matrix3cd transverse_initial_derivatives(const TransverseState& tr, const WaveVector& k) {
  Eigen::Matrix3cd D;
  D.row(0) = tr.M2.transpose();
  D.row(1) = (tr.M1 + cross_ik(k.k, tr.M3)).transpose();
  D.row(2) = (-tr.M1 - (1.0 + k.kmag * k.kmag) * tr.M2).transpose();
  return D;
}

LongitudinalCoeffs longitudinal_coeffs(const LongitudinalState& long0, const WaveVector& k) {
  require_positive_k(k, "longitudinal_coeffs");
  const SpectralRoots r = longitudinal_roots(k.kmag);
  const Eigen::Matrix3cd C = interpolation_matrix(r).cast<Complex>().partialPivLu().solve(
      longitudinal_initial_derivatives(long0, k.kmag));
  LongitudinalCoeffs out;
  for (int col = 0; col < 3; ++col)
    for (int i = 0; i < 3; ++i) out[3 * col + i] = C(i, col);
  return out;
}

LongitudinalState evaluate_longitudinal(const LongitudinalCoeffs& c, const SpectralRoots& r,
                                        double kmag, double t) {
  const Eigen::Vector3d b = time_basis(r, t);
  auto eval = [&](int off) { return b(0) * c[off] + b(1) * c[off + 1] + b(2) * c[off + 2]; };
  LongitudinalState l;
  l.rho = eval(0);
  l.theta = eval(3);
  l.u_par = eval(6);
  l.E_par = I * l.rho / kmag;
  return l;
}

LongitudinalState propagate_longitudinal(const LongitudinalState& long0, const WaveVector& k,
                                         double t) {
  require_positive_k(k, "propagate_longitudinal");
  require_time(t);
  return evaluate_longitudinal(longitudinal_coeffs(long0, k), longitudinal_roots(k.kmag), k.kmag, t);
}

TransverseCoeffs transverse_coeffs(const TransverseState& trans0, const WaveVector& k) {
  require_positive_k(k, "transverse_coeffs");
  const SpectralRoots r = transverse_roots(k.kmag);
  const Eigen::Matrix3cd C = interpolation_matrix(r).cast<Complex>().partialPivLu().solve(
      transverse_initial_derivatives(trans0, k));
  TransverseCoeffs out;
  out.c10 = C.row(0).transpose();
  out.c11 = C.row(1).transpose();
  out.c12 = C.row(2).transpose();
  return out;
}

TransverseState evaluate_transverse(const TransverseCoeffs& c, const SpectralRoots& r,
                                    const WaveVector& k, double t) {
  const double s = r.sigma, b = r.beta, w = r.omega;
  const double es = std::exp(s * t), eb = std::exp(b * t);
  const double cs = std::cos(w * t), sn = std::sin(w * t);
  TransverseState tr;
  tr.M2 = es * c.c10 + eb * (cs * c.c11 + sn * c.c12);

  const double d1 = (1.0 + b) * (1.0 + b) + w * w;
  tr.M1 = -es / (1.0 + s) * c.c10 -
          eb / d1 * (((1.0 + b) * cs + w * sn) * c.c11 + ((1.0 + b) * sn - w * cs) * c.c12);

  const double d3 = b * b + w * w;
  const CVec3 inner = es / s * c.c10 + eb / d3 * ((b * cs + w * sn) * c.c11 + (b * sn - w * cs) * c.c12);
  tr.M3 = -cross_ik(k.k, inner);
  return tr;
}

CVec3 transverse_ik_cross_M3_alt(const TransverseCoeffs& c, const SpectralRoots& r, double t,
                                 const CVec3& M1) {
  const double s = r.sigma, b = r.beta, w = r.omega;
  const double eb = std::exp(b * t), cs = std::cos(w * t), sn = std::sin(w * t);
  const CVec3 dM2 = s * std::exp(s * t) * c.c10 +
                    eb * ((b * cs - w * sn) * c.c11 + (b * sn + w * cs) * c.c12);
  return dM2 - M1;
}

TransverseState propagate_transverse(const TransverseState& trans0, const WaveVector& k, double t) {
  require_positive_k(k, "propagate_transverse");
  require_time(t);
  return evaluate_transverse(transverse_coeffs(trans0, k), transverse_roots(k.kmag), k, t);
}

ModeState propagate_k0(const ModeState& m0, double t) {
  const double e = std::exp(-0.5 * t), cs = std::cos(kOmega0 * t), sn = std::sin(kOmega0 * t) / kOmega0;
  ModeState m = m0;
  m.u = e * (cs * m0.u + sn * (-0.5 * m0.u - m0.E));
  m.E = e * (cs * m0.E + sn * (m0.u + 0.5 * m0.E));
  m.theta = m0.theta * std::exp(-t);
  return m;
}

ModeEvolution::ModeEvolution(const ModeState& mode0, const WaveVector& k) : mode0_(mode0), k_(k) {
  if (!is_compatible(mode0, k)) {
    const ConstraintResidual r = constraint_residual(mode0, k);
    std::ostringstream os;
    os << "incompatible mode: |ik.E + rho| = " << r.gauss << ", |k.B| = " << r.solenoidal;
    throw ConstraintViolation(os.str(), r.gauss, r.solenoidal);
  }
  if (k.kmag == 0.0) return;
  const auto [l, tr] = decompose(mode0, k);
  lr_ = emx::longitudinal_roots(k.kmag);
  tr_ = emx::transverse_roots(k.kmag);
  lc_ = longitudinal_coeffs(l, k);
  tc_ = transverse_coeffs(tr, k);
}

ModeState ModeEvolution::at(double t) const {
  require_time(t);
  if (k_.kmag == 0.0) return propagate_k0(mode0_, t);
  return recombine(evaluate_longitudinal(lc_, lr_, k_.kmag, t), evaluate_transverse(tc_, tr_, k_, t),
                   k_);
}

ModeState propagate_mode(const ModeState& mode0, const WaveVector& k, double t) {
  return ModeEvolution(mode0, k).at(t);
}

Envelopes envelope_bounds(const ModeState& m, const WaveVector& k, double t, double gamma) {
  const double r2 = std::norm(m.rho), u2 = m.u.squaredNorm(), th2 = std::norm(m.theta);
  const double e2 = m.E.squaredNorm(), b2 = m.B.squaredNorm();
  const double n_rut = std::sqrt(r2 + u2 + th2);
  const double n_rute = std::sqrt(r2 + u2 + th2 + e2);
  const double n_ute = std::sqrt(u2 + th2 + e2);
  const double n_ueb = std::sqrt(u2 + e2 + b2);
  const double fast = std::exp(-0.5 * t);
  const double x = k.kmag, x2 = x * x;
  const double eg = std::exp(-gamma * t);

  double su, se, sb;
  if (x <= 1.0) {
    const double slow = std::exp(-gamma * x2 * t);
    su = eg + x * slow;
    se = su;
    sb = x * eg + slow;
  } else {
    const double slow = std::exp(-gamma * t / x2);
    su = eg + slow / x;
    se = eg / x2 + slow;
    sb = eg / x + slow;
  }
  Envelopes env;
  env.rho = fast * n_rut;
  env.theta = env.rho;
  env.u = fast * n_rute + n_ueb * su;
  env.E = fast * n_ute + n_ueb * se;
  env.B = n_ueb * sb;
  return env;
}

EnvelopeScan envelope_scan(const std::vector<double>& kmags, const std::vector<double>& times,
                           int modes_per_k, unsigned seed, double gamma) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  EnvelopeScan out;
  out.gamma = gamma;
  const double t_half = times.empty() ? 0.0 : 0.5 * times.back();
  auto upd = [](double& s, double num, double den) {
    if (den > 0.0) s = std::max(s, num / den);
  };
  for (double kmag : kmags) {
    Vec3 dir(g(rng), g(rng), g(rng));
    dir.normalize();
    const WaveVector k = WaveVector::from(kmag * dir);
    for (int j = 0; j < modes_per_k; ++j) {
      const ModeState m0 = random_compatible_mode(k, rng);
      const ModeEvolution ev(m0, k);
      for (double t : times) {
        const ModeState m = ev.at(t);
        const Envelopes e = envelope_bounds(m0, k, t, gamma);
        for (Envelopes* s : {&out.sup_ratio, t <= t_half ? &out.sup_ratio_half : nullptr}) {
          if (!s) continue;
          upd(s->rho, std::abs(m.rho), e.rho);
          upd(s->u, m.u.norm(), e.u);
          upd(s->theta, std::abs(m.theta), e.theta);
          upd(s->E, m.E.norm(), e.E);
          upd(s->B, m.B.norm(), e.B);
        }
      }
    }
  }
  return out;
}

EnvelopeScan fit_envelope(const std::vector<double>& kmags, const std::vector<double>& times,
                          int modes_per_k, unsigned seed, double growth_tol) {
  EnvelopeScan last;
  for (double gamma : {1.0, 0.5, 0.3, 0.2, 0.15, 0.1, 0.05, 0.02}) {
    last = envelope_scan(kmags, times, modes_per_k, seed, gamma);
    const Envelopes& f = last.sup_ratio;
    const Envelopes& h = last.sup_ratio_half;
    const double lim = 1.0 + growth_tol;
    if (f.rho <= lim * h.rho && f.u <= lim * h.u && f.theta <= lim * h.theta && f.E <= lim * h.E &&
        f.B <= lim * h.B)
      return last;
  }
  return last;
}

LinearFlow LinearFlow::build(const WaveVector& k, double t) {
  require_time(t);
  LinearFlow f;
  f.kmag = k.kmag;
  if (k.kmag == 0.0) {
    const double e = std::exp(-0.5 * t), cs = std::cos(kOmega0 * t), sn = std::sin(kOmega0 * t) / kOmega0;
    f.k0 << e * (cs - 0.5 * sn), -e * sn, e * sn, e * (cs + 0.5 * sn);
    f.theta_k0 = std::exp(-t);
    return f;
  }
  const SpectralRoots lr = longitudinal_roots(k.kmag), trr = transverse_roots(k.kmag);
  for (int j = 0; j < 3; ++j) {
    LongitudinalState l;
    if (j == 0) {
      l.rho = 1.0;
      l.E_par = I / k.kmag;
    }
    if (j == 1) l.u_par = 1.0;
    if (j == 2) l.theta = 1.0;
    const LongitudinalState o = evaluate_longitudinal(longitudinal_coeffs(l, k), lr, k.kmag, t);
    f.lon.col(j) << o.rho, o.u_par, o.theta;
  }
  Vec3 p = k.khat.unitOrthogonal();
  const Vec3 q = k.khat.cross(p);
  const CVec3 pc = p.cast<Complex>();
  for (int i = 0; i < 3; ++i) {
    TransverseState tr;
    (i == 0 ? tr.M1 : i == 1 ? tr.M2 : tr.M3) = pc;
    const TransverseState o = evaluate_transverse(transverse_coeffs(tr, k), trr, k, t);
    const CVec3* outs[3] = {&o.M1, &o.M2, &o.M3};
    for (int j = 0; j < 3; ++j) {
      f.a(j, i) = p.cast<Complex>().dot(*outs[j]).real();
      f.b(j, i) = (q.cast<Complex>().dot(*outs[j]) / I).real();
    }
  }
  return f;
}

ModeState LinearFlow::apply(const ModeState& m, const WaveVector& k) const {
  if (k.kmag == 0.0) {
    ModeState o = m;
    o.u = k0(0, 0) * m.u + k0(0, 1) * m.E;
    o.E = k0(1, 0) * m.u + k0(1, 1) * m.E;
    o.theta = theta_k0 * m.theta;
    return o;
  }
  const CVec3 kh = k.khat.cast<Complex>();
  const Complex v = kh.dot(m.u);
  const Eigen::Vector3cd x(m.rho, v, m.theta);
  const Eigen::Vector3cd y = lon * x;
  const CVec3 M[3] = {m.u - v * kh, m.E - kh.dot(m.E) * kh, m.B - kh.dot(m.B) * kh};
  CVec3 JM[3];
  for (int i = 0; i < 3; ++i) JM[i] = I * cross<double>(kh, M[i]);
  CVec3 out[3];
  for (int j = 0; j < 3; ++j) {
    out[j].setZero();
    for (int i = 0; i < 3; ++i) out[j] += a(j, i) * M[i] + b(j, i) * JM[i];
  }
  ModeState o;
  o.rho = y(0);
  o.theta = y(2);
  o.u = y(1) * kh + out[0];
  o.E = I * y(0) / k.kmag * kh + out[1];
  o.B = out[2];
  return o;
}

}  // namespace emx
