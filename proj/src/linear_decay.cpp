#include "emx/linear_decay.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Core>

#include "emx/mode_propagator.hpp"

namespace emx {

const char* to_string(ProfileComponent c) {
  switch (c) {
    case ProfileComponent::Rho: return "rho";
    case ProfileComponent::ULong: return "u_long";
    case ProfileComponent::UTrans: return "u_trans";
    case ProfileComponent::Theta: return "theta";
    case ProfileComponent::ELong: return "E_long";
    case ProfileComponent::ETrans: return "E_trans";
    case ProfileComponent::BTrans: return "B_trans";
  }
  return "?";
}

const char* to_string(Field f) {
  switch (f) {
    case Field::Rho: return "rho";
    case Field::U: return "u";
    case Field::Theta: return "theta";
    case Field::E: return "E";
    case Field::B: return "B";
  }
  return "?";
}

Field field_from_string(const std::string& s) {
  if (s == "rho") return Field::Rho;
  if (s == "u") return Field::U;
  if (s == "theta") return Field::Theta;
  if (s == "E") return Field::E;
  if (s == "B") return Field::B;
  throw InvalidArgument("unknown component '" + s + "'");
}

Complex hat_profile(const RadialProfile& p, double kmag) {
  if (kmag < 0.0) throw InvalidArgument("kmag must be >= 0");
  return p.amplitude * std::exp(-kmag * kmag / (2.0 * p.width * p.width));
}

RadialQuadrature default_quadrature(const std::vector<RadialProfile>& profiles) {
  double w = 0.0;
  for (const auto& p : profiles) w = std::max(w, p.width);
  if (!(w > 0.0)) throw InvalidArgument("profile widths must be positive");
  return RadialQuadrature(20.0 * w);
}

namespace {

constexpr double kTwoPiSq = 2.0 * std::numbers::pi * std::numbers::pi;

bool is_transverse(ProfileComponent c) {
  return c == ProfileComponent::UTrans || c == ProfileComponent::ETrans ||
         c == ProfileComponent::BTrans;
}

// Common transverse polarization (unit) and the sign each transverse profile carries.
Vec3 shared_polarization(const std::vector<RadialProfile>& profiles, std::vector<double>& sign) {
  Vec3 a = Vec3::Zero();
  sign.assign(profiles.size(), 1.0);
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (!is_transverse(profiles[i].component)) continue;
    const double n = profiles[i].polarization.norm();
    if (!(n > 0.0)) throw InvalidArgument("transverse polarization must be nonzero");
    const Vec3 p = profiles[i].polarization / n;
    if (a.isZero()) {
      a = p;
      continue;
    }
    if (a.cross(p).norm() > 1e-12)
      throw InvalidArgument("transverse profiles must share one polarization axis");
    sign[i] = a.dot(p) > 0 ? 1.0 : -1.0;
  }
  if (a.isZero()) a = Vec3::UnitX();
  return a;
}

// Mode at |k| in the frame k~ = z with the transverse polarization along x.
ModeState node_mode(const std::vector<RadialProfile>& profiles, const std::vector<double>& sign,
                    double kmag) {
  ModeState m;
  Complex rho = 0.0;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const Complex g = hat_profile(profiles[i], kmag);
    switch (profiles[i].component) {
      case ProfileComponent::Rho: rho += g; break;
      case ProfileComponent::Theta: m.theta += g; break;
      case ProfileComponent::ULong: m.u(2) += I * g; break;
      case ProfileComponent::ELong: rho += kmag * g; break;  // E_par = i g  =>  rho = -i k E_par
      case ProfileComponent::UTrans: m.u(0) += sign[i] * g; break;
      case ProfileComponent::ETrans: m.E(0) += sign[i] * g; break;
      case ProfileComponent::BTrans: m.B(0) += sign[i] * g; break;
    }
  }
  m.rho = rho;
  m.E(2) = I * rho / kmag;
  return m;
}

bool is_scalar(Field f) { return f == Field::Rho || f == Field::Theta; }

// Per node and time: scalar value, or (alpha, beta, lambda) with
// f^ = alpha (I - k~k~) a + beta k~ x a + lambda k~.
struct NodeValues {
  Eigen::MatrixXcd s, alpha, beta, lambda;
};

NodeValues node_values(const std::vector<RadialProfile>& profiles, Field field,
                       const RadialQuadrature& q, const std::vector<double>& times) {
  std::vector<double> sign;
  shared_polarization(profiles, sign);
  const int N = static_cast<int>(q.nodes().size()), T = static_cast<int>(times.size());
  NodeValues v;
  if (is_scalar(field)) {
    v.s.resize(N, T);
  } else {
    v.alpha.resize(N, T);
    v.beta.resize(N, T);
    v.lambda.resize(N, T);
  }
  for (int n = 0; n < N; ++n) {
    const double kmag = q.nodes()[n];
    const ModeEvolution ev(node_mode(profiles, sign, kmag), WaveVector::along_z(kmag));
    for (int j = 0; j < T; ++j) {
      const ModeState m = ev.at(times[j]);
      switch (field) {
        case Field::Rho: v.s(n, j) = m.rho; continue;
        case Field::Theta: v.s(n, j) = m.theta; continue;
        default: break;
      }
      const CVec3& x = field == Field::U ? m.u : field == Field::E ? m.E : m.B;
      v.alpha(n, j) = x(0);
      v.beta(n, j) = x(1);
      v.lambda(n, j) = x(2);
    }
  }
  return v;
}

std::vector<double> l2_values(const std::vector<RadialProfile>& profiles, Field field, int m,
                              const RadialQuadrature& q, const std::vector<double>& times) {
  const NodeValues v = node_values(profiles, field, q, times);
  std::vector<double> out(times.size(), 0.0);
  for (std::size_t n = 0; n < q.nodes().size(); ++n) {
    const double k = q.nodes()[n];
    const double c = q.weights()[n] * std::pow(k, 2 * m + 2) / kTwoPiSq;
    for (std::size_t j = 0; j < times.size(); ++j) {
      double a2;
      if (is_scalar(field))
        a2 = std::norm(v.s(n, j));
      else  // angular mean of |(I - k~k~) a|^2 is 2/3
        a2 = std::norm(v.lambda(n, j)) +
             2.0 / 3.0 * (std::norm(v.alpha(n, j)) + std::norm(v.beta(n, j)));
      out[j] += c * a2;
    }
  }
  for (double& x : out) x = std::sqrt(x);
  return out;
}

// j0, j1, j2 and j1/z in closed form, with series near 0.
struct SphBessel {
  double j0, j1, j2, j1z;
};

SphBessel sph_bessel_012(double z) {
  if (z < 0.1) {
    const double z2 = z * z;
    return {1 - z2 / 6 * (1 - z2 / 20 * (1 - z2 / 42)),
            z / 3 * (1 - z2 / 10 * (1 - z2 / 28 * (1 - z2 / 54))),
            z2 / 15 * (1 - z2 / 14 * (1 - z2 / 36)),
            (1 - z2 / 10 * (1 - z2 / 28 * (1 - z2 / 54))) / 3};
  }
  const double s = std::sin(z), c = std::cos(z), iz = 1.0 / z;
  const double j1 = (s * iz - c) * iz;
  return {s * iz, j1, (3 * iz * iz - 1) * s * iz - 3 * c * iz * iz, j1 * iz};
}

std::vector<double> radial_grid(double r_hi, int n) {
  std::vector<double> r{0.0};
  const double r_lo = 1e-3 * r_hi;
  for (int i = 0; i < n; ++i) r.push_back(r_lo * std::pow(r_hi / r_lo, double(i) / (n - 1)));
  return r;
}

std::vector<double> linf_values(Field field, const RadialQuadrature& q, const NodeValues& v,
                                const std::vector<double>& r) {
  const int N = static_cast<int>(q.nodes().size()), R = static_cast<int>(r.size());
  Eigen::VectorXd c(N);
  for (int n = 0; n < N; ++n) c(n) = q.weights()[n] * q.nodes()[n] * q.nodes()[n] / kTwoPiSq;

  if (is_scalar(field)) {
    Eigen::MatrixXd K0(R, N);
    for (int i = 0; i < R; ++i)
      for (int n = 0; n < N; ++n) K0(i, n) = c(n) * sph_bessel_012(q.nodes()[n] * r[i]).j0;
    const Eigen::MatrixXcd f = K0.cast<Complex>() * v.s;
    std::vector<double> out(v.s.cols());
    for (int j = 0; j < f.cols(); ++j) out[j] = f.col(j).cwiseAbs().maxCoeff();
    return out;
  }

  Eigen::MatrixXd Ka(R, N), K2(R, N), K1(R, N);
  for (int i = 0; i < R; ++i)
    for (int n = 0; n < N; ++n) {
      const SphBessel j = sph_bessel_012(q.nodes()[n] * r[i]);
      Ka(i, n) = c(n) * (j.j0 - j.j1z);
      K2(i, n) = c(n) * j.j2;
      K1(i, n) = c(n) * j.j1;
    }
  // f(x) = A a + Bc x~(x~.a) + C x~ x a + D x~
  const Eigen::MatrixXcd A = Ka.cast<Complex>() * v.alpha;
  const Eigen::MatrixXcd Bc = K2.cast<Complex>() * v.alpha;
  const Eigen::MatrixXcd C = I * (K1.cast<Complex>() * v.beta);
  const Eigen::MatrixXcd D = I * (K1.cast<Complex>() * v.lambda);

  constexpr int n_theta = 37;
  std::vector<double> out(v.alpha.cols(), 0.0);
  for (int j = 0; j < A.cols(); ++j)
    for (int i = 0; i < R; ++i)
      for (int h = 0; h < n_theta; ++h) {
        const double th = std::numbers::pi * h / (n_theta - 1);
        const double cs = std::cos(th), sn = std::sin(th);
        const Complex va = A(i, j) + Bc(i, j) * cs * cs + D(i, j) * cs;
        const Complex vb = (Bc(i, j) * cs + D(i, j)) * sn;
        const Complex vc = C(i, j) * sn;
        out[j] = std::max(out[j], std::sqrt(std::norm(va) + std::norm(vb) + std::norm(vc)));
      }
  return out;
}

void check_times(const std::vector<double>& times) {
  if (times.empty()) throw InvalidArgument("time list is empty");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0) throw InvalidArgument("times must be >= 0");
    if (i > 0 && !(times[i] > times[i - 1])) throw InvalidArgument("times must be increasing");
  }
}

double max_rel_change(const std::vector<double>& a, const std::vector<double>& b) {
  double scale = 0.0;
  for (double x : b) scale = std::max(scale, x);
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double den = std::max(std::abs(b[j]), 1e-300 + 1e-14 * scale);
    if (scale > 0.0) d = std::max(d, std::abs(a[j] - b[j]) / den);
  }
  return d;
}

}  // namespace

NormSeries l2_norm_series(const std::vector<RadialProfile>& profiles, Field field, int m,
                          const std::vector<double>& times) {
  if (m < 0) throw InvalidArgument("derivative order m must be >= 0");
  check_times(times);
  const RadialQuadrature q = default_quadrature(profiles);
  NormSeries s;
  s.label = to_string(field);
  s.kind = m == 0 ? NormKind::L2 : NormKind::HdotM;
  s.m = m;
  s.times = times;
  s.values = l2_values(profiles, field, m, q, times);
  s.quadrature_change = max_rel_change(s.values, l2_values(profiles, field, m, q.refined(), times));
  for (double x : s.values)
    if (!std::isfinite(x)) throw QuadratureError("non-finite L2 norm for " + s.label);
  return s;
}

NormSeries linf_norm_series(const std::vector<RadialProfile>& profiles, Field field,
                            const std::vector<double>& times) {
  check_times(times);
  const RadialQuadrature q = default_quadrature(profiles);
  double wmin = profiles.front().width;
  for (const auto& p : profiles) wmin = std::min(wmin, p.width);
  const double r_hi = 10.0 * std::sqrt(2.0 * times.back() + 1.0 / (wmin * wmin));
  const NodeValues v = node_values(profiles, field, q, times);

  NormSeries s;
  s.label = to_string(field);
  s.kind = NormKind::Linf;
  s.times = times;
  s.values = linf_values(field, q, v, radial_grid(r_hi, 200));
  s.refinement_change = max_rel_change(s.values, linf_values(field, q, v, radial_grid(r_hi, 399)));
  for (double x : s.values)
    if (!std::isfinite(x)) throw QuadratureError("non-finite sup norm for " + s.label);
  return s;
}

DecayFit fit_decay(const NormSeries& s, double t_lo, double t_hi, FitModel model) {
  if (!(t_hi > t_lo)) throw InvalidArgument("fit window must have t_hi > t_lo");
  std::vector<double> x, y;
  for (std::size_t j = 0; j < s.times.size(); ++j) {
    const double t = s.times[j];
    if (t < t_lo * (1 - 1e-12) || t > t_hi * (1 + 1e-12)) continue;
    if (!(s.values[j] > 0.0))
      throw InvalidArgument("nonpositive value at t = " + std::to_string(t) + " in fit window");
    x.push_back(model == FitModel::PowerLaw ? std::log1p(t) : t);
    y.push_back(std::log(s.values[j]));
  }
  if (x.size() < 10) throw InvalidArgument("fit window needs at least 10 samples");
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    A(i, 0) = x[i];
    A(i, 1) = 1.0;
    b(i) = y[i];
  }
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
  DecayFit f;
  f.model = model;
  f.slope = c(0);
  f.intercept = c(1);
  f.rms_residual = std::sqrt((A * c - b).squaredNorm() / n);
  f.t_lo = t_lo;
  f.t_hi = t_hi;
  f.samples = n;
  return f;
}

std::vector<double> log_times(double t_lo, double t_hi, int n) {
  if (!(t_lo > 0.0 && t_hi > t_lo) || n < 2) throw InvalidArgument("need 0 < t_lo < t_hi and n >= 2");
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = t_lo * std::pow(t_hi / t_lo, double(i) / (n - 1));
  return t;
}

}  // namespace emx
