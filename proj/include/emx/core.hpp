#ifndef EMX_CORE_HPP
#define EMX_CORE_HPP

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "emx/errors.hpp"

namespace emx {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

inline constexpr Complex I{0.0, 1.0};

// Eigen's MatrixBase::cross conjugates its result for complex scalars; the
// mode equations need the plain bilinear product.
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, 3, 1> cross(const Eigen::Matrix<std::complex<Scalar>, 3, 1>& a,
                                                const Eigen::Matrix<std::complex<Scalar>, 3, 1>& b) {
  return {a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0)};
}

inline CVec3 cross(const Vec3& a, const CVec3& b) { return cross<double>(a.cast<Complex>(), b); }

/// One Fourier mode of the perturbation field [rho, u, Theta, E, B].
template <typename Scalar>
struct BasicModeState {
  using Cx = std::complex<Scalar>;
  using CV = Eigen::Matrix<Cx, 3, 1>;
  using Packed = Eigen::Matrix<Cx, 11, 1>;

  Cx rho{};
  CV u = CV::Zero();
  Cx theta{};
  CV E = CV::Zero();
  CV B = CV::Zero();

  static BasicModeState zero() { return {}; }

  Packed packed() const {
    Packed p;
    p << rho, u, theta, E, B;
    return p;
  }

  static BasicModeState unpack(const Packed& p) {
    BasicModeState m;
    m.rho = p(0);
    m.u = p.template segment<3>(1);
    m.theta = p(4);
    m.E = p.template segment<3>(5);
    m.B = p.template segment<3>(8);
    return m;
  }

  Scalar squared_norm() const {
    return std::norm(rho) + u.squaredNorm() + std::norm(theta) + E.squaredNorm() +
           B.squaredNorm();
  }
  Scalar norm() const { return std::sqrt(squared_norm()); }

  BasicModeState& operator+=(const BasicModeState& o) {
    rho += o.rho;
    u += o.u;
    theta += o.theta;
    E += o.E;
    B += o.B;
    return *this;
  }
  BasicModeState& operator-=(const BasicModeState& o) {
    rho -= o.rho;
    u -= o.u;
    theta -= o.theta;
    E -= o.E;
    B -= o.B;
    return *this;
  }
  BasicModeState& operator*=(Cx a) {
    rho *= a;
    u *= a;
    theta *= a;
    E *= a;
    B *= a;
    return *this;
  }

  friend BasicModeState operator+(BasicModeState a, const BasicModeState& b) { return a += b; }
  friend BasicModeState operator-(BasicModeState a, const BasicModeState& b) { return a -= b; }
  friend BasicModeState operator*(Cx s, BasicModeState a) { return a *= s; }
  friend BasicModeState operator*(Scalar s, BasicModeState a) { return a *= Cx(s); }
};

using ModeState = BasicModeState<double>;

/// Fourier frequency k with cached |k| and k/|k|.
struct WaveVector {
  Vec3 k = Vec3::Zero();
  double kmag = 0.0;
  Vec3 khat = Vec3::Zero();  // zero vector when kmag == 0

  static WaveVector from(const Vec3& k) {
    if (!k.allFinite()) throw InvalidArgument("wave vector must be finite");
    WaveVector w;
    w.k = k;
    w.kmag = k.norm();
    if (w.kmag > 0.0) w.khat = k / w.kmag;
    return w;
  }
  static WaveVector along_z(double kmag) {
    if (!(kmag >= 0.0)) throw InvalidArgument("kmag must be nonnegative");
    return from(Vec3(0.0, 0.0, kmag));
  }
};

/// |i k.E + rho| and |k.B| for one mode.
struct ConstraintResidual {
  double gauss = 0.0;
  double solenoidal = 0.0;
  double max() const { return std::max(gauss, solenoidal); }
};

inline ConstraintResidual constraint_residual(const ModeState& m, const WaveVector& k) {
  const Complex kE = k.k.cast<Complex>().dot(m.E);  // dot() conjugates the left operand; k is real
  const Complex kB = k.k.cast<Complex>().dot(m.B);
  return {std::abs(I * kE + m.rho), std::abs(kB)};
}

/// Compatibility relative to |U|(1+|k|), the natural scale of both residuals.
inline bool is_compatible(const ModeState& m, const WaveVector& k, double rel_tol = 1e-10) {
  const double scale = m.norm() * (1.0 + k.kmag);
  if (scale == 0.0) return true;
  return constraint_residual(m, k).max() <= rel_tol * scale;
}

}  // namespace emx

#endif
