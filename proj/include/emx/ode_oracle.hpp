#ifndef EMX_ODE_ORACLE_HPP
#define EMX_ODE_ORACLE_HPP

#include <vector>

#include <Eigen/Core>

#include "emx/core.hpp"

namespace emx {

/// Time derivative of one mode under the linearized system.
template <typename Scalar>
BasicModeState<Scalar> rhs(const BasicModeState<Scalar>& m, const Eigen::Matrix<Scalar, 3, 1>& k) {
  using Cx = std::complex<Scalar>;
  using CV = typename BasicModeState<Scalar>::CV;
  const Cx i(Scalar(0), Scalar(1));
  const CV kc = k.template cast<Cx>();
  const Cx ku = kc.dot(m.u);  // k real, so dot() does not conjugate anything that matters
  BasicModeState<Scalar> d;
  d.rho = -i * ku;
  d.u = -i * kc * (m.rho + m.theta) - m.E - m.u;
  d.theta = Scalar(-2) / Scalar(3) * i * ku - m.theta;
  d.E = i * cross<Scalar>(kc, m.B) + m.u;
  d.B = -i * cross<Scalar>(kc, m.E);
  return d;
}

inline ModeState rhs(const ModeState& m, const WaveVector& k) { return rhs<double>(m, k.k); }

template <typename Scalar>
BasicModeState<Scalar> rk4_step(const BasicModeState<Scalar>& m, const Eigen::Matrix<Scalar, 3, 1>& k,
                                Scalar h) {
  using S = BasicModeState<Scalar>;
  const S k1 = rhs(m, k);
  const S k2 = rhs(m + (h / 2) * k1, k);
  const S k3 = rhs(m + (h / 2) * k2, k);
  const S k4 = rhs(m + h * k3, k);
  return m + (h / 6) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
}

/// 11x11 generator L with d/dt packed = L packed.
Eigen::Matrix<Complex, 11, 11> generator_matrix(const WaveVector& k);

struct ModeTrajectory {
  WaveVector k;
  std::vector<double> times;
  std::vector<ModeState> states;
  double dt = 0;                 // step actually used
  double constraint_drift = 0;   // terminal |ik.E + rho| / |U0|
};

/// One classical RK4 step of size h as a matrix (a degree-4 polynomial in h L).
Eigen::Matrix<Complex, 11, 11> rk4_matrix(const WaveVector& k, double h);

double default_dt(double kmag);
double max_oracle_dt(double kmag);

/// Classical RK4 on a uniform grid of ceil(T/dt) steps; every stride-th state is kept.
ModeTrajectory integrate(const ModeState& mode0, const WaveVector& k, double T, double dt,
                         int stride = 1);

/// States at the requested increasing times, each segment stepped with spacing <= dt
/// (RK4 applied through rk4_matrix).
std::vector<ModeState> sample_oracle(const ModeState& mode0, const WaveVector& k,
                                     const std::vector<double>& times, double dt);

}  // namespace emx

#endif
