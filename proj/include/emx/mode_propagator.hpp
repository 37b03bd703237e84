#ifndef EMX_MODE_PROPAGATOR_HPP
#define EMX_MODE_PROPAGATOR_HPP

#include <array>
#include <vector>

#include <Eigen/Core>

#include "emx/characteristic_spectrum.hpp"
#include "emx/core.hpp"

namespace emx {

/// [rho, k~.u, Theta, k~.E] of one mode.
struct LongitudinalState {
  Complex rho{};
  Complex u_par{};
  Complex theta{};
  Complex E_par{};
};

/// Transverse parts of u, E, B.
struct TransverseState {
  CVec3 M1 = CVec3::Zero();
  CVec3 M2 = CVec3::Zero();
  CVec3 M3 = CVec3::Zero();
};

/// c1..c9 stored zero-based: [0,3) rho, [3,6) Theta, [6,9) k~.u.
struct LongitudinalCoeffs {
  std::array<Complex, 9> c{};
  Complex& operator[](int i) { return c[i]; }
  const Complex& operator[](int i) const { return c[i]; }
};

struct TransverseCoeffs {
  CVec3 c10 = CVec3::Zero();
  CVec3 c11 = CVec3::Zero();
  CVec3 c12 = CVec3::Zero();
};

std::pair<LongitudinalState, TransverseState> decompose(const ModeState& mode, const WaveVector& k);
ModeState recombine(const LongitudinalState& l, const TransverseState& tr, const WaveVector& k);

/// Interpolation matrix for the basis [e^{sigma t}, e^{beta t} cos, e^{beta t} sin].
Eigen::Matrix3d interpolation_matrix(const SpectralRoots& r);
Eigen::Vector3d time_basis(const SpectralRoots& r, double t);

/// Values and first two time derivatives at t = 0, columns (rho, Theta, k~.u).
Eigen::Matrix3cd longitudinal_initial_derivatives(const LongitudinalState& l, double kmag);
/// Rows are M2, dM2/dt, d2M2/dt2 at t = 0, stored as row vectors.
Eigen::Matrix3cd transverse_initial_derivatives(const TransverseState& tr, const WaveVector& k);

LongitudinalCoeffs longitudinal_coeffs(const LongitudinalState& long0, const WaveVector& k);
LongitudinalState propagate_longitudinal(const LongitudinalState& long0, const WaveVector& k,
                                         double t);

TransverseCoeffs transverse_coeffs(const TransverseState& trans0, const WaveVector& k);
TransverseState propagate_transverse(const TransverseState& trans0, const WaveVector& k, double t);

/// Closed-form evaluation from precomputed coefficients.
LongitudinalState evaluate_longitudinal(const LongitudinalCoeffs& c, const SpectralRoots& r,
                                        double kmag, double t);
TransverseState evaluate_transverse(const TransverseCoeffs& c, const SpectralRoots& r,
                                    const WaveVector& k, double t);

/// M3 obtained from dM2/dt - M1 = ik x M3 instead of the integral form; used to cross-check.
CVec3 transverse_ik_cross_M3_alt(const TransverseCoeffs& c, const SpectralRoots& r, double t,
                                 const CVec3& M1);

ModeState propagate_k0(const ModeState& mode0, double t);

/// Exact linear flow of one compatible mode. Throws ConstraintViolation otherwise.
ModeState propagate_mode(const ModeState& mode0, const WaveVector& k, double t);

/// Coefficients computed once, evaluated at many times.
class ModeEvolution {
 public:
  ModeEvolution(const ModeState& mode0, const WaveVector& k);
  ModeState at(double t) const;

  const WaveVector& wave() const { return k_; }
  const LongitudinalCoeffs& longitudinal() const { return lc_; }
  const TransverseCoeffs& transverse() const { return tc_; }
  const SpectralRoots& longitudinal_roots() const { return lr_; }
  const SpectralRoots& transverse_roots() const { return tr_; }

 private:
  ModeState mode0_;
  WaveVector k_;
  LongitudinalCoeffs lc_;
  TransverseCoeffs tc_;
  SpectralRoots lr_, tr_;
};

/// Per-component envelope shapes with C = 1. The slow-branch exponents carry gamma.
struct Envelopes {
  double rho = 0, u = 0, theta = 0, E = 0, B = 0;
};

Envelopes envelope_bounds(const ModeState& mode0, const WaveVector& k, double t,
                          double gamma = 1.0);

struct EnvelopeScan {
  double gamma = 1.0;
  Envelopes sup_ratio;      // over the whole time grid
  Envelopes sup_ratio_half; // over the first half of the time grid
};

/// Sup over (t, k, mode) of |component| / envelope.
EnvelopeScan envelope_scan(const std::vector<double>& kmags, const std::vector<double>& times,
                           int modes_per_k, unsigned seed, double gamma);

/// Largest gamma from a decreasing ladder for which every sup ratio has stopped growing
/// between the half and full time windows (within growth_tol).
EnvelopeScan fit_envelope(const std::vector<double>& kmags, const std::vector<double>& times,
                          int modes_per_k, unsigned seed, double growth_tol = 0.01);

/// exp(tL) restricted to compatible data, as reduced matrices.
/// Longitudinal: (rho, k~.u, Theta) -> same, with E_par = i rho/|k|.
/// Transverse: M_j(t) = sum_i a(j,i) M_i + b(j,i) J M_i with J = i k~ x.
/// At k = 0 the (u, E) block and the Theta factor are stored instead.
struct LinearFlow {
  double kmag = 0;
  Eigen::Matrix3cd lon = Eigen::Matrix3cd::Zero();
  Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d b = Eigen::Matrix3d::Zero();
  Eigen::Matrix2d k0 = Eigen::Matrix2d::Identity();
  double theta_k0 = 1.0;

  static LinearFlow build(const WaveVector& k, double t);
  ModeState apply(const ModeState& m, const WaveVector& k) const;
};

/// Random compatible mode with entries of order one.
template <typename Rng>
ModeState random_compatible_mode(const WaveVector& k, Rng& rng);

}  // namespace emx

#include "emx/detail/random_mode.hpp"

#endif
