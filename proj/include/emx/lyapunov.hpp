#ifndef EMX_LYAPUNOV_HPP
#define EMX_LYAPUNOV_HPP

#include <string>
#include <vector>

#include <Eigen/Core>

#include "emx/core.hpp"

namespace emx {

struct LyapunovWeights {
  double K1 = 0.1, K2 = 0.01, K3 = 0.002, gamma = 0.0;

  /// K3 < K2 < K1 < 1 and K2^{3/2} < K3, all positive.
  bool ordered() const;
};

/// |k|^2 / (1 + |k|^2)^2
inline double decay_factor(double kmag) {
  const double k2 = kmag * kmag;
  return k2 / ((1.0 + k2) * (1.0 + k2));
}

using Matrix11c = Eigen::Matrix<Complex, 11, 11>;

/// Hermitian H with value = packed^* H packed.
Matrix11c lyapunov_form(const WaveVector& k, const LyapunovWeights& w);

double lyapunov_value(const ModeState& m, const WaveVector& k, const LyapunovWeights& w);
/// Exact time derivative of the functional along the linear flow.
double lyapunov_rate(const ModeState& m, const WaveVector& k, const LyapunovWeights& w);

/// Columns span the compatible subspace (9 columns for k != 0, 10 at k = 0).
Eigen::MatrixXcd compatible_basis(const WaveVector& k);

struct DecayCheck {
  double max_margin = 0;  // max_t [dE/dt + gamma d(k) E]
  double normalized = 0;  // max_margin / |U0|^2
  bool pass = true;
};

/// Evaluates the functional and its derivative on the oracle trajectory up to T.
DecayCheck lyapunov_decay_check(const ModeState& mode0, const WaveVector& k,
                                const LyapunovWeights& w, double T, double dt = 0.0,
                                int stride = 100, double tol = 1e-10);

/// Pointwise (in k) facts about a weight choice on the compatible subspace.
struct FormBounds {
  double gamma_max = 0;  // largest gamma for which dE/dt + gamma d E <= 0 holds for all data
  double c_eq = 0, C_eq = 0;  // c |U|^2 <= E <= C |U|^2
};
FormBounds form_bounds(const WaveVector& k, const LyapunovWeights& w);

/// Compatible mode minimizing -(dE/dt) / E at t = 0; used to hunt counterexamples.
ModeState worst_mode(const WaveVector& k, const LyapunovWeights& w);

struct WeightSearchResult {
  LyapunovWeights weights;
  double gamma_analytic = 0;  // min over samples of form_bounds.gamma_max
  double c_eq = 0, C_eq = 0;
  double corollary_C = 0;     // sqrt(C_eq / c_eq), paired with exponent gamma / 2
  int candidates = 0;
  int validated_modes = 0;
  bool ok = false;
};

/// Grid over ordered weights, then gamma shrunk until the trajectory check passes on
/// `trials` random compatible modes per sample. Throws WeightSearchFailure.
WeightSearchResult weight_search(const std::vector<WaveVector>& sample_k, int trials,
                                 unsigned seed = 1, double T = 5.0, double safety = 0.9);

std::vector<WaveVector> log_spaced_waves(double kmin, double kmax, int n, unsigned seed);

}  // namespace emx

#endif
