#ifndef EMX_ENERGY_HPP
#define EMX_ENERGY_HPP

#include <array>
#include <vector>

#include "emx/lyapunov.hpp"
#include "emx/nonlinear_sim.hpp"

namespace emx {

/// Multi-indices alpha in N^3 with |alpha| <= s, graded by order.
std::vector<std::array<int, 3>> multi_indices(int s);

struct EnergyReport {
  double E_s = 0;    // constructed functional over |alpha| <= s
  double E_s_h = 0;  // the same over 1 <= |alpha| <= s
  double D_s = 0;    // ||[rho,u,Theta]||_s^2 + ||grad[E,B]||_{s-2}^2 + ||E||^2
  double D_s_h = 0;  // ||grad[rho,u,Theta]||_{s-1}^2 + ||grad[E,B]||_{s-2}^2
  std::vector<double> order_norms;  // ||grad^j U||^2, j = 0..s
  double plain_s = 0;                // ||U||_s^2
  double plain_h = 0;                // ||grad U||_{s-1}^2
  double equivalence_ratio = 0;      // E_s / ||U||_s^2 (0 for the zero state)
  LyapunovWeights weights;
};

EnergyReport energy_functional(const SpectralGrid& g, const FieldState& u, int s,
                               const LyapunovWeights& w);

}  // namespace emx

#endif
