#ifndef EMX_NONLINEAR_SIM_HPP
#define EMX_NONLINEAR_SIM_HPP

#include <array>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "emx/lyapunov.hpp"
#include "emx/mode_propagator.hpp"
#include "emx/spectral_grid.hpp"

namespace emx {

struct SimConfig {
  int N = 32;
  double L = 2 * std::numbers::pi;
  double dt = 0.02;
  double T_final = 50.0;
  double delta = 1e-2;  // max |field| over the grid at t = 0
  int s = 4;
  double dealias = 2.0 / 3.0;
  unsigned seed = 1;
  double output_every = 1.0;
  double density_floor = 0.4;
  double max_increment = 0.1;  // reject when dt |N(U)| > max_increment |U|
  int max_rejections = 8;
  LyapunovWeights weights{};  // energy functional weights

  void validate() const;
};

/// Field order matches ModeState::packed(): rho, u(3), Theta, E(3), B(3).
inline constexpr int kFields = 11;
const char* field_name(int f);

struct FieldState {
  std::array<std::vector<Complex>, kFields> hat;
  std::array<std::vector<double>, kFields> phys;
  double t = 0.0;
};

/// g1, g2 (3), g3, g4 (3) as truncated spectra.
struct Sources {
  std::vector<Complex> g1;
  std::array<std::vector<Complex>, 3> g2;
  std::vector<Complex> g3;
  std::array<std::vector<Complex>, 3> g4;
};

struct GridResidual {
  double gauss = 0;       // max |div E + rho|
  double solenoidal = 0;  // max |div B|
  double max() const { return std::max(gauss, solenoidal); }
};

class Simulator {
 public:
  explicit Simulator(const SimConfig& cfg);

  const SimConfig& config() const { return cfg_; }
  const SpectralGrid& grid() const { return *grid_; }

  FieldState zero_state() const;
  /// Smooth random compatible data with spectral support |n| <= N/6, scaled to sup amplitude delta.
  FieldState initial_state(unsigned seed, double delta) const;
  void sync_physical(FieldState& u) const;
  void sync_spectral(FieldState& u) const;

  /// Throws RegimeExit when 1 + rho or 1 + Theta drops below the density floor.
  Sources nonlinear_terms(const FieldState& u) const;

  FieldState enforce_compatibility(const FieldState& u) const;
  FieldState linear_step(const FieldState& u, double dt) const;
  /// Exponential Heun: exact linear flow, trapezoidal treatment of the sources.
  /// Throws StepRejected when dt |N(U)| exceeds max_increment |U|.
  FieldState step(const FieldState& u, double dt) const;

  GridResidual constraint_residuals(const FieldState& u) const;
  /// Largest |f^(k) - conj f^(-k)| over self-paired half-spectrum entries, relative to the state size.
  double reality_defect(const FieldState& u) const;
  double spectral_norm(const FieldState& u) const;

 private:
  const std::vector<LinearFlow>& flows(double dt) const;
  void apply_flow(FieldState& u, double dt) const;

  SimConfig cfg_;
  std::unique_ptr<SpectralGrid> grid_;
  mutable double flow_dt_ = -1.0;
  mutable std::vector<LinearFlow> flows_;
};

void write_snapshot(const std::string& path, const SpectralGrid& g, const FieldState& u);
/// Returns the state with physical arrays filled; the grid must match the header.
FieldState read_snapshot(const std::string& path, const SpectralGrid& g);

}  // namespace emx

#endif
