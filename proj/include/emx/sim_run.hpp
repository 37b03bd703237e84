#ifndef EMX_SIM_RUN_HPP
#define EMX_SIM_RUN_HPP

#include <functional>
#include <string>
#include <vector>

#include "emx/energy.hpp"
#include "emx/nonlinear_sim.hpp"

namespace emx {

struct EnergyRecord {
  double t = 0;
  double E_s = 0, D_s = 0, E_s_h = 0, D_s_h = 0;
  double gauss = 0, solenoidal = 0;
};

struct RunTolerances {
  double monotone = 1e-8;   // relative increase of E_s allowed per step
  double integral = 1e-6;   // slack in E_s(t) + gamma int D_s <= E_s(0)
  double constraint = 1e-10;
};

struct RunReport {
  std::vector<EnergyRecord> records;  // t = 0 and every accepted step
  int steps = 0;
  int rejections = 0;
  double final_dt = 0;
  double max_rel_increase = 0;
  double gamma_fit = 0;  // largest gamma with E_s(t) + gamma int_0^t D_s <= E_s(0)(1 + tol)
  double max_constraint = 0;
  double max_reality_defect = 0;
  double min_density = 1;
  double equivalence_min = 0, equivalence_max = 0;
  bool monotone = true;
  bool integral_ok = true;
  bool constraints_ok = true;
  bool completed = false;
  std::string status;

  bool ok() const { return completed && monotone && integral_ok && constraints_ok; }
};

using OutputHook = std::function<void(const Simulator&, const FieldState&)>;

RunReport run(const SimConfig& cfg, const RunTolerances& tol = {}, const OutputHook& on_output = {});

}  // namespace emx

#endif
