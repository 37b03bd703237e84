#include "emx/sim_run.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace emx {

namespace {

EnergyRecord measure(const Simulator& sim, const FieldState& u, double& ratio) {
  const EnergyReport e = energy_functional(sim.grid(), u, sim.config().s, sim.config().weights);
  const GridResidual r = sim.constraint_residuals(u);
  ratio = e.equivalence_ratio;
  return {u.t, e.E_s, e.D_s, e.E_s_h, e.D_s_h, r.gauss, r.solenoidal};
}

double min_density(const FieldState& u) {
  return 1.0 + *std::min_element(u.phys[0].begin(), u.phys[0].end());
}

}  // namespace

RunReport run(const SimConfig& cfg, const RunTolerances& tol, const OutputHook& on_output) {
  const Simulator sim(cfg);
  RunReport rep;
  FieldState u = sim.initial_state(cfg.seed, cfg.delta);

  double ratio = 0.0;
  rep.records.push_back(measure(sim, u, ratio));
  rep.equivalence_min = rep.equivalence_max = ratio;
  rep.min_density = min_density(u);
  if (on_output) on_output(sim, u);

  double dt = cfg.dt, next_out = cfg.output_every;
  rep.status = "ok";
  while (cfg.T_final - u.t > 1e-9 * cfg.dt) {
    const double h = std::min(dt, cfg.T_final - u.t);
    FieldState v;
    try {
      v = sim.step(u, h);
    } catch (const StepRejected& e) {
      if (++rep.rejections > cfg.max_rejections) {
        rep.status = "step rejection cascade at t = " + std::to_string(u.t);
        break;
      }
      dt /= 2;
      continue;
    } catch (const RegimeExit& e) {
      rep.status = std::string("regime exit: ") + e.what();
      rep.min_density = std::min(rep.min_density, e.min_density);
      break;
    }
    u = std::move(v);
    ++rep.steps;
    rep.records.push_back(measure(sim, u, ratio));
    rep.equivalence_min = std::min(rep.equivalence_min, ratio);
    rep.equivalence_max = std::max(rep.equivalence_max, ratio);
    rep.min_density = std::min(rep.min_density, min_density(u));
    rep.max_reality_defect = std::max(rep.max_reality_defect, sim.reality_defect(u));
    if (on_output && u.t >= next_out - 1e-9 * cfg.dt) {
      on_output(sim, u);
      next_out += cfg.output_every;
    }
  }
  rep.completed = rep.status == "ok";
  rep.final_dt = dt;

  const auto& R = rep.records;
  for (std::size_t n = 0; n < R.size(); ++n) {
    rep.max_constraint = std::max({rep.max_constraint, R[n].gauss, R[n].solenoidal});
    if (n > 0 && R[n - 1].E_s > 0.0)
      rep.max_rel_increase = std::max(rep.max_rel_increase, (R[n].E_s - R[n - 1].E_s) / R[n - 1].E_s);
  }
  rep.monotone = rep.max_rel_increase <= tol.monotone;
  rep.constraints_ok = rep.max_constraint <= tol.constraint;

  // gamma_fit = min_n (E_0 (1 + tol) - E_n) / int_0^{t_n} D_s, trapezoidal in time
  const double cap = R.front().E_s * (1.0 + tol.integral);
  double integral = 0.0, g = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t n = 1; n < R.size(); ++n) {
    integral += 0.5 * (R[n].D_s + R[n - 1].D_s) * (R[n].t - R[n - 1].t);
    if (integral > 0.0) {
      g = std::min(g, (cap - R[n].E_s) / integral);
      any = true;
    } else if (R[n].E_s > cap) {
      g = -1.0;
      any = true;
    }
  }
  rep.gamma_fit = any ? g : 0.0;
  rep.integral_ok = any ? rep.gamma_fit > 0.0 : true;
  return rep;
}

}  // namespace emx
