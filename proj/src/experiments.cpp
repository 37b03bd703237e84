#include "emx/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>

#include "emx/characteristic_spectrum.hpp"
#include "emx/energy.hpp"
#include "emx/linear_decay.hpp"
#include "emx/lyapunov.hpp"
#include "emx/mode_propagator.hpp"
#include "emx/ode_oracle.hpp"
#include "emx/sim_run.hpp"

namespace emx {

namespace fs = std::filesystem;
using nlohmann::json;

const char* const kNonReproducibility =
    "The nonlinear whole-space decay rates (1+t)^(-11/4) for [rho, Theta] in L^q, "
    "(1+t)^(-2+3/(2q)) for E and (1+t)^(-3/2+3/(2q)) for [u, B] are NOT reproducible by this "
    "periodic simulation at desk scale. The algebraic tails come from wavenumbers near zero, which "
    "a periodic lattice does not contain, and the mean magnetic field never decays. They are "
    "covered indirectly: per-mode Lyapunov decay and the whole-space linear L2/Linf rates "
    "(verify-linear, decay-linear) stand in for the rates, and this run checks nonlinear "
    "stability through the discrete energy inequality.";

bool ExperimentResult::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

namespace {

std::string num(double x) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", x);
  return b;
}

class Csv {
 public:
  Csv(const fs::path& p, const std::string& header) : os_(p) {
    if (!os_) throw Error("cannot write " + p.string());
    os_ << header << '\n';
  }
  template <typename... T>
  void row(const T&... v) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(v), first = false), ...);
    os_ << '\n';
  }

 private:
  static std::string cell(double x) { return num(x); }
  static std::string cell(bool b) { return b ? "true" : "false"; }
  std::ofstream os_;
};

void write_json(const fs::path& p, const json& j) {
  std::ofstream os(p);
  if (!os) throw Error("cannot write " + p.string());
  os << j.dump(2) << '\n';
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ManifestError("mode_file", "mode_file: " + what + " must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

CVec3 cvec_from(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw ManifestError("mode_file", "mode_file: " + what + " needs 3 entries");
  return {complex_from(j[0], what), complex_from(j[1], what), complex_from(j[2], what)};
}

struct Context {
  const RunManifest& m;
  fs::path dir;
  ExperimentResult res;

  void check(const std::string& name, double value, double limit, bool pass) {
    res.checks.push_back({name, value, limit, pass});
  }
  void check_le(const std::string& name, double value, double limit) {
    check(name, value, limit, value <= limit);
  }
  void flag(const std::string& name, bool pass) { check(name, pass ? 1.0 : 0.0, 1.0, pass); }
  fs::path file(const std::string& name) {
    res.files.push_back(name);
    return dir / name;
  }
  json header() const {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["manifest"] = manifest_echo(m);
    return j;
  }
};

void run_roots(Context& c) {
  const RunManifest& m = c.m;
  const Family fam = m.string("family") == "long" ? Family::Longitudinal : Family::Transverse;
  const double kmin = m.real("kmin"), kmax = m.real("kmax"), tol = m.real("residual_tol");
  const long n = m.integer("n");
  const double hi = fam == Family::Longitudinal ? -0.6 : 0.0;

  Csv csv(c.file("roots.csv"), "kmag,sigma,beta,omega,residual");
  double worst = 0, prev = 0;
  bool bracket = true, monotone = true;
  for (long i = 0; i < n; ++i) {
    const double k = kmin * std::pow(kmax / kmin, static_cast<double>(i) / (n - 1));
    const SpectralRoots r = roots(fam, k);
    const double res = root_residual(r, k);
    csv.row(k, r.sigma, r.beta, r.omega, res);
    worst = std::max(worst, res / (1 + k * k * k));
    bracket = bracket && r.sigma > -1.0 && r.sigma < hi;
    if (i > 0) monotone = monotone && (fam == Family::Longitudinal ? r.sigma >= prev : r.sigma <= prev);
    prev = r.sigma;
  }
  c.check_le("residual / (1 + kmag^3)", worst, tol);
  c.flag("sigma inside its bracket", bracket);
  c.flag(fam == Family::Longitudinal ? "sigma nondecreasing" : "sigma nonincreasing", monotone);
}

void run_propagate(Context& c) {
  const RunManifest& m = c.m;
  ModeState m0;
  WaveVector k;
  const std::string file = m.string("mode_file");
  if (!file.empty()) {
    std::ifstream is(file);
    if (!is) throw ManifestError("mode_file", "mode_file: cannot read " + file);
    json j;
    try {
      is >> j;
    } catch (const json::exception& e) {
      throw ManifestError("mode_file", std::string("mode_file: ") + e.what());
    }
    std::tie(m0, k) = mode_from_json(j);
    if (m.has("kmag") && std::abs(k.kmag - m.real("kmag")) > 1e-12 * (1 + k.kmag))
      throw ManifestError("kmag", "kmag: differs from |k| in the mode file");
  } else {
    k = WaveVector::along_z(m.has("kmag") ? m.real("kmag") : 1.0);
    std::mt19937_64 rng(m.seed);
    m0 = random_compatible_mode(k, rng);
  }
  write_json(c.file("mode_0.json"), mode_to_json(m0, k));

  const double tol = m.real("constraint_tol"), t = m.real("t");
  const double scale = std::max(m0.norm(), std::numeric_limits<double>::min()) * (1 + k.kmag);
  const double in_res = constraint_residual(m0, k).max() / scale;
  c.check_le("input constraint residual", in_res, tol);
  if (in_res > tol) return;

  const ModeState out = propagate_mode(m0, k, t);
  json j = mode_to_json(out, k);
  j["t"] = t;
  write_json(c.file("mode_t.json"), j);
  c.check_le("output constraint residual", constraint_residual(out, k).max() / scale, tol);
}

void run_verify_linear(Context& c) {
  const RunManifest& m = c.m;
  const auto waves = log_spaced_waves(m.real("kmin"), m.real("kmax"), static_cast<int>(m.integer("n")),
                                      static_cast<unsigned>(m.seed));
  LyapunovWeights w{m.real("K1"), m.real("K2"), m.real("K3"), 0.0};
  if (!w.ordered()) throw ManifestError("K3", "K3: weights must also satisfy K2^(3/2) < K3");
  if (m.has("gamma")) {
    w.gamma = m.real("gamma");
  } else {
    double g = std::numeric_limits<double>::infinity();
    for (const WaveVector& k : waves) g = std::min(g, form_bounds(k, w).gamma_max);
    w.gamma = 0.9 * g;
  }
  const double T = m.real("T"), lyap_T = m.real("lyapunov_T");
  std::set<double> ts{T};
  for (double t : {0.1, 1.0, 5.0, 20.0})
    if (t < T) ts.insert(t);
  const std::vector<double> times(ts.begin(), ts.end());

  const double tol_cf = m.real("closed_form_tol"), tol_drift = m.real("drift_tol"),
               tol_margin = m.real("margin_tol");
  std::mt19937_64 rng(m.seed + 1);
  Csv csv(c.file("verify.csv"), "kmag,max_rel_err_closed_form,constraint_drift,lyapunov_margin,pass");
  double worst_err = 0, worst_drift = 0, worst_margin = -std::numeric_limits<double>::infinity();
  int failed = 0;
  for (const WaveVector& k : waves) {
    const double dt = max_oracle_dt(k.kmag);
    double err = 0, drift = 0, margin = -std::numeric_limits<double>::infinity();
    for (long j = 0; j < m.integer("modes"); ++j) {
      const ModeState m0 = random_compatible_mode(k, rng);
      const auto states = sample_oracle(m0, k, times, dt);
      for (std::size_t i = 0; i < times.size(); ++i)
        err = std::max(err, (propagate_mode(m0, k, times[i]) - states[i]).norm() / states[i].norm());
      drift = std::max(drift, constraint_residual(states.back(), k).max() / m0.norm());
      margin = std::max(margin, lyapunov_decay_check(m0, k, w, lyap_T, dt).normalized);
    }
    const bool pass = err <= tol_cf && drift <= tol_drift && margin <= tol_margin;
    csv.row(k.kmag, err, drift, margin, pass);
    failed += !pass;
    worst_err = std::max(worst_err, err);
    worst_drift = std::max(worst_drift, drift);
    worst_margin = std::max(worst_margin, margin);
  }
  c.res.summary["weights"] = {{"K1", w.K1}, {"K2", w.K2}, {"K3", w.K3}, {"gamma", w.gamma}};
  c.check_le("closed form vs oracle, max relative deviation", worst_err, tol_cf);
  c.check_le("oracle constraint drift", worst_drift, tol_drift);
  c.check_le("Lyapunov margin / |U0|^2", worst_margin, tol_margin);
  c.check_le("failing rows", failed, 0);
}

void run_decay_linear(Context& c) {
  const RunManifest& m = c.m;
  const Field f = field_from_string(m.string("component"));
  const bool longitudinal = f == Field::Rho || f == Field::Theta;
  const bool l2 = m.string("norm") == "l2";
  const int order = static_cast<int>(m.integer("m"));
  const double width = m.real("width"), a = m.real("amplitude");
  const double tmax = m.has("tmax") ? m.real("tmax") : (longitudinal ? 20.0 : 500.0);
  const double lo = m.has("fit_lo") ? m.real("fit_lo") : (longitudinal ? 0.0 : 50.0);
  const double hi = m.has("fit_hi") ? m.real("fit_hi") : tmax;
  if (hi > tmax) throw ManifestError("fit_hi", "fit_hi: must not exceed tmax");
  if (lo >= hi) throw ManifestError("fit_lo", "fit_lo: must be below fit_hi");
  const FitModel model = longitudinal ? FitModel::Exponential : FitModel::PowerLaw;
  if (model == FitModel::PowerLaw && lo <= 0) throw ManifestError("fit_lo", "fit_lo: must be > 0 for a power law");

  std::vector<RadialProfile> profiles;
  if (longitudinal)
    profiles = {{ProfileComponent::Rho, a, width}, {ProfileComponent::Theta, a, width}};
  else
    profiles = {{ProfileComponent::BTrans, a, width, Vec3::UnitX()}};

  const int nt = static_cast<int>(m.integer("nt"));
  std::vector<double> times{0.0};
  if (longitudinal) {
    for (int i = 1; i <= nt; ++i) times.push_back(tmax * i / nt);
  } else {
    auto append = [&](const std::vector<double>& v) {
      for (double t : v)
        if (t > times.back() * (1 + 1e-12)) times.push_back(t);
    };
    if (lo > 1.0) append(log_times(1.0, lo, std::max(2, nt / 3)));
    append(log_times(lo, hi, nt));
    if (hi < tmax) append(log_times(hi, tmax, std::max(2, nt / 3)));
  }

  const NormSeries s = l2 ? l2_norm_series(profiles, f, order, times) : linf_norm_series(profiles, f, times);
  Csv csv(c.file("series.csv"), "t,value");
  for (std::size_t i = 0; i < s.times.size(); ++i) csv.row(s.times[i], s.values[i]);
  const DecayFit fit = fit_decay(s, lo, hi, model);

  json rep = c.header();
  rep["component"] = m.string("component");
  rep["norm"] = m.string("norm");
  rep["m"] = order;
  rep["data"] = longitudinal ? "gaussian rho and Theta" : "gaussian transverse B, polarization x";
  rep["model"] = longitudinal ? "exponential" : "power-law";
  rep["slope"] = fit.slope;
  rep["intercept"] = fit.intercept;
  rep["rms_residual"] = fit.rms_residual;
  rep["window"] = {fit.t_lo, fit.t_hi};
  rep["samples"] = fit.samples;
  rep["quadrature_change"] = s.quadrature_change;
  rep["refinement_change"] = s.refinement_change;

  if (longitudinal) {
    c.check_le("exponential slope", fit.slope, m.real("max_slope"));
    rep["expected"] = {{"max_slope", m.real("max_slope")}};
  } else {
    double expect = l2 ? (f == Field::B ? -0.75 : -1.25) - 0.5 * order : (f == Field::B ? -1.5 : -2.0);
    const double tol = m.has("slope_tol") ? m.real("slope_tol") : (l2 ? 0.1 : 0.15);
    c.check("slope within tolerance of " + num(expect), fit.slope, tol, std::abs(fit.slope - expect) <= tol);
    rep["expected"] = {{"slope", expect}, {"tolerance", tol}};
  }
  if (l2)
    c.check_le("quadrature refinement change", s.quadrature_change, m.real("quadrature_tol"));
  else
    c.check_le("r-grid refinement change", s.refinement_change, m.real("refinement_tol"));
  rep["pass"] = c.res.ok();
  write_json(c.file("fit.json"), rep);
}

void run_simulate(Context& c) {
  const RunManifest& m = c.m;
  const SimConfig cfg = sim_config(m);
  const RunTolerances tol{m.real("monotone_tol"), m.real("integral_tol"), m.real("constraint_tol")};
  const long every = m.integer("snapshot_every");
  if (every > 0) fs::create_directories(c.dir / "snapshots");

  long index = 0;
  std::vector<std::string> snaps;
  const RunReport rep = run(cfg, tol, [&](const Simulator& sim, const FieldState& u) {
    if (every > 0 && index % every == 0) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshots/snap_%05ld.bin", index);
      write_snapshot((c.dir / name).string(), sim.grid(), u);
      snaps.push_back(name);
    }
    ++index;
  });

  Csv csv(c.file("energy.csv"), "t,E_s,D_s,E_s_h,D_s_h,gauss_residual,solenoidal_residual");
  for (const EnergyRecord& r : rep.records) csv.row(r.t, r.E_s, r.D_s, r.E_s_h, r.D_s_h, r.gauss, r.solenoidal);
  for (const auto& s : snaps) c.res.files.push_back(s);

  c.flag("run completed (" + rep.status + ")", rep.completed);
  c.check_le("max relative E_s increase per step", rep.max_rel_increase, tol.monotone);
  c.check("energy inequality holds for gamma_fit", rep.gamma_fit, 0.0, rep.integral_ok);
  c.check_le("max constraint residual", rep.max_constraint, tol.constraint);
  c.check_le("max reality defect", rep.max_reality_defect, 1e-12);

  json j = c.header();
  j["status"] = rep.status;
  j["steps"] = rep.steps;
  j["rejections"] = rep.rejections;
  j["final_dt"] = rep.final_dt;
  j["t_final"] = rep.records.back().t;
  j["E_s_initial"] = rep.records.front().E_s;
  j["E_s_final"] = rep.records.back().E_s;
  j["max_rel_increase"] = rep.max_rel_increase;
  j["gamma_fit"] = rep.gamma_fit;
  j["max_constraint_residual"] = rep.max_constraint;
  j["max_reality_defect"] = rep.max_reality_defect;
  j["min_density"] = rep.min_density;
  j["equivalence_ratio"] = {rep.equivalence_min, rep.equivalence_max};
  j["delta_working"] = cfg.delta;
  j["snapshots"] = snaps;
  j["snapshot_format"] = {
      {"magic", "EMXSNAP1"},
      {"header", "u32 nx, ny, nz; u32 nfields; f64 L; f64 t; nfields x 8-byte names"},
      {"data", "f64 little-endian, field-major, index (i*ny + j)*nz + l"},
      {"field_order", {"rho", "u_x", "u_y", "u_z", "theta", "E_x", "E_y", "E_z", "B_x", "B_y", "B_z"}}};
  j["non_reproducibility"] = kNonReproducibility;
  j["substitution"] = {{"replaced", "nonlinear whole-space L^q decay rates"},
                       {"by", {"per-mode Lyapunov decay", "linear whole-space L2/Linf rates",
                               "nonlinear discrete energy inequality on the periodic box"}}};
  j["pass"] = c.res.ok();
  write_json(c.file("report.json"), j);
}

void run_energy_report(Context& c) {
  const RunManifest& m = c.m;
  const SimConfig cfg = sim_config(m);
  const Simulator sim(cfg);
  const std::string snap = m.string("snapshot");
  const FieldState u = snap.empty() ? sim.initial_state(cfg.seed, cfg.delta) : read_snapshot(snap, sim.grid());
  const EnergyReport e = energy_functional(sim.grid(), u, cfg.s, cfg.weights);
  const GridResidual r = sim.constraint_residuals(u);

  json j = c.header();
  j["source"] = snap.empty() ? "generated" : snap;
  j["t"] = u.t;
  j["E_s"] = e.E_s;
  j["E_s_h"] = e.E_s_h;
  j["D_s"] = e.D_s;
  j["D_s_h"] = e.D_s_h;
  j["order_norms"] = e.order_norms;
  j["plain_s"] = e.plain_s;
  j["plain_h"] = e.plain_h;
  j["equivalence_ratio"] = e.equivalence_ratio;
  j["weights"] = {{"K1", e.weights.K1}, {"K2", e.weights.K2}, {"K3", e.weights.K3}};
  j["constraint_residuals"] = {{"gauss", r.gauss}, {"solenoidal", r.solenoidal}};
  write_json(c.file("energy.json"), j);

  const double lowest = std::min({e.E_s, e.E_s_h, e.D_s, e.D_s_h});
  c.check("entries nonnegative", lowest, 0.0, lowest >= 0.0);
  c.check("E_s >= E_s_h", e.E_s - e.E_s_h, 0.0, e.E_s >= e.E_s_h);
  c.check_le("constraint residual", r.max(), 1e-10);
}

}  // namespace

json mode_to_json(const ModeState& m, const WaveVector& k) {
  auto vec = [](const CVec3& v) {
    return json::array({complex_json(v(0)), complex_json(v(1)), complex_json(v(2))});
  };
  json j;
  j["k"] = {k.k(0), k.k(1), k.k(2)};
  j["rho"] = complex_json(m.rho);
  j["u"] = vec(m.u);
  j["theta"] = complex_json(m.theta);
  j["E"] = vec(m.E);
  j["B"] = vec(m.B);
  return j;
}

std::pair<ModeState, WaveVector> mode_from_json(const json& j) {
  for (const char* key : {"k", "rho", "u", "theta", "E", "B"})
    if (!j.contains(key)) throw ManifestError("mode_file", std::string("mode_file: missing \"") + key + "\"");
  const json& kj = j["k"];
  if (!kj.is_array() || kj.size() != 3) throw ManifestError("mode_file", "mode_file: k needs 3 numbers");
  const WaveVector k = WaveVector::from(Vec3(kj[0].get<double>(), kj[1].get<double>(), kj[2].get<double>()));
  ModeState m;
  m.rho = complex_from(j["rho"], "rho");
  m.u = cvec_from(j["u"], "u");
  m.theta = complex_from(j["theta"], "theta");
  m.E = cvec_from(j["E"], "E");
  m.B = cvec_from(j["B"], "B");
  return {m, k};
}

SimConfig sim_config(const RunManifest& m) {
  SimConfig c;
  c.N = static_cast<int>(m.integer("N"));
  c.L = m.real("L");
  c.delta = m.real("delta");
  c.s = static_cast<int>(m.integer("s"));
  c.dealias = m.real("dealias");
  c.seed = static_cast<unsigned>(m.seed);
  c.weights = {m.real("K1"), m.real("K2"), m.real("K3"), 0.0};
  if (m.kind == ExperimentKind::Simulate) {
    c.dt = m.real("dt");
    c.T_final = m.real("T");
    c.output_every = m.real("output_every");
    c.density_floor = m.real("density_floor");
    c.max_increment = m.real("max_increment");
    c.max_rejections = static_cast<int>(m.integer("max_rejections"));
  }
  c.validate();
  return c;
}

ExperimentResult run_experiment(const RunManifest& m) {
  Context c{m, fs::path(m.out), {}};
  fs::create_directories(c.dir);
  c.res.summary = c.header();
  switch (m.kind) {
    case ExperimentKind::Roots: run_roots(c); break;
    case ExperimentKind::Propagate: run_propagate(c); break;
    case ExperimentKind::VerifyLinear: run_verify_linear(c); break;
    case ExperimentKind::DecayLinear: run_decay_linear(c); break;
    case ExperimentKind::Simulate: run_simulate(c); break;
    case ExperimentKind::EnergyReport: run_energy_report(c); break;
  }
  json checks = json::array();
  for (const CheckResult& r : c.res.checks)
    checks.push_back({{"name", r.name}, {"value", r.value}, {"limit", r.limit}, {"pass", r.pass}});
  c.res.summary["checks"] = checks;
  c.res.summary["outputs"] = c.res.files;
  c.res.summary["pass"] = c.res.ok();
  write_json(c.dir / "summary.json", c.res.summary);
  return c.res;
}

}  // namespace emx
