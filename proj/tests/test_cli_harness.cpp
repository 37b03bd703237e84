#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "emx/experiments.hpp"
#include "emx/manifest.hpp"

using namespace emx;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string scratch(const std::string& name) {
  const fs::path p = fs::path("harness_out") / name;
  fs::remove_all(p);
  return p.string();
}

std::string key_of(const std::string& text) {
  try {
    parse_manifest(text);
  } catch (const ManifestError& e) {
    return e.key;
  }
  return "";
}

int rows(const std::string& csv) {
  int n = 0;
  for (char c : csv) n += c == '\n';
  return n - 1;
}

}  // namespace

TEST_CASE("minimal roots manifest gets the documented defaults") {
  const RunManifest m = parse_manifest("experiment = \"roots\"\n");
  CHECK(m.kind == ExperimentKind::Roots);
  CHECK(m.real("kmin") == 1e-3);
  CHECK(m.real("kmax") == 1e3);
  CHECK(m.integer("n") == 1000);
  CHECK(m.string("family") == "long");
  CHECK(m.seed == 1);
}

TEST_CASE("validation names the offending key") {
  CHECK(key_of("experiment = \"simulate\"\ndt = -0.1\n") == "dt");
  CHECK(key_of("experiment = \"roots\"\nkmni = 1\n") == "kmni");
  CHECK(key_of("experiment = \"roots\"\nn = 2.5\n") == "n");
  CHECK(key_of("experiment = \"roots\"\nkmin = 10\nkmax = 1\n") == "kmax");
  CHECK(key_of("experiment = \"decay-linear\"\ncomponent = \"q\"\n") == "component");
  CHECK(key_of("experiment = \"simulate\"\nN = 33\n") == "N");
  CHECK(key_of("experiment = \"sim\"\n") == "experiment");
  CHECK(key_of("seed = 3\n") == "experiment");
  CHECK(key_of("experiment = \"roots\"\nseed = -1\n") == "seed");
  CHECK(key_of("experiment = \"roots\"\njunk line\n") == "line 2");
  CHECK(key_of("experiment = \"roots\"\nn = 5\nn = 6\n") == "n");
}

TEST_CASE("document syntax") {
  const json d = parse_document(
      "# comment\n[simulate]\nout = \"runs/a # b\"  # trailing\nT = 1_000\ndt = 2.5e-2\nflag = true\n");
  CHECK(d["experiment"] == "simulate");
  CHECK(d["out"] == "runs/a # b");
  CHECK(d["T"] == 1000);
  CHECK(d["dt"].get<double>() == 0.025);
  CHECK(d["flag"] == true);
  CHECK(key_of("[roots]\n[simulate]\n") == "line 2");
  CHECK(key_of("experiment = \"roots\"\n[simulate]\n") == "experiment");
}

TEST_CASE("strict profile tightens numeric tolerances only") {
  const RunManifest d = parse_manifest("experiment = \"simulate\"\n");
  const RunManifest s = parse_manifest("experiment = \"simulate\"\ntolerance_profile = \"strict\"\n");
  CHECK(s.real("constraint_tol") == doctest::Approx(0.1 * d.real("constraint_tol")));
  CHECK(s.real("dt") == d.real("dt"));
  const RunManifest e = parse_manifest("experiment = \"simulate\"\ntolerance_profile = \"strict\"\nconstraint_tol = 1e-9\n");
  CHECK(e.real("constraint_tol") == 1e-9);
}

TEST_CASE("roots experiment: n rows, residuals, schema") {
  const std::string out = scratch("roots");
  const RunManifest m = make_manifest(ExperimentKind::Roots, {{"n", 200}, {"out", out}, {"family", "trans"}});
  const ExperimentResult r = run_experiment(m);
  CHECK(r.ok());
  const std::string csv = slurp(fs::path(out) / "roots.csv");
  CHECK(csv.rfind("kmag,sigma,beta,omega,residual\n", 0) == 0);
  CHECK(rows(csv) == 200);
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    double k, s, b, w, res;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &k, &s, &b, &w, &res) == 5);
    CHECK(res <= 1e-12 * (1 + k * k * k));
  }
  const json sum = json::parse(slurp(fs::path(out) / "summary.json"));
  CHECK(sum["schema_version"] == kSchemaVersion);
  CHECK(sum["manifest"]["params"]["n"] == 200);
  CHECK(sum["pass"] == true);
}

TEST_CASE("identical manifest and seed give identical bytes") {
  for (const char* kind : {"simulate", "verify-linear"}) {
    std::string a, b;
    for (std::string* dst : {&a, &b}) {
      const std::string out = scratch(std::string("det_") + kind);
      json f = {{"out", out}, {"seed", 7}};
      if (std::string(kind) == "simulate") {
        f.update({{"N", 16}, {"T", 0.3}, {"dt", 0.1}, {"snapshot_every", 1}});
      } else {
        f.update({{"n", 2}, {"modes", 1}, {"T", 0.5}, {"lyapunov_T", 0.2}, {"kmax", 1.0}});
      }
      const ExperimentResult r = run_experiment(make_manifest(experiment_from_string(kind), f));
      CHECK(r.ok());
      for (const auto& file : r.files) *dst += slurp(fs::path(out) / file);
      *dst += slurp(fs::path(out) / "summary.json");
    }
    CHECK(a == b);
    CHECK(!a.empty());
  }
}

TEST_CASE("verify-linear rows pass at default tolerances") {
  const std::string out = scratch("verify");
  const ExperimentResult r = run_experiment(
      make_manifest(ExperimentKind::VerifyLinear, {{"out", out}, {"n", 4}, {"modes", 2}, {"T", 5.0}, {"kmax", 10.0}}));
  CHECK(r.ok());
  const std::string csv = slurp(fs::path(out) / "verify.csv");
  CHECK(csv.rfind("kmag,max_rel_err_closed_form,constraint_drift,lyapunov_margin,pass\n", 0) == 0);
  CHECK(rows(csv) == 4);
  CHECK(csv.find("false") == std::string::npos);
}

TEST_CASE("decay-linear on B: slope near -3/4 with a fit report") {
  const std::string out = scratch("decay");
  const ExperimentResult r = run_experiment(make_manifest(ExperimentKind::DecayLinear, {{"out", out}}));
  CHECK(r.ok());
  const json fit = json::parse(slurp(fs::path(out) / "fit.json"));
  CHECK(fit["slope"].get<double>() >= -0.85);
  CHECK(fit["slope"].get<double>() <= -0.65);
  CHECK(fit["window"][0] == 50.0);
  CHECK(fit["window"][1] == 500.0);
  for (const char* k : {"intercept", "rms_residual", "schema_version", "manifest"}) CHECK(fit.contains(k));
  CHECK(slurp(fs::path(out) / "series.csv").rfind("t,value\n", 0) == 0);
  CHECK_THROWS_AS(make_manifest(ExperimentKind::DecayLinear, {{"norm", "linf"}, {"m", 1}, {"out", out}}),
                  ManifestError);
}

TEST_CASE("propagate reads its own mode file") {
  const std::string a = scratch("prop_a"), b = scratch("prop_b");
  CHECK(run_experiment(make_manifest(ExperimentKind::Propagate, {{"out", a}, {"kmag", 3.0}, {"t", 2.0}})).ok());
  const std::string mode0 = (fs::path(a) / "mode_0.json").string();
  CHECK(run_experiment(make_manifest(ExperimentKind::Propagate, {{"out", b}, {"mode_file", mode0}, {"t", 2.0}})).ok());
  CHECK(slurp(fs::path(a) / "mode_t.json") == slurp(fs::path(b) / "mode_t.json"));
  const json j = json::parse(slurp(fs::path(a) / "mode_t.json"));
  CHECK(j["u"].size() == 3);
  CHECK(j["t"] == 2.0);

  // an incompatible mode is reported, not propagated
  json bad = json::parse(slurp(mode0));
  bad["rho"] = {1.0, 0.0};
  const std::string badpath = (fs::path(b) / "bad.json").string();
  std::ofstream(badpath) << bad.dump();
  const ExperimentResult r = run_experiment(make_manifest(ExperimentKind::Propagate, {{"out", b}, {"mode_file", badpath}}));
  CHECK_FALSE(r.ok());
  CHECK_THROWS_AS(
      run_experiment(make_manifest(ExperimentKind::Propagate, {{"out", b}, {"mode_file", mode0}, {"kmag", 1.0}})),
      ManifestError);
}

TEST_CASE("simulate writes the substitution statement and readable snapshots") {
  const std::string out = scratch("sim");
  const ExperimentResult r = run_experiment(make_manifest(
      ExperimentKind::Simulate, {{"out", out}, {"N", 16}, {"T", 0.4}, {"dt", 0.1}, {"snapshot_every", 2}}));
  CHECK(r.ok());
  const json rep = json::parse(slurp(fs::path(out) / "report.json"));
  CHECK(rep["non_reproducibility"].get<std::string>().find("NOT reproducible") != std::string::npos);
  CHECK(rep["snapshots"].size() == 1);  // t = 0 only; outputs at t = 0, and every 1.0 after
  CHECK(slurp(fs::path(out) / "energy.csv").rfind("t,E_s,D_s,E_s_h,D_s_h,", 0) == 0);

  const std::string e = scratch("energy");
  const std::string snap = (fs::path(out) / rep["snapshots"][0].get<std::string>()).string();
  const ExperimentResult er =
      run_experiment(make_manifest(ExperimentKind::EnergyReport, {{"out", e}, {"N", 16}, {"snapshot", snap}}));
  CHECK(er.ok());
  const json ej = json::parse(slurp(fs::path(e) / "energy.json"));
  CHECK(ej["E_s"].get<double>() == doctest::Approx(rep["E_s_initial"].get<double>()).epsilon(1e-14));
  CHECK(ej["order_norms"].size() == 5);
}
