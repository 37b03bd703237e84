#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "emx/experiments.hpp"
#include "emx/manifest.hpp"

using nlohmann::json;

namespace {

// CLI text to a manifest value: number, boolean, or string.
json cli_value(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  char* end = nullptr;
  const long long i = std::strtoll(s.c_str(), &end, 10);
  if (!s.empty() && end == s.c_str() + s.size()) return i;
  const double d = std::strtod(s.c_str(), &end);
  if (!s.empty() && end == s.c_str() + s.size()) return d;
  return s;
}

std::string flag_name(std::string key) {
  for (char& c : key)
    if (c == '_') c = '-';
  return "--" + key;
}

json read_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw emx::ManifestError("config", "config: cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return emx::parse_document(ss.str());
}

int report(const emx::ExperimentResult& r, const std::string& out) {
  for (const auto& c : r.checks)
    std::printf("%s  %s  value=%.6g limit=%.6g\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value, c.limit);
  std::printf("%s -> %s/summary.json\n", r.ok() ? "all checks passed" : "some checks failed", out.c_str());
  return r.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linearized and nonlinear Euler-Maxwell experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::map<std::string, std::string> globals;
  auto global = [&](const std::string& flag, const std::string& key, const std::string& help) {
    app.add_option_function<std::string>(flag, [&globals, key](const std::string& v) { globals[key] = v; }, help);
  };
  global("--seed", "seed", "random seed");
  global("--out,--out-dir", "out", "output directory");
  global("--threads", "threads", "worker threads (modules run sequentially; recorded only)");
  global("--tolerance-profile", "tolerance_profile", "default or strict");

  struct Sub {
    emx::ExperimentKind kind;
    CLI::App* app;
    std::string config;
    std::map<std::string, std::string> values;
  };
  std::vector<std::unique_ptr<Sub>> subs;
  const std::map<emx::ExperimentKind, std::string> help{
      {emx::ExperimentKind::Roots, "characteristic roots on a log grid -> roots.csv"},
      {emx::ExperimentKind::Propagate, "propagate one Fourier mode -> mode_t.json"},
      {emx::ExperimentKind::VerifyLinear, "closed form vs RK4 oracle and Lyapunov margins -> verify.csv"},
      {emx::ExperimentKind::DecayLinear, "whole-space linear decay series and fit -> series.csv, fit.json"},
      {emx::ExperimentKind::Simulate, "periodic nonlinear run -> energy.csv, snapshots, report.json"},
      {emx::ExperimentKind::EnergyReport, "energy functional of one state -> energy.json"}};
  for (const auto& [kind, text] : help) {
    auto s = std::make_unique<Sub>();
    s->kind = kind;
    s->app = app.add_subcommand(emx::to_string(kind), text);
    s->app->add_option("--config", s->config, "manifest file; flags override its keys");
    for (const std::string& key : emx::manifest_keys(kind)) {
      Sub* p = s.get();
      s->app->add_option_function<std::string>(flag_name(key), [p, key](const std::string& v) { p->values[key] = v; });
    }
    subs.push_back(std::move(s));
  }
  std::string manifest_path;
  CLI::App* run = app.add_subcommand("run", "run the experiment described by a manifest file");
  run->add_option("manifest", manifest_path, "manifest file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    json fields = json::object();
    std::optional<emx::ExperimentKind> kind;
    if (run->parsed()) {
      fields = read_config(manifest_path);
      if (!fields.contains("experiment")) throw emx::ManifestError("experiment", "experiment: missing");
      kind = emx::experiment_from_string(fields["experiment"].get<std::string>());
    }
    for (const auto& s : subs) {
      if (!s->app->parsed()) continue;
      kind = s->kind;
      if (!s->config.empty()) fields = read_config(s->config);
      for (const auto& [k, v] : s->values) fields[k] = cli_value(v);
    }
    for (const auto& [k, v] : globals) fields[k] = k == "out" || k == "tolerance_profile" ? json(v) : cli_value(v);

    const emx::RunManifest m = emx::make_manifest(*kind, fields);
    return report(emx::run_experiment(m), m.out);
  } catch (const emx::ManifestError& e) {
    std::fprintf(stderr, "manifest error [%s]: %s\n", e.key.c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
