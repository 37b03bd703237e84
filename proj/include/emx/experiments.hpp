#ifndef EMX_EXPERIMENTS_HPP
#define EMX_EXPERIMENTS_HPP

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "emx/core.hpp"
#include "emx/manifest.hpp"
#include "emx/nonlinear_sim.hpp"

namespace emx {

inline constexpr int kSchemaVersion = 1;

/// Written into every simulate report.
extern const char* const kNonReproducibility;

struct CheckResult {
  std::string name;
  double value = 0;
  double limit = 0;
  bool pass = true;
};

struct ExperimentResult {
  std::vector<CheckResult> checks;
  std::vector<std::string> files;  // relative to the output directory
  nlohmann::json summary;          // contents of summary.json
  bool ok() const;
};

/// Runs one experiment, writing its files and summary.json into m.out.
ExperimentResult run_experiment(const RunManifest& m);

/// Mode file: {"k": [x, y, z], "rho": [re, im], "u": [[re, im] x 3], "theta", "E", "B", "t"?}.
nlohmann::json mode_to_json(const ModeState& m, const WaveVector& k);
std::pair<ModeState, WaveVector> mode_from_json(const nlohmann::json& j);

SimConfig sim_config(const RunManifest& m);

}  // namespace emx

#endif
