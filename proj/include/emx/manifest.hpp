#ifndef EMX_MANIFEST_HPP
#define EMX_MANIFEST_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "emx/errors.hpp"

namespace emx {

enum class ExperimentKind { Roots, Propagate, VerifyLinear, DecayLinear, Simulate, EnergyReport };

const char* to_string(ExperimentKind k);
ExperimentKind experiment_from_string(const std::string& s);

/// Parsed and validated experiment description. `params` holds every
/// module-specific key with defaults filled in.
struct RunManifest {
  ExperimentKind kind = ExperimentKind::Roots;
  std::uint64_t seed = 1;
  std::string out = "out";
  std::string tolerance_profile = "default";  // "default" or "strict"
  int threads = 1;
  nlohmann::json params = nlohmann::json::object();

  double real(const std::string& key) const;
  long integer(const std::string& key) const;
  std::string string(const std::string& key) const;
  bool has(const std::string& key) const { return params.contains(key) && !params[key].is_null(); }
};

/// Flat key = value document: '#' comments, quoted strings, numbers, true/false,
/// and at most one [section] header that must name the experiment.
nlohmann::json parse_document(const std::string& text);

/// Validates keys and ranges and fills defaults. Every error names its key.
RunManifest make_manifest(ExperimentKind kind, const nlohmann::json& fields);
RunManifest parse_manifest(const std::string& text);
RunManifest load_manifest(const std::string& path);

/// Keys accepted for a kind, in declaration order (global keys excluded).
std::vector<std::string> manifest_keys(ExperimentKind kind);

nlohmann::json manifest_echo(const RunManifest& m);

}  // namespace emx

#endif
