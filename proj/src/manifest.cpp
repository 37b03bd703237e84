#include "emx/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace emx {

namespace {

using nlohmann::json;

enum class Type { Real, Int, Str };

struct Param {
  std::string key;
  Type type;
  json def;                                 // null means "derived when absent"
  std::function<bool(const json&)> check;   // applied to non-null values
  std::string rule;
  bool tolerance = false;                   // scaled by 0.1 under the strict profile
};

Param real(std::string k, json d, std::function<bool(double)> c, std::string rule, bool tol = false) {
  return {std::move(k), Type::Real, std::move(d), [c](const json& v) { return c(v.get<double>()); },
          std::move(rule), tol};
}
Param integer(std::string k, json d, long lo, std::string rule) {
  return {std::move(k), Type::Int, std::move(d), [lo](const json& v) { return v.get<long>() >= lo; },
          std::move(rule)};
}
Param choice(std::string k, std::string d, std::vector<std::string> opts) {
  std::string rule = "one of";
  for (const auto& o : opts) rule += " " + o;
  return {std::move(k), Type::Str, d,
          [opts](const json& v) {
            return std::find(opts.begin(), opts.end(), v.get<std::string>()) != opts.end();
          },
          rule};
}
Param path(std::string k) {
  return {std::move(k), Type::Str, "", [](const json&) { return true; }, "a path"};
}

const auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
const auto nonneg = [](double x) { return x >= 0.0 && std::isfinite(x); };
const auto unit_open = [](double x) { return x > 0.0 && x < 1.0; };
const auto unit_closed = [](double x) { return x > 0.0 && x <= 1.0; };

std::vector<Param> weight_params() {
  return {real("K1", 0.1, positive, "> 0"), real("K2", 0.01, positive, "> 0"),
          real("K3", 0.002, positive, "> 0")};
}

std::vector<Param> schema(ExperimentKind kind) {
  std::vector<Param> p;
  switch (kind) {
    case ExperimentKind::Roots:
      p = {choice("family", "long", {"long", "trans"}), real("kmin", 1e-3, positive, "> 0"),
           real("kmax", 1e3, positive, "> 0"), integer("n", 1000, 2, ">= 2"),
           real("residual_tol", 1e-12, positive, "> 0", true)};
      break;
    case ExperimentKind::Propagate:
      p = {path("mode_file"), real("kmag", nullptr, nonneg, ">= 0"), real("t", 1.0, nonneg, ">= 0"),
           real("constraint_tol", 1e-10, positive, "> 0", true)};
      break;
    case ExperimentKind::VerifyLinear:
      p = {real("kmin", 1e-2, positive, "> 0"),
           real("kmax", 1e2, positive, "> 0"),
           integer("n", 40, 1, ">= 1"),
           real("T", 20.0, positive, "> 0"),
           integer("modes", 10, 1, ">= 1"),
           real("gamma", nullptr, positive, "> 0"),
           real("lyapunov_T", 2.0, positive, "> 0"),
           real("closed_form_tol", 1e-6, positive, "> 0", true),
           real("drift_tol", 1e-9, positive, "> 0", true),
           real("margin_tol", 1e-10, positive, "> 0", true)};
      for (auto& w : weight_params()) p.push_back(std::move(w));
      break;
    case ExperimentKind::DecayLinear:
      p = {choice("component", "B", {"rho", "u", "theta", "E", "B"}),
           choice("norm", "l2", {"l2", "linf"}),
           integer("m", 0, 0, ">= 0"),
           real("width", 0.5, positive, "> 0"),
           real("amplitude", 1.0, positive, "> 0"),
           real("tmax", nullptr, positive, "> 0"),
           integer("nt", 60, 10, ">= 10"),
           real("fit_lo", nullptr, nonneg, ">= 0"),
           real("fit_hi", nullptr, positive, "> 0"),
           real("slope_tol", nullptr, positive, "> 0"),
           real("max_slope", -0.45, [](double x) { return std::isfinite(x); }, "finite"),
           real("quadrature_tol", 1e-8, positive, "> 0", true),
           real("refinement_tol", 1e-2, positive, "> 0", true)};
      break;
    case ExperimentKind::Simulate:
      p = {integer("N", 32, 16, ">= 16"),
           real("L", 2 * std::numbers::pi, positive, "> 0"),
           real("dt", 0.02, positive, "> 0"),
           real("T", 50.0, nonneg, ">= 0"),
           real("delta", 1e-2, nonneg, ">= 0"),
           integer("s", 4, 2, ">= 2"),
           real("dealias", 2.0 / 3.0, unit_closed, "in (0, 1]"),
           real("output_every", 1.0, positive, "> 0"),
           integer("snapshot_every", 10, 0, ">= 0"),
           real("density_floor", 0.4, unit_open, "in (0, 1)"),
           real("max_increment", 0.1, positive, "> 0"),
           integer("max_rejections", 8, 0, ">= 0"),
           real("monotone_tol", 1e-8, nonneg, ">= 0", true),
           real("integral_tol", 1e-6, nonneg, ">= 0", true),
           real("constraint_tol", 1e-10, positive, "> 0", true)};
      for (auto& w : weight_params()) p.push_back(std::move(w));
      break;
    case ExperimentKind::EnergyReport:
      p = {integer("N", 32, 16, ">= 16"),
           real("L", 2 * std::numbers::pi, positive, "> 0"),
           real("delta", 1e-2, nonneg, ">= 0"),
           integer("s", 4, 2, ">= 2"),
           real("dealias", 2.0 / 3.0, unit_closed, "in (0, 1]"),
           path("snapshot")};
      for (auto& w : weight_params()) p.push_back(std::move(w));
      break;
  }
  return p;
}

const char* kGlobal[] = {"experiment", "seed", "out", "threads", "tolerance_profile"};

bool is_global(const std::string& k) {
  return std::find(std::begin(kGlobal), std::end(kGlobal), k) != std::end(kGlobal);
}

std::string describe(const json& v) {
  return v.is_string() ? "\"" + v.get<std::string>() + "\"" : v.dump();
}

json coerce(const Param& p, const json& v) {
  switch (p.type) {
    case Type::Real:
      if (!v.is_number()) throw ManifestError(p.key, p.key + ": expected a number, got " + describe(v));
      return v.get<double>();
    case Type::Int:
      if (v.is_number_integer()) return v.get<long>();
      if (v.is_number_float() && std::trunc(v.get<double>()) == v.get<double>() &&
          std::abs(v.get<double>()) < 1e15)
        return static_cast<long>(v.get<double>());
      throw ManifestError(p.key, p.key + ": expected an integer, got " + describe(v));
    case Type::Str:
      if (!v.is_string()) throw ManifestError(p.key, p.key + ": expected a string, got " + describe(v));
      return v;
  }
  return v;
}

[[noreturn]] void malformed(int line, const std::string& what) {
  throw ManifestError("line " + std::to_string(line), "line " + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

json parse_value(const std::string& raw, int line) {
  if (raw.empty()) malformed(line, "missing value");
  if (raw.front() == '"') {
    std::string out;
    std::size_t i = 1;
    for (; i < raw.size() && raw[i] != '"'; ++i) {
      if (raw[i] == '\\' && i + 1 < raw.size()) {
        const char c = raw[++i];
        out += c == 'n' ? '\n' : c == 't' ? '\t' : c;
      } else {
        out += raw[i];
      }
    }
    if (i != raw.size() - 1) malformed(line, "bad string literal " + raw);
    return out;
  }
  if (raw == "true") return true;
  if (raw == "false") return false;
  std::string s;
  for (char c : raw)
    if (c != '_') s += c;
  const bool looks_int = s.find_first_of(".eEni") == std::string::npos;
  errno = 0;
  char* end = nullptr;
  if (looks_int) {
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() + s.size() && errno == 0) return v;
  } else {
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() + s.size() && std::isfinite(v)) return v;
  }
  malformed(line, "cannot parse value " + raw);
}

}  // namespace

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Roots: return "roots";
    case ExperimentKind::Propagate: return "propagate";
    case ExperimentKind::VerifyLinear: return "verify-linear";
    case ExperimentKind::DecayLinear: return "decay-linear";
    case ExperimentKind::Simulate: return "simulate";
    case ExperimentKind::EnergyReport: return "energy-report";
  }
  return "?";
}

ExperimentKind experiment_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::Roots, ExperimentKind::Propagate, ExperimentKind::VerifyLinear,
                 ExperimentKind::DecayLinear, ExperimentKind::Simulate, ExperimentKind::EnergyReport})
    if (s == to_string(k)) return k;
  throw ManifestError("experiment", "experiment: unknown kind \"" + s + "\"");
}

double RunManifest::real(const std::string& key) const { return params.at(key).get<double>(); }
long RunManifest::integer(const std::string& key) const { return params.at(key).get<long>(); }
std::string RunManifest::string(const std::string& key) const { return params.at(key).get<std::string>(); }

json parse_document(const std::string& text) {
  json doc = json::object();
  std::istringstream is(text);
  std::string line, section;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    // drop comments outside string literals
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || !section.empty()) malformed(n, "only one [section] header is allowed");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) malformed(n, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) malformed(n, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty() || !std::all_of(key.begin(), key.end(), [](char c) {
          return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
        }))
      malformed(n, "bad key \"" + key + "\"");
    if (doc.contains(key)) throw ManifestError(key, key + ": duplicate key");
    doc[key] = parse_value(trim(line.substr(eq + 1)), n);
  }
  if (!section.empty()) {
    if (doc.contains("experiment") && doc["experiment"] != section)
      throw ManifestError("experiment", "experiment: section [" + section + "] does not match");
    doc["experiment"] = section;
  }
  return doc;
}

RunManifest make_manifest(ExperimentKind kind, const json& fields) {
  if (!fields.is_object()) throw ManifestError("", "manifest must be a key/value table");
  RunManifest m;
  m.kind = kind;
  if (fields.contains("experiment") && experiment_from_string(fields["experiment"].get<std::string>()) != kind)
    throw ManifestError("experiment", "experiment: conflicts with the requested kind");
  if (fields.contains("seed")) {
    const json& v = fields["seed"];
    if (!v.is_number_integer() || v.get<long long>() < 0)
      throw ManifestError("seed", "seed: expected a nonnegative integer, got " + describe(v));
    m.seed = v.get<std::uint64_t>();
  }
  if (fields.contains("out")) {
    if (!fields["out"].is_string() || fields["out"].get<std::string>().empty())
      throw ManifestError("out", "out: expected a nonempty path");
    m.out = fields["out"];
  }
  if (fields.contains("threads")) {
    const json& v = fields["threads"];
    if (!v.is_number_integer() || v.get<long long>() < 1)
      throw ManifestError("threads", "threads: expected an integer >= 1, got " + describe(v));
    m.threads = v.get<int>();
  }
  if (fields.contains("tolerance_profile")) {
    const json& v = fields["tolerance_profile"];
    if (!v.is_string() || (v != "default" && v != "strict"))
      throw ManifestError("tolerance_profile", "tolerance_profile: one of default strict, got " + describe(v));
    m.tolerance_profile = v;
  }

  const auto sch = schema(kind);
  for (const auto& [key, v] : fields.items()) {
    if (is_global(key)) continue;
    if (std::none_of(sch.begin(), sch.end(), [&](const Param& p) { return p.key == key; }))
      throw ManifestError(key, key + ": unknown key for " + to_string(kind));
  }
  const double scale = m.tolerance_profile == "strict" ? 0.1 : 1.0;
  for (const Param& p : sch) {
    json v = p.def;
    if (fields.contains(p.key) && !fields[p.key].is_null()) {
      v = coerce(p, fields[p.key]);
    } else if (p.tolerance && v.is_number()) {
      v = v.get<double>() * scale;
    }
    if (!v.is_null() && !p.check(v))
      throw ManifestError(p.key, p.key + ": must be " + p.rule + " (got " + describe(v) + ")");
    m.params[p.key] = v;
  }

  auto order = [&](const char* lo, const char* hi) {
    if (m.has(lo) && m.has(hi) && !(m.real(lo) < m.real(hi)))
      throw ManifestError(hi, std::string(hi) + ": must exceed " + lo);
  };
  switch (kind) {
    case ExperimentKind::Roots:
      order("kmin", "kmax");
      break;
    case ExperimentKind::DecayLinear:
      order("fit_lo", "fit_hi");
      if (m.string("norm") == "linf" && m.integer("m") > 0)
        throw ManifestError("m", "m: derivatives are only supported with norm = l2");
      break;
    case ExperimentKind::Simulate:
    case ExperimentKind::EnergyReport:
      if (m.integer("N") % 2) throw ManifestError("N", "N: must be even");
      [[fallthrough]];
    case ExperimentKind::VerifyLinear:
      if (kind == ExperimentKind::VerifyLinear) order("kmin", "kmax");
      if (!(m.real("K3") < m.real("K2") && m.real("K2") < m.real("K1") && m.real("K1") < 1.0))
        throw ManifestError("K1", "K1: weights must satisfy K3 < K2 < K1 < 1");
      break;
    default:
      break;
  }
  return m;
}

RunManifest parse_manifest(const std::string& text) {
  const json doc = parse_document(text);
  if (!doc.contains("experiment") || !doc["experiment"].is_string())
    throw ManifestError("experiment", "experiment: missing");
  return make_manifest(experiment_from_string(doc["experiment"]), doc);
}

RunManifest load_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ManifestError("", "cannot read manifest " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_manifest(ss.str());
}

std::vector<std::string> manifest_keys(ExperimentKind kind) {
  std::vector<std::string> out;
  for (const Param& p : schema(kind)) out.push_back(p.key);
  return out;
}

json manifest_echo(const RunManifest& m) {
  json j = json::object();
  j["experiment"] = to_string(m.kind);
  j["seed"] = m.seed;
  j["out"] = m.out;
  j["threads"] = m.threads;
  j["tolerance_profile"] = m.tolerance_profile;
  json p = json::object();
  for (const std::string& k : manifest_keys(m.kind)) p[k] = m.params[k];
  j["params"] = p;
  return j;
}

}  // namespace emx
