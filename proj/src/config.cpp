#include "ioncool/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ioncool/errors.hpp"
#include "ioncool/io.hpp"

namespace ioncool {

Json default_config() {
  return Json::parse(R"({
    "mass_u": 171,
    "trap": {"x2": 0.00188, "x4": 0.00177},
    "chain": {
      "n_ions": 15,
      "coolant_labels": [-1, 0],
      "n_endcaps": 0,
      "potential": "explicit",
      "spacing_um": 4.4
    },
    "damping": {"rabi_khz": 640, "gamma": "auto", "method": "exact-eigen"},
    "heating": {"alpha": 0.8, "A0": 8.2e17, "B0": 0.9, "D": "auto", "scaling": "per_ion"},
    "reference": {
      "n_ions": 15,
      "x2": 0.00188,
      "x4": 0.00177,
      "coolant_labels": [-1, 0],
      "rabi_khz": 640,
      "n0": 29,
      "method": "exact-eigen"
    },
    "case": {
      "n_coolants": 6,
      "n_qubits": 14,
      "n_endcaps": 2,
      "family": "equispaced",
      "spacing_um": 4.4,
      "gate_time_us": 250,
      "total_gates": 500,
      "T2_s": 0.5
    },
    "fidelity": {
      "kappa": "auto",
      "kappa_rabi_khz": 640,
      "kappa_target_duty": 0.6841,
      "kappa_target_mean_fidelity": 0.9993
    },
    "schedule": {
      "gates_per_cycle": 1,
      "cooling_us_per_gate": 375,
      "radial_factor": 0,
      "n_init": "auto",
      "cooling_subsamples": 4
    },
    "sweep": {
      "rabi_khz": [180, 275, 640],
      "gates_per_cycle": [1, 2, 3, 4, 5],
      "cooling_step_us": 25,
      "cooling_max_us": 4000,
      "radial_factor": 0,
      "coolant_counts": [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12],
      "coolant_duties": [0.5, 0.6841, 0.8],
      "placement_n_coolants": 2,
      "placement_guard": 1000000,
      "freq_fill_n_ions": 21,
      "freq_fill_khz": [100, 150, 200, 250, 300, 350, 400],
      "freq_fill_base": "equispaced",
      "freq_fill_spacing_um": 4.4,
      "perturbation_gamma_min": 1e-6,
      "perturbation_gamma_max": 1e-3,
      "perturbation_points": 13
    }
  })");
}

namespace {

std::string kind(const Json& j) {
  if (j.is_number()) return "number";
  if (j.is_string()) return "string";
  if (j.is_array()) return "array";
  if (j.is_object()) return "object";
  if (j.is_boolean()) return "boolean";
  return "null";
}

// `schema` is the defaults tree: it fixes the allowed keys and leaf kinds.
void merge(Json& base, const Json& patch, const Json& schema, const std::string& prefix) {
  if (!patch.is_object()) throw ConfigError("config: '" + prefix + "' must be an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!schema.contains(it.key())) throw ConfigError("config: unknown key '" + path + "'");
    const Json& rule = schema[it.key()];
    const Json& v = it.value();
    if (rule.is_object()) {
      merge(base[it.key()], v, rule, path);
      continue;
    }
    const bool auto_ok = rule.is_string() && rule.get<std::string>() == "auto";
    const bool is_auto = v.is_string() && v.get<std::string>() == "auto";
    const bool ok = auto_ok ? (v.is_number() || is_auto) : kind(rule) == kind(v);
    if (!ok) {
      throw ConfigError("config: '" + path + "' expects " +
                        (auto_ok ? std::string("\"auto\" or number") : kind(rule)) + ", got " +
                        kind(v));
    }
    if (v.is_array()) {
      for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError("config: '" + path + "' must hold numbers");
      }
    }
    if (v.is_number() && !std::isfinite(v.get<double>())) {
      throw ConfigError("config: '" + path + "' must be finite");
    }
    base[it.key()] = v;
  }
}

const Json& at_path(const Json& root, const std::string& path) {
  const Json* node = &root;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!node->is_object() || !node->contains(part)) {
      throw ConfigError("config: unknown key '" + path + "'");
    }
    node = &(*node)[part];
  }
  return *node;
}

Json override_patch(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;  // bare words are strings

  Json patch = value;
  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string p; std::getline(ss, p, '.');) {
    if (p.empty()) throw ConfigError("override '" + assignment + "' has an empty key part");
    parts.push_back(p);
  }
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = Json{{*it, patch}};
  return patch;
}

}  // namespace

std::string RunConfig::hash(std::string_view study) const {
  return fnv1a_hex(std::string(study) + "\n" + canonical());
}

double RunConfig::number(const std::string& path) const {
  const Json& j = at_path(tree, path);
  if (!j.is_number()) throw ConfigError("config: '" + path + "' must be a number");
  return j.get<double>();
}

int RunConfig::integer(const std::string& path) const {
  const double v = number(path);
  if (v != std::floor(v) || std::abs(v) > 2e9) {
    throw ConfigError("config: '" + path + "' must be an integer");
  }
  return static_cast<int>(v);
}

std::string RunConfig::string(const std::string& path) const {
  const Json& j = at_path(tree, path);
  if (!j.is_string()) throw ConfigError("config: '" + path + "' must be a string");
  return j.get<std::string>();
}

std::vector<double> RunConfig::numbers(const std::string& path) const {
  const Json& j = at_path(tree, path);
  if (!j.is_array()) throw ConfigError("config: '" + path + "' must be an array");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(e.get<double>());
  return out;
}

std::vector<int> RunConfig::integers(const std::string& path) const {
  std::vector<int> out;
  for (double v : numbers(path)) {
    if (v != std::floor(v)) throw ConfigError("config: '" + path + "' must hold integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::optional<double> RunConfig::number_or_auto(const std::string& path) const {
  const Json& j = at_path(tree, path);
  if (j.is_string() && j.get<std::string>() == "auto") return std::nullopt;
  return number(path);
}

RunConfig load_config(const std::optional<std::string>& path,
                      const std::vector<std::string>& overrides) {
  RunConfig cfg;
  const Json schema = default_config();
  cfg.tree = schema;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("config: cannot read '" + *path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const Json file = Json::parse(buf.str(), nullptr, false, /*ignore_comments=*/true);
    if (file.is_discarded()) throw ConfigError("config: '" + *path + "' is not valid JSON");
    merge(cfg.tree, file, schema, "");
  }
  for (const auto& o : overrides) merge(cfg.tree, override_patch(o), schema, "");
  return cfg;
}

}  // namespace ioncool
