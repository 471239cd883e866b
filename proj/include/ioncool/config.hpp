#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace ioncool {

using Json = nlohmann::json;

/// Fully resolved run configuration: built-in defaults, then the config
/// file, then `--set` overrides. Every key must exist in the defaults;
/// leaves whose default is "auto" also accept numbers.
struct RunConfig {
  Json tree;
  /// Canonical serialization (sorted keys, compact) used for hashing.
  std::string canonical() const { return tree.dump(); }
  /// FNV-1a of the canonical form salted with the study name.
  std::string hash(std::string_view study) const;

  /// Typed access by dotted path; throws ConfigError on type mismatch.
  double number(const std::string& path) const;
  int integer(const std::string& path) const;
  std::string string(const std::string& path) const;
  std::vector<double> numbers(const std::string& path) const;
  std::vector<int> integers(const std::string& path) const;
  /// nullopt when the leaf is "auto".
  std::optional<double> number_or_auto(const std::string& path) const;
};

Json default_config();

/// Throws ConfigError for unreadable files, malformed JSON, unknown keys,
/// type mismatches, and malformed overrides.
RunConfig load_config(const std::optional<std::string>& path,
                      const std::vector<std::string>& overrides);

}  // namespace ioncool
