#pragma once

#include <map>
#include <string>
#include <vector>

#include "common.hpp"

namespace daz {

/// Key-value experiment configuration. Files are plain `key = value` lines
/// with '#' comments; the resolved form carries every key (defaults filled)
/// and re-emits canonically, so emit(parse(emit(c))) is a fixpoint.
struct ExperimentConfig {
  std::string experiment;
  std::map<std::string, std::string> kv;

  bool has(const std::string& key) const { return kv.count(key) != 0; }
  const std::string& str(const std::string& key) const;
  double num(const std::string& key) const;
  long long integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<std::string> list(const std::string& key) const;
  Vec num_list(const std::string& key) const;
};

struct Diagnostic {
  bool error = false;
  std::string message;
};

/// Parses `key = value` text; throws on malformed lines.
std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Reads and parses a config file.
std::map<std::string, std::string> load_key_values(const std::string& path);

/// Applies overrides, fills experiment defaults, rejects unknown keys and
/// unknown experiments.
ExperimentConfig resolve_config(std::map<std::string, std::string> raw,
                                const std::map<std::string, std::string>& overrides = {});

/// Canonical emission: sorted `key = value` lines.
std::string emit_key_values(const std::map<std::string, std::string>& kv);

/// Static checks (schedule endpoints, policy vs metadata, label coverage,
/// memory footprint) without running anything.
std::vector<Diagnostic> validate_config(const ExperimentConfig& config);

/// Names of the supported experiments, in listing order.
std::vector<std::string> experiment_names();

}  // namespace daz
