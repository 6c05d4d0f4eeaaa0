#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wsym/harness.hpp"
#include "wsym/profiles.hpp"

namespace wsym {

/// Invalid configuration; `key` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Everything that determines a run. Profile parameters stay as raw strings
/// until make_profile interprets them for the selected kind.
struct RunConfig {
  std::string experiment = "verify-ps";
  /// experiment rerun by a convergence study
  std::string study = "norm-preservation";
  std::string profile = "euclidean";
  std::map<std::string, std::string> profile_params;  // keys without the "profile." prefix
  std::size_t res = 128;
  std::vector<std::size_t> resolutions;
  double p = 2.0;
  double q = 2.0;
  std::size_t samples = 30;
  std::uint64_t seed = 0;
  std::string out = ".";
  std::size_t threads = 0;
  std::optional<double> tolerance;
  double tail_tolerance = 1e-8;
  std::optional<double> mass;
  std::optional<double> mass_fraction;
  bool equality = false;
  bool dump_fields = false;
};

/// Applies one `key = value` assignment.
void set_option(RunConfig& cfg, const std::string& key, const std::string& value);

/// Lines of `key = value`; `#` starts a comment.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Checks ranges and interprets the profile parameters.
void validate(const RunConfig& cfg);

IsoperimetricProfile make_profile(const RunConfig& cfg);
HarnessOptions make_harness_options(const RunConfig& cfg);
ExperimentSpec make_experiment_spec(const RunConfig& cfg);

struct ParameterSchema {
  std::string name;
  std::string type;
  std::string default_value;
  std::string description;
};

struct CatalogEntry {
  std::string kind;
  std::string measure;
  std::string family;
  std::vector<ParameterSchema> parameters;
};

const std::vector<CatalogEntry>& profile_catalog();

}  // namespace wsym
