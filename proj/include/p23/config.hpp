#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "p23/oc.hpp"
#include "p23/trial.hpp"

// JSON configuration files: one document describes both the design
// parameters and the scenario ground truth. Unknown keys are hard errors.

namespace p23 {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadedConfig {
  DesignConfig design;
  ScenarioSpec scenario;
  std::string name;  // file stem, used as the scenario label in CSV output
};

/// Parses and validates a config file; throws ConfigError on any problem.
/// The scenario's optimal dose is derived from the ground truth: among doses
/// truly satisfying both admissibility limits (p_t < phi_t and p_e > phi_e),
/// the one with the best true desirability; none leaves it absent.
LoadedConfig load_config(const std::filesystem::path& path);

/// Same, from an in-memory JSON string (used by tests).
LoadedConfig parse_config(const std::string& text, const std::string& name);

struct GridSpec {
  std::vector<int> n1;
  std::vector<int> n2;
};

/// Calibration grid file: {"n1": [...], "n2": [...]}.
GridSpec load_grid(const std::filesystem::path& path);

}  // namespace p23
