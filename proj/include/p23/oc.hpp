#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "p23/trial.hpp"

// Replication harness: operating characteristics, sample-size calibration,
// stage-1 allocation sweeps, and the conventional-counterpart comparison.
// Replication r always draws from Rng::substream(seed, r), so estimates are
// bit-identical for any worker count and grid points share random numbers.

namespace p23 {

/// Flattened outcome of one replication (also the trace-CSV row).
struct RepOutcome {
  int selected = -1;  // 0-based dose, -1 when stopped early
  bool early_stop = false;
  bool rejected = false;
  bool false_discovery = false;
  bool correct_selection = false;
  int enrolled = 0;
  double duration = 0.0;
};

struct OperatingCharacteristics {
  long reps = 0;
  double fwer = 0.0;
  double fwer_se = 0.0;
  // Undefined (absent) when the scenario has no optimal dose.
  std::optional<double> pcs, pcs_se;
  std::optional<double> gen_power, gen_power_se;
  double avg_sample_size = 0.0;
  double avg_duration = 0.0;
};

struct OcOptions {
  int threads = 1;
  bool conventional = false;
  std::vector<RepOutcome>* trace = nullptr;  // filled in replication order
};

/// True when dose j cannot beat the control on the design's final endpoint
/// (hazard ratio >= 1 for the survival designs, response rate at or below the
/// concurrent-population rate otherwise). Rejections of such doses are the
/// false discoveries counted by the FWER.
bool dose_is_null(const DesignConfig& config, const ScenarioSpec& scenario,
                  int dose);

OperatingCharacteristics run_oc(const DesignConfig& config,
                                const ScenarioSpec& scenario, long reps,
                                std::uint64_t seed, const OcOptions& opts = {});

struct CalibrationPoint {
  int n1 = 0;
  int n2 = 0;
  long total = 0;
  double gen_power = 0.0;
};

struct CalibrationResult {
  bool reachable = false;
  CalibrationPoint chosen;  // best point when unreachable
  std::vector<CalibrationPoint> evaluated;
};

/// Evaluates every (n1, n2) grid pair and picks the smallest full-trial
/// enrollment reaching the target generalized power; ties break toward the
/// smaller n2. When no point reaches the target, `reachable` is false and
/// `chosen` carries the highest-power point.
CalibrationResult calibrate_n(const DesignConfig& config,
                              const ScenarioSpec& scenario,
                              double target_power, std::span<const int> n1_grid,
                              std::span<const int> n2_grid, long reps,
                              std::uint64_t seed, const OcOptions& opts = {});

struct SweepRow {
  int n1 = 0;
  int n2 = 0;
  std::optional<double> pcs, pcs_se;
  std::optional<double> gen_power, gen_power_se;
};

/// One row per feasible n1, with n2 derived so the full-trial enrollment
/// equals `total`. Values of n1 that leave no room for n2 >= 1 (or do not
/// divide evenly across the stage-2 arms) are skipped with a warning on
/// stderr. Rows are ordered by n1.
std::vector<SweepRow> allocation_sweep(const DesignConfig& config,
                                       const ScenarioSpec& scenario, long total,
                                       std::span<const int> n1_values,
                                       long reps, std::uint64_t seed,
                                       const OcOptions& opts = {});

struct ComparisonReport {
  OperatingCharacteristics seamless;
  OperatingCharacteristics conventional;
  double savings = 0.0;  // 1 - seamless avg N / conventional avg N
};

/// Runs the seamless design and the conventional counterpart (own config,
/// same replication substreams) and reports the relative sample-size savings.
ComparisonReport compare_with_conventional(const DesignConfig& config,
                                           const ScenarioSpec& scenario,
                                           const DesignConfig& cc_config,
                                           const ScenarioSpec& cc_scenario,
                                           long reps, std::uint64_t seed,
                                           const OcOptions& opts = {});

/// CSV emission for `simulate` (fixed header) and the per-replication trace.
std::string oc_csv_header();
std::string oc_csv_row(const DesignConfig& config, const std::string& scenario,
                       long reps, std::uint64_t seed,
                       const OperatingCharacteristics& oc);
std::string trace_csv_header();
std::string trace_csv_row(long rep, const RepOutcome& out);

std::string design_name(Design design);

}  // namespace p23
