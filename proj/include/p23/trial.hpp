#pragma once

#include <optional>
#include <vector>

#include "p23/ctct.hpp"
#include "p23/outcomes.hpp"
#include "p23/rng.hpp"
#include "p23/selection.hpp"

// One complete simulated trial: shared accrual, stage-1 conduct, interim
// benefit-risk selection, stage-2 conduct, and the final analysis.
//
// Design A: concurrent control in both stages; response-based interim,
//           survival-based final analysis.
// Design B: control in stage 2 only; stage-1 evidence vs a historical
//           benchmark.
// Design C: like A with the response endpoint carried through to the final
//           analysis.
// Design D: no control; single-arm exact binomial tests vs the benchmark.

namespace p23 {

enum class Design { A, B, C, D };

/// Endpoint used for the stage-1 contribution to the final combination test
/// in the survival designs (A and B): the stage-1 cohorts' survival data
/// censored at the final analysis time, or their stage-1 response counts.
enum class Stage1Endpoint { survival, orr };

struct DesignConfig {
  Design design = Design::C;
  int n1 = 1;  // stage-1 patients per arm
  int n2 = 1;  // stage-2 patients per arm
  double alpha = 0.05;
  GateSpec gates;
  DesirabilitySpec desirability = UtilitySpec{};
  double accrual_rate = 2.0;   // patients/month across all open arms
  double assess_time = 0.0;    // months from enrollment to response readout
  double followup_min = 12.0;  // months of follow-up after last stage-2 entry
  double rho_dunnett = 0.5;    // pairwise correlation under equal allocation
  double p_clamp_epsilon = 1e-10;
  Stage1Endpoint stage1_endpoint = Stage1Endpoint::survival;

  bool control_in_stage1() const {
    return design == Design::A || design == Design::C;
  }
  bool control_in_stage2() const { return design != Design::D; }
  bool survival_final() const {
    return design == Design::A || design == Design::B;
  }
  IntersectionMethod intersection_method() const {
    return control_in_stage1() ? IntersectionMethod::dunnett
                               : IntersectionMethod::sidak;
  }
  int stage1_arms(int n_doses) const {
    return n_doses + (control_in_stage1() ? 1 : 0);
  }
  int stage2_arms() const { return 1 + (control_in_stage2() ? 1 : 0); }
  /// Enrollment of a trial that runs both stages to completion.
  long full_enrollment(int n_doses) const {
    return static_cast<long>(stage1_arms(n_doses)) * n1 +
           static_cast<long>(stage2_arms()) * n2;
  }
  CombinationSpec combination() const {
    return {n1, n2, alpha, p_clamp_epsilon};
  }
};

/// Detailed record of one simulated trial, filled on request.
struct TrialLog {
  std::vector<PatientRecord> patients;
  double interim_time = 0.0;
  double final_time = 0.0;
  std::vector<double> stage1_z;
  double stage2_p = 1.0;
};

struct TrialResult {
  InterimDecision interim;
  std::optional<FinalVerdict> verdict;  // nullopt when stopped early
  std::optional<int> selected;          // 0-based dose index
  int total_enrolled = 0;
  double interim_time = 0.0;
  double duration = 0.0;  // months to the analysis that ended the trial

  bool stopped_early() const { return !verdict.has_value(); }
  bool rejected() const { return verdict && verdict->rejected; }
};

/// Validates that config and scenario are mutually consistent; throws
/// std::invalid_argument otherwise. Called by both runners before any draw.
void check_consistent(const DesignConfig& config, const ScenarioSpec& scenario);

/// Simulates one seamless trial.
TrialResult run_trial(const DesignConfig& config, const ScenarioSpec& scenario,
                      Rng& rng, TrialLog* log = nullptr);

/// Simulates the conventional counterpart: identical conduct and interim
/// selection, but the final decision uses the stage-2 test alone at level
/// alpha and discards the stage-1 data.
TrialResult run_conventional(const DesignConfig& config,
                             const ScenarioSpec& scenario, Rng& rng,
                             TrialLog* log = nullptr);

}  // namespace p23
