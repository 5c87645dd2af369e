#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "p23/rng.hpp"
#include "p23/stats.hpp"

// Per-patient outcome generation: correlated binary toxicity/efficacy via a
// Gaussian copula, response-conditional exponential survival, deterministic
// accrual, and administrative censoring.

namespace p23 {

/// Ground truth for one dose arm.
struct DoseTruth {
  double p_e = 0.0;  // true response probability
  double p_t = 0.0;  // true toxicity probability
  double hr = 1.0;   // hazard ratio vs control, applied to both responder
                     // and non-responder hazards
};

/// Ground truth for the concurrent control population.
struct ControlTruth {
  double p_c = 0.0;            // response probability
  double lambda_resp = 0.0;    // responder hazard, events/month
  double lambda_nonresp = 0.0; // non-responder hazard, events/month
};

/// Benchmark used by single-arm tests in designs without concurrent control.
struct HistoricalBenchmark {
  double p_c = 0.0;
  double hazard = 0.0;  // events/month
};

/// Latent correlation between the toxicity and efficacy variables.
struct CopulaSpec {
  double rho = 0.0;
};

struct PatientRecord {
  int arm = 0;                  // dose index 0..J-1, or J for control
  double enroll_time = 0.0;     // months from trial start
  bool y_t = false;             // toxicity
  bool y_e = false;             // response
  double raw_event_time = 0.0;  // months from enrollment, uncensored
  int stage = 1;                // 1 or 2
};

/// Full description of one simulation scenario. `optimal_dose` is the
/// 0-based index of the truly optimal dose, or nullopt when no dose is
/// acceptable (null scenario).
struct ScenarioSpec {
  std::vector<DoseTruth> doses;
  ControlTruth control;
  HistoricalBenchmark historical;
  CopulaSpec copula;
  std::optional<int> optimal_dose;

  int n_doses() const { return static_cast<int>(doses.size()); }
};

/// Draws (toxicity, response) for one patient on a dose arm. Latent
/// (z_T, z_E) are bivariate standard normal with correlation rho and the
/// outcomes are threshold indicators, so the marginals are Bernoulli(p_t)
/// and Bernoulli(p_e). Consumes exactly two normal draws.
std::pair<bool, bool> draw_dose_outcome(const DoseTruth& dose,
                                        const CopulaSpec& copula, Rng& rng);

/// Exponential survival time (months) conditional on response status:
/// rate lambda_resp * hr for responders, lambda_nonresp * hr otherwise.
/// Pass hr = 1 for control-arm patients.
double draw_survival_time(bool responder, const ControlTruth& control,
                          double hazard_ratio, Rng& rng);

/// Deterministic accrual: patient k of n enrolls at start + (k+1)/rate.
std::vector<double> enroll_times(int n, double accrual_rate, double start);

/// Administrative censoring at a calendar time. Patients with no positive
/// follow-up at analysis_time are excluded; otherwise observed time is
/// min(raw_event_time, analysis_time - enroll_time).
SurvivalSample censor_at(std::span<const PatientRecord> records,
                         double analysis_time);

}  // namespace p23
