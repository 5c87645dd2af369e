#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "p23/stats.hpp"

// Interim benefit-risk scoring and dose selection: outcome-cell utilities,
// efficacy-toxicity tradeoff, Bayesian admissibility gates, and the
// select-or-stop decision at the end of stage 1.

namespace p23 {

/// Joint (efficacy, toxicity) outcome counts for one arm. Cell order follows
/// the four patient outcomes: 1 = (response, no toxicity),
/// 2 = (response, toxicity), 3 = (no response, no toxicity),
/// 4 = (no response, toxicity).
struct CellCounts {
  int n = 0;
  int eff_no_tox = 0;
  int eff_tox = 0;
  int no_eff_no_tox = 0;
  int no_eff_tox = 0;

  int responders() const { return eff_no_tox + eff_tox; }
  int toxicities() const { return eff_tox + no_eff_tox; }

  void add(bool response, bool toxicity) {
    ++n;
    if (response && !toxicity) ++eff_no_tox;
    else if (response && toxicity) ++eff_tox;
    else if (!response && !toxicity) ++no_eff_no_tox;
    else ++no_eff_tox;
  }
};

/// Outcome-cell scores u1..u4 in [0,100]. With `minimize` the scores are
/// read as losses (best outcome scored lowest); with `maximize` as
/// desirabilities.
struct UtilitySpec {
  enum class Orientation { maximize, minimize };
  double u1 = 0.0;
  double u2 = 40.0;
  double u3 = 60.0;
  double u4 = 100.0;
  Orientation orientation = Orientation::minimize;
};

/// Efficacy-toxicity tradeoff U = p_E - w * p_T, always maximized.
struct TradeoffSpec {
  double w = 0.0;
};

using DesirabilitySpec = std::variant<UtilitySpec, TradeoffSpec>;

/// Admissibility gates: a dose is acceptable when
///   Pr(p_T < phi_t | data) > c_t   and   Pr(p_E > phi_e | data) > c_e
/// under independent Beta posteriors.
struct GateSpec {
  double phi_t = 0.3;
  double phi_e = 0.3;
  double c_t = 0.1;
  double c_e = 0.1;
  BetaPrior prior;
};

struct DoseAssessment {
  double score = 0.0;
  bool safety_pass = false;
  bool efficacy_pass = false;

  bool admissible() const { return safety_pass && efficacy_pass; }
};

/// Outcome of the interim analysis: the selected dose index, or nullopt when
/// no dose passed both gates (early stop).
struct InterimDecision {
  std::optional<int> selected;
  std::vector<DoseAssessment> doses;

  bool early_stop() const { return !selected.has_value(); }
};

/// Mean outcome score Sum_k (c_k / n) u_k. Requires n > 0.
double expected_score(const CellCounts& cells, const UtilitySpec& spec);

/// p_E - w * p_T.
double tradeoff_score(double p_e_hat, double p_t_hat, const TradeoffSpec& spec);

/// Safety gate of the admissibility criteria (strict inequality).
bool gate_safety(int tox_count, int n, const GateSpec& gate);

/// Efficacy gate of the admissibility criteria (strict inequality).
bool gate_efficacy(int resp_count, int n, const GateSpec& gate);

/// Scores every dose, applies both gates, and picks the admissible dose with
/// the best score (max for tradeoff and maximize-oriented utilities, min for
/// minimize-oriented). Ties break toward the lowest dose index; an empty
/// admissible set yields an early stop.
InterimDecision select_optimal(std::span<const CellCounts> per_dose,
                               const DesirabilitySpec& desirability,
                               const GateSpec& gates);

}  // namespace p23
