#include "p23/selection.hpp"

#include <stdexcept>

namespace p23 {

namespace {

void check_cells(const CellCounts& cells) {
  if (cells.n <= 0)
    throw std::domain_error("cell counts: n must be positive");
  if (cells.eff_no_tox < 0 || cells.eff_tox < 0 || cells.no_eff_no_tox < 0 ||
      cells.no_eff_tox < 0 ||
      cells.eff_no_tox + cells.eff_tox + cells.no_eff_no_tox +
              cells.no_eff_tox != cells.n)
    throw std::domain_error("cell counts: cells must be >= 0 and sum to n");
}

}  // namespace

double expected_score(const CellCounts& cells, const UtilitySpec& spec) {
  check_cells(cells);
  const double n = cells.n;
  return (cells.eff_no_tox * spec.u1 + cells.eff_tox * spec.u2 +
          cells.no_eff_no_tox * spec.u3 + cells.no_eff_tox * spec.u4) / n;
}

double tradeoff_score(double p_e_hat, double p_t_hat,
                      const TradeoffSpec& spec) {
  return p_e_hat - spec.w * p_t_hat;
}

bool gate_safety(int tox_count, int n, const GateSpec& gate) {
  if (n <= 0) throw std::domain_error("gate_safety: n must be positive");
  return beta_tail_below(gate.prior, tox_count, n, gate.phi_t) > gate.c_t;
}

bool gate_efficacy(int resp_count, int n, const GateSpec& gate) {
  if (n <= 0) throw std::domain_error("gate_efficacy: n must be positive");
  return 1.0 - beta_tail_below(gate.prior, resp_count, n, gate.phi_e) >
         gate.c_e;
}

InterimDecision select_optimal(std::span<const CellCounts> per_dose,
                               const DesirabilitySpec& desirability,
                               const GateSpec& gates) {
  if (per_dose.size() < 2)
    throw std::domain_error("select_optimal: need at least 2 doses");

  const bool minimize =
      std::holds_alternative<UtilitySpec>(desirability) &&
      std::get<UtilitySpec>(desirability).orientation ==
          UtilitySpec::Orientation::minimize;

  InterimDecision decision;
  decision.doses.resize(per_dose.size());
  for (std::size_t j = 0; j < per_dose.size(); ++j) {
    const CellCounts& cells = per_dose[j];
    check_cells(cells);
    DoseAssessment& a = decision.doses[j];
    if (const auto* u = std::get_if<UtilitySpec>(&desirability)) {
      a.score = expected_score(cells, *u);
    } else {
      const auto& t = std::get<TradeoffSpec>(desirability);
      a.score = tradeoff_score(static_cast<double>(cells.responders()) / cells.n,
                               static_cast<double>(cells.toxicities()) / cells.n,
                               t);
    }
    a.safety_pass = gate_safety(cells.toxicities(), cells.n, gates);
    a.efficacy_pass = gate_efficacy(cells.responders(), cells.n, gates);
  }

  for (std::size_t j = 0; j < decision.doses.size(); ++j) {
    if (!decision.doses[j].admissible()) continue;
    if (!decision.selected) {
      decision.selected = static_cast<int>(j);
      continue;
    }
    const double best = decision.doses[*decision.selected].score;
    const double cur = decision.doses[j].score;
    // strict comparison keeps the lowest index on ties
    if (minimize ? cur < best : cur > best)
      decision.selected = static_cast<int>(j);
  }
  return decision;
}

}  // namespace p23
