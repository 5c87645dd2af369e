#include "p23/trial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace p23 {

namespace {

// Converts a single-arm p-value into the z scale used by the intersection
// machinery; clamped like the combination inputs.
double z_from_pvalue(double p, double eps) {
  return std_normal_quantile(1.0 - std::clamp(p, eps, 1.0 - eps));
}

struct Conduct {
  std::vector<PatientRecord> patients;
  double interim_time = 0.0;
  double last_stage2_entry = 0.0;
  int control_arm = 0;  // arm id of the control (== n_doses)
};

void draw_patient(std::vector<PatientRecord>& out, int arm, int n_doses,
                  int stage, double enroll_time, const ScenarioSpec& scenario,
                  Rng& rng) {
  PatientRecord rec;
  rec.arm = arm;
  rec.stage = stage;
  rec.enroll_time = enroll_time;
  if (arm < n_doses) {
    const DoseTruth& dose = scenario.doses[static_cast<std::size_t>(arm)];
    auto [y_t, y_e] = draw_dose_outcome(dose, scenario.copula, rng);
    rec.y_t = y_t;
    rec.y_e = y_e;
    rec.raw_event_time =
        draw_survival_time(y_e, scenario.control, dose.hr, rng);
  } else {
    rec.y_t = false;
    rec.y_e = rng.bernoulli(scenario.control.p_c);
    rec.raw_event_time = draw_survival_time(rec.y_e, scenario.control, 1.0, rng);
  }
  out.push_back(rec);
}

// Stage 1 and the interim decision are shared by the seamless trial and its
// conventional counterpart.
InterimDecision run_stage1(const DesignConfig& config,
                           const ScenarioSpec& scenario, Rng& rng,
                           Conduct& conduct) {
  const int n_doses = scenario.n_doses();
  const int arms = config.stage1_arms(n_doses);
  const int total = arms * config.n1;
  const auto times = enroll_times(total, config.accrual_rate, 0.0);
  conduct.control_arm = n_doses;
  conduct.patients.reserve(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) {
    const int arm = i % arms;  // round-robin allocation across open arms
    draw_patient(conduct.patients, arm, n_doses, 1,
                 times[static_cast<std::size_t>(i)], scenario, rng);
  }
  conduct.interim_time = times.back() + config.assess_time;

  std::vector<CellCounts> cells(static_cast<std::size_t>(n_doses));
  for (const auto& p : conduct.patients)
    if (p.arm < n_doses) cells[static_cast<std::size_t>(p.arm)].add(p.y_e, p.y_t);
  return select_optimal(cells, config.desirability, config.gates);
}

void run_stage2(const DesignConfig& config, const ScenarioSpec& scenario,
                int selected, Rng& rng, Conduct& conduct) {
  const int n_doses = scenario.n_doses();
  const int arms = config.stage2_arms();
  const int total = arms * config.n2;
  const auto times =
      enroll_times(total, config.accrual_rate, conduct.interim_time);
  for (int i = 0; i < total; ++i) {
    const int arm = (i % arms == 0) ? selected : conduct.control_arm;
    draw_patient(conduct.patients, arm, n_doses, 2,
                 times[static_cast<std::size_t>(i)], scenario, rng);
  }
  conduct.last_stage2_entry = times.back();
}

std::vector<PatientRecord> cohort(const Conduct& conduct, int arm, int stage) {
  std::vector<PatientRecord> out;
  for (const auto& p : conduct.patients)
    if (p.arm == arm && p.stage == stage) out.push_back(p);
  return out;
}

int responders_of(const Conduct& conduct, int arm, int stage) {
  int x = 0;
  for (const auto& p : conduct.patients)
    if (p.arm == arm && p.stage == stage && p.y_e) ++x;
  return x;
}

struct FinalInputs {
  std::vector<double> stage1_z;
  double stage2_p = 1.0;
  double final_time = 0.0;
};

FinalInputs final_analysis_inputs(const DesignConfig& config,
                                  const ScenarioSpec& scenario, int selected,
                                  const Conduct& conduct) {
  const int n_doses = scenario.n_doses();
  FinalInputs in;
  in.final_time = conduct.last_stage2_entry +
                  (config.survival_final() ? config.followup_min
                                           : config.assess_time);
  in.stage1_z.resize(static_cast<std::size_t>(n_doses));

  const double eps = config.p_clamp_epsilon;
  switch (config.design) {
    case Design::A: {
      if (config.stage1_endpoint == Stage1Endpoint::survival) {
        const auto ctl = censor_at(cohort(conduct, conduct.control_arm, 1),
                                   in.final_time);
        for (int j = 0; j < n_doses; ++j)
          in.stage1_z[static_cast<std::size_t>(j)] =
              logrank_two_sample(censor_at(cohort(conduct, j, 1), in.final_time),
                                 ctl)
                  .z;
      } else {
        const int x_ctl = responders_of(conduct, conduct.control_arm, 1);
        for (int j = 0; j < n_doses; ++j)
          in.stage1_z[static_cast<std::size_t>(j)] =
              prop_ztest(responders_of(conduct, j, 1), config.n1, x_ctl,
                         config.n1)
                  .z;
      }
      in.stage2_p =
          logrank_two_sample(censor_at(cohort(conduct, selected, 2), in.final_time),
                             censor_at(cohort(conduct, conduct.control_arm, 2),
                                       in.final_time))
              .p;
      break;
    }
    case Design::B: {
      if (config.stage1_endpoint == Stage1Endpoint::survival) {
        for (int j = 0; j < n_doses; ++j)
          in.stage1_z[static_cast<std::size_t>(j)] =
              logrank_one_sample(censor_at(cohort(conduct, j, 1), in.final_time),
                                 scenario.historical.hazard)
                  .z;
      } else {
        for (int j = 0; j < n_doses; ++j)
          in.stage1_z[static_cast<std::size_t>(j)] = z_from_pvalue(
              exact_binom_pvalue(responders_of(conduct, j, 1), config.n1,
                                 scenario.historical.p_c),
              eps);
      }
      in.stage2_p =
          logrank_two_sample(censor_at(cohort(conduct, selected, 2), in.final_time),
                             censor_at(cohort(conduct, conduct.control_arm, 2),
                                       in.final_time))
              .p;
      break;
    }
    case Design::C: {
      const int x_ctl1 = responders_of(conduct, conduct.control_arm, 1);
      for (int j = 0; j < n_doses; ++j)
        in.stage1_z[static_cast<std::size_t>(j)] =
            prop_ztest(responders_of(conduct, j, 1), config.n1, x_ctl1,
                       config.n1)
                .z;
      in.stage2_p = one_sided_prop_pvalue(
          responders_of(conduct, selected, 2), config.n2,
          responders_of(conduct, conduct.control_arm, 2), config.n2);
      break;
    }
    case Design::D: {
      for (int j = 0; j < n_doses; ++j)
        in.stage1_z[static_cast<std::size_t>(j)] = z_from_pvalue(
            exact_binom_pvalue(responders_of(conduct, j, 1), config.n1,
                               scenario.historical.p_c),
            eps);
      in.stage2_p = exact_binom_pvalue(responders_of(conduct, selected, 2),
                                       config.n2, scenario.historical.p_c);
      break;
    }
  }
  return in;
}

TrialResult run_impl(const DesignConfig& config, const ScenarioSpec& scenario,
                     Rng& rng, TrialLog* log, bool conventional) {
  check_consistent(config, scenario);

  Conduct conduct;
  TrialResult result;
  result.interim = run_stage1(config, scenario, rng, conduct);
  result.interim_time = conduct.interim_time;
  result.selected = result.interim.selected;

  if (!result.selected) {
    result.total_enrolled = static_cast<int>(conduct.patients.size());
    result.duration = conduct.interim_time;
    if (log) {
      log->patients = std::move(conduct.patients);
      log->interim_time = conduct.interim_time;
      log->final_time = conduct.interim_time;
      log->stage1_z.clear();
      log->stage2_p = 1.0;
    }
    return result;
  }

  run_stage2(config, scenario, *result.selected, rng, conduct);
  const FinalInputs in =
      final_analysis_inputs(config, scenario, *result.selected, conduct);

  if (conventional) {
    FinalVerdict verdict;
    verdict.rejected = in.stage2_p < config.alpha;
    result.verdict = std::move(verdict);
  } else {
    result.verdict = closed_test(*result.selected, scenario.n_doses(),
                                 in.stage1_z, in.stage2_p,
                                 config.intersection_method(),
                                 config.rho_dunnett, config.combination());
  }
  result.total_enrolled = static_cast<int>(conduct.patients.size());
  result.duration = in.final_time;
  if (log) {
    log->patients = std::move(conduct.patients);
    log->interim_time = conduct.interim_time;
    log->final_time = in.final_time;
    log->stage1_z = in.stage1_z;
    log->stage2_p = in.stage2_p;
  }
  return result;
}

}  // namespace

void check_consistent(const DesignConfig& config,
                      const ScenarioSpec& scenario) {
  const int n_doses = scenario.n_doses();
  if (n_doses < 2)
    throw std::invalid_argument("trial: scenario needs at least 2 doses");
  if (config.n1 < 1 || config.n2 < 1)
    throw std::invalid_argument("trial: stage sizes must be >= 1");
  if (!(config.alpha > 0.0 && config.alpha < 0.5))
    throw std::invalid_argument("trial: alpha must be in (0, 0.5)");
  if (!(config.accrual_rate > 0.0))
    throw std::invalid_argument("trial: accrual rate must be > 0");
  if (config.assess_time < 0.0 || config.followup_min < 0.0)
    throw std::invalid_argument("trial: timing parameters must be >= 0");
  if (!(config.rho_dunnett >= 0.0 && config.rho_dunnett < 1.0))
    throw std::invalid_argument("trial: rho must be in [0, 1)");
  for (const auto& d : scenario.doses) {
    if (!(d.p_e >= 0.0 && d.p_e <= 1.0 && d.p_t >= 0.0 && d.p_t <= 1.0))
      throw std::invalid_argument("trial: dose rates must be in [0, 1]");
    if (!(d.hr > 0.0))
      throw std::invalid_argument("trial: hazard ratios must be > 0");
  }
  if (!(scenario.control.p_c >= 0.0 && scenario.control.p_c <= 1.0))
    throw std::invalid_argument("trial: control rate must be in [0, 1]");
  if (!(scenario.control.lambda_resp > 0.0 &&
        scenario.control.lambda_nonresp > 0.0))
    throw std::invalid_argument("trial: control hazards must be > 0");
  const bool needs_benchmark =
      config.design == Design::B || config.design == Design::D;
  if (needs_benchmark) {
    if (!(scenario.historical.p_c > 0.0 && scenario.historical.p_c < 1.0))
      throw std::invalid_argument(
          "trial: benchmark response rate must be in (0, 1)");
    if (!(scenario.historical.hazard > 0.0))
      throw std::invalid_argument("trial: benchmark hazard must be > 0");
  }
  if (!(scenario.copula.rho > -1.0 && scenario.copula.rho < 1.0))
    throw std::invalid_argument("trial: copula correlation must be in (-1, 1)");
}

TrialResult run_trial(const DesignConfig& config, const ScenarioSpec& scenario,
                      Rng& rng, TrialLog* log) {
  return run_impl(config, scenario, rng, log, /*conventional=*/false);
}

TrialResult run_conventional(const DesignConfig& config,
                             const ScenarioSpec& scenario, Rng& rng,
                             TrialLog* log) {
  return run_impl(config, scenario, rng, log, /*conventional=*/true);
}

}  // namespace p23
