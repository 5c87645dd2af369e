#include "p23/outcomes.hpp"

#include <cmath>
#include <stdexcept>

namespace p23 {

namespace {

// Threshold indicator I{z <= Phi^-1(p)} with the degenerate ends handled
// without evaluating the quantile.
bool below_threshold(double z, double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return z <= std_normal_quantile(p);
}

}  // namespace

std::pair<bool, bool> draw_dose_outcome(const DoseTruth& dose,
                                        const CopulaSpec& copula, Rng& rng) {
  const double rho = copula.rho;
  const double z_t = rng.normal();
  const double z_e = rho * z_t + std::sqrt(1.0 - rho * rho) * rng.normal();
  return {below_threshold(z_t, dose.p_t), below_threshold(z_e, dose.p_e)};
}

double draw_survival_time(bool responder, const ControlTruth& control,
                          double hazard_ratio, Rng& rng) {
  const double base = responder ? control.lambda_resp : control.lambda_nonresp;
  const double rate = base * hazard_ratio;
  if (!(rate > 0.0))
    throw std::domain_error("draw_survival_time: hazard must be > 0");
  return rng.exponential(rate);
}

std::vector<double> enroll_times(int n, double accrual_rate, double start) {
  if (n < 1) throw std::domain_error("enroll_times: n must be >= 1");
  if (!(accrual_rate > 0.0))
    throw std::domain_error("enroll_times: accrual rate must be > 0");
  std::vector<double> times(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    times[static_cast<std::size_t>(k)] = start + (k + 1) / accrual_rate;
  return times;
}

SurvivalSample censor_at(std::span<const PatientRecord> records,
                         double analysis_time) {
  SurvivalSample out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const double followup = analysis_time - r.enroll_time;
    if (followup <= 0.0) continue;
    const bool event = r.raw_event_time <= followup;
    out.push_back({event ? r.raw_event_time : followup, event});
  }
  return out;
}

}  // namespace p23
