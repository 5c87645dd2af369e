#include "p23/oc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <stdexcept>
#include <thread>

namespace p23 {

namespace {

double proportion_se(double p, long reps) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
}

std::string format_double(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string opt_field(const std::optional<double>& v) {
  return v ? format_double(*v, "%.6f") : std::string{};
}

}  // namespace

bool dose_is_null(const DesignConfig& config, const ScenarioSpec& scenario,
                  int dose) {
  const DoseTruth& d = scenario.doses[static_cast<std::size_t>(dose)];
  if (config.survival_final()) return d.hr >= 1.0;
  return d.p_e <= scenario.control.p_c;
}

OperatingCharacteristics run_oc(const DesignConfig& config,
                                const ScenarioSpec& scenario, long reps,
                                std::uint64_t seed, const OcOptions& opts) {
  if (reps < 1) throw std::invalid_argument("run_oc: reps must be >= 1");
  check_consistent(config, scenario);

  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(reps));
  auto worker = [&](std::atomic<long>& next) {
    constexpr long kGrain = 64;
    for (;;) {
      const long begin = next.fetch_add(kGrain);
      if (begin >= reps) return;
      const long end = std::min(begin + kGrain, reps);
      for (long r = begin; r < end; ++r) {
        Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(r));
        const TrialResult res = opts.conventional
                                    ? run_conventional(config, scenario, rng)
                                    : run_trial(config, scenario, rng);
        RepOutcome& out = outcomes[static_cast<std::size_t>(r)];
        out.selected = res.selected.value_or(-1);
        out.early_stop = res.stopped_early();
        out.rejected = res.rejected();
        out.false_discovery =
            out.rejected && dose_is_null(config, scenario, *res.selected);
        out.correct_selection = scenario.optimal_dose && res.selected &&
                                *res.selected == *scenario.optimal_dose;
        out.enrolled = res.total_enrolled;
        out.duration = res.duration;
      }
    }
  };

  const int n_threads = std::max(1, opts.threads);
  if (n_threads == 1 || reps == 1) {
    std::atomic<long> next{0};
    worker(next);
  } else {
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back([&] { worker(next); });
    for (auto& th : pool) th.join();
  }

  // Sequential reduction in replication order.
  long n_false = 0, n_correct = 0, n_gen = 0;
  double sum_n = 0.0, sum_dur = 0.0;
  for (const auto& out : outcomes) {
    n_false += out.false_discovery ? 1 : 0;
    n_correct += out.correct_selection ? 1 : 0;
    n_gen += (out.correct_selection && out.rejected) ? 1 : 0;
    sum_n += out.enrolled;
    sum_dur += out.duration;
  }

  OperatingCharacteristics oc;
  oc.reps = reps;
  oc.fwer = static_cast<double>(n_false) / static_cast<double>(reps);
  oc.fwer_se = proportion_se(oc.fwer, reps);
  if (scenario.optimal_dose) {
    oc.pcs = static_cast<double>(n_correct) / static_cast<double>(reps);
    oc.pcs_se = proportion_se(*oc.pcs, reps);
    oc.gen_power = static_cast<double>(n_gen) / static_cast<double>(reps);
    oc.gen_power_se = proportion_se(*oc.gen_power, reps);
  }
  oc.avg_sample_size = sum_n / static_cast<double>(reps);
  oc.avg_duration = sum_dur / static_cast<double>(reps);

  if (opts.trace) *opts.trace = std::move(outcomes);
  return oc;
}

CalibrationResult calibrate_n(const DesignConfig& config,
                              const ScenarioSpec& scenario,
                              double target_power, std::span<const int> n1_grid,
                              std::span<const int> n2_grid, long reps,
                              std::uint64_t seed, const OcOptions& opts) {
  if (n1_grid.empty() || n2_grid.empty())
    throw std::invalid_argument("calibrate_n: grids must be non-empty");
  if (!scenario.optimal_dose)
    throw std::invalid_argument(
        "calibrate_n: scenario has no optimal dose, generalized power is "
        "undefined");

  CalibrationResult result;
  for (int n1 : n1_grid) {
    for (int n2 : n2_grid) {
      DesignConfig point = config;
      point.n1 = n1;
      point.n2 = n2;
      OcOptions point_opts = opts;
      point_opts.trace = nullptr;
      const auto oc = run_oc(point, scenario, reps, seed, point_opts);
      result.evaluated.push_back(
          {n1, n2, point.full_enrollment(scenario.n_doses()), *oc.gen_power});
    }
  }

  auto better_reached = [](const CalibrationPoint& a,
                           const CalibrationPoint& b) {
    if (a.total != b.total) return a.total < b.total;
    if (a.n2 != b.n2) return a.n2 < b.n2;
    return a.n1 < b.n1;
  };
  const CalibrationPoint* best_reached = nullptr;
  const CalibrationPoint* best_power = nullptr;
  for (const auto& pt : result.evaluated) {
    if (pt.gen_power >= target_power &&
        (!best_reached || better_reached(pt, *best_reached)))
      best_reached = &pt;
    if (!best_power || pt.gen_power > best_power->gen_power ||
        (pt.gen_power == best_power->gen_power &&
         better_reached(pt, *best_power)))
      best_power = &pt;
  }
  result.reachable = best_reached != nullptr;
  result.chosen = result.reachable ? *best_reached : *best_power;
  return result;
}

std::vector<SweepRow> allocation_sweep(const DesignConfig& config,
                                       const ScenarioSpec& scenario, long total,
                                       std::span<const int> n1_values,
                                       long reps, std::uint64_t seed,
                                       const OcOptions& opts) {
  std::vector<int> ordered(n1_values.begin(), n1_values.end());
  std::sort(ordered.begin(), ordered.end());

  const long arms1 = config.stage1_arms(scenario.n_doses());
  const long arms2 = config.stage2_arms();
  std::vector<SweepRow> rows;
  for (int n1 : ordered) {
    const long remainder = total - arms1 * n1;
    if (remainder < arms2 || remainder % arms2 != 0) {
      std::cerr << "sweep: skipping infeasible n1=" << n1 << " (total "
                << total << " leaves no whole stage-2 arm size)\n";
      continue;
    }
    DesignConfig point = config;
    point.n1 = n1;
    point.n2 = static_cast<int>(remainder / arms2);
    OcOptions point_opts = opts;
    point_opts.trace = nullptr;
    const auto oc = run_oc(point, scenario, reps, seed, point_opts);
    rows.push_back({point.n1, point.n2, oc.pcs, oc.pcs_se, oc.gen_power,
                    oc.gen_power_se});
  }
  return rows;
}

ComparisonReport compare_with_conventional(const DesignConfig& config,
                                           const ScenarioSpec& scenario,
                                           const DesignConfig& cc_config,
                                           const ScenarioSpec& cc_scenario,
                                           long reps, std::uint64_t seed,
                                           const OcOptions& opts) {
  ComparisonReport report;
  OcOptions seamless_opts = opts;
  seamless_opts.conventional = false;
  report.seamless = run_oc(config, scenario, reps, seed, seamless_opts);
  OcOptions cc_opts = opts;
  cc_opts.conventional = true;
  cc_opts.trace = nullptr;
  report.conventional = run_oc(cc_config, cc_scenario, reps, seed, cc_opts);
  report.savings =
      1.0 - report.seamless.avg_sample_size / report.conventional.avg_sample_size;
  return report;
}

std::string design_name(Design design) {
  switch (design) {
    case Design::A: return "A";
    case Design::B: return "B";
    case Design::C: return "C";
    case Design::D: return "D";
  }
  return "?";
}

std::string oc_csv_header() {
  return "design,scenario,reps,seed,fwer,fwer_se,pcs,pcs_se,gen_power,"
         "gen_power_se,avg_n,avg_duration";
}

std::string oc_csv_row(const DesignConfig& config, const std::string& scenario,
                       long reps, std::uint64_t seed,
                       const OperatingCharacteristics& oc) {
  std::string row = design_name(config.design);
  row += ',';
  row += scenario;
  row += ',';
  row += std::to_string(reps);
  row += ',';
  row += std::to_string(seed);
  row += ',';
  row += format_double(oc.fwer, "%.6f");
  row += ',';
  row += format_double(oc.fwer_se, "%.6f");
  row += ',';
  row += opt_field(oc.pcs);
  row += ',';
  row += opt_field(oc.pcs_se);
  row += ',';
  row += opt_field(oc.gen_power);
  row += ',';
  row += opt_field(oc.gen_power_se);
  row += ',';
  row += format_double(oc.avg_sample_size, "%.4f");
  row += ',';
  row += format_double(oc.avg_duration, "%.4f");
  return row;
}

std::string trace_csv_header() {
  return "rep,selected_dose,early_stop,rejected,false_discovery,n_enrolled,"
         "duration_months";
}

std::string trace_csv_row(long rep, const RepOutcome& out) {
  std::string row = std::to_string(rep);
  row += ',';
  row += std::to_string(out.selected + 1);  // 1-based, 0 = early stop
  row += ',';
  row += out.early_stop ? '1' : '0';
  row += ',';
  row += out.rejected ? '1' : '0';
  row += ',';
  row += out.false_discovery ? '1' : '0';
  row += ',';
  row += std::to_string(out.enrolled);
  row += ',';
  row += format_double(out.duration, "%.4f");
  return row;
}

}  // namespace p23
