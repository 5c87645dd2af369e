// p23sim: command-line front end for the seamless phase 2-3 dose-optimization
// trial simulator. Subcommands: simulate, calibrate, sweep, compare.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "p23/config.hpp"
#include "p23/oc.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitUnreachable = 3;

struct CommonArgs {
  std::string config_path;
  long reps = 10000;
  std::uint64_t seed = 1;
  int threads = 1;
  bool conventional = false;
};

void add_common(CLI::App* cmd, CommonArgs& args,
                bool allow_conventional = false) {
  cmd->add_option("--config", args.config_path, "design + scenario JSON file")
      ->required();
  cmd->add_option("--reps", args.reps, "number of replications")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", args.seed, "random seed");
  cmd->add_option("--threads", args.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  if (allow_conventional)
    cmd->add_flag("--conventional", args.conventional,
                  "run the conventional counterpart (stage-2-only inference)");
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw p23::ConfigError("cannot open output file: " + path);
  out << contents;
}

std::string summary_line(const p23::OperatingCharacteristics& oc) {
  char buf[256];
  std::string line;
  std::snprintf(buf, sizeof(buf), "fwer=%.4f", oc.fwer);
  line += buf;
  if (oc.pcs) {
    std::snprintf(buf, sizeof(buf), "  pcs=%.4f  gen_power=%.4f", *oc.pcs,
                  *oc.gen_power);
    line += buf;
  }
  std::snprintf(buf, sizeof(buf), "  avg_n=%.1f  avg_duration=%.1f",
                oc.avg_sample_size, oc.avg_duration);
  line += buf;
  return line;
}

int cmd_simulate(const CommonArgs& args, const std::string& out_path,
                 const std::string& trace_path) {
  const auto loaded = p23::load_config(args.config_path);
  std::vector<p23::RepOutcome> trace;
  p23::OcOptions opts;
  opts.threads = args.threads;
  opts.conventional = args.conventional;
  if (!trace_path.empty()) opts.trace = &trace;

  const auto oc =
      p23::run_oc(loaded.design, loaded.scenario, args.reps, args.seed, opts);

  std::string csv = p23::oc_csv_header();
  csv += '\n';
  csv += p23::oc_csv_row(loaded.design, loaded.name, args.reps, args.seed, oc);
  csv += '\n';
  write_file(out_path, csv);

  if (!trace_path.empty()) {
    std::string tcsv = p23::trace_csv_header();
    tcsv += '\n';
    for (std::size_t r = 0; r < trace.size(); ++r) {
      tcsv += p23::trace_csv_row(static_cast<long>(r), trace[r]);
      tcsv += '\n';
    }
    write_file(trace_path, tcsv);
  }

  std::cout << loaded.name << ": " << summary_line(oc) << "\n";
  return 0;
}

int cmd_calibrate(const CommonArgs& args, const std::string& grid_path,
                  double target) {
  const auto loaded = p23::load_config(args.config_path);
  const auto grid = p23::load_grid(grid_path);
  p23::OcOptions opts;
  opts.threads = args.threads;
  opts.conventional = args.conventional;

  const auto result =
      p23::calibrate_n(loaded.design, loaded.scenario, target, grid.n1,
                       grid.n2, args.reps, args.seed, opts);
  for (const auto& pt : result.evaluated)
    std::printf("n1=%d n2=%d total=%ld gen_power=%.4f\n", pt.n1, pt.n2,
                pt.total, pt.gen_power);
  if (!result.reachable) {
    std::printf("unreachable: best point n1=%d n2=%d gen_power=%.4f\n",
                result.chosen.n1, result.chosen.n2, result.chosen.gen_power);
    return kExitUnreachable;
  }
  std::printf("chosen: n1=%d n2=%d total=%ld gen_power=%.4f\n",
              result.chosen.n1, result.chosen.n2, result.chosen.total,
              result.chosen.gen_power);
  return 0;
}

int cmd_sweep(const CommonArgs& args, long total,
              const std::vector<int>& n1_values, const std::string& out_path) {
  const auto loaded = p23::load_config(args.config_path);
  p23::OcOptions opts;
  opts.threads = args.threads;

  const auto rows = p23::allocation_sweep(loaded.design, loaded.scenario,
                                          total, n1_values, args.reps,
                                          args.seed, opts);
  std::string csv =
      "design,scenario,reps,seed,n1,n2,pcs,pcs_se,gen_power,gen_power_se\n";
  char buf[64];
  for (const auto& row : rows) {
    csv += p23::design_name(loaded.design.design);
    csv += ',';
    csv += loaded.name;
    csv += ',';
    csv += std::to_string(args.reps);
    csv += ',';
    csv += std::to_string(args.seed);
    csv += ',';
    csv += std::to_string(row.n1);
    csv += ',';
    csv += std::to_string(row.n2);
    for (const auto& v : {row.pcs, row.pcs_se, row.gen_power, row.gen_power_se}) {
      csv += ',';
      if (v) {
        std::snprintf(buf, sizeof(buf), "%.6f", *v);
        csv += buf;
      }
    }
    csv += '\n';
  }
  write_file(out_path, csv);
  std::cout << "sweep: " << rows.size() << " rows written to " << out_path
            << "\n";
  return 0;
}

int cmd_compare(const CommonArgs& args, const std::string& cc_path) {
  const auto loaded = p23::load_config(args.config_path);
  const auto cc = p23::load_config(cc_path);
  p23::OcOptions opts;
  opts.threads = args.threads;

  const auto report = p23::compare_with_conventional(
      loaded.design, loaded.scenario, cc.design, cc.scenario, args.reps,
      args.seed, opts);
  std::cout << "seamless     (" << loaded.name
            << "): " << summary_line(report.seamless) << "\n";
  std::cout << "conventional (" << cc.name
            << "): " << summary_line(report.conventional) << "\n";
  std::printf("sample_size_savings=%.4f\n", report.savings);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seamless phase 2-3 dose-optimization trial simulator"};
  app.require_subcommand(1);

  CommonArgs sim_args;
  std::string sim_out, sim_trace;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "estimate operating characteristics for one configuration");
  add_common(simulate, sim_args, /*allow_conventional=*/true);
  simulate->add_option("--out", sim_out, "output CSV path")->required();
  simulate->add_option("--trace", sim_trace,
                       "optional per-replication trace CSV");

  CommonArgs cal_args;
  std::string cal_grid;
  double cal_target = 0.8;
  CLI::App* calibrate = app.add_subcommand(
      "calibrate", "pick the smallest (n1, n2) reaching a power target");
  add_common(calibrate, cal_args, /*allow_conventional=*/true);
  calibrate->add_option("--grid", cal_grid, "grid JSON file")->required();
  calibrate->add_option("--target", cal_target, "generalized power target")
      ->required();

  CommonArgs sweep_args;
  long sweep_total = 0;
  std::vector<int> sweep_n1;
  std::string sweep_out;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "vary n1 at fixed total enrollment and report power");
  add_common(sweep, sweep_args);
  sweep->add_option("--total", sweep_total, "fixed total enrollment")
      ->required()
      ->check(CLI::PositiveNumber);
  sweep->add_option("--n1", sweep_n1, "comma-separated n1 values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--out", sweep_out, "output CSV path")->required();

  CommonArgs cmp_args;
  std::string cmp_cc;
  CLI::App* compare = app.add_subcommand(
      "compare", "seamless design vs its conventional counterpart");
  add_common(compare, cmp_args);
  compare->add_option("--cc-config", cmp_cc,
                      "conventional counterpart JSON file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim_args, sim_out, sim_trace);
    if (calibrate->parsed()) return cmd_calibrate(cal_args, cal_grid, cal_target);
    if (sweep->parsed())
      return cmd_sweep(sweep_args, sweep_total, sweep_n1, sweep_out);
    if (compare->parsed()) return cmd_compare(cmp_args, cmp_cc);
  } catch (const p23::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
