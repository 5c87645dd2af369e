#include "p23/oc.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "p23/config.hpp"

using namespace p23;

namespace {

const char* kNullConfig = R"({
  "design": "D",
  "doses": [
    {"p_e": 0.2, "p_t": 0.1, "hr": 1.0},
    {"p_e": 0.2, "p_t": 0.1, "hr": 1.0}
  ],
  "control": {"p_c": 0.2, "lambda_resp": 0.26, "lambda_nonresp": 0.26},
  "historical": {"p_c": 0.2, "hazard": 0.26},
  "n1": 20, "n2": 12
})";

const char* kAltConfig = R"({
  "design": "C",
  "doses": [
    {"p_e": 0.27, "p_t": 0.05, "hr": 1.0},
    {"p_e": 0.4, "p_t": 0.1, "hr": 0.64}
  ],
  "control": {"p_c": 0.2, "lambda_resp": 0.26, "lambda_nonresp": 0.26},
  "n1": 25, "n2": 30
})";

bool same_oc(const OperatingCharacteristics& a,
             const OperatingCharacteristics& b) {
  return a.reps == b.reps && a.fwer == b.fwer && a.fwer_se == b.fwer_se &&
         a.pcs == b.pcs && a.gen_power == b.gen_power &&
         a.avg_sample_size == b.avg_sample_size &&
         a.avg_duration == b.avg_duration;
}

}  // namespace

TEST_CASE("run_oc is deterministic and thread-count invariant") {
  const auto loaded = parse_config(kAltConfig, "alt");
  OcOptions one;
  one.threads = 1;
  OcOptions four;
  four.threads = 4;
  OcOptions sixteen;
  sixteen.threads = 16;
  const auto a = run_oc(loaded.design, loaded.scenario, 600, 9, one);
  const auto b = run_oc(loaded.design, loaded.scenario, 600, 9, four);
  const auto c = run_oc(loaded.design, loaded.scenario, 600, 9, one);
  const auto d = run_oc(loaded.design, loaded.scenario, 600, 9, sixteen);
  CHECK(same_oc(a, b));
  CHECK(same_oc(a, c));
  CHECK(same_oc(a, d));
  CHECK(oc_csv_row(loaded.design, loaded.name, 600, 9, a) ==
        oc_csv_row(loaded.design, loaded.name, 600, 9, b));
}

TEST_CASE("run_oc with a single replication yields 0/1 proportions") {
  const auto loaded = parse_config(kAltConfig, "alt");
  const auto oc = run_oc(loaded.design, loaded.scenario, 1, 3);
  CHECK((oc.fwer == 0.0 || oc.fwer == 1.0));
  REQUIRE(oc.pcs.has_value());
  CHECK((*oc.pcs == 0.0 || *oc.pcs == 1.0));
  CHECK((*oc.gen_power == 0.0 || *oc.gen_power == 1.0));
}

TEST_CASE("generalized power never exceeds the selection rate") {
  const auto loaded = parse_config(kAltConfig, "alt");
  const auto oc = run_oc(loaded.design, loaded.scenario, 800, 17);
  REQUIRE(oc.pcs.has_value());
  CHECK(*oc.gen_power <= *oc.pcs);
}

TEST_CASE("null scenarios report no selection metrics") {
  const auto loaded = parse_config(kNullConfig, "null");
  CHECK_FALSE(loaded.scenario.optimal_dose.has_value());
  const auto oc = run_oc(loaded.design, loaded.scenario, 200, 5);
  CHECK_FALSE(oc.pcs.has_value());
  CHECK_FALSE(oc.gen_power.has_value());
  // absent metrics leave their CSV fields empty
  const auto row = oc_csv_row(loaded.design, loaded.name, 200, 5, oc);
  CHECK(row.find(",,,,") != std::string::npos);
}

TEST_CASE("trace rows cover every replication in order") {
  const auto loaded = parse_config(kNullConfig, "null");
  std::vector<RepOutcome> trace;
  OcOptions opts;
  opts.threads = 3;
  opts.trace = &trace;
  const auto oc = run_oc(loaded.design, loaded.scenario, 250, 5, opts);
  REQUIRE(trace.size() == 250);
  double total = 0.0;
  for (const auto& t : trace) total += t.enrolled;
  CHECK(total / 250.0 == doctest::Approx(oc.avg_sample_size));
  CHECK(trace_csv_row(3, trace[3]).rfind("3,", 0) == 0);
}

TEST_CASE("calibrate_n picks the cheapest point reaching the target") {
  const auto loaded = parse_config(kAltConfig, "alt");
  const std::vector<int> n1_grid{20, 30};
  const std::vector<int> n2_grid{20, 40};

  // target 0: every point qualifies, smallest total wins
  const auto zero = calibrate_n(loaded.design, loaded.scenario, 0.0, n1_grid,
                                n2_grid, 50, 3);
  CHECK(zero.reachable);
  CHECK(zero.chosen.n1 == 20);
  CHECK(zero.chosen.n2 == 20);
  CHECK(zero.evaluated.size() == 4);

  // impossible target: unreachable, best point attached
  const auto impossible = calibrate_n(loaded.design, loaded.scenario, 1.01,
                                      n1_grid, n2_grid, 50, 3);
  CHECK_FALSE(impossible.reachable);
  CHECK(impossible.chosen.gen_power > 0.0);
}

TEST_CASE("calibrate_n requires an optimal dose") {
  const auto loaded = parse_config(kNullConfig, "null");
  const std::vector<int> grid{10};
  CHECK_THROWS_AS((void)calibrate_n(loaded.design, loaded.scenario, 0.5, grid,
                                    grid, 20, 1),
                  std::invalid_argument);
}

TEST_CASE("allocation_sweep") {
  const auto loaded = parse_config(kAltConfig, "alt");
  // design C, 2 doses: stage 1 uses 3 arms, stage 2 uses 2
  const std::vector<int> n1_single{20};
  const auto single = allocation_sweep(loaded.design, loaded.scenario, 120,
                                       n1_single, 100, 7);
  REQUIRE(single.size() == 1);
  CHECK(single[0].n1 == 20);
  CHECK(single[0].n2 == 30);

  const std::vector<int> n1_values{10, 20, 30, 50};
  const auto rows = allocation_sweep(loaded.design, loaded.scenario, 120,
                                     n1_values, 100, 7);
  // n1 = 50 needs 150 stage-1 patients alone: omitted
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(3L * rows[i].n1 + 2L * rows[i].n2 == 120);
    if (i > 0) CHECK(rows[i].n1 > rows[i - 1].n1);
  }

  const auto again = allocation_sweep(loaded.design, loaded.scenario, 120,
                                      n1_values, 100, 7);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].gen_power == again[i].gen_power);
    CHECK(rows[i].pcs == again[i].pcs);
  }
}

TEST_CASE("comparing a design against itself yields zero savings") {
  const auto loaded = parse_config(kAltConfig, "alt");
  const auto report =
      compare_with_conventional(loaded.design, loaded.scenario, loaded.design,
                                loaded.scenario, 400, 21);
  CHECK(report.savings == doctest::Approx(0.0));
  CHECK(report.seamless.avg_sample_size ==
        doctest::Approx(report.conventional.avg_sample_size));
}

TEST_CASE("savings are signed when the counterpart is smaller") {
  const auto loaded = parse_config(kAltConfig, "alt");
  DesignConfig smaller = loaded.design;
  smaller.n2 = loaded.design.n2 / 2;
  const auto report = compare_with_conventional(
      loaded.design, loaded.scenario, smaller, loaded.scenario, 400, 21);
  CHECK(report.savings < 0.0);
}

TEST_CASE("monte carlo spread shrinks like sqrt(reps)") {
  const auto loaded = parse_config(kNullConfig, "null");
  const int n_seeds = 50;
  std::vector<double> small, large;
  for (int s = 0; s < n_seeds; ++s) {
    small.push_back(
        run_oc(loaded.design, loaded.scenario, 400, 1000 + s).fwer);
    large.push_back(
        run_oc(loaded.design, loaded.scenario, 800, 2000 + s).fwer);
  }
  auto sd = [](const std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (v.size() - 1));
  };
  const double ratio = sd(small) / sd(large);
  // expected sqrt(2) ~ 1.41; wide band covers the sampling noise of the sds
  CHECK(ratio > 0.9);
  CHECK(ratio < 2.2);
}

TEST_CASE("csv header is stable") {
  CHECK(oc_csv_header() ==
        "design,scenario,reps,seed,fwer,fwer_se,pcs,pcs_se,gen_power,"
        "gen_power_se,avg_n,avg_duration");
  CHECK(trace_csv_header() ==
        "rep,selected_dose,early_stop,rejected,false_discovery,n_enrolled,"
        "duration_months");
}

TEST_CASE("config rejects unknown keys and bad combinations") {
  CHECK_THROWS_AS((void)parse_config(R"({"design": "C"})", "x"), ConfigError);
  CHECK_THROWS_AS(
      (void)parse_config(
          R"({"design": "C", "doses": [], "control": {}, "n1": 1, "n2": 1})",
          "x"),
      ConfigError);
  // unknown top-level key
  std::string bad = kNullConfig;
  bad.insert(bad.size() - 2, R"(, "typo_key": 1)");
  CHECK_THROWS_AS((void)parse_config(bad, "x"), ConfigError);
  // designs B and D require the benchmark
  CHECK_THROWS_AS(
      (void)parse_config(R"({
        "design": "D",
        "doses": [
          {"p_e": 0.2, "p_t": 0.1, "hr": 1.0},
          {"p_e": 0.2, "p_t": 0.1, "hr": 1.0}
        ],
        "control": {"p_c": 0.2, "lambda_resp": 0.26, "lambda_nonresp": 0.26},
        "n1": 10, "n2": 10
      })",
                          "x"),
      ConfigError);
  // stage1_endpoint is only meaningful for the survival designs
  std::string flagged = kNullConfig;
  flagged.insert(flagged.size() - 2, R"(, "stage1_endpoint": "orr")");
  CHECK_THROWS_AS((void)parse_config(flagged, "x"), ConfigError);
}

TEST_CASE("config derives the optimal dose from the ground truth") {
  const auto alt = parse_config(kAltConfig, "alt");
  REQUIRE(alt.scenario.optimal_dose.has_value());
  CHECK(*alt.scenario.optimal_dose == 1);

  const auto null = parse_config(kNullConfig, "null");
  CHECK_FALSE(null.scenario.optimal_dose.has_value());

  // a toxic dose is never optimal even with the best efficacy
  const auto toxic = parse_config(R"({
    "design": "C",
    "doses": [
      {"p_e": 0.4, "p_t": 0.1, "hr": 0.64},
      {"p_e": 0.5, "p_t": 0.5, "hr": 0.6}
    ],
    "control": {"p_c": 0.2, "lambda_resp": 0.26, "lambda_nonresp": 0.26},
    "n1": 10, "n2": 10
  })",
                                  "x");
  REQUIRE(toxic.scenario.optimal_dose.has_value());
  CHECK(*toxic.scenario.optimal_dose == 0);
}
