#pragma once

#include <vector>

#include "p23/stats.hpp"

// Final inference after interim selection: stage-wise p-values are combined
// with the weighted inverse-normal transform and the selected dose's
// hypothesis is rejected only if every intersection hypothesis containing it
// is rejected (closed testing).

namespace p23 {

/// Weights and level for the inverse-normal combination. The stage weights
/// are sqrt(n1/(n1+n2)) and sqrt(n2/(n1+n2)); p-values are clamped to
/// [epsilon, 1-epsilon] before the quantile transform.
struct CombinationSpec {
  int n1 = 1;
  int n2 = 1;
  double alpha = 0.05;
  double p_clamp_epsilon = 1e-10;
};

/// How intersection p-values are formed from the per-dose stage-1 statistics:
/// `dunnett` for arms sharing a concurrent control (equicorrelated max-z),
/// `sidak` for independent single-arm tests against a benchmark.
enum class IntersectionMethod { dunnett, sidak };

/// One intersection hypothesis over `subset` (0-based dose indices).
struct IntersectionResult {
  std::vector<int> subset;
  double p1 = 1.0;
  double p2 = 1.0;
  double z = 0.0;
  bool rejected = false;
};

struct FinalVerdict {
  bool rejected = false;
  std::vector<IntersectionResult> intersections;
};

/// All subsets of {0..J-1} that contain `selected`, ordered by bitmask value
/// (singleton first, full set last).
std::vector<std::vector<int>> intersections_containing(int selected, int J);

/// Stage-1 p-value of the intersection hypothesis over `subset`.
double stage1_intersection_pvalue(const std::vector<int>& subset,
                                  const std::vector<double>& per_dose_z,
                                  IntersectionMethod method, double rho);

/// Weighted inverse-normal combination
///   z = w1 * Phi^-1(1 - p1) + w2 * Phi^-1(1 - p2).
double combine(double p1, double p2, const CombinationSpec& spec);

/// Runs the combination test over every intersection containing the selected
/// dose. The stage-2 p-value is shared by all intersections; the elementary
/// hypothesis is rejected iff every combined z exceeds Phi^-1(1 - alpha).
FinalVerdict closed_test(int selected, int J,
                         const std::vector<double>& per_dose_stage1_z,
                         double stage2_p, IntersectionMethod method,
                         double rho, const CombinationSpec& spec);

}  // namespace p23
