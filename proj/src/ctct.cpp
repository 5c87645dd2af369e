#include "p23/ctct.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace p23 {

std::vector<std::vector<int>> intersections_containing(int selected, int J) {
  if (J < 1 || selected < 0 || selected >= J)
    throw std::domain_error("intersections_containing: selected out of range");
  std::vector<std::vector<int>> subsets;
  subsets.reserve(1u << (J - 1));
  for (unsigned mask = 1; mask < (1u << J); ++mask) {
    if (!(mask & (1u << selected))) continue;
    std::vector<int> subset;
    for (int j = 0; j < J; ++j)
      if (mask & (1u << j)) subset.push_back(j);
    subsets.push_back(std::move(subset));
  }
  return subsets;
}

double stage1_intersection_pvalue(const std::vector<int>& subset,
                                  const std::vector<double>& per_dose_z,
                                  IntersectionMethod method, double rho) {
  if (subset.empty())
    throw std::domain_error("stage1_intersection_pvalue: empty subset");
  for (int j : subset)
    if (j < 0 || j >= static_cast<int>(per_dose_z.size()))
      throw std::domain_error(
          "stage1_intersection_pvalue: missing z statistic");

  const int m = static_cast<int>(subset.size());
  if (method == IntersectionMethod::dunnett) {
    double z_max = per_dose_z[static_cast<std::size_t>(subset[0])];
    for (int j : subset)
      z_max = std::max(z_max, per_dose_z[static_cast<std::size_t>(j)]);
    return dunnett_maxz_pvalue(z_max, m, rho);
  }
  double p_min = 1.0;
  for (int j : subset)
    p_min = std::min(
        p_min, 1.0 - std_normal_cdf(per_dose_z[static_cast<std::size_t>(j)]));
  return sidak_min_p(p_min, m);
}

double combine(double p1, double p2, const CombinationSpec& spec) {
  if (spec.n1 < 1 || spec.n2 < 1)
    throw std::domain_error("combine: stage sizes must be >= 1");
  const double eps = spec.p_clamp_epsilon;
  const double q1 = std::clamp(p1, eps, 1.0 - eps);
  const double q2 = std::clamp(p2, eps, 1.0 - eps);
  const double total = spec.n1 + spec.n2;
  const double w1 = std::sqrt(spec.n1 / total);
  const double w2 = std::sqrt(spec.n2 / total);
  return w1 * std_normal_quantile(1.0 - q1) +
         w2 * std_normal_quantile(1.0 - q2);
}

FinalVerdict closed_test(int selected, int J,
                         const std::vector<double>& per_dose_stage1_z,
                         double stage2_p, IntersectionMethod method,
                         double rho, const CombinationSpec& spec) {
  if (static_cast<int>(per_dose_stage1_z.size()) != J)
    throw std::domain_error("closed_test: need one stage-1 z per dose");
  const double critical = std_normal_quantile(1.0 - spec.alpha);

  FinalVerdict verdict;
  verdict.rejected = true;
  for (auto& subset : intersections_containing(selected, J)) {
    IntersectionResult res;
    res.p1 = stage1_intersection_pvalue(subset, per_dose_stage1_z, method, rho);
    res.p2 = stage2_p;
    res.z = combine(res.p1, res.p2, spec);
    res.rejected = res.z > critical;
    res.subset = std::move(subset);
    verdict.rejected = verdict.rejected && res.rejected;
    verdict.intersections.push_back(std::move(res));
  }
  return verdict;
}

}  // namespace p23
