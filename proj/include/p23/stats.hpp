#pragma once

#include <utility>
#include <vector>

// Scalar statistical kernels used across the trial engine: normal
// distribution functions, Beta posterior tails, proportion and survival
// tests, and multiplicity-adjusted max-z probabilities.

namespace p23 {

/// Beta prior for binomial monitoring probabilities. Both parameters > 0.
struct BetaPrior {
  double a = 1.0;
  double b = 1.0;
};

/// One censored observation: follow-up time in months (> 0) and whether the
/// event was observed.
struct SurvivalObs {
  double time = 0.0;
  bool event = false;
};

using SurvivalSample = std::vector<SurvivalObs>;

/// Signed test statistic and its one-sided p-value (large z -> small p).
struct TestResult {
  double z = 0.0;
  double p = 0.5;
};

/// Standard normal CDF. Accurate to ~1e-15 absolute.
double std_normal_cdf(double z);

/// Standard normal density.
double std_normal_pdf(double z);

/// Standard normal quantile (inverse CDF). Requires 0 < p < 1, throws
/// std::domain_error otherwise. Wichura's AS241 double-precision algorithm.
double std_normal_quantile(double p);

/// Regularized incomplete beta function I_x(a, b) for a, b > 0.
double regularized_incomplete_beta(double x, double a, double b);

/// P(z_1 <= a, z_2 <= b) for standard bivariate normal with correlation rho.
double bivariate_normal_cdf(double a, double b, double rho);

/// Posterior probability Pr(p < threshold | successes of n) under a Beta
/// prior, i.e. I_threshold(a + successes, b + n - successes).
double beta_tail_below(const BetaPrior& prior, int successes, int n,
                       double threshold);

/// One-sided two-sample z-test for proportions (pooled variance), testing
/// that the treatment rate exceeds the control rate. Degenerate pooled
/// variance yields z = 0, p = 0.5.
TestResult prop_ztest(int x_trt, int n_trt, int x_ctl, int n_ctl);

/// p-value of prop_ztest.
double one_sided_prop_pvalue(int x_trt, int n_trt, int x_ctl, int n_ctl);

/// Exact binomial tail P(X >= x | Binomial(n, p0)).
double exact_binom_pvalue(int x, int n, double p0);

/// Unweighted two-sample log-rank test. z is signed so that longer survival
/// in the treatment arm gives z > 0; p = 1 - Phi(z). Zero events or zero
/// variance yield z = 0, p = 0.5.
TestResult logrank_two_sample(const SurvivalSample& trt,
                              const SurvivalSample& ctl);

/// One-sample log-rank test against a constant historical hazard
/// (events/month): Z = (E - O) / sqrt(E) with E = hazard * total follow-up.
/// z > 0 means fewer events than expected. Throws std::domain_error when the
/// expected count is zero.
TestResult logrank_one_sample(const SurvivalSample& sample,
                              double hist_hazard);

/// 1 - P(max of m equicorrelated standard normals <= z_obs), the Dunnett-type
/// p-value for a many-to-one max-z statistic. Computed through the
/// one-factor integral
///   P(all <= c) = \int phi(u) Phi((c - sqrt(rho) u) / sqrt(1 - rho))^m du
/// with adaptive Gauss-Kronrod quadrature (absolute error below 1e-8).
/// Requires m >= 1 and 0 <= rho < 1.
double dunnett_maxz_pvalue(double z_obs, int m, double rho);

/// Sidak-adjusted minimum p-value over m independent tests: 1 - (1-p)^m.
double sidak_min_p(double p_min, int m);

}  // namespace p23
