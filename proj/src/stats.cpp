#include "p23/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace p23 {

namespace {

constexpr double kSqrt1_2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod (G7, K15) quadrature.

// QUADPACK dqk15 nodes and weights, positive half.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <typename F>
void gk15(const F& f, double a, double b, double& result, double& err) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double res_g = fc * kWg[3];
  double res_k = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double fsum = f(center - dx) + f(center + dx);
    res_k += kWgk[j] * fsum;
    if (j % 2 == 1) res_g += kWg[j / 2] * fsum;
  }
  result = res_k * half;
  err = std::fabs((res_k - res_g) * half);
}

template <typename F>
double integrate_adaptive(const F& f, double a, double b, double tol,
                          int depth = 0) {
  double result, err;
  gk15(f, a, b, result, err);
  if (err <= tol || depth >= 40) return result;
  const double mid = 0.5 * (a + b);
  return integrate_adaptive(f, a, mid, 0.5 * tol, depth + 1) +
         integrate_adaptive(f, mid, b, 0.5 * tol, depth + 1);
}

// ---------------------------------------------------------------------------
// Incomplete beta continued fraction (Lentz).

double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z * kSqrt1_2); }

double std_normal_pdf(double z) {
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

// Wichura (1988), algorithm AS241, PPND16.
double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("std_normal_quantile: p must be in (0,1)");

  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
              6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
            1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
          1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    const double den =
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
            5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
          4.2313330701600911252e1) * r + 1.0);
    return q * num / den;
  }

  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
    val = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    val = num / den;
  }
  return (q < 0.0) ? -val : val;
}

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0))
    throw std::domain_error("regularized_incomplete_beta: a, b must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = a * std::log(x) + b * std::log1p(-x) +
                          std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double bivariate_normal_cdf(double a, double b, double rho) {
  if (!(rho > -1.0 && rho < 1.0))
    throw std::domain_error("bivariate_normal_cdf: |rho| must be < 1");
  if (rho == 0.0) return std_normal_cdf(a) * std_normal_cdf(b);
  const double s = std::sqrt(1.0 - rho * rho);
  const double lo = -8.5;
  const double hi = std::min(b, 8.5);
  if (hi <= lo) return 0.0;
  auto f = [&](double u) {
    return std_normal_pdf(u) * std_normal_cdf((a - rho * u) / s);
  };
  const double v = integrate_adaptive(f, lo, hi, 1e-12);
  return std::clamp(v, 0.0, 1.0);
}

double beta_tail_below(const BetaPrior& prior, int successes, int n,
                       double threshold) {
  if (!(prior.a > 0.0 && prior.b > 0.0))
    throw std::domain_error("beta_tail_below: prior parameters must be > 0");
  if (n < 0 || successes < 0 || successes > n)
    throw std::domain_error("beta_tail_below: need 0 <= successes <= n");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::domain_error("beta_tail_below: threshold must be in (0,1)");
  return regularized_incomplete_beta(threshold, prior.a + successes,
                                     prior.b + (n - successes));
}

TestResult prop_ztest(int x_trt, int n_trt, int x_ctl, int n_ctl) {
  if (n_trt <= 0 || n_ctl <= 0)
    throw std::domain_error("prop_ztest: sample sizes must be positive");
  if (x_trt < 0 || x_trt > n_trt || x_ctl < 0 || x_ctl > n_ctl)
    throw std::domain_error("prop_ztest: counts out of range");
  const double pooled =
      static_cast<double>(x_trt + x_ctl) / static_cast<double>(n_trt + n_ctl);
  const double var = pooled * (1.0 - pooled) * (1.0 / n_trt + 1.0 / n_ctl);
  if (var <= 0.0) return {0.0, 0.5};
  const double z = (static_cast<double>(x_trt) / n_trt -
                    static_cast<double>(x_ctl) / n_ctl) /
                   std::sqrt(var);
  return {z, 1.0 - std_normal_cdf(z)};
}

double one_sided_prop_pvalue(int x_trt, int n_trt, int x_ctl, int n_ctl) {
  return prop_ztest(x_trt, n_trt, x_ctl, n_ctl).p;
}

double exact_binom_pvalue(int x, int n, double p0) {
  if (n < 0 || x < 0 || x > n)
    throw std::domain_error("exact_binom_pvalue: need 0 <= x <= n");
  if (!(p0 > 0.0 && p0 < 1.0))
    throw std::domain_error("exact_binom_pvalue: p0 must be in (0,1)");
  if (x == 0) return 1.0;
  // P(X >= x) = I_{p0}(x, n - x + 1).
  return regularized_incomplete_beta(p0, static_cast<double>(x),
                                     static_cast<double>(n - x + 1));
}

TestResult logrank_two_sample(const SurvivalSample& trt,
                              const SurvivalSample& ctl) {
  if (trt.empty() || ctl.empty())
    throw std::domain_error("logrank_two_sample: both arms must be non-empty");

  struct Obs {
    double t;
    bool event;
    int arm;  // 0 = trt, 1 = ctl
  };
  std::vector<Obs> all;
  all.reserve(trt.size() + ctl.size());
  for (const auto& o : trt) {
    if (!(o.time > 0.0))
      throw std::domain_error("logrank_two_sample: times must be > 0");
    all.push_back({o.time, o.event, 0});
  }
  for (const auto& o : ctl) {
    if (!(o.time > 0.0))
      throw std::domain_error("logrank_two_sample: times must be > 0");
    all.push_back({o.time, o.event, 1});
  }
  std::sort(all.begin(), all.end(),
            [](const Obs& a, const Obs& b) { return a.t < b.t; });

  double at_risk[2] = {static_cast<double>(trt.size()),
                       static_cast<double>(ctl.size())};
  double o_trt = 0.0, e_trt = 0.0, var = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    const double t = all[i].t;
    int d[2] = {0, 0};
    int leaving[2] = {0, 0};
    std::size_t j = i;
    while (j < all.size() && all[j].t == t) {
      d[all[j].arm] += all[j].event ? 1 : 0;
      ++leaving[all[j].arm];
      ++j;
    }
    const int d_tot = d[0] + d[1];
    if (d_tot > 0) {
      const double n0 = at_risk[0], n1 = at_risk[1], n = n0 + n1;
      o_trt += d[0];
      e_trt += d_tot * n0 / n;
      if (n > 1.0)
        var += d_tot * (n0 / n) * (n1 / n) * (n - d_tot) / (n - 1.0);
    }
    at_risk[0] -= leaving[0];
    at_risk[1] -= leaving[1];
    i = j;
  }
  if (var <= 0.0) return {0.0, 0.5};
  const double z = (e_trt - o_trt) / std::sqrt(var);
  return {z, 1.0 - std_normal_cdf(z)};
}

TestResult logrank_one_sample(const SurvivalSample& sample,
                              double hist_hazard) {
  if (sample.empty())
    throw std::domain_error("logrank_one_sample: sample must be non-empty");
  if (!(hist_hazard > 0.0))
    throw std::domain_error("logrank_one_sample: hazard must be > 0");
  double observed = 0.0, followup = 0.0;
  for (const auto& o : sample) {
    if (!(o.time > 0.0))
      throw std::domain_error("logrank_one_sample: times must be > 0");
    observed += o.event ? 1.0 : 0.0;
    followup += o.time;
  }
  const double expected = hist_hazard * followup;
  if (expected <= 0.0)
    throw std::domain_error("logrank_one_sample: zero expected events");
  const double z = (expected - observed) / std::sqrt(expected);
  return {z, 1.0 - std_normal_cdf(z)};
}

double dunnett_maxz_pvalue(double z_obs, int m, double rho) {
  if (m < 1) throw std::domain_error("dunnett_maxz_pvalue: m must be >= 1");
  if (!(rho >= 0.0 && rho < 1.0))
    throw std::domain_error("dunnett_maxz_pvalue: rho must be in [0,1)");
  if (m == 1) return 1.0 - std_normal_cdf(z_obs);
  if (rho == 0.0)
    return std::clamp(1.0 - std::pow(std_normal_cdf(z_obs), m), 0.0, 1.0);

  const double sr = std::sqrt(rho);
  const double s1 = std::sqrt(1.0 - rho);
  auto f = [&](double u) {
    return std_normal_pdf(u) *
           std::pow(std_normal_cdf((z_obs - sr * u) / s1), m);
  };
  const double p_all = integrate_adaptive(f, -8.5, 8.5, 1e-12);
  return std::clamp(1.0 - p_all, 0.0, 1.0);
}

double sidak_min_p(double p_min, int m) {
  if (m < 1) throw std::domain_error("sidak_min_p: m must be >= 1");
  if (!(p_min >= 0.0 && p_min <= 1.0))
    throw std::domain_error("sidak_min_p: p must be in [0,1]");
  if (p_min >= 1.0) return 1.0;
  return -std::expm1(m * std::log1p(-p_min));
}

}  // namespace p23
