#include "p23/stats.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "oracles.hpp"

using namespace p23;

TEST_CASE("std_normal_cdf basics") {
  CHECK(std_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  // quantile of 0.975, rounded to 6 decimals
  CHECK(std_normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-7));
  CHECK(std_normal_cdf(-8.0) < 1e-15);
  // deep tail agrees with the leading asymptotic term phi(z)/z
  const double tail = std_normal_cdf(-8.0);
  const double asym = std_normal_pdf(8.0) / 8.0;
  CHECK(tail == doctest::Approx(asym).epsilon(0.02));
}

TEST_CASE("std_normal_cdf symmetry and monotonicity") {
  double prev = -1.0;
  for (int i = -400; i <= 400; ++i) {
    const double z = i / 50.0;
    const double c = std_normal_cdf(z);
    CHECK(std::fabs(c + std_normal_cdf(-z) - 1.0) < 1e-12);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("std_normal_quantile basics") {
  CHECK(std_normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(std_normal_quantile(0.975) ==
        doctest::Approx(1.959964).epsilon(1e-6));
  CHECK(std::isfinite(std_normal_quantile(1.0 - 1e-11)));
  CHECK(std::isfinite(std_normal_quantile(1e-300)));
  CHECK_THROWS_AS((void)std_normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS((void)std_normal_quantile(1.0), std::domain_error);
  CHECK_THROWS_AS((void)std_normal_quantile(-0.2), std::domain_error);
}

TEST_CASE("quantile/cdf round trip") {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double p = 1e-8 + (1.0 - 2e-8) * unif(gen);
    const double err = std::fabs(std_normal_cdf(std_normal_quantile(p)) - p);
    CHECK(err < 1e-9);
  }
}

TEST_CASE("beta_tail_below uniform posterior") {
  const BetaPrior flat{1.0, 1.0};
  for (double x : {0.05, 0.3, 0.5, 0.9})
    CHECK(beta_tail_below(flat, 0, 0, x) == doctest::Approx(x).epsilon(1e-13));
}

TEST_CASE("beta_tail_below closed forms and oracle") {
  const BetaPrior flat{1.0, 1.0};
  // zero successes: posterior is Beta(1, n+1) with CDF 1 - (1-x)^(n+1)
  const double p0 = beta_tail_below(flat, 0, 50, 0.3);
  CHECK(p0 == doctest::Approx(1.0 - std::pow(0.7, 51)).epsilon(1e-12));
  const double p25 = beta_tail_below(flat, 25, 50, 0.3);
  CHECK(p25 < 0.01);
  CHECK(std::fabs(p25 - oracles::beta_cdf_by_integration(0.3, 26.0, 26.0)) <
        1e-8);
  CHECK_THROWS_AS((void)beta_tail_below(flat, 5, 3, 0.3), std::domain_error);
  CHECK_THROWS_AS((void)beta_tail_below(flat, -1, 3, 0.3), std::domain_error);
  CHECK_THROWS_AS((void)beta_tail_below(flat, 1, 3, 0.0), std::domain_error);
}

TEST_CASE("beta_tail_below agrees with numerical integration") {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<int> n_dist(1, 120);
  std::uniform_real_distribution<double> t_dist(0.02, 0.98);
  const BetaPrior flat{1.0, 1.0};
  for (int i = 0; i < 100; ++i) {
    const int n = n_dist(gen);
    const int s = std::uniform_int_distribution<int>(0, n)(gen);
    const double t = t_dist(gen);
    const double lib = beta_tail_below(flat, s, n, t);
    const double ref = oracles::beta_cdf_by_integration(t, 1.0 + s, 1.0 + n - s);
    CHECK(std::fabs(lib - ref) < 1e-8);
  }
}

TEST_CASE("one_sided_prop_pvalue") {
  CHECK(one_sided_prop_pvalue(20, 50, 20, 50) == doctest::Approx(0.5));
  // hand-computed pooled z: p_hat = 0.3, se = sqrt(0.21 * 2/50)
  const double se = std::sqrt(0.3 * 0.7 * (2.0 / 50.0));
  const double z = (0.4 - 0.2) / se;
  CHECK(prop_ztest(20, 50, 10, 50).z == doctest::Approx(z).epsilon(1e-12));
  CHECK(one_sided_prop_pvalue(20, 50, 10, 50) ==
        doctest::Approx(1.0 - std_normal_cdf(z)).epsilon(1e-12));
  // degenerate pooled variance
  CHECK(one_sided_prop_pvalue(0, 50, 0, 50) == doctest::Approx(0.5));
  CHECK(one_sided_prop_pvalue(50, 50, 50, 50) == doctest::Approx(0.5));
  // more treatment responders -> smaller p
  double prev = 1.0;
  for (int x = 0; x <= 50; ++x) {
    const double p = one_sided_prop_pvalue(x, 50, 10, 50);
    if (x > 0) CHECK(p <= prev);
    prev = p;
  }
  CHECK_THROWS_AS((void)one_sided_prop_pvalue(1, 0, 0, 5), std::domain_error);
}

TEST_CASE("exact_binom_pvalue") {
  CHECK(exact_binom_pvalue(0, 10, 0.3) == doctest::Approx(1.0));
  CHECK(exact_binom_pvalue(10, 10, 0.5) ==
        doctest::Approx(std::pow(0.5, 10)).epsilon(1e-12));
  CHECK(exact_binom_pvalue(15, 45, 0.2) ==
        doctest::Approx(oracles::binom_tail_by_summation(15, 45, 0.2))
            .epsilon(1e-11));
  CHECK_THROWS_AS((void)exact_binom_pvalue(5, 4, 0.2), std::domain_error);
  CHECK_THROWS_AS((void)exact_binom_pvalue(1, 4, 1.0), std::domain_error);

  // nondecreasing as x decreases; nondecreasing in p0 at fixed x
  std::mt19937_64 gen(3);
  for (int i = 0; i < 50; ++i) {
    const int n = std::uniform_int_distribution<int>(1, 80)(gen);
    double prev = -1.0;
    for (int x = n; x >= 0; --x) {
      const double p = exact_binom_pvalue(x, n, 0.25);
      CHECK(p >= prev);
      prev = p;
    }
    const int x = std::uniform_int_distribution<int>(1, n)(gen);
    CHECK(exact_binom_pvalue(x, n, 0.2) <= exact_binom_pvalue(x, n, 0.3));
  }
}

TEST_CASE("logrank_two_sample hand example") {
  // trt: event at 5; ctl: events at 3 and 7. Risk-set table gives
  // O_trt = 1, E_trt = 1/3 + 1/2, V = 2/9 + 1/4.
  const SurvivalSample trt{{5.0, true}};
  const SurvivalSample ctl{{3.0, true}, {7.0, true}};
  const auto res = logrank_two_sample(trt, ctl);
  const double e_trt = 1.0 / 3.0 + 0.5;
  const double var = 2.0 / 9.0 + 0.25;
  CHECK(res.z == doctest::Approx((e_trt - 1.0) / std::sqrt(var)).epsilon(1e-12));
  CHECK(res.p == doctest::Approx(1.0 - std_normal_cdf(res.z)).epsilon(1e-12));
}

TEST_CASE("logrank_two_sample conventions") {
  const SurvivalSample a{{1.0, true}, {2.0, false}, {3.0, true}};
  CHECK(logrank_two_sample(a, a).z == doctest::Approx(0.0));
  CHECK(logrank_two_sample(a, a).p == doctest::Approx(0.5));

  // no events at all
  const SurvivalSample censored{{1.0, false}, {2.0, false}};
  CHECK(logrank_two_sample(censored, censored).p == doctest::Approx(0.5));

  // every treatment time beyond every control time -> z > 0
  const SurvivalSample late{{10.0, true}, {11.0, true}, {12.0, true}};
  const SurvivalSample early{{1.0, true}, {2.0, true}, {3.0, true}};
  CHECK(logrank_two_sample(late, early).z > 0.0);

  CHECK_THROWS_AS((void)logrank_two_sample({}, a), std::domain_error);
  CHECK_THROWS_AS(
      (void)logrank_two_sample({{0.0, true}}, a), std::domain_error);
}

TEST_CASE("logrank_two_sample antisymmetry") {
  std::mt19937_64 gen(11);
  std::exponential_distribution<double> expo(0.3);
  std::bernoulli_distribution ev(0.7);
  for (int trial = 0; trial < 40; ++trial) {
    SurvivalSample a, b;
    const int na = std::uniform_int_distribution<int>(2, 40)(gen);
    const int nb = std::uniform_int_distribution<int>(2, 40)(gen);
    for (int i = 0; i < na; ++i) a.push_back({expo(gen) + 1e-3, ev(gen)});
    for (int i = 0; i < nb; ++i) b.push_back({expo(gen) + 1e-3, ev(gen)});
    const double z_ab = logrank_two_sample(a, b).z;
    const double z_ba = logrank_two_sample(b, a).z;
    CHECK(z_ab == doctest::Approx(-z_ba).epsilon(1e-10));
  }
}

TEST_CASE("logrank_one_sample") {
  // one subject followed exactly 1/hazard months with an event: O = E = 1
  const double h = 0.25;
  const SurvivalSample balanced{{1.0 / h, true}};
  CHECK(logrank_one_sample(balanced, h).z == doctest::Approx(0.0));
  CHECK(logrank_one_sample(balanced, h).p == doctest::Approx(0.5));

  // no events: z = sqrt(E)
  const SurvivalSample censored{{4.0, false}, {6.0, false}, {10.0, false}};
  const double expected = h * 20.0;
  CHECK(logrank_one_sample(censored, h).z ==
        doctest::Approx(std::sqrt(expected)).epsilon(1e-12));

  // five subjects, hand-computed E and O
  const SurvivalSample five{
      {2.0, true}, {3.0, false}, {5.0, true}, {7.0, true}, {8.0, false}};
  const double e5 = h * (2 + 3 + 5 + 7 + 8);
  const double z5 = (e5 - 3.0) / std::sqrt(e5);
  CHECK(logrank_one_sample(five, h).z == doctest::Approx(z5).epsilon(1e-12));

  CHECK_THROWS_AS((void)logrank_one_sample({}, h), std::domain_error);
  CHECK_THROWS_AS((void)logrank_one_sample(balanced, 0.0), std::domain_error);
}

TEST_CASE("dunnett_maxz_pvalue basics") {
  for (double z : {-1.0, 0.0, 1.2, 2.5})
    for (double rho : {0.0, 0.3, 0.7})
      CHECK(dunnett_maxz_pvalue(z, 1, rho) ==
            doctest::Approx(1.0 - std_normal_cdf(z)).epsilon(1e-10));

  // bracketed by the single-test and Bonferroni p-values
  const double p2 = dunnett_maxz_pvalue(1.959964, 2, 0.5);
  CHECK(p2 > 0.025);
  CHECK(p2 < 0.05);

  CHECK_THROWS_AS((void)dunnett_maxz_pvalue(1.0, 0, 0.5), std::domain_error);
  CHECK_THROWS_AS((void)dunnett_maxz_pvalue(1.0, 2, 1.0), std::domain_error);
  CHECK_THROWS_AS((void)dunnett_maxz_pvalue(1.0, 2, -0.1), std::domain_error);
}

TEST_CASE("dunnett_maxz_pvalue monotonicity") {
  for (double rho : {0.0, 0.2, 0.5, 0.8}) {
    double prev = 1.0;
    for (double z = -2.0; z <= 3.5; z += 0.25) {
      const double p = dunnett_maxz_pvalue(z, 3, rho);
      CHECK(p <= prev + 1e-12);
      prev = p;
    }
    for (double z : {0.5, 1.5, 2.5}) {
      CHECK(dunnett_maxz_pvalue(z, 1, rho) <=
            dunnett_maxz_pvalue(z, 2, rho) + 1e-12);
      CHECK(dunnett_maxz_pvalue(z, 2, rho) <=
            dunnett_maxz_pvalue(z, 3, rho) + 1e-12);
    }
  }
}

TEST_CASE("dunnett_maxz_pvalue matches Sidak as rho -> 0") {
  for (int m : {2, 3})
    for (double z : {0.0, 1.0, 2.0, 3.0}) {
      const double lib = dunnett_maxz_pvalue(z, m, 1e-6);
      const double sidak = 1.0 - std::pow(std_normal_cdf(z), m);
      CHECK(std::fabs(lib - sidak) < 1e-4);
    }
}

TEST_CASE("dunnett_maxz_pvalue vs Monte Carlo") {
  double se = 0.0;
  const double mc = oracles::dunnett_tail_by_mc(2.0, 3, 0.5, 1000000, 99, &se);
  const double lib = dunnett_maxz_pvalue(2.0, 3, 0.5);
  CHECK(std::fabs(lib - mc) < 3.0 * se);
}

TEST_CASE("sidak_min_p") {
  CHECK(sidak_min_p(0.2, 1) == doctest::Approx(0.2));
  CHECK(sidak_min_p(0.02, 3) == doctest::Approx(0.058808).epsilon(1e-9));
  CHECK(sidak_min_p(0.0, 5) == doctest::Approx(0.0));
  CHECK(sidak_min_p(1.0, 5) == doctest::Approx(1.0));
  CHECK_THROWS_AS((void)sidak_min_p(0.5, 0), std::domain_error);
  CHECK_THROWS_AS((void)sidak_min_p(1.5, 2), std::domain_error);
}

TEST_CASE("bivariate_normal_cdf orthant identity") {
  // P(z1 <= 0, z2 <= 0) = 1/4 + asin(rho) / (2 pi)
  for (double rho : {-0.6, 0.0, 0.3, 0.8}) {
    const double expected = 0.25 + std::asin(rho) / (2.0 * M_PI);
    CHECK(bivariate_normal_cdf(0.0, 0.0, rho) ==
          doctest::Approx(expected).epsilon(1e-9));
  }
  CHECK(bivariate_normal_cdf(1.0, 30.0, 0.4) ==
        doctest::Approx(std_normal_cdf(1.0)).epsilon(1e-9));
}
