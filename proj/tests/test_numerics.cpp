#include <expertvote/numerics.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "support/oracles.hpp"

using namespace expertvote;

namespace {

bool nondecreasing_on_grid(const std::function<double(double)>& f, double lo,
                           double hi, int points = 1000) {
  double prev = f(lo);
  for (int i = 1; i < points; ++i) {
    const double x = lo + (hi - lo) * i / (points - 1);
    const double y = f(x);
    if (y < prev - 1e-15) return false;
    prev = y;
  }
  return true;
}

}  // namespace

TEST_CASE("normal_cdf matches a series oracle and is symmetric", "[numerics]") {
  for (double x : {-4.0, -3.0, -1.5, -1.0, -0.3, 0.0, 0.25, 1.0, 2.7, 4.0}) {
    const double want = static_cast<double>(oracle::normal_cdf_series(x));
    CAPTURE(x);
    CHECK(std::fabs(num::normal_cdf(x) - want) <= 1e-15);
  }
  CHECK_THAT(num::normal_cdf(1.0),
             Catch::Matchers::WithinAbs(0.8413447460685429, 1e-15));
  for (double x = -6; x <= 6; x += 0.037) {
    CHECK(std::fabs(num::normal_cdf(x) + num::normal_cdf(-x) - 1.0) <= 1e-14);
  }
  CHECK(nondecreasing_on_grid([](double x) { return num::normal_cdf(x); }, -10, 10));
}

TEST_CASE("reg_inc_gamma agrees with exact Poisson tails", "[numerics]") {
  // P(a, x) = 1 - P(Pois(x) <= a-1) for integer a
  for (long a : {1L, 2L, 3L, 5L, 9L, 17L, 30L}) {
    for (double x : {0.1, 0.5, 1.0, 2.5, 7.0, 13.7, 30.0, 50.0}) {
      const double want = static_cast<double>(1.0L - oracle::poisson_cdf_sum(a - 1, x));
      CAPTURE(a, x);
      CHECK(std::fabs(num::reg_inc_gamma(static_cast<double>(a), x) - want) <= 1e-12);
    }
  }
  // 1 - e^{-3}(1 + 3 + 9/2)
  const double g33 = 1.0 - std::exp(-3.0) * 8.5;
  CHECK_THAT(num::reg_inc_gamma(3.0, 3.0), Catch::Matchers::WithinAbs(g33, 1e-14));
  CHECK_THAT(num::reg_inc_gamma(3.0, 3.0),
             Catch::Matchers::WithinAbs(0.5768099, 1e-7));
  CHECK(num::reg_inc_gamma(4.2, 0.0) == 0.0);
  CHECK(nondecreasing_on_grid([](double x) { return num::reg_inc_gamma(2.5, x); }, 0, 40));
  CHECK(nondecreasing_on_grid([](double x) { return num::reg_inc_gamma(0.5, x); }, 0, 10));
  CHECK_THROWS_AS(num::reg_inc_gamma(0.0, 1.0), numeric_domain_error);
  CHECK_THROWS_AS(num::reg_inc_gamma(-2.0, 1.0), numeric_domain_error);
  CHECK_THROWS_AS(num::reg_inc_gamma(1.0, -0.5), numeric_domain_error);
}

TEST_CASE("reg_inc_beta agrees with exact binomial tails", "[numerics]") {
  // I_p(k, n-k+1) = P(Bin(n, p) >= k)
  const std::vector<Rat> ps = {Rat(1, 20), Rat(3, 10), Rat(1, 3), Rat(1, 2), Rat(77, 100), Rat(19, 20)};
  for (long n : {1L, 2L, 5L, 11L, 18L, 25L}) {
    for (long k = 1; k <= n; ++k) {
      for (const Rat& p : ps) {
        const double want = to_double(oracle::binomial_tail(n, k, p));
        CAPTURE(n, k, to_double(p));
        CHECK(std::fabs(num::reg_inc_beta(static_cast<double>(k),
                                          static_cast<double>(n - k + 1),
                                          to_double(p)) -
                        want) <= 1e-12);
      }
    }
  }
  const double i38 = to_double(oracle::binomial_tail(10, 3, Rat(3, 10)));
  CHECK_THAT(num::reg_inc_beta(3.0, 8.0, 0.3), Catch::Matchers::WithinAbs(i38, 1e-14));
  // reflection
  for (double a : {0.4, 1.0, 2.5, 7.0}) {
    for (double b : {0.6, 1.0, 3.3, 12.0}) {
      for (double x = 0.02; x < 1.0; x += 0.02) {
        CAPTURE(a, b, x);
        CHECK(std::fabs(num::reg_inc_beta(a, b, x) +
                        num::reg_inc_beta(b, a, 1.0 - x) - 1.0) <= 1e-13);
      }
    }
  }
  CHECK(num::reg_inc_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(num::reg_inc_beta(2.0, 3.0, 1.0) == 1.0);
  CHECK(nondecreasing_on_grid([](double x) { return num::reg_inc_beta(1.7, 4.1, x); }, 0, 1));
  CHECK(nondecreasing_on_grid([](double x) { return num::reg_inc_beta(0.5, 0.5, x); }, 0, 1));
  CHECK_THROWS_AS(num::reg_inc_beta(0.0, 1.0, 0.5), numeric_domain_error);
  CHECK_THROWS_AS(num::reg_inc_beta(1.0, -1.0, 0.5), numeric_domain_error);
  CHECK_THROWS_AS(num::reg_inc_beta(1.0, 1.0, 1.5), numeric_domain_error);
}

TEST_CASE("beta_prime_cdf reduces to closed form at p = q = 1", "[numerics]") {
  for (double t : {0.0, 0.1, 0.5, 1.0, 3.0, 40.0}) {
    CAPTURE(t);
    CHECK(std::fabs(num::beta_prime_cdf(1.0, 1.0, t) - t / (1.0 + t)) <= 1e-14);
  }
  CHECK(num::beta_prime_cdf(2.5, 0.5, 0.0) == 0.0);
  CHECK(nondecreasing_on_grid([](double t) { return num::beta_prime_cdf(2.0, 3.0, t); }, 0, 50));
  CHECK_THROWS_AS(num::beta_prime_cdf(1.0, 1.0, -0.1), numeric_domain_error);
}

TEST_CASE("student_cdf matches closed forms for df 1 and 3", "[numerics]") {
  for (double x : {-5.0, -1.0, -0.2, 0.0, 0.4, 1.0, 2.0, 8.0}) {
    CAPTURE(x);
    CHECK(std::fabs(num::student_cdf(1, x) - oracle::cauchy_cdf(x)) <= 1e-14);
    CHECK(std::fabs(num::student_cdf(3, x) - oracle::student3_cdf(x)) <= 1e-14);
  }
  CHECK_THAT(num::student_cdf(1, 1.0), Catch::Matchers::WithinAbs(0.75, 1e-15));
  CHECK_THAT(num::student_cdf(3, 1.0), Catch::Matchers::WithinAbs(0.804499, 1e-6));
  for (int df : {1, 2, 3, 7, 29}) {
    for (double x = -4; x <= 4; x += 0.13) {
      CAPTURE(df, x);
      CHECK(std::fabs(num::student_cdf(df, x) + num::student_cdf(df, -x) - 1.0) <= 1e-14);
    }
    CHECK(nondecreasing_on_grid([df](double x) { return num::student_cdf(df, x); }, -20, 20));
  }
  CHECK_THROWS_AS(num::student_cdf(0, 1.0), numeric_domain_error);
}

TEST_CASE("student_pdf integrates the cdf slope", "[numerics]") {
  for (int df : {1, 3, 10}) {
    const double mass = oracle::integrate(
        [df](double x) { return num::student_pdf(df, x); }, -60.0, 60.0, 1e-10);
    CAPTURE(df);
    CHECK(std::fabs(mass - (1.0 - 2.0 * num::student_cdf(df, -60.0))) <= 1e-9);
    const double piece = oracle::integrate(
        [df](double x) { return num::student_pdf(df, x); }, -1.0, 2.0, 1e-11);
    CHECK(std::fabs(piece - (num::student_cdf(df, 2.0) - num::student_cdf(df, -1.0))) <= 1e-9);
  }
}

TEST_CASE("poisson_mixture_cdf truncates against the Poisson tail", "[numerics]") {
  for (double eta : {0.0, 0.3, 2.0, 25.0, 300.0}) {
    for (double x : {0.0, 0.2, 0.7, 1.0}) {
      num::MixtureSeriesSpec spec;
      spec.eta = eta;
      spec.term = [x](long m) { return m == 0 ? 1.0 : std::pow(x, m); };
      const auto r = num::poisson_mixture_cdf(spec);
      const double want = std::exp(eta * (x - 1.0));
      CAPTURE(eta, x);
      CHECK(r.tail_bound <= spec.tail_tolerance);
      CHECK(r.terms >= 1);
      CHECK(std::fabs(r.value - want) <= r.tail_bound + 1e-13);
    }
  }
  // indicator of m == 0 picks out the leading weight
  for (double eta : {0.4, 7.0, 40.0}) {
    num::MixtureSeriesSpec spec;
    spec.eta = eta;
    spec.term = [](long m) { return m == 0 ? 1.0 : 0.0; };
    const auto r = num::poisson_mixture_cdf(spec);
    CAPTURE(eta);
    CHECK(std::fabs(r.value - std::exp(-eta)) <= r.tail_bound + 1e-15);
  }
  num::MixtureSeriesSpec capped;
  capped.eta = 50.0;
  capped.term = [](long) { return 1.0; };
  capped.max_terms = 5;
  CHECK_THROWS_AS(num::poisson_mixture_cdf(capped), numeric_domain_error);
  num::MixtureSeriesSpec bad;
  bad.eta = -1.0;
  bad.term = [](long) { return 1.0; };
  CHECK_THROWS_AS(num::poisson_mixture_cdf(bad), numeric_domain_error);
}

TEST_CASE("invert_cdf round-trips through smooth and atomic cdfs", "[numerics]") {
  auto ncdf = [](double x) { return num::normal_cdf(x); };
  for (double p : {1e-6, 0.1, 0.5, 0.9, 0.975, 1.0 - 1e-6}) {
    const double x = num::invert_cdf(ncdf, p, -40.0, 40.0);
    CAPTURE(p);
    CHECK(std::fabs(num::normal_cdf(x) - p) <= 1e-10);
  }
  CHECK(std::fabs(num::invert_cdf(ncdf, 0.975, -40.0, 40.0) - 1.9599639845400545) <= 1e-9);
  CHECK(std::fabs(num::invert_cdf(ncdf, 0.5, -40.0, 40.0)) <= 1e-11);

  auto step = [](double x) { return x < 1.5 ? 0.0 : 1.0; };
  CHECK(std::fabs(num::invert_cdf(step, 0.5, 0.0, 3.0) - 1.5) <= 1e-9);

  auto ramp = [](double x) { return x; };
  CHECK_THROWS_AS(num::invert_cdf(ramp, 0.99, 0.0, 0.5), numeric_domain_error);
}
