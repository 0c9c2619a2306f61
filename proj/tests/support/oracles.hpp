#pragma once

// Reference implementations used by the test suites only.  They are kept
// deliberately independent of the library kernels: Taylor series, exact
// rational sums, closed forms and adaptive quadrature instead of the
// series/continued-fraction/mixture routines under test.

#include <expertvote/rational.hpp>

#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracle {

using expertvote::BigInt;
using expertvote::Rat;

// erf by Taylor series in long double, good to ~1e-17 for |z| <= 3.
inline long double erf_series(long double z) {
  const long double two_over_sqrt_pi = 1.128379167095512573896L;
  long double term = z, sum = z;
  for (int n = 1; n < 80; ++n) {
    term *= -z * z / n;
    sum += term / (2 * n + 1);
  }
  return two_over_sqrt_pi * sum;
}

inline long double normal_cdf_series(long double x) {
  return 0.5L * (1.0L + erf_series(x * 0.7071067811865475244L));
}

// Direct Poisson mass sum P(X <= k) at rate lambda.
inline long double poisson_cdf_sum(long k, long double lambda) {
  if (k < 0) return 0.0L;
  long double w = std::exp(-lambda), acc = 0.0L;
  for (long i = 0; i <= k; ++i) {
    acc += w;
    w *= lambda / (i + 1);
  }
  return acc;
}

inline BigInt factorial(long n) {
  BigInt f = 1;
  for (long i = 2; i <= n; ++i) f *= i;
  return f;
}

inline BigInt binom(long n, long k) {
  if (k < 0 || k > n) return 0;
  BigInt c = 1;
  for (long i = 0; i < k; ++i) {
    c *= n - i;
    c /= i + 1;
  }
  return c;
}

inline Rat rat_pow(const Rat& base, long e) {
  Rat r = 1;
  for (long i = 0; i < e; ++i) r *= base;
  return r;
}

// Exact upper binomial tail P(X >= kmin) for X ~ Bin(n, p).
inline Rat binomial_tail(long n, long kmin, const Rat& p) {
  Rat q = 1 - p, acc = 0;
  for (long i = kmin; i <= n; ++i)
    acc += Rat(binom(n, i)) * rat_pow(p, i) * rat_pow(q, n - i);
  return acc;
}

// Beta function for positive integer arguments, exact.
inline Rat beta_int(long a, long b) {
  return Rat(factorial(a - 1) * factorial(b - 1), factorial(a + b - 1));
}

inline double cauchy_cdf(double x) {
  return 0.5 + std::atan(x) / 3.14159265358979323846;
}

// Student cdf with 3 degrees of freedom, closed form.
inline double student3_cdf(double x) {
  const double s = x / std::sqrt(3.0);
  return 0.5 + (s / (1.0 + s * s) + std::atan(s)) / 3.14159265358979323846;
}

// --- adaptive Simpson ------------------------------------------------------

namespace detail {

inline double simpson_rec(const std::function<double(double)>& f, double a,
                          double b, double fa, double fm, double fb,
                          double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-11, int depth = 28) {
  if (a == b) return 0.0;
  const double fa = f(a), fm = f(0.5 * (a + b)), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// --- closed pieces for the quadrature oracles -------------------------------

inline double phi_pdf(double x) {
  return std::exp(-0.5 * x * x) * 0.39894228040143267794;
}

inline double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Chi-square cdf for the small fixed orders the oracles need.
inline double chi2_cdf_small(int k, double y) {
  if (y <= 0) return 0.0;
  switch (k) {
    case 0:
      return 1.0;
    case 1:
      return 2.0 * phi_cdf(std::sqrt(y)) - 1.0;
    case 2:
      return 1.0 - std::exp(-0.5 * y);
    case 4:
      return 1.0 - std::exp(-0.5 * y) * (1.0 + 0.5 * y);
    case 5: {
      const double s = std::sqrt(y);
      return 2.0 * phi_cdf(s) - 1.0 -
             std::exp(-0.5 * y) * s * (y + 3.0) * 0.26596152026762177425;
    }
    default:
      throw std::invalid_argument("chi2_cdf_small: unsupported order");
  }
}

// P(U <= x) for 2U ~ noncentral chi-square with 2p dof and noncentrality
// 2*delta2 (so U is the "gamma with Poisson-shifted shape p" variable).
// Uses the decomposition chi2_{2p}(nc) = (Z + sqrt(nc))^2 + chi2_{2p-1}
// with 2p - 1 in {0, 1, 4}; the inner normal integral runs over
// s = smax * sin(phi) to keep endpoint behaviour smooth.
inline double noncentral_gamma_cdf(double p, double delta2, double x,
                                   double tol = 1e-12) {
  if (x <= 0) return 0.0;
  const double delta = std::sqrt(2.0 * delta2);
  const double smax = std::sqrt(2.0 * x);
  const int rest = static_cast<int>(std::lround(2.0 * p - 1.0));
  if (rest == 0) return phi_cdf(smax - delta) - phi_cdf(-smax - delta);
  const double half_pi = 1.57079632679489661923;
  auto g = [&](double ang) {
    const double s = smax * std::sin(ang);
    const double c = std::cos(ang);
    return phi_pdf(s - delta) * chi2_cdf_small(rest, smax * smax * c * c) *
           smax * c;
  };
  return integrate(g, -half_pi, half_pi, tol);
}

// Gamma(shape q, rate 1) expectation of h, computed with the z = r^2
// substitution so half-integer shapes stay smooth at the origin.  The range
// is pre-split so a bump confined near the origin cannot be skipped by the
// adaptive rule's sparse first samples.
inline double gamma_expect(double q, const std::function<double(double)>& h,
                           double tol = 1e-10) {
  const double rmax = std::sqrt(q + 14.0 * std::sqrt(q) + 90.0);
  const double norm = 2.0 / std::tgamma(q);
  auto g = [&](double r) {
    if (r <= 0) return 0.0;
    return norm * std::pow(r, 2.0 * q - 1.0) * std::exp(-r * r) * h(r * r);
  };
  const double cuts[] = {0.0, 0.1, 0.4, 1.0, 2.5, rmax};
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < sizeof(cuts) / sizeof(cuts[0]); ++i)
    total += integrate(g, cuts[i], std::min(cuts[i + 1], rmax), tol / 5.0);
  return total;
}

// --- composite oracles ------------------------------------------------------

// Mid-distribution value G_theta(t) for the ratio-of-gammas family with
// shapes (p, q) and noncentrality theta, by nested quadrature.
inline double ncbeta_mid_cdf(double p, double q, double theta, double t) {
  return gamma_expect(q, [&](double v) {
    return noncentral_gamma_cdf(p, theta, t * v);
  });
}

// P(mu >= mu0) for the location parameter behind a Student summary,
// via the chi-square mixture of normals.
inline double student_upper_prob(int n, double mean, double variance,
                                 double mu0) {
  const double nu = n - 1;
  const double a = std::sqrt(static_cast<double>(n)) * (mu0 - mean) /
                   std::sqrt(variance);
  return gamma_expect(0.5 * nu, [&](double z) {
    // z = y/2 for y ~ chi2_nu, so y/nu = 2z/nu
    return phi_cdf(-a * std::sqrt(2.0 * z / nu));
  });
}

// Double-quadrature value of the variance-ratio vote: the probability that
// a noncentral numerator stays below t times the denominator scale, with
// the inverse nuisance integrated against its gamma(q, rate u) law.
inline double anova_vote_oracle(double p, double q, double t, double u,
                                double theta1) {
  // w = z/u with z ~ gamma(q, 1)
  return 1.0 - gamma_expect(q, [&](double z) {
    const double w = z / u;
    return noncentral_gamma_cdf(p, theta1 * w, t * w);
  });
}

}  // namespace oracle
