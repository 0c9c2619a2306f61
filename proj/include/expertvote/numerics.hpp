#pragma once

// Double-precision special-function kernels.  Everything downstream
// (family CDFs, mixture series, quantiles) is built from these.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace expertvote {

// Raised when a kernel leaves its numeric domain: bad argument ranges,
// iteration caps, brackets that do not straddle the target.
struct numeric_domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace num {

inline constexpr int kMaxIter = 10000;
inline constexpr double kTiny = 1e-300;

inline double clamp01(double p) { return p < 0 ? 0 : (p > 1 ? 1 : p); }

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * 0.39894228040143267794;
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

// Lower regularized incomplete gamma P(a, x): series for x < a+1,
// Lentz continued fraction for the upper tail otherwise.
inline double reg_inc_gamma(double a, double x) {
  if (!(a > 0) || !(x >= 0))
    throw numeric_domain_error("reg_inc_gamma: need a > 0 and x >= 0");
  if (x == 0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < kMaxIter; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-16)
        return clamp01(sum * std::exp(-x + a * std::log(x) - lg));
    }
    throw numeric_domain_error("reg_inc_gamma: series iteration cap exceeded");
  }
  double b = x + 1.0 - a, c = 1.0 / kTiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16)
      return clamp01(1.0 - h * std::exp(-x + a * std::log(x) - lg));
  }
  throw numeric_domain_error("reg_inc_gamma: continued fraction iteration cap exceeded");
}

namespace detail {

inline double betacf(double a, double b, double x) {
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 3e-16) return h;
  }
  throw numeric_domain_error("reg_inc_beta: continued fraction iteration cap exceeded");
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0))
    throw numeric_domain_error("reg_inc_beta: need a > 0 and b > 0");
  if (!(x >= 0 && x <= 1))
    throw numeric_domain_error("reg_inc_beta: need x in [0, 1]");
  if (x == 0) return 0.0;
  if (x == 1) return 1.0;
  const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0))
    return clamp01(front * detail::betacf(a, b, x) / a);
  return clamp01(1.0 - front * detail::betacf(b, a, 1.0 - x) / b);
}

// CDF of the beta prime distribution with shape (p, q) at t >= 0.
inline double beta_prime_cdf(double p, double q, double t) {
  if (!(t >= 0)) throw numeric_domain_error("beta_prime_cdf: need t >= 0");
  return reg_inc_beta(p, q, t / (1.0 + t));
}

inline double student_cdf(int df, double x) {
  if (df < 1) throw numeric_domain_error("student_cdf: need df >= 1");
  if (x == 0) return 0.5;
  // Both beta arguments below are formed without cancellation; pick the
  // branch whose argument is the small one.
  const double xx = x * x;
  const double lower =  // P(T <= -|x|)
      xx <= df ? 0.5 * (1.0 - reg_inc_beta(0.5, 0.5 * df, xx / (df + xx)))
               : 0.5 * reg_inc_beta(0.5 * df, 0.5, df / (df + xx));
  return x > 0 ? 1.0 - lower : lower;
}

inline double student_pdf(int df, double x) {
  if (df < 1) throw numeric_domain_error("student_pdf: need df >= 1");
  const double nu = df;
  const double lc = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                    0.5 * std::log(nu * 3.14159265358979323846);
  return std::exp(lc - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

// Sum_m e^{-eta} eta^m / m! * term(m) for a bounded term sequence in [0, 1].
// Truncates once the unconsumed Poisson tail drops below tail_tolerance,
// which bounds the truncation error by that tail mass.
struct MixtureSeriesSpec {
  double eta = 0;
  std::function<double(long)> term;
  double tail_tolerance = 1e-12;
  long max_terms = 200000;
};

struct MixtureResult {
  double value = 0;
  double tail_bound = 0;
  long terms = 0;
};

inline MixtureResult poisson_mixture_cdf(const MixtureSeriesSpec& spec) {
  if (!(spec.eta >= 0) || !spec.term || !(spec.tail_tolerance > 0))
    throw numeric_domain_error("poisson_mixture_cdf: need eta >= 0, a term function and a positive tolerance");
  const double leta = spec.eta > 0 ? std::log(spec.eta) : 0.0;
  double lw = -spec.eta;  // log weight, kept in log space to survive large eta
  double acc = 0.0, cumw = 0.0;
  for (long m = 0; m < spec.max_terms; ++m) {
    const double w = std::exp(lw);
    acc += w * spec.term(m);
    cumw += w;
    const double tail = 1.0 - cumw;
    if (tail <= spec.tail_tolerance)
      return {clamp01(acc), tail > 0 ? tail : 0.0, m + 1};
    if (spec.eta == 0)
      break;  // all mass at m = 0 yet tail did not close: fp dust only
    lw += leta - std::log(static_cast<double>(m + 1));
  }
  if (spec.eta == 0) return {clamp01(acc), 0.0, 1};
  throw numeric_domain_error("poisson_mixture_cdf: iteration cap exceeded");
}

// Bracketed bisection for a nondecreasing cdf.  Stops at width 1e-12
// (relative) or when the cdf meets p to 1e-12; returns the smallest such x
// up to that resolution.
inline double invert_cdf(const std::function<double(double)>& cdf, double p,
                         double lo, double hi) {
  if (!(lo <= hi)) throw numeric_domain_error("invert_cdf: empty bracket");
  const double flo = cdf(lo), fhi = cdf(hi);
  if (!(flo <= p && p <= fhi))
    throw numeric_domain_error("invert_cdf: bracket does not straddle the target");
  double a = lo, b = hi;
  for (int i = 0; i < 500; ++i) {
    const double mid = 0.5 * (a + b);
    if (b - a <= 1e-12 * std::fmax(1.0, std::fmax(std::fabs(a), std::fabs(b))))
      return mid;
    const double fm = cdf(mid);
    if (std::fabs(fm - p) <= 1e-12) return mid;
    if (fm < p)
      a = mid;
    else
      b = mid;
  }
  throw numeric_domain_error("invert_cdf: iteration cap exceeded");
}

}  // namespace num
}  // namespace expertvote
