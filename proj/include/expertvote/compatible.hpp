#pragma once

// Compatible votes over the nested unilateral hypotheses of canonical
// one-parameter families, their extension to a probability distribution on
// the parameter line, weighted variants, and bilateral interval votes.

#include <expertvote/numerics.hpp>
#include <expertvote/simple_choice.hpp>
#include <expertvote/stable.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace expertvote::compat {

enum class Family {
  normal_location,
  uniform_location,
  uniform_scale,
  normal_scale,
  gamma_scale,
  poisson,
  binomial,
  noncentral_beta,
};

enum class Boundary { open, closed };

struct FamilyDescriptor {
  Family tag = Family::normal_location;
  double a = 1;  // normal_location: standard deviation of the mean statistic
  double m = 0;  // normal_scale: known mean
  double p = 1;  // gamma_scale / noncentral_beta shape
  double q = 1;  // noncentral_beta second shape
  long n = 1;    // poisson replicates / binomial trials

  static FamilyDescriptor normal_location(double a) {
    return {Family::normal_location, a, 0, 1, 1, 1};
  }
  static FamilyDescriptor uniform_location() {
    return {Family::uniform_location, 1, 0, 1, 1, 1};
  }
  static FamilyDescriptor uniform_scale() {
    return {Family::uniform_scale, 1, 0, 1, 1, 1};
  }
  static FamilyDescriptor normal_scale(double m) {
    return {Family::normal_scale, 1, m, 1, 1, 1};
  }
  static FamilyDescriptor gamma_scale(double p) {
    return {Family::gamma_scale, 1, 0, p, 1, 1};
  }
  static FamilyDescriptor poisson(long n) {
    return {Family::poisson, 1, 0, 1, 1, n};
  }
  static FamilyDescriptor binomial(long n) {
    return {Family::binomial, 1, 0, 1, 1, n};
  }
  static FamilyDescriptor noncentral_beta(double p, double q) {
    return {Family::noncentral_beta, 1, 0, p, q, 1};
  }

  void validate() const {
    switch (tag) {
      case Family::normal_location:
        if (!(a > 0)) throw std::invalid_argument("normal location needs a > 0");
        break;
      case Family::uniform_location:
      case Family::uniform_scale:
      case Family::normal_scale:
        break;
      case Family::gamma_scale:
        if (!(p > 0)) throw std::invalid_argument("gamma scale needs p > 0");
        break;
      case Family::poisson:
        if (n < 1) throw std::invalid_argument("poisson needs n >= 1 replicates");
        break;
      case Family::binomial:
        if (n < 1) throw std::invalid_argument("binomial needs n >= 1 trials");
        break;
      case Family::noncentral_beta:
        if (!(p > 0) || !(q > 0))
          throw std::invalid_argument("noncentral beta needs p > 0 and q > 0");
        break;
    }
  }

  // Closed parameter interval; scale parameters live on (0, inf) and are
  // checked strictly against the open end.
  std::pair<double, double> theta_interval() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (tag) {
      case Family::normal_location:
      case Family::uniform_location:
        return {-inf, inf};
      case Family::uniform_scale:
      case Family::normal_scale:
      case Family::gamma_scale:
        return {0, inf};
      case Family::poisson:
      case Family::noncentral_beta:
        return {0, inf};
      case Family::binomial:
        return {0, 1};
    }
    return {-inf, inf};
  }

  std::pair<double, double> t_range() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (tag) {
      case Family::normal_location:
      case Family::uniform_location:
        return {-inf, inf};
      case Family::uniform_scale:
      case Family::normal_scale:
      case Family::gamma_scale:
        return {0, inf};
      case Family::poisson:
      case Family::noncentral_beta:
        return {0, inf};
      case Family::binomial:
        return {0, static_cast<double>(n)};
    }
    return {-inf, inf};
  }

  void check_theta(double theta) const {
    const auto [lo, hi] = theta_interval();
    const bool open_at_zero = tag == Family::uniform_scale ||
                              tag == Family::normal_scale ||
                              tag == Family::gamma_scale;
    if (!(theta >= lo && theta <= hi) || (open_at_zero && theta <= 0))
      throw numeric_domain_error("theta outside the family's parameter interval");
  }

  void check_t(double t) const {
    const auto [lo, hi] = t_range();
    const bool open_at_zero = tag == Family::uniform_scale ||
                              tag == Family::normal_scale ||
                              tag == Family::gamma_scale;
    if (!(t >= lo && t <= hi) || (open_at_zero && t <= 0))
      throw numeric_domain_error("t outside the statistic's range");
    if (tag == Family::poisson || tag == Family::binomial) {
      if (std::fabs(t - std::nearbyint(t)) > 1e-9)
        throw numeric_domain_error("count statistic must be an integer");
    }
  }

  // Mid-distribution G_theta(t) = (P(T<t) + P(T<=t)) / 2.
  double mid_cdf(double theta, double t) const {
    validate();
    check_theta(theta);
    check_t(t);
    switch (tag) {
      case Family::normal_location:
        return num::normal_cdf((t - theta) / a);
      case Family::uniform_location:
        return num::clamp01((t - theta + 1) / 2);
      case Family::uniform_scale:
        return t >= theta ? 1.0 : t / theta;
      case Family::normal_scale:
        return 2 * num::normal_cdf(t / theta) - 1;
      case Family::gamma_scale:
        return num::reg_inc_gamma(p, t / theta);
      case Family::poisson: {
        const long k = std::lround(t);
        const double eta = static_cast<double>(n) * theta;
        const double up0 =
            k == 0 ? 1.0 : num::reg_inc_gamma(static_cast<double>(k), eta);
        const double up1 = num::reg_inc_gamma(static_cast<double>(k + 1), eta);
        return 1.0 - (up0 + up1) / 2;
      }
      case Family::binomial: {
        const long w = std::lround(t);
        const double up0 =
            w == 0 ? 1.0
                   : num::reg_inc_beta(static_cast<double>(w),
                                       static_cast<double>(n - w + 1), theta);
        const double up1 =
            w == n ? 0.0
                   : num::reg_inc_beta(static_cast<double>(w + 1),
                                       static_cast<double>(n - w), theta);
        return 1.0 - (up0 + up1) / 2;
      }
      case Family::noncentral_beta: {
        num::MixtureSeriesSpec spec;
        spec.eta = theta;
        spec.term = [this, t](long mm) {
          return num::beta_prime_cdf(p + static_cast<double>(mm), q, t);
        };
        return num::poisson_mixture_cdf(spec).value;
      }
    }
    throw std::invalid_argument("unknown family tag");
  }

  stable::MidCdf to_mid_cdf() const {
    validate();
    stable::MidCdf f;
    const auto [tl, th] = theta_interval();
    const auto [rl, rh] = t_range();
    f.theta_lo = tl;
    f.theta_hi = th;
    f.t_lo = rl;
    f.t_hi = rh;
    f.g = [d = *this](double theta, double t) { return d.mid_cdf(theta, t); };
    return f;
  }
};

struct Interval {
  double lo = 0, hi = 0;
  bool lo_closed = true, hi_closed = true;

  static Interval closed(double lo, double hi) { return {lo, hi, true, true}; }
  static Interval open(double lo, double hi) { return {lo, hi, false, false}; }
  static Interval below(double x, bool closed_end) {
    return {-std::numeric_limits<double>::infinity(), x, false, closed_end};
  }
  static Interval above(double x, bool closed_end) {
    return {x, std::numeric_limits<double>::infinity(), closed_end, false};
  }
  static Interval point(double x) { return {x, x, true, true}; }
};

struct ParamDistribution {
  struct Atom {
    double location;
    double mass;
  };
  struct Component {
    double weight;
    std::function<double(double)> cdf;      // normalized to the piece
    std::function<double(double)> density;  // piece density
    double lo, hi;                          // support interval
  };
  std::vector<Atom> atoms;
  std::vector<Component> components;

  void validate() const {
    double total = 0;
    for (const auto& at : atoms) {
      if (at.mass < -1e-12) throw std::invalid_argument("negative atom mass");
      total += at.mass;
    }
    for (const auto& c : components) {
      if (c.weight < -1e-12)
        throw std::invalid_argument("negative component weight");
      total += c.weight;
    }
    if (std::fabs(total - 1.0) > 1e-10)
      throw std::invalid_argument("parameter distribution mass is not 1");
  }

  double cdf(double x) const {
    double s = 0;
    for (const auto& at : atoms)
      if (at.location <= x) s += at.mass;
    for (const auto& c : components) {
      if (x < c.lo) continue;
      s += c.weight * (x >= c.hi ? 1.0 : num::clamp01(c.cdf(x)));
    }
    return num::clamp01(s);
  }

  // Components are absolutely continuous, so only the atom rule changes.
  double cdf_left(double x) const {
    double s = 0;
    for (const auto& at : atoms)
      if (at.location < x) s += at.mass;
    for (const auto& c : components) {
      if (x <= c.lo) continue;
      s += c.weight * (x >= c.hi ? 1.0 : num::clamp01(c.cdf(x)));
    }
    return num::clamp01(s);
  }

  double density(double x) const {
    double s = 0;
    for (const auto& c : components)
      if (x >= c.lo && x <= c.hi) s += c.weight * c.density(x);
    return s;
  }

  double interval_prob(const Interval& iv) const {
    if (!(iv.lo <= iv.hi)) throw std::invalid_argument("interval has lo > hi");
    const double upper = iv.hi_closed ? cdf(iv.hi) : cdf_left(iv.hi);
    const double lower = iv.lo_closed ? cdf_left(iv.lo) : cdf(iv.lo);
    return num::clamp01(upper - lower);
  }

  // Smallest x with P(theta <= x) >= prob.
  double quantile(double prob) const {
    if (!(prob >= 0 && prob <= 1))
      throw std::invalid_argument("quantile probability outside [0,1]");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& at : atoms) {
      lo = std::min(lo, at.location);
      hi = std::max(hi, at.location);
    }
    for (const auto& c : components) {
      lo = std::min(lo, c.lo);
      hi = std::max(hi, c.hi);
    }
    double flo = std::isfinite(lo) ? lo : -1;
    while (!std::isfinite(lo) && cdf(flo) >= prob && flo > -1e300) flo *= 2;
    double fhi = std::isfinite(hi) ? hi : std::max(1.0, flo + 1);
    while (!std::isfinite(hi) && cdf(fhi) < prob && fhi < 1e300) fhi *= 2;
    for (int it = 0;
         it < 400 && fhi - flo > 1e-13 * (1 + std::fabs(flo)) && flo < fhi;
         ++it) {
      const double mid = flo + (fhi - flo) / 2;
      if (cdf(mid) >= prob)
        fhi = mid;
      else
        flo = mid;
    }
    return fhi;
  }
};

inline double interval_prob(const ParamDistribution& dist, const Interval& iv) {
  return dist.interval_prob(iv);
}

namespace detail {

inline ParamDistribution::Component gamma_component(double weight, double shape,
                                                    double scale) {
  ParamDistribution::Component c;
  c.weight = weight;
  c.lo = 0;
  c.hi = std::numeric_limits<double>::infinity();
  c.cdf = [shape, scale](double x) {
    return x <= 0 ? 0.0 : num::reg_inc_gamma(shape, x / scale);
  };
  c.density = [shape, scale](double x) {
    if (x <= 0) return 0.0;
    const double z = x / scale;
    return std::exp((shape - 1) * std::log(z) - z - std::lgamma(shape)) / scale;
  };
  return c;
}

inline ParamDistribution::Component beta_component(double weight, double a,
                                                   double b) {
  ParamDistribution::Component c;
  c.weight = weight;
  c.lo = 0;
  c.hi = 1;
  c.cdf = [a, b](double x) { return num::reg_inc_beta(a, b, num::clamp01(x)); };
  c.density = [a, b](double x) {
    if (x <= 0 || x >= 1) return 0.0;
    return std::exp((a - 1) * std::log(x) + (b - 1) * std::log1p(-x) -
                    std::lgamma(a) - std::lgamma(b) + std::lgamma(a + b));
  };
  return c;
}

inline ParamDistribution::Component normal_component(double weight, double mu,
                                                     double sigma) {
  ParamDistribution::Component c;
  c.weight = weight;
  c.lo = -std::numeric_limits<double>::infinity();
  c.hi = std::numeric_limits<double>::infinity();
  c.cdf = [mu, sigma](double x) { return num::normal_cdf((x - mu) / sigma); };
  c.density = [mu, sigma](double x) {
    return num::normal_pdf((x - mu) / sigma) / sigma;
  };
  return c;
}

}  // namespace detail

// Distribution on the parameter line whose lower-interval probabilities are
// the compatible votes at the observed statistic.
inline ParamDistribution param_distribution(const FamilyDescriptor& fam,
                                            double t) {
  fam.validate();
  fam.check_t(t);
  constexpr double inf = std::numeric_limits<double>::infinity();
  ParamDistribution dist;
  switch (fam.tag) {
    case Family::normal_location:
      dist.components.push_back(detail::normal_component(1, t, fam.a));
      break;
    case Family::uniform_location: {
      ParamDistribution::Component c;
      c.weight = 1;
      c.lo = t - 1;
      c.hi = t + 1;
      c.cdf = [t](double x) { return num::clamp01((x - t + 1) / 2); };
      c.density = [](double) { return 0.5; };
      dist.components.push_back(c);
      break;
    }
    case Family::uniform_scale: {
      ParamDistribution::Component c;
      c.weight = 1;
      c.lo = t;
      c.hi = inf;
      c.cdf = [t](double x) { return x <= t ? 0.0 : 1.0 - t / x; };
      c.density = [t](double x) { return x < t ? 0.0 : t / (x * x); };
      dist.components.push_back(c);
      break;
    }
    case Family::normal_scale: {
      ParamDistribution::Component c;
      c.weight = 1;
      c.lo = 0;
      c.hi = inf;
      c.cdf = [t](double x) {
        return x <= 0 ? 0.0 : 2 * num::normal_cdf(-t / x);
      };
      c.density = [t](double x) {
        if (x <= 0) return 0.0;
        return 2 * num::normal_pdf(t / x) * t / (x * x);
      };
      dist.components.push_back(c);
      break;
    }
    case Family::gamma_scale: {
      ParamDistribution::Component c;
      c.weight = 1;
      c.lo = 0;
      c.hi = inf;
      const double p = fam.p;
      c.cdf = [p, t](double x) {
        return x <= 0 ? 0.0 : 1.0 - num::reg_inc_gamma(p, t / x);
      };
      c.density = [p, t](double x) {
        if (x <= 0) return 0.0;
        const double z = t / x;
        return std::exp(p * std::log(z) - z - std::lgamma(p)) / x;
      };
      dist.components.push_back(c);
      break;
    }
    case Family::poisson: {
      const long k = std::lround(t);
      const double scale = 1.0 / static_cast<double>(fam.n);
      if (k == 0) {
        dist.atoms.push_back({0.0, 0.5});
        dist.components.push_back(detail::gamma_component(0.5, 1, scale));
      } else {
        dist.components.push_back(
            detail::gamma_component(0.5, static_cast<double>(k), scale));
        dist.components.push_back(
            detail::gamma_component(0.5, static_cast<double>(k + 1), scale));
      }
      break;
    }
    case Family::binomial: {
      const long w = std::lround(t);
      const double nn = static_cast<double>(fam.n);
      if (w == 0) {
        dist.atoms.push_back({0.0, 0.5});
        dist.components.push_back(detail::beta_component(0.5, 1, nn));
      } else if (w == fam.n) {
        dist.components.push_back(detail::beta_component(0.5, nn, 1));
        dist.atoms.push_back({1.0, 0.5});
      } else {
        const double ww = static_cast<double>(w);
        dist.components.push_back(detail::beta_component(0.5, ww, nn - ww + 1));
        dist.components.push_back(detail::beta_component(0.5, ww + 1, nn - ww));
      }
      break;
    }
    case Family::noncentral_beta: {
      const double p = fam.p, q = fam.q;
      const double atom = 1.0 - num::beta_prime_cdf(p, q, t);
      dist.atoms.push_back({0.0, atom});
      if (atom < 1.0) {
        ParamDistribution::Component c;
        c.weight = 1.0 - atom;
        c.lo = 0;
        c.hi = inf;
        c.cdf = [p, q, t, atom, w = 1.0 - atom](double x) {
          if (x <= 0) return 0.0;
          num::MixtureSeriesSpec spec;
          spec.eta = x;
          spec.term = [p, q, t](long mm) {
            return 1.0 - num::beta_prime_cdf(p + static_cast<double>(mm), q, t);
          };
          return num::clamp01((num::poisson_mixture_cdf(spec).value - atom) / w);
        };
        c.density = [p, q, t, w = 1.0 - atom](double x) {
          if (x <= 0) return 0.0;
          num::MixtureSeriesSpec spec;
          spec.eta = x;
          spec.term = [p, q, t](long mm) {
            const double fm = num::beta_prime_cdf(p + static_cast<double>(mm), q, t);
            const double fm1 =
                num::beta_prime_cdf(p + static_cast<double>(mm) + 1, q, t);
            return fm - fm1;
          };
          return num::poisson_mixture_cdf(spec).value / w;
        };
        dist.components.push_back(c);
      }
      break;
    }
  }
  dist.validate();
  return dist;
}

// Most favorable vote for the lower hypothesis set bounded by theta_f, as a
// probability of deciding for it.
inline double compatible_vote(const FamilyDescriptor& fam, double t,
                              double theta_f, Boundary boundary) {
  fam.validate();
  fam.check_theta(theta_f);
  const auto dist = param_distribution(fam, t);
  return boundary == Boundary::closed ? dist.cdf(theta_f)
                                      : dist.cdf_left(theta_f);
}

struct PonderationSpec {
  double theta0 = 0;  // prior median
  double lambda = 0;  // pull toward the median
  double spread = 0;  // extra location uncertainty c

  void validate() const {
    if (!(lambda >= 0)) throw std::invalid_argument("pull lambda must be >= 0");
    if (!(spread >= 0)) throw std::invalid_argument("spread c must be >= 0");
  }
};

// Compatible votes for an expert who tempers the observation with a prior
// guess theta0: closed forms for the two worked families.
inline ParamDistribution param_distribution_weighted(const FamilyDescriptor& fam,
                                                     double t,
                                                     const PonderationSpec& spec) {
  fam.validate();
  fam.check_t(t);
  spec.validate();
  ParamDistribution dist;
  switch (fam.tag) {
    case Family::normal_location: {
      const double mu = (t + spec.lambda * spec.theta0) / (1 + spec.lambda);
      const double var = (fam.a * fam.a + spec.spread * spec.spread) /
                         ((1 + spec.lambda) * (1 + spec.lambda));
      dist.components.push_back(detail::normal_component(1, mu, std::sqrt(var)));
      break;
    }
    case Family::gamma_scale: {
      if (spec.spread != 0)
        throw std::invalid_argument(
            "gamma scale ponderation uses the pull only; spread must be 0");
      if (!(spec.theta0 > 0))
        throw std::invalid_argument("scale ponderation needs theta0 > 0");
      const double p = fam.p, lam = spec.lambda, th0 = spec.theta0;
      ParamDistribution::Component c;
      c.weight = 1;
      c.lo = 0;
      c.hi = std::numeric_limits<double>::infinity();
      auto zfun = [t, lam, th0](double x) {
        return t * std::pow(th0, lam) * std::pow(x, -(1 + lam));
      };
      c.cdf = [p, zfun](double x) {
        return x <= 0 ? 0.0 : 1.0 - num::reg_inc_gamma(p, zfun(x));
      };
      c.density = [p, lam, zfun](double x) {
        if (x <= 0) return 0.0;
        const double z = zfun(x);
        return (1 + lam) * std::exp(p * std::log(z) - z - std::lgamma(p)) / x;
      };
      dist.components.push_back(c);
      break;
    }
    default:
      throw std::invalid_argument(
          "weighted inference covers normal location and gamma scale only");
  }
  dist.validate();
  return dist;
}

// Vote about the interval hypothesis [theta1, theta2]: p_decide_0 is the
// parameter mass the observation grants to the interval.
inline simple::VoteResult<double> bilateral_vote(const FamilyDescriptor& fam,
                                                 double t, double theta1,
                                                 double theta2) {
  fam.validate();
  if (!(theta1 <= theta2))
    throw std::invalid_argument("bilateral vote needs theta1 <= theta2");
  fam.check_theta(theta1);
  fam.check_theta(theta2);
  const auto dist = param_distribution(fam, t);
  const double inside = dist.interval_prob(Interval::closed(theta1, theta2));
  return {1.0 - inside};
}

}  // namespace expertvote::compat
