#pragma once

// Inference in the presence of a nuisance ("ghost") parameter: the normal
// mean with unknown variance, the variance-ratio vote series, the comparison
// of two binomial proportions, and a discrete expertisability check for a
// companion statistic.

#include <expertvote/compatible.hpp>
#include <expertvote/numerics.hpp>
#include <expertvote/rational.hpp>
#include <expertvote/simple_choice.hpp>

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace expertvote::ghost {

struct StudentSummary {
  long n = 2;
  double mean = 0;
  double variance = 0;  // s^2 with divisor n-1
  double mu0 = 0;

  void validate() const {
    if (n < 2) throw std::invalid_argument("student summary needs n >= 2");
    if (!(variance >= 0))
      throw std::invalid_argument("variance must be >= 0");
  }
};

// Law of the mean given the summary: Student with n-1 degrees of freedom,
// located at the sample mean, scale sqrt(s^2/n).
inline compat::ParamDistribution student_distribution(const StudentSummary& s) {
  s.validate();
  if (!(s.variance > 0))
    throw numeric_domain_error("student inference needs a positive variance");
  const double df = static_cast<double>(s.n - 1);
  const double scale = std::sqrt(s.variance / static_cast<double>(s.n));
  compat::ParamDistribution dist;
  compat::ParamDistribution::Component c;
  c.weight = 1;
  c.lo = -std::numeric_limits<double>::infinity();
  c.hi = std::numeric_limits<double>::infinity();
  c.cdf = [df, m = s.mean, scale](double x) {
    return num::student_cdf(df, (x - m) / scale);
  };
  c.density = [df, m = s.mean, scale](double x) {
    return num::student_pdf(df, (x - m) / scale) / scale;
  };
  dist.components.push_back(c);
  dist.validate();
  return dist;
}

// Vote about the mean against the threshold mu0.  p_decide_0 is the mass the
// mean law places on [mu0, inf), which is the minimal rejection threshold of
// the one-sided Student test: student_cdf(n-1, sqrt(n)(mean-mu0)/s).
inline simple::VoteResult<double> student_vote(const StudentSummary& s) {
  s.validate();
  if (!(s.variance > 0))
    throw numeric_domain_error("student inference needs a positive variance");
  const double df = static_cast<double>(s.n - 1);
  const double arg = std::sqrt(static_cast<double>(s.n)) * (s.mean - s.mu0) /
                     std::sqrt(s.variance);
  return {1.0 - num::student_cdf(df, arg)};
}

struct AnovaSummary {
  double p = 1;       // numerator shape
  double q = 1;       // denominator shape
  double t = 0;       // numerator statistic
  double u = 1;       // denominator statistic
  double theta1 = 0;  // upper bound of the voted noncentrality interval

  void validate() const {
    if (!(p > 0) || !(q > 0))
      throw std::invalid_argument("anova summary needs p > 0 and q > 0");
    if (!(t >= 0)) throw std::invalid_argument("anova summary needs t >= 0");
    if (!(u > 0)) throw std::invalid_argument("anova summary needs u > 0");
    if (!(theta1 >= 0))
      throw std::invalid_argument("anova summary needs theta1 >= 0");
  }
};

// Q^(t,u)([0, theta1]): one minus a negative-binomial-weighted series of
// beta-prime tails, truncated once the unconsumed weight mass drops below
// the tolerance.  tail_bound bounds the truncation error.
inline num::MixtureResult anova_vote(const AnovaSummary& s,
                                     double tail_tolerance = 1e-12) {
  s.validate();
  if (!(tail_tolerance > 0))
    throw numeric_domain_error("anova_vote needs a positive tolerance");
  const double x = s.t / (s.theta1 + s.u);
  if (s.theta1 == 0) return {1.0 - num::beta_prime_cdf(s.p, s.q, x), 0.0, 1};
  const double share = s.u / (s.theta1 + s.u);
  double w = std::exp(s.q * std::log(share));
  double acc = 0.0, cumw = 0.0;
  constexpr long kMaxTerms = 400000;
  for (long m = 0; m < kMaxTerms; ++m) {
    acc += w * num::beta_prime_cdf(s.p + static_cast<double>(m),
                                   s.q + static_cast<double>(m), x);
    cumw += w;
    const double tail = 1.0 - cumw;
    if (tail <= tail_tolerance)
      return {num::clamp01(1.0 - acc), tail > 0 ? tail : 0.0, m + 1};
    w *= (s.q + static_cast<double>(m)) * (1.0 - share) /
         static_cast<double>(m + 1);
  }
  throw numeric_domain_error("anova_vote: series iteration cap exceeded");
}

struct TwoBinomialSummary {
  long n1 = 1, n2 = 1;
  long x1 = 0, x2 = 0;

  void validate() const {
    if (n1 < 1 || n2 < 1)
      throw std::invalid_argument("two-binomial summary needs n1, n2 >= 1");
    if (x1 < 0 || x1 > n1 || x2 < 0 || x2 > n2)
      throw std::invalid_argument("counts must lie in [0, n]");
  }
};

namespace detail {

// One half-weight piece of a binomial parameter law: a Dirac at a support
// edge or a Beta with integer shapes.
struct BetaPiece {
  bool dirac = false;
  int location = 0;  // 0 or 1 when dirac
  long a = 1, b = 1;
};

inline std::array<BetaPiece, 2> binomial_pieces(long n, long x) {
  if (x == 0) return {BetaPiece{true, 0, 0, 0}, BetaPiece{false, 0, 1, n}};
  if (x == n) return {BetaPiece{false, 0, n, 1}, BetaPiece{true, 1, 0, 0}};
  return {BetaPiece{false, 0, x, n - x + 1}, BetaPiece{false, 0, x + 1, n - x}};
}

inline BigInt factorial_big(long k) {
  BigInt f = 1;
  for (long i = 2; i <= k; ++i) f *= i;
  return f;
}

inline BigInt binom_big(long n, long k) {
  if (k < 0 || k > n) return 0;
  BigInt b = factorial_big(n) / factorial_big(k);
  b /= factorial_big(n - k);
  return b;
}

// P(X <= Y) for independent X ~ Beta(a,b), Y ~ Beta(c,d) with integer
// shapes: P(X <= y) = P(Bin(a+b-1, y) >= a), so the answer is the expected
// upper binomial tail, a finite sum of beta-moment ratios.
inline Rat beta_leq_beta(long a, long b, long c, long d) {
  const long n = a + b - 1;
  Rat total = 0;
  for (long j = a; j <= n; ++j) {
    // C(n,j) * B(c+j, d+n-j) / B(c,d)
    BigInt num = binom_big(n, j) * factorial_big(c + j - 1);
    num *= factorial_big(d + n - j - 1);
    num *= factorial_big(c + d - 1);
    BigInt den = factorial_big(c + d + n - 1) * factorial_big(c - 1);
    den *= factorial_big(d - 1);
    Rat term = Rat(num) / Rat(den);
    total += term;
  }
  return total;
}

inline Rat piece_leq(const BetaPiece& lo, const BetaPiece& hi) {
  if (lo.dirac && hi.dirac)
    return lo.location <= hi.location ? Rat(1) : Rat(0);
  if (lo.dirac) return lo.location == 0 ? Rat(1) : Rat(0);
  if (hi.dirac) return hi.location == 1 ? Rat(1) : Rat(0);
  return beta_leq_beta(lo.a, lo.b, hi.a, hi.b);
}

}  // namespace detail

// P(p1 <= p2) for independent parameter laws of the two observed binomials.
// Coinciding edge Diracs count as the lower side winning: P(d_a <= d_a) = 1,
// P(0 <= Y) = 1, P(Y <= 1) = 1.  Interior cases involve no atom and need no
// convention.
inline Rat two_binomial_vote(const TwoBinomialSummary& s) {
  s.validate();
  const auto pieces1 = detail::binomial_pieces(s.n1, s.x1);
  const auto pieces2 = detail::binomial_pieces(s.n2, s.x2);
  Rat acc = 0;
  for (const auto& lo : pieces1)
    for (const auto& hi : pieces2) {
      Rat term = detail::piece_leq(lo, hi);
      acc += term;
    }
  Rat result = Rat(acc / 4);
  return result;
}

// Mass the two parameter laws put on exactly coinciding points (edge Diracs
// only; the continuous pieces never tie).
inline Rat two_binomial_tie_mass(const TwoBinomialSummary& s) {
  s.validate();
  const auto pieces1 = detail::binomial_pieces(s.n1, s.x1);
  const auto pieces2 = detail::binomial_pieces(s.n2, s.x2);
  Rat acc = 0;
  for (const auto& lo : pieces1)
    for (const auto& hi : pieces2)
      if (lo.dirac && hi.dirac && lo.location == hi.location)
        acc += Rat(1, 4);
  return acc;
}

// Finite two-parameter discrete model: theta rows the hypotheses split,
// upsilon rows the nuisance axis, and per-outcome statistic values (t, u).
template <class R>
struct TwoAxisFamilyModel {
  struct Cell {
    double t = 0;
    double u = 0;
  };
  std::vector<Cell> outcomes;
  std::size_t n_theta = 0;
  std::size_t n_upsilon = 0;
  // probs[i_theta * n_upsilon + i_upsilon][outcome]
  std::vector<std::vector<R>> probs;

  const std::vector<R>& row(std::size_t i_theta, std::size_t i_upsilon) const {
    return probs[i_theta * n_upsilon + i_upsilon];
  }

  void validate() const {
    if (outcomes.empty())
      throw std::invalid_argument("two-axis model has an empty support");
    if (n_theta < 2 || n_upsilon < 2)
      throw std::invalid_argument(
          "two-axis model needs at least two values on each parameter axis");
    if (probs.size() != n_theta * n_upsilon)
      throw std::invalid_argument("two-axis model row count mismatch");
    for (const auto& row : probs) {
      if (row.size() != outcomes.size())
        throw std::invalid_argument("two-axis model row width mismatch");
      R total = 0;
      for (const auto& v : row) {
        if (v < 0) throw std::invalid_argument("negative probability");
        total += v;
      }
      if constexpr (is_exact_scalar_v<R>) {
        if (total != 1) throw std::invalid_argument("row mass is not 1");
      } else {
        if (std::fabs(to_double(total) - 1.0) > 1e-12)
          throw std::invalid_argument("row mass is not 1");
      }
    }
  }
};

struct ExpertisableReport {
  bool expertisable = true;
  std::string detail;  // first violation found, empty when expertisable
};

namespace detail {

template <class R>
bool cross_equal(const R& a, const R& b, const R& c, const R& d) {
  // a/b == c/d by cross multiplication
  R lhs = a * d;
  R rhs = c * b;
  if constexpr (is_exact_scalar_v<R>) return lhs == rhs;
  else return std::fabs(to_double(lhs) - to_double(rhs)) <= 1e-12;
}

template <class R>
bool cross_at_least(const R& a, const R& b, const R& c, const R& d) {
  // a*d >= c*b
  R lhs = a * d;
  R rhs = c * b;
  if constexpr (is_exact_scalar_v<R>) return lhs >= rhs;
  else return to_double(lhs) >= to_double(rhs) - 1e-12;
}

}  // namespace detail

// Checks, on the discrete grid, that the conditional law of U given T = t is
// the same for every theta and is monotone-likelihood-ratio in upsilon.
// Slices with zero mass under a parameter pair are skipped: the conditional
// is undefined there.
template <class R>
ExpertisableReport ghost_expertisable_check(const TwoAxisFamilyModel<R>& model) {
  model.validate();
  const std::size_t n_out = model.outcomes.size();

  std::vector<double> ts;
  for (const auto& cell : model.outcomes) ts.push_back(cell.t);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  for (std::size_t si = 0; si < ts.size(); ++si) {
    const double t = ts[si];
    std::vector<std::size_t> slice;
    for (std::size_t i = 0; i < n_out; ++i)
      if (model.outcomes[i].t == t) slice.push_back(i);

    // Conditional law of U given T = t must not depend on theta.
    for (std::size_t iu = 0; iu < model.n_upsilon; ++iu) {
      std::size_t ref = model.n_theta;
      R ref_mass = 0;
      for (std::size_t it = 0; it < model.n_theta; ++it) {
        const auto& row = model.row(it, iu);
        R mass = 0;
        for (const std::size_t i : slice) mass += row[i];
        if (mass == 0) continue;
        if (ref == model.n_theta) {
          ref = it;
          ref_mass = mass;
          continue;
        }
        const auto& ref_row = model.row(ref, iu);
        for (const std::size_t i : slice)
          if (!detail::cross_equal(row[i], mass, ref_row[i], ref_mass)) {
            std::ostringstream os;
            os << "conditional law of U given T=" << t
               << " depends on theta: rows " << ref << " and " << it
               << " differ at upsilon " << iu << ", outcome " << i;
            return {false, os.str()};
          }
      }
    }

    // The theta-free conditional must be MLR in upsilon along u.
    std::vector<double> us;
    for (const std::size_t i : slice) us.push_back(model.outcomes[i].u);
    std::sort(us.begin(), us.end());
    us.erase(std::unique(us.begin(), us.end()), us.end());

    // Conditional slice masses per upsilon, taken at any theta with positive
    // slice mass (theta-freeness was just verified).
    std::vector<std::vector<R>> cond(model.n_upsilon);
    std::vector<R> norm(model.n_upsilon, R(0));
    for (std::size_t iu = 0; iu < model.n_upsilon; ++iu) {
      cond[iu].assign(us.size(), R(0));
      for (std::size_t it = 0; it < model.n_theta; ++it) {
        const auto& row = model.row(it, iu);
        R mass = 0;
        for (const std::size_t i : slice) mass += row[i];
        if (mass == 0) continue;
        norm[iu] = mass;
        for (const std::size_t i : slice) {
          const auto pos = std::lower_bound(us.begin(), us.end(),
                                            model.outcomes[i].u) -
                           us.begin();
          cond[iu][static_cast<std::size_t>(pos)] += row[i];
        }
        break;
      }
    }
    for (std::size_t u1 = 0; u1 < model.n_upsilon; ++u1)
      for (std::size_t u2 = u1 + 1; u2 < model.n_upsilon; ++u2) {
        if (norm[u1] == 0 || norm[u2] == 0) continue;
        for (std::size_t a = 0; a < us.size(); ++a)
          for (std::size_t b = a + 1; b < us.size(); ++b)
            // h_{u2}(b) h_{u1}(a) >= h_{u2}(a) h_{u1}(b); normalizers cancel
            if (!detail::cross_at_least(cond[u2][b], cond[u1][b], cond[u2][a],
                                        cond[u1][a])) {
              std::ostringstream os;
              os << "conditional law of U given T=" << t
                 << " is not MLR in upsilon: rows " << u1 << " and " << u2
                 << " cross at u=" << us[a] << " vs u=" << us[b];
              return {false, os.str()};
            }
      }
  }
  return {true, ""};
}

}  // namespace expertvote::ghost
