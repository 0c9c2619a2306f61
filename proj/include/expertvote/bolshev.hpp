#pragma once

// Three-decision rules built from pairs of simple tests, the optimal-rule
// construction under risk caps (alpha0, alpha1), the four-decision
// plebiscite rule driven by the expert votes, and the vote-divergence
// statistic.

#include <expertvote/simple_choice.hpp>

#include <stdexcept>
#include <string_view>
#include <vector>

namespace expertvote::bolshev {

using simple::RatioClass;
using simple::SimpleTest;
using simple::TwoDensityModel;

// lower <= upper as test functions; decision 1 is issued with the lower
// test's acceptance, decision 0 with the upper test's rejection, decision 2
// (abstention) fills the gap.
template <class R>
struct BolshevRule {
  SimpleTest<R> lower, upper;
  bool non_unique = false;
};

template <class R>
struct TernaryDecisionDist {
  R p0{}, p1{}, p2{};
};

enum class PlebisciteDecision { decide_0 = 0, decide_1 = 1, abstain = 2, conflict = 3 };

namespace detail {

// Value of phi_(k,beta) on the class with ratio kw.
template <class R>
R phi_value(const ExtReal<R>& kw, const SimpleTest<R>& test) {
  if (kw < test.k) return R(1);
  if (kw == test.k) return test.beta;
  return R(0);
}

// Rewrites boundary representations (k, 0) as the predecessor class with
// beta = 1, or as (0, 1) when nothing lies below; with this normal form the
// lexicographic order on (k, beta) coincides with the pointwise order of
// the test functions, which the uniqueness check relies on.
template <class R>
SimpleTest<R> canonicalize(const std::vector<RatioClass<R>>& classes,
                           SimpleTest<R> test) {
  if (test.beta != 0) return test;
  const RatioClass<R>* prev = nullptr;
  for (const auto& c : classes) {
    if (c.k < test.k)
      prev = &c;
    else
      break;
  }
  if (!prev) return {ExtReal<R>::finite(R(0)), R(1)};
  return {prev->k, R(1)};
}

template <class R>
int compare_as_functions(const std::vector<RatioClass<R>>& classes,
                         const SimpleTest<R>& a, const SimpleTest<R>& b) {
  return simple::compare_tests(canonicalize(classes, a), canonicalize(classes, b));
}

// Largest simple test whose mean under law 0 equals target; target must not
// exceed the mass of the finite classes under law 0.
template <class R>
SimpleTest<R> largest_test_with_mean0(const std::vector<RatioClass<R>>& classes,
                                      const R& target) {
  const RatioClass<R>* chosen = nullptr;
  R cum_before = 0, chosen_before = 0;
  for (const auto& c : classes) {
    if (c.k.inf) break;
    if (cum_before <= target) {
      chosen = &c;
      chosen_before = cum_before;
    }
    cum_before += c.mass0;
  }
  if (!chosen) return canonicalize(classes, {ExtReal<R>::finite(R(0)), R(1)});
  if (chosen->mass0 == 0)  // only the zero-ratio class, so target == 0
    return canonicalize(classes, {chosen->k, R(1)});
  return canonicalize(classes,
                      {chosen->k, (target - chosen_before) / chosen->mass0});
}

// Smallest simple test whose mean under law 1 equals etarget.
template <class R>
SimpleTest<R> smallest_test_with_mean1(const std::vector<RatioClass<R>>& classes,
                                       const R& etarget) {
  R cum_before = 0;
  for (const auto& c : classes) {
    const R cum_incl = cum_before + c.mass1;
    if (cum_incl >= etarget && c.mass1 > 0)
      return canonicalize(classes, {c.k, (etarget - cum_before) / c.mass1});
    cum_before = cum_incl;
  }
  return canonicalize(classes, {ExtReal<R>::finite(R(0)), R(1)});  // etarget == 0
}

}  // namespace detail

// Optimal rule: the lower test is the largest with mean alpha0 under law 0
// (capped by the mass below the infinite class), the upper test the
// smallest with complementary mean alpha1 under law 1 (capped by the mass
// above the zero class).  When the caps cross, a single test at the
// midpoint of the crossing interval (in cumulative law-0 mean) is returned
// and the rule is flagged non-unique.
template <class R>
BolshevRule<R> bolshev_optimal(const TwoDensityModel<R>& model, const R& alpha0,
                               const R& alpha1) {
  if (alpha0 < 0 || alpha0 > 1 || alpha1 < 0 || alpha1 > 1)
    throw std::invalid_argument("risk caps must lie in [0, 1]");
  const auto classes = simple::ratio_classes(model);
  R p0_inf = 0, p1_zero = 0;
  for (const auto& c : classes) {
    if (c.k.inf) p0_inf = c.mass0;
    if (c.k.is_zero()) p1_zero = c.mass1;
  }
  const R target0 = alpha0 < R(1) - p0_inf ? alpha0 : R(1) - p0_inf;
  const R target1 = alpha1 < R(1) - p1_zero ? alpha1 : R(1) - p1_zero;

  BolshevRule<R> rule;
  rule.lower = detail::largest_test_with_mean0(classes, target0);
  rule.upper = detail::smallest_test_with_mean1(classes, R(1) - target1);
  if (detail::compare_as_functions(classes, rule.lower, rule.upper) > 0) {
    const R e0_upper = simple::expert_mean(classes, rule.upper, 0);
    const R halfway = (target0 + e0_upper) / 2;
    const SimpleTest<R> mid = detail::largest_test_with_mean0(classes, halfway);
    rule.lower = mid;
    rule.upper = mid;
    rule.non_unique = true;
  }
  return rule;
}

template <class R>
TernaryDecisionDist<R> bolshev_apply(const BolshevRule<R>& rule,
                                     const TwoDensityModel<R>& model,
                                     std::string_view outcome) {
  rule.lower.validate();
  rule.upper.validate();
  const auto classes = simple::ratio_classes(model);
  if (detail::compare_as_functions(classes, rule.lower, rule.upper) > 0)
    throw std::invalid_argument("rule has lower test above upper test");
  const ExtReal<R> kw =
      simple::ratio_of<R>(model.outcomes[model.index_of(outcome)]);
  const R accept_lower = detail::phi_value(kw, rule.lower);
  const R accept_upper = detail::phi_value(kw, rule.upper);
  return {R(1) - accept_upper, accept_lower, accept_upper - accept_lower};
}

// Risks of a rule: chance of wrongly issuing decision 1 under law 0, and of
// wrongly issuing decision 0 under law 1.
template <class R>
R risk_under_0(const BolshevRule<R>& rule, const TwoDensityModel<R>& model) {
  return simple::expert_mean(model, rule.lower, 0);
}

template <class R>
R risk_under_1(const BolshevRule<R>& rule, const TwoDensityModel<R>& model) {
  return R(1) - simple::expert_mean(model, rule.upper, 1);
}

template <class R>
PlebisciteDecision plebiscite(const TwoDensityModel<R>& model,
                              std::string_view outcome, const R& alpha0,
                              const R& alpha1) {
  if (alpha0 < 0 || alpha0 >= 1 || alpha1 < 0 || alpha1 >= 1)
    throw std::invalid_argument("plebiscite thresholds must lie in [0, 1)");
  const std::size_t idx = model.index_of(outcome);
  const R q00 = simple::vote_simple_at(model, idx, 0).p_decide_0();
  const R q11 = simple::vote_simple_at(model, idx, 1).p_decide_1;
  const bool zero_rejected = q00 <= alpha0;
  const bool one_rejected = q11 <= alpha1;
  if (!zero_rejected && one_rejected) return PlebisciteDecision::decide_0;
  if (zero_rejected && !one_rejected) return PlebisciteDecision::decide_1;
  if (!zero_rejected && !one_rejected) return PlebisciteDecision::abstain;
  return PlebisciteDecision::conflict;
}

// Difference between the votes against each side: positive values lean
// toward decision 0, negative toward decision 1.
template <class R>
R vote_divergence(const TwoDensityModel<R>& model, std::string_view outcome) {
  const std::size_t idx = model.index_of(outcome);
  const R q10 = simple::vote_simple_at(model, idx, 1).p_decide_0();
  const R q01 = simple::vote_simple_at(model, idx, 0).p_decide_1;
  return q10 - q01;
}

}  // namespace expertvote::bolshev
