#pragma once

// Choice between two fully specified discrete laws.
//
// A model lists outcomes with a base weight and two densities p0, p1.  The
// likelihood-ratio statistic K = p0/p1 (with 0/0 mapped to +infinity)
// partitions the outcomes into ratio classes; the simple tests indexed by
// (k, beta) are the monotone 0/1/beta test functions of K, ordered
// lexicographically.  An outcome's vote for decision 1 is the upper
// mid-tail of K at the observed class.

#include <expertvote/rational.hpp>

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace expertvote::simple {

template <class R>
struct TwoDensityModel {
  struct Outcome {
    std::string label;
    R t{};       // observation value, used for ordering in family views
    R weight{};  // base measure weight, > 0
    R p0{}, p1{};
  };
  std::vector<Outcome> outcomes;

  std::size_t index_of(std::string_view label) const {
    for (std::size_t i = 0; i < outcomes.size(); ++i)
      if (outcomes[i].label == label) return i;
    throw std::invalid_argument("unknown outcome label: " + std::string(label));
  }

  R mass0() const {
    R s = 0;
    for (const auto& o : outcomes) s += o.weight * o.p0;
    return s;
  }
  R mass1() const {
    R s = 0;
    for (const auto& o : outcomes) s += o.weight * o.p1;
    return s;
  }

  void validate() const {
    if (outcomes.empty()) throw std::invalid_argument("model has no outcomes");
    for (const auto& o : outcomes) {
      if (!(o.weight > 0)) throw std::invalid_argument("outcome weight must be positive: " + o.label);
      if (o.p0 < 0 || o.p1 < 0) throw std::invalid_argument("negative density at outcome " + o.label);
    }
    for (std::size_t i = 0; i < outcomes.size(); ++i)
      for (std::size_t j = i + 1; j < outcomes.size(); ++j)
        if (outcomes[i].label == outcomes[j].label)
          throw std::invalid_argument("duplicate outcome label: " + outcomes[i].label);
    check_normalized(mass0(), "p0");
    check_normalized(mass1(), "p1");
  }

 private:
  static void check_normalized(const R& s, const char* which) {
    if constexpr (is_exact_scalar_v<R>) {
      if (s != 1) throw std::invalid_argument(std::string(which) + " does not integrate to 1");
    } else {
      if (std::fabs(to_double(s) - 1.0) > 1e-12)
        throw std::invalid_argument(std::string(which) + " does not integrate to 1 within 1e-12");
    }
  }
};

// A maximal set of outcomes sharing one extended ratio value, with its mass
// under both laws.  Classes come back sorted by k, the infinite class last.
template <class R>
struct RatioClass {
  ExtReal<R> k;
  std::vector<std::size_t> members;
  R mass0{}, mass1{};
};

template <class R>
ExtReal<R> ratio_of(const typename TwoDensityModel<R>::Outcome& o) {
  if (o.p1 == 0) return ExtReal<R>::infinity();  // includes 0/0
  return ExtReal<R>::finite(o.p0 / o.p1);
}

template <class R>
std::vector<RatioClass<R>> ratio_classes(const TwoDensityModel<R>& model) {
  std::vector<RatioClass<R>> classes;
  for (std::size_t i = 0; i < model.outcomes.size(); ++i) {
    const auto& o = model.outcomes[i];
    const ExtReal<R> k = ratio_of<R>(o);
    auto it = std::find_if(classes.begin(), classes.end(),
                           [&](const RatioClass<R>& c) { return c.k == k; });
    if (it == classes.end()) {
      classes.push_back(RatioClass<R>{k, {}, R(0), R(0)});
      it = std::prev(classes.end());
    }
    it->members.push_back(i);
    it->mass0 += o.weight * o.p0;
    it->mass1 += o.weight * o.p1;
  }
  std::sort(classes.begin(), classes.end(),
            [](const RatioClass<R>& a, const RatioClass<R>& b) { return a.k < b.k; });
  return classes;
}

// Simple test phi = 1{K < k} + beta 1{K = k}.  Valid pairs are (0, 1),
// finite k > 0 with beta in [0, 1], and (inf, 0); the lexicographic order on
// (k, beta) refines the pointwise order of the test functions.
template <class R>
struct SimpleTest {
  ExtReal<R> k;
  R beta{};

  void validate() const {
    if (beta < 0 || beta > 1) throw std::invalid_argument("test beta outside [0, 1]");
    if (!k.inf && k.v < 0) throw std::invalid_argument("test threshold must be nonnegative");
    if (k.is_zero() && beta != 1) throw std::invalid_argument("threshold 0 requires beta = 1");
    if (k.inf && beta != 0) throw std::invalid_argument("infinite threshold requires beta = 0");
  }
};

template <class R>
int compare_tests(const SimpleTest<R>& a, const SimpleTest<R>& b) {
  if (a.k < b.k) return -1;
  if (b.k < a.k) return 1;
  if (a.beta < b.beta) return -1;
  if (b.beta < a.beta) return 1;
  return 0;
}

// E_theta(phi) over the chosen law (theta is 0 or 1).
template <class R>
R expert_mean(const std::vector<RatioClass<R>>& classes, const SimpleTest<R>& test,
              int theta) {
  if (theta != 0 && theta != 1) throw std::invalid_argument("theta must be 0 or 1");
  test.validate();
  R acc = 0;
  for (const auto& c : classes) {
    const R m = theta == 0 ? c.mass0 : c.mass1;
    if (c.k < test.k)
      acc += m;
    else if (c.k == test.k)
      acc += test.beta * m;
  }
  return acc;
}

template <class R>
R expert_mean(const TwoDensityModel<R>& model, const SimpleTest<R>& test, int theta) {
  return expert_mean(ratio_classes(model), test, theta);
}

template <class R>
struct VoteResult {
  R p_decide_1{};
  R p_decide_0() const { return R(1) - p_decide_1; }
};

template <class R>
VoteResult<R> vote_simple_at(const TwoDensityModel<R>& model, std::size_t idx, int theta) {
  if (theta != 0 && theta != 1) throw std::invalid_argument("theta must be 0 or 1");
  if (idx >= model.outcomes.size()) throw std::invalid_argument("outcome index out of range");
  const ExtReal<R> k = ratio_of<R>(model.outcomes[idx]);
  if (k.is_zero()) return {R(1)};
  if (k.inf) return {R(0)};
  const auto classes = ratio_classes(model);
  R acc = 0;
  for (const auto& c : classes) {
    const R m = theta == 0 ? c.mass0 : c.mass1;
    if (k < c.k)
      acc += m;
    else if (c.k == k)
      acc += m / R(2);
  }
  return {acc};
}

template <class R>
VoteResult<R> vote_simple(const TwoDensityModel<R>& model, std::string_view outcome,
                          int theta) {
  return vote_simple_at(model, model.index_of(outcome), theta);
}

template <class R>
VoteResult<R> vote_weighted(const TwoDensityModel<R>& model, std::string_view outcome,
                            const R& lambda) {
  if (lambda < 0 || lambda > 1) throw std::invalid_argument("lambda outside [0, 1]");
  const std::size_t idx = model.index_of(outcome);
  const R v0 = vote_simple_at(model, idx, 0).p_decide_1;
  const R v1 = vote_simple_at(model, idx, 1).p_decide_1;
  return {(R(1) - lambda) * v0 + lambda * v1};
}

// Posterior mass of decision 1 under the prior (1 - lambda, lambda) on the
// two laws, as a function of the observed ratio class alone.
template <class R>
R posterior_prob_1(const TwoDensityModel<R>& model, std::string_view outcome,
                   const R& lambda) {
  if (lambda < 0 || lambda > 1) throw std::invalid_argument("lambda outside [0, 1]");
  const ExtReal<R> k = ratio_of<R>(model.outcomes[model.index_of(outcome)]);
  if (k.is_zero()) return R(1);
  if (k.inf) return R(0);
  return (R(1) - lambda) / (lambda * k.v + R(1) - lambda);
}

}  // namespace expertvote::simple
