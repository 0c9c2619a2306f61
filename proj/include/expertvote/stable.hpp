#pragma once

// Ordered families of discrete laws with monotone likelihood ratios:
// per-pair normalized ratio functions, the degenerate half-lines, the
// essential block statistic, mid-CDF votes over a parameter split, and
// unilateral p-values for continuous mid-CDF families.

#include <expertvote/numerics.hpp>
#include <expertvote/rational.hpp>
#include <expertvote/simple_choice.hpp>

#include <algorithm>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace expertvote::stable {

using simple::VoteResult;

enum class Side { theta1 = 0, theta0 = 1 };  // lower and upper parameter sides
enum class PartitionScope { split, global };
enum class GapRule { left, mid, right };

template <class R>
struct DiscreteFamilyModel {
  struct Outcome {
    std::string label;
    R t{};
    R weight{};
  };
  std::vector<Outcome> outcomes;
  std::vector<R> thetas;                  // strictly increasing
  std::vector<std::vector<R>> densities;  // densities[j][i] for thetas[j]
  std::size_t split = 1;                  // thetas[0..split) form the lower side

  std::size_t index_of(std::string_view label) const {
    for (std::size_t i = 0; i < outcomes.size(); ++i)
      if (outcomes[i].label == label) return i;
    throw std::invalid_argument("unknown outcome label: " + std::string(label));
  }

  std::size_t theta_index(const R& theta) const {
    for (std::size_t j = 0; j < thetas.size(); ++j)
      if (thetas[j] == theta) return j;
    throw std::invalid_argument("theta value not in the model");
  }

  void validate() const {
    if (outcomes.empty()) throw std::invalid_argument("model has no outcomes");
    if (thetas.size() < 2) throw std::invalid_argument("model needs at least two thetas");
    if (split < 1 || split >= thetas.size())
      throw std::invalid_argument("split must leave both parameter sides nonempty");
    if (densities.size() != thetas.size())
      throw std::invalid_argument("density row count does not match thetas");
    for (std::size_t j = 1; j < thetas.size(); ++j)
      if (!(thetas[j - 1] < thetas[j]))
        throw std::invalid_argument("thetas must be strictly increasing");
    for (const auto& o : outcomes)
      if (!(o.weight > 0))
        throw std::invalid_argument("outcome weight must be positive: " + o.label);
    for (std::size_t i = 0; i < outcomes.size(); ++i)
      for (std::size_t j = i + 1; j < outcomes.size(); ++j)
        if (outcomes[i].label == outcomes[j].label)
          throw std::invalid_argument("duplicate outcome label: " + outcomes[i].label);
    for (std::size_t j = 0; j < densities.size(); ++j) {
      if (densities[j].size() != outcomes.size())
        throw std::invalid_argument("density row length does not match outcomes");
      R total = 0;
      for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (densities[j][i] < 0) throw std::invalid_argument("negative density");
        total += outcomes[i].weight * densities[j][i];
      }
      if constexpr (is_exact_scalar_v<R>) {
        if (total != 1) throw std::invalid_argument("density does not integrate to 1");
      } else {
        if (std::fabs(to_double(total) - 1.0) > 1e-12)
          throw std::invalid_argument("density does not integrate to 1 within 1e-12");
      }
    }
    validate_mlr();
  }

 private:
  // p_{theta''}/p_{theta'} nondecreasing along t, checked as cross products;
  // outcomes sharing a t value must carry proportional density columns.
  void validate_mlr() const {
    const std::size_t m = outcomes.size();
    for (std::size_t lo = 0; lo + 1 < thetas.size(); ++lo)
      for (std::size_t hi = lo + 1; hi < thetas.size(); ++hi)
        for (std::size_t a = 0; a < m; ++a)
          for (std::size_t b = 0; b < m; ++b) {
            if (!(outcomes[a].t < outcomes[b].t) &&
                !(outcomes[a].t == outcomes[b].t && a < b))
              continue;
            const R left = densities[hi][a] * densities[lo][b];
            const R right = densities[hi][b] * densities[lo][a];
            const bool bad = outcomes[a].t == outcomes[b].t ? left != right
                                                            : left > right;
            if (bad)
              throw std::invalid_argument(
                  "monotone likelihood ratio violated between outcomes " +
                  outcomes[a].label + " and " + outcomes[b].label);
          }
  }
};

// View of a two-density model as a 2-theta family: theta 0 carries the
// decision-1 law p1 (lower side), theta 1 carries p0.
template <class R>
DiscreteFamilyModel<R> as_family(const simple::TwoDensityModel<R>& m) {
  DiscreteFamilyModel<R> f;
  f.thetas = {R(0), R(1)};
  f.split = 1;
  f.densities.resize(2);
  for (const auto& o : m.outcomes) {
    f.outcomes.push_back({o.label, o.t, o.weight});
    f.densities[0].push_back(o.p1);
    f.densities[1].push_back(o.p0);
  }
  return f;
}

namespace detail {

template <class R>
std::vector<R> sorted_unique_ts(const DiscreteFamilyModel<R>& model) {
  std::vector<R> ts;
  for (const auto& o : model.outcomes) ts.push_back(o.t);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

template <class R>
std::size_t t_slot(const std::vector<R>& ts, const R& t) {
  return static_cast<std::size_t>(
      std::lower_bound(ts.begin(), ts.end(), t) - ts.begin());
}

// Mass of the law thetas[j] on the slice T = ts[ti].
template <class R>
R mass_at(const DiscreteFamilyModel<R>& model, const std::vector<R>& ts,
          std::size_t j, std::size_t ti) {
  R m = 0;
  for (std::size_t i = 0; i < model.outcomes.size(); ++i)
    if (model.outcomes[i].t == ts[ti])
      m += model.outcomes[i].weight * model.densities[j][i];
  return m;
}

}  // namespace detail

// Largest prefix of t-values nullifying every upper-side density, and
// largest suffix nullifying every lower-side density.
template <class R>
struct HalfLines {
  std::vector<R> ts;          // sorted unique t values
  std::size_t di_count = 0;   // ts[0..di_count) lie in d_i
  std::size_t ds_start = 0;   // ts[ds_start..) lie in d_s
  bool in_di(std::size_t ti) const { return ti < di_count; }
  bool in_ds(std::size_t ti) const { return ti >= ds_start; }
};

template <class R>
HalfLines<R> half_lines(const DiscreteFamilyModel<R>& model) {
  HalfLines<R> h;
  h.ts = detail::sorted_unique_ts(model);
  auto side_null = [&](std::size_t ti, bool upper) {
    for (std::size_t j = upper ? model.split : 0;
         j < (upper ? model.thetas.size() : model.split); ++j)
      if (detail::mass_at(model, h.ts, j, ti) != 0) return false;
    return true;
  };
  h.di_count = 0;
  while (h.di_count < h.ts.size() && side_null(h.di_count, true)) ++h.di_count;
  h.ds_start = h.ts.size();
  while (h.ds_start > 0 && side_null(h.ds_start - 1, false)) --h.ds_start;
  return h;
}

template <class R>
struct NormalizedRatios {
  std::vector<R> ts;
  std::vector<ExtReal<R>> values;  // nondecreasing extended ratios
};

namespace detail {

// Raw per-slice ratio of upper density over lower density; nullopt-style
// handling through a defined flag.
template <class R>
struct RawRatio {
  bool defined = false;
  ExtReal<R> value{};
};

template <class R>
RawRatio<R> raw_ratio(const DiscreteFamilyModel<R>& model, const std::vector<R>& ts,
                      std::size_t j_up, std::size_t j_low, std::size_t ti) {
  const R up = mass_at(model, ts, j_up, ti);
  const R low = mass_at(model, ts, j_low, ti);
  if (low == 0 && up == 0) return {false, {}};
  if (low == 0) return {true, ExtReal<R>::infinity()};
  return {true, ExtReal<R>::finite(up / low)};
}

template <class R>
ExtReal<R> gap_fill(const ExtReal<R>& left, const ExtReal<R>& right, GapRule rule) {
  switch (rule) {
    case GapRule::left:
      return left;
    case GapRule::right:
      return right;
    case GapRule::mid:
      if (left.inf) return left;
      if (right.inf) return ExtReal<R>::finite(left.v + 1);
      return ExtReal<R>::finite((left.v + right.v) / 2);
  }
  return left;
}

// One pair's ratio values over all t slices: each maximal undefined run
// inherits one constant between the neighbouring plateaus (step 1), then the
// model-level half-lines force 0 and +infinity (step 2, skipped for global
// scope).
template <class R>
std::vector<ExtReal<R>> filled_ratios(const DiscreteFamilyModel<R>& model,
                                      const std::vector<R>& ts, std::size_t j_up,
                                      std::size_t j_low, GapRule rule,
                                      const HalfLines<R>* pin) {
  const std::size_t n = ts.size();
  std::vector<RawRatio<R>> raw(n);
  for (std::size_t ti = 0; ti < n; ++ti)
    raw[ti] = raw_ratio(model, ts, j_up, j_low, ti);

  std::vector<ExtReal<R>> out(n);
  ExtReal<R> left = ExtReal<R>::finite(R(0));
  std::size_t ti = 0;
  while (ti < n) {
    if (raw[ti].defined) {
      out[ti] = raw[ti].value;
      left = out[ti];
      ++ti;
      continue;
    }
    std::size_t end = ti;
    while (end + 1 < n && !raw[end + 1].defined) ++end;
    const ExtReal<R> right =
        end + 1 < n ? raw[end + 1].value : ExtReal<R>::infinity();
    const ExtReal<R> fill = gap_fill(left, right, rule);
    for (std::size_t k = ti; k <= end; ++k) out[k] = fill;
    left = fill;
    ti = end + 1;
  }
  if (pin) {
    for (std::size_t ti = 0; ti < n; ++ti) {
      if (pin->in_ds(ti))
        out[ti] = ExtReal<R>::infinity();
      else if (pin->in_di(ti))
        out[ti] = ExtReal<R>::finite(R(0));
    }
  }
  for (std::size_t ti = 1; ti < n; ++ti)
    if (out[ti] < out[ti - 1])
      throw std::invalid_argument("monotone likelihood ratio violated");
  return out;
}

}  // namespace detail

// Normalized ratio function of one cross-split pair, on the unique sorted
// t values.
template <class R>
NormalizedRatios<R> normalize_ratios(const DiscreteFamilyModel<R>& model,
                                     std::size_t theta0_index,
                                     std::size_t theta1_index,
                                     GapRule rule = GapRule::left) {
  if (theta1_index >= model.split || theta0_index < model.split ||
      theta0_index >= model.thetas.size())
    throw std::invalid_argument("normalize_ratios needs one theta from each side");
  NormalizedRatios<R> nr;
  nr.ts = detail::sorted_unique_ts(model);
  const auto h = half_lines(model);
  nr.values = detail::filled_ratios(model, nr.ts, theta0_index, theta1_index,
                                    rule, &h);
  return nr;
}

template <class R>
struct EssentialPartition {
  std::vector<std::pair<R, R>> blocks;  // inclusive t ranges, in t order
  std::vector<int> block_index;         // per outcome: the value K(T(omega))
  std::vector<char> in_di_minus_ds;     // per outcome
  std::vector<char> in_ds;
  std::vector<char> indeterminate;      // all densities vanish at this t
};

// Groups t-values into maximal runs on which every selected pairwise ratio
// is constant.  Scope split uses the cross-split pairs with half-line
// pinning; scope global uses all ordered pairs without pinning.  Slices
// where every density vanishes sit in singleton blocks.
template <class R>
EssentialPartition<R> essential_partition(const DiscreteFamilyModel<R>& model,
                                          PartitionScope scope = PartitionScope::split,
                                          GapRule rule = GapRule::left) {
  const auto ts = detail::sorted_unique_ts(model);
  const std::size_t n = ts.size();
  const auto h = half_lines(model);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (upper, lower)
  if (scope == PartitionScope::split) {
    for (std::size_t j0 = model.split; j0 < model.thetas.size(); ++j0)
      for (std::size_t j1 = 0; j1 < model.split; ++j1) pairs.push_back({j0, j1});
  } else {
    for (std::size_t ja = 0; ja < model.thetas.size(); ++ja)
      for (std::size_t jb = ja + 1; jb < model.thetas.size(); ++jb)
        pairs.push_back({jb, ja});
  }

  std::vector<std::vector<ExtReal<R>>> vals;
  for (const auto& [up, low] : pairs)
    vals.push_back(detail::filled_ratios(
        model, ts, up, low, rule,
        scope == PartitionScope::split ? &h : nullptr));

  std::vector<char> t_indet(n, 0);
  for (std::size_t ti = 0; ti < n; ++ti) {
    bool all_zero = true;
    for (std::size_t j = 0; j < model.thetas.size() && all_zero; ++j)
      if (detail::mass_at(model, ts, j, ti) != 0) all_zero = false;
    t_indet[ti] = all_zero ? 1 : 0;
  }

  std::vector<int> t_block(n, 0);
  int next = 0;
  for (std::size_t ti = 0; ti < n; ++ti) {
    bool fresh = ti == 0 || t_indet[ti] || t_indet[ti - 1];
    if (!fresh)
      for (const auto& v : vals)
        if (!(v[ti] == v[ti - 1])) {
          fresh = true;
          break;
        }
    if (fresh && ti > 0) ++next;
    t_block[ti] = next;
  }

  EssentialPartition<R> part;
  part.blocks.assign(static_cast<std::size_t>(next) + 1, {R(0), R(0)});
  for (std::size_t ti = 0; ti < n; ++ti) {
    auto& blk = part.blocks[static_cast<std::size_t>(t_block[ti])];
    if (ti == 0 || t_block[ti] != t_block[ti - 1]) blk.first = ts[ti];
    blk.second = ts[ti];
  }
  for (const auto& o : model.outcomes) {
    const std::size_t ti = detail::t_slot(ts, o.t);
    part.block_index.push_back(t_block[ti]);
    part.in_ds.push_back(h.in_ds(ti) ? 1 : 0);
    part.in_di_minus_ds.push_back(h.in_di(ti) && !h.in_ds(ti) ? 1 : 0);
    part.indeterminate.push_back(t_indet[ti]);
  }
  return part;
}

namespace detail {

// Mid-CDF of the block statistic under thetas[j], evaluated at the block of
// the given outcome.
template <class R>
R block_mid_cdf(const DiscreteFamilyModel<R>& model, const EssentialPartition<R>& part,
                std::size_t j, int block) {
  R below = 0, at = 0;
  for (std::size_t i = 0; i < model.outcomes.size(); ++i) {
    const R m = model.outcomes[i].weight * model.densities[j][i];
    if (part.block_index[i] < block)
      below += m;
    else if (part.block_index[i] == block)
      at += m;
  }
  return below + at / 2;
}

}  // namespace detail

template <class R>
VoteResult<R> vote_stable(const DiscreteFamilyModel<R>& model,
                          std::string_view outcome, std::size_t theta_index,
                          GapRule rule = GapRule::left) {
  if (theta_index >= model.thetas.size())
    throw std::invalid_argument("theta index out of range");
  const std::size_t i = model.index_of(outcome);
  const auto part = essential_partition(model, PartitionScope::split, rule);
  if (part.in_ds[i]) return {R(0)};
  if (part.in_di_minus_ds[i]) return {R(1)};
  return {R(1) - detail::block_mid_cdf(model, part, theta_index, part.block_index[i])};
}

// Most favorable vote for one side of the split: the best case for
// decision 1 over the lower side, or for decision 0 over the upper side.
template <class R>
VoteResult<R> vote_most_favorable(const DiscreteFamilyModel<R>& model,
                                  std::string_view outcome, Side side) {
  const std::size_t i = model.index_of(outcome);
  const auto part = essential_partition(model);
  if (part.in_ds[i]) return {R(0)};
  if (part.in_di_minus_ds[i]) return {R(1)};
  bool first = true;
  R best = 0;
  const std::size_t lo = side == Side::theta1 ? 0 : model.split;
  const std::size_t hi = side == Side::theta1 ? model.split : model.thetas.size();
  for (std::size_t j = lo; j < hi; ++j) {
    const R p1 = R(1) - detail::block_mid_cdf(model, part, j, part.block_index[i]);
    if (first || (side == Side::theta1 ? p1 > best : p1 < best)) best = p1;
    first = false;
  }
  return {best};
}

// True when both sides' most favorable votes agree at every outcome.
template <class R>
bool adjacent_hypotheses(const DiscreteFamilyModel<R>& model) {
  for (const auto& o : model.outcomes) {
    const R a = vote_most_favorable(model, o.label, Side::theta1).p_decide_1;
    const R b = vote_most_favorable(model, o.label, Side::theta0).p_decide_1;
    if constexpr (is_exact_scalar_v<R>) {
      if (a != b) return false;
    } else {
      if (std::fabs(to_double(a) - to_double(b)) > 1e-12) return false;
    }
  }
  return true;
}

// Mixture vote under a probability vector over the thetas; the weights must
// be supported on a single side of the split.
template <class R>
VoteResult<R> vote_weighted_on_theta(const DiscreteFamilyModel<R>& model,
                                     std::string_view outcome,
                                     const std::vector<R>& weights) {
  if (weights.size() != model.thetas.size())
    throw std::invalid_argument("weight vector length does not match thetas");
  R total = 0;
  bool low = false, up = false;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (weights[j] < 0) throw std::invalid_argument("negative theta weight");
    if (weights[j] > 0) (j < model.split ? low : up) = true;
    total += weights[j];
  }
  if (low && up)
    throw std::invalid_argument("theta weights must stay on one side of the split");
  if constexpr (is_exact_scalar_v<R>) {
    if (total != 1) throw std::invalid_argument("theta weights must sum to 1");
  } else {
    if (std::fabs(to_double(total) - 1.0) > 1e-12)
      throw std::invalid_argument("theta weights must sum to 1 within 1e-12");
  }
  R acc = 0;
  for (std::size_t j = 0; j < weights.size(); ++j)
    if (weights[j] > 0)
      acc += weights[j] * vote_stable(model, outcome, j).p_decide_1;
  return {acc};
}

// Continuous family reduced to its mid-distribution evaluator.
struct MidCdf {
  std::function<double(double theta, double t)> g;
  double theta_lo = 0, theta_hi = 0;  // open interval ends, infinities allowed
  double t_lo = 0, t_hi = 0;
};

// Minimal rejection levels of the two opposed one-sided tests at theta0.
inline std::pair<double, double> unilateral_pvalue(const MidCdf& family,
                                                   double theta0, double t) {
  if (!(theta0 >= family.theta_lo && theta0 <= family.theta_hi))
    throw numeric_domain_error("theta outside the family's parameter interval");
  if (!(t >= family.t_lo && t <= family.t_hi))
    throw numeric_domain_error("t outside the statistic's range");
  const double g = num::clamp01(family.g(theta0, t));
  return {g, 1.0 - g};
}

template <class R>
std::pair<R, R> unilateral_pvalue(const DiscreteFamilyModel<R>& model,
                                  std::size_t theta_index, std::string_view outcome) {
  const auto v = vote_stable(model, outcome, theta_index);
  return {v.p_decide_0(), v.p_decide_1};
}

}  // namespace expertvote::stable
