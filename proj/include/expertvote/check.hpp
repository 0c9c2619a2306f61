#pragma once

// Self-check suites behind the `check` subcommand: seeded property sweeps
// plus a table of frozen reference values.  Reports are plain data so the
// caller can render them as text or JSON; rendering the same suite with the
// same seed produces identical bytes.

#include <expertvote/bolshev.hpp>
#include <expertvote/compatible.hpp>
#include <expertvote/ghost.hpp>
#include <expertvote/rational.hpp>
#include <expertvote/simple_choice.hpp>
#include <expertvote/stable.hpp>

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace expertvote::check {

struct PropertyReport {
  std::string name;
  long cases = 0;
  double worst = 0;  // largest deviation seen, 0 when every case is exact
  double tolerance = 0;
  bool pass = true;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<PropertyReport> properties;

  bool pass() const {
    for (const auto& p : properties)
      if (!p.pass) return false;
    return true;
  }
};

namespace detail {

inline void record(PropertyReport& p, double deviation) {
  ++p.cases;
  if (deviation > p.worst) p.worst = deviation;
  if (deviation > p.tolerance) p.pass = false;
}

inline void record_exact(PropertyReport& p, const Rat& deviation) {
  ++p.cases;
  if (deviation != 0) {
    p.pass = false;
    const double d = std::fabs(to_double(deviation));
    if (d > p.worst) p.worst = d;
  }
}

inline simple::TwoDensityModel<Rat> random_two_density(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> classes(2, 6), numer(1, 9);
  const int n = classes(rng);
  std::vector<Rat> a(n), b(n);
  Rat sa = 0, sb = 0;
  for (int i = 0; i < n; ++i) {
    a[i] = numer(rng);
    b[i] = numer(rng);
    sa += a[i];
    sb += b[i];
  }
  simple::TwoDensityModel<Rat> m;
  for (int i = 0; i < n; ++i)
    m.outcomes.push_back({"w" + std::to_string(i), Rat(i), Rat(1),
                          Rat(a[i] / sa), Rat(b[i] / sb)});
  m.validate();
  return m;
}

// Geometric tilting of a positive base row gives a family with strictly
// increasing likelihood ratios between any two rows.
inline stable::DiscreteFamilyModel<Rat> random_mlr_family(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> sizes(3, 6), rows(2, 4), numer(1, 9);
  const int n = sizes(rng), k = rows(rng);
  std::vector<Rat> base(n);
  for (auto& v : base) v = numer(rng);
  std::vector<Rat> tilt;
  Rat cur = Rat(numer(rng), 10);
  for (int j = 0; j < k; ++j) {
    tilt.push_back(cur);
    cur += Rat(numer(rng), 4);
  }
  stable::DiscreteFamilyModel<Rat> m;
  for (int i = 0; i < n; ++i)
    m.outcomes.push_back({"w" + std::to_string(i), Rat(i), Rat(1)});
  m.thetas = tilt;
  std::uniform_int_distribution<int> cut(1, k - 1);
  m.split = static_cast<std::size_t>(cut(rng));
  for (int j = 0; j < k; ++j) {
    std::vector<Rat> row(n);
    Rat norm = 0, power = 1;
    for (int i = 0; i < n; ++i) {
      row[i] = Rat(base[i] * power);
      norm += row[i];
      power *= tilt[j];
    }
    for (auto& v : row) v /= norm;
    m.densities.push_back(std::move(row));
  }
  m.validate();
  return m;
}

struct FamilyGrid {
  compat::FamilyDescriptor fam;
  std::vector<double> ts;
  std::vector<double> thetas;  // ascending, inside the parameter interval
};

inline std::vector<FamilyGrid> family_grids() {
  using FD = compat::FamilyDescriptor;
  auto lin = [](double lo, double hi, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
    return v;
  };
  return {
      {FD::normal_location(1.0), {-1.3, 0.0, 0.7, 2.1}, lin(-3, 3, 13)},
      {FD::uniform_location(), {-0.4, 0.3, 1.1}, lin(-2.5, 2.5, 11)},
      {FD::uniform_scale(), {0.5, 1.5, 4.0}, lin(0.2, 6, 13)},
      {FD::normal_scale(2.0), {0.3, 1.0, 2.7}, lin(0.1, 5, 12)},
      {FD::gamma_scale(1.5), {0.4, 1.0, 3.5}, lin(0.1, 6, 12)},
      {FD::poisson(2), {0, 1, 3, 7}, lin(0.05, 5, 12)},
      {FD::binomial(6), {0, 2, 5, 6}, lin(0.02, 0.98, 13)},
      {FD::noncentral_beta(2.0, 3.0), {0.0, 0.8, 2.5}, lin(0.0, 6, 10)},
  };
}

}  // namespace detail

inline SuiteReport run_neutrality(std::uint64_t seed) {
  SuiteReport rep{"neutrality", seed, {}};
  std::mt19937_64 rng(seed);

  PropertyReport votes{"vote mean equals one half", 0, 0, 0, true};
  for (int r = 0; r < 100; ++r) {
    const auto m = detail::random_two_density(rng);
    for (int theta : {0, 1}) {
      Rat mean = 0;
      for (const auto& o : m.outcomes) {
        const Rat p = theta == 0 ? o.p0 : o.p1;
        mean += o.weight * p * simple::vote_simple(m, o.label, theta).p_decide_1;
      }
      detail::record_exact(votes, Rat(mean - Rat(1, 2)));
    }
  }
  rep.properties.push_back(votes);

  PropertyReport mid{"mid-distribution mean equals one half", 0, 0, 0, true};
  for (int r = 0; r < 40; ++r) {
    const auto m = detail::random_mlr_family(rng);
    for (std::size_t j = 0; j < m.thetas.size(); ++j) {
      Rat mean = 0;
      for (std::size_t i = 0; i < m.outcomes.size(); ++i) {
        Rat below = 0, at = 0;
        for (std::size_t l = 0; l < m.outcomes.size(); ++l) {
          const Rat mass = m.outcomes[l].weight * m.densities[j][l];
          if (m.outcomes[l].t < m.outcomes[i].t)
            below += mass;
          else if (m.outcomes[l].t == m.outcomes[i].t)
            at += mass;
        }
        mean += m.outcomes[i].weight * m.densities[j][i] * (below + at / 2);
      }
      detail::record_exact(mid, Rat(mean - Rat(1, 2)));
    }
  }
  rep.properties.push_back(mid);
  return rep;
}

inline SuiteReport run_monotonicity(std::uint64_t seed) {
  SuiteReport rep{"monotonicity", seed, {}};
  std::mt19937_64 rng(seed);

  PropertyReport comp{"compatible votes are nondecreasing in the voted bound",
                      0, 0, 1e-12, true};
  for (const auto& g : detail::family_grids()) {
    for (double t : g.ts) {
      for (auto boundary : {compat::Boundary::closed, compat::Boundary::open}) {
        double prev = -1;
        for (double th : g.thetas) {
          const double v = compat::compatible_vote(g.fam, t, th, boundary);
          detail::record(comp, std::max(0.0, prev - v));
          prev = v;
        }
      }
    }
  }
  rep.properties.push_back(comp);

  PropertyReport stab{"stable votes are nondecreasing along the family",
                      0, 0, 0, true};
  for (int r = 0; r < 40; ++r) {
    const auto m = detail::random_mlr_family(rng);
    for (const auto& o : m.outcomes) {
      Rat prev = 0;
      for (std::size_t j = 0; j < m.thetas.size(); ++j) {
        const Rat v = stable::vote_stable(m, o.label, j).p_decide_1;
        detail::record_exact(stab, Rat(j == 0 ? Rat(0) : Rat(prev > v ? prev - v : Rat(0))));
        prev = v;
      }
    }
  }
  rep.properties.push_back(stab);

  PropertyReport pleb{"plebiscite rejections tighten with the thresholds", 0, 0, 0, true};
  for (int r = 0; r < 20; ++r) {
    const auto m = detail::random_two_density(rng);
    const std::vector<Rat> alphas = {Rat(1, 20), Rat(1, 10), Rat(3, 10),
                                     Rat(1, 2), Rat(7, 10)};
    for (const auto& o : m.outcomes) {
      bool prev0 = false, prev1 = false;
      bool first = true;
      for (const auto& a : alphas) {
        const int d = static_cast<int>(bolshev::plebiscite(m, o.label, a, a));
        const bool rej0 = d == 1 || d == 3;
        const bool rej1 = d == 0 || d == 3;
        const bool bad = !first && ((prev0 && !rej0) || (prev1 && !rej1));
        detail::record_exact(pleb, Rat(bad ? 1 : 0));
        prev0 = rej0;
        prev1 = rej1;
        first = false;
      }
    }
  }
  rep.properties.push_back(pleb);
  return rep;
}

inline SuiteReport run_additivity(std::uint64_t seed) {
  SuiteReport rep{"additivity", seed, {}};
  std::mt19937_64 rng(seed);

  PropertyReport add{"interval probabilities add across a split", 0, 0, 1e-9, true};
  PropertyReport comp{"tail probabilities complement each other", 0, 0, 1e-9, true};
  for (const auto& g : detail::family_grids()) {
    for (double t : g.ts) {
      const auto dist = compat::param_distribution(g.fam, t);
      std::uniform_int_distribution<std::size_t> pick(0, g.thetas.size() - 1);
      for (int r = 0; r < 12; ++r) {
        double a = g.thetas[pick(rng)], b = g.thetas[pick(rng)], c = g.thetas[pick(rng)];
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        const double whole = dist.interval_prob({a, c, true, true});
        const double left = dist.interval_prob({a, b, true, false});
        const double right = dist.interval_prob({b, c, true, true});
        detail::record(add, std::fabs(left + right - whole));

        const double below = dist.interval_prob(compat::Interval::below(b, true));
        const double above = dist.interval_prob(compat::Interval::above(b, false));
        detail::record(comp, std::fabs(below + above - 1.0));
      }
    }
  }
  rep.properties.push_back(add);
  rep.properties.push_back(comp);

  PropertyReport lam{"weighted votes are affine in the mixing weight", 0, 0, 0, true};
  for (int r = 0; r < 60; ++r) {
    const auto m = detail::random_two_density(rng);
    std::uniform_int_distribution<int> numer(0, 8);
    const Rat lambda(numer(rng), 8);
    for (const auto& o : m.outcomes) {
      const Rat q0 = simple::vote_simple(m, o.label, 0).p_decide_1;
      const Rat q1 = simple::vote_simple(m, o.label, 1).p_decide_1;
      const Rat qw = simple::vote_weighted(m, o.label, lambda).p_decide_1;
      detail::record_exact(lam, Rat(qw - ((1 - lambda) * q0 + lambda * q1)));
    }
  }
  rep.properties.push_back(lam);
  return rep;
}

inline SuiteReport run_oracles(std::uint64_t seed) {
  SuiteReport rep{"oracles", seed, {}};

  {
    PropertyReport p{"golden vote table", 0, 0, 0, true};
    simple::TwoDensityModel<Rat> m;
    m.outcomes = {{"A", 0, 1, Rat(1, 6), Rat(1, 2)},
                  {"B", 1, 1, Rat(1, 3), Rat(1, 3)},
                  {"C", 2, 1, Rat(1, 2), Rat(1, 6)}};
    const Rat expected[3][3] = {{Rat(11, 12), Rat(5, 6), Rat(3, 4)},
                                {Rat(2, 3), Rat(1, 2), Rat(1, 3)},
                                {Rat(1, 4), Rat(1, 6), Rat(1, 12)}};
    const char* labels[3] = {"A", "B", "C"};
    const Rat lambdas[3] = {Rat(0), Rat(1, 2), Rat(1)};
    for (int i = 0; i < 3; ++i)
      for (int c = 0; c < 3; ++c) {
        const Rat v = simple::vote_weighted(m, labels[i], lambdas[c]).p_decide_1;
        detail::record_exact(p, Rat(v - expected[i][c]));
      }
    const Rat post[3] = {Rat(3, 4), Rat(1, 2), Rat(1, 4)};
    for (int i = 0; i < 3; ++i)
      detail::record_exact(
          p, Rat(simple::posterior_prob_1(m, labels[i], Rat(1, 2)) - post[i]));
    rep.properties.push_back(p);

    PropertyReport b{"threshold pair at level one tenth", 0, 0, 0, true};
    const auto rule = bolshev::bolshev_optimal(m, Rat(1, 10), Rat(1, 10));
    detail::record_exact(b, Rat(rule.lower.k.v - Rat(1, 3)));
    detail::record_exact(b, Rat(rule.lower.beta - Rat(3, 5)));
    detail::record_exact(b, Rat(rule.upper.k.v - Rat(3)));
    detail::record_exact(b, Rat(rule.upper.beta - Rat(2, 5)));
    rep.properties.push_back(b);
  }

  {
    PropertyReport p{"poisson parameter law closed form", 0, 0, 1e-12, true};
    const auto dist = compat::param_distribution(
        compat::FamilyDescriptor::poisson(1), 0.0);
    for (double x : {0.25, 0.5, 1.0, 2.0, 4.0})
      detail::record(p, std::fabs(dist.cdf(x) - (1.0 - 0.5 * std::exp(-x))));
    rep.properties.push_back(p);
  }

  {
    PropertyReport p{"normal parameter quantile", 0, 0, 1e-8, true};
    const auto dist = compat::param_distribution(
        compat::FamilyDescriptor::normal_location(1.0), 0.0);
    detail::record(p, std::fabs(dist.quantile(0.975) - 1.9599639845400545));
    detail::record(p, std::fabs(dist.quantile(0.5) - 0.0));
    rep.properties.push_back(p);
  }

  {
    PropertyReport p{"gamma pull closed form", 0, 0, 1e-10, true};
    const auto fam = compat::FamilyDescriptor::gamma_scale(1.0);
    for (double t : {0.5, 1.0, 2.5}) {
      for (double lambda : {0.0, 1.0, 3.0}) {
        const auto dist = compat::param_distribution_weighted(fam, t, {2.0, lambda, 0.0});
        for (double x : {0.4, 1.0, 3.0}) {
          const double bf = (1.0 + lambda) * std::log(x) - lambda * std::log(2.0);
          const double expect = std::exp(-std::exp(std::log(t) - bf));
          detail::record(p, std::fabs(dist.cdf(x) - expect));
        }
      }
    }
    rep.properties.push_back(p);
  }

  {
    PropertyReport p{"student location vote", 0, 0, 1e-12, true};
    const auto v = ghost::student_vote({4, 0.5, 1.0, 0.0});
    detail::record(p, std::fabs(v.p_decide_0() - 0.8044988905221148));
    rep.properties.push_back(p);
  }

  {
    PropertyReport p{"variance ratio vote closed form", 0, 0, 1e-12, true};
    const auto r = ghost::anova_vote({1.0, 1.0, 3.0, 2.0, 0.0});
    detail::record(p, std::fabs(r.value - 0.4));
    rep.properties.push_back(p);
  }

  {
    PropertyReport p{"two-binomial comparison table", 0, 0, 0, true};
    detail::record_exact(p, Rat(ghost::two_binomial_vote({1, 1, 0, 1}) - Rat(7, 8)));
    detail::record_exact(p, Rat(ghost::two_binomial_vote({1, 1, 1, 0}) - Rat(1, 8)));
    detail::record_exact(p, Rat(ghost::two_binomial_vote({1, 1, 0, 0}) - Rat(5, 8)));
    rep.properties.push_back(p);
  }

  return rep;
}

inline std::vector<SuiteReport> run_suites(const std::string& suite,
                                           std::uint64_t seed) {
  if (suite == "neutrality") return {run_neutrality(seed)};
  if (suite == "monotonicity") return {run_monotonicity(seed)};
  if (suite == "additivity") return {run_additivity(seed)};
  if (suite == "oracles") return {run_oracles(seed)};
  if (suite == "all")
    return {run_neutrality(seed), run_monotonicity(seed), run_additivity(seed),
            run_oracles(seed)};
  throw std::invalid_argument("unknown check suite: " + suite);
}

inline std::string render_text(const std::vector<SuiteReport>& reports) {
  std::ostringstream out;
  int failures = 0, total = 0;
  for (const auto& rep : reports) {
    out << "suite " << rep.suite << " (seed " << rep.seed << ")\n";
    for (const auto& p : rep.properties) {
      ++total;
      if (!p.pass) ++failures;
      out << "  " << (p.pass ? "pass" : "FAIL") << "  " << p.name << ": cases "
          << p.cases << ", worst deviation " << decimal_string(p.worst)
          << ", tolerance "
          << (p.tolerance == 0 ? std::string("exact")
                               : decimal_string(p.tolerance, 3))
          << "\n";
    }
  }
  out << (failures == 0 ? "PASS" : "FAIL") << " (" << total << " properties, "
      << failures << " failed)\n";
  return out.str();
}

}  // namespace expertvote::check
