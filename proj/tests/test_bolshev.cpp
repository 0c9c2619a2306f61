#include <expertvote/bolshev.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "support/models.hpp"

using namespace expertvote;
using bolshev::BolshevRule;
using bolshev::PlebisciteDecision;
using simple::SimpleTest;
using testmodels::reference_model;

namespace {

SimpleTest<Rat> ftest(const Rat& k, const Rat& beta) {
  return {ExtReal<Rat>::finite(k), beta};
}

// All simple tests on a beta grid, canonical order.
std::vector<SimpleTest<Rat>> grid_tests(const std::vector<simple::RatioClass<Rat>>& classes,
                                        int grid) {
  std::vector<SimpleTest<Rat>> tests;
  tests.push_back({ExtReal<Rat>::finite(Rat(0)), Rat(1)});
  for (const auto& c : classes) {
    if (c.k.is_zero() || c.k.inf) continue;
    for (int j = 0; j <= grid; ++j) tests.push_back({c.k, Rat(j, grid)});
  }
  tests.push_back({ExtReal<Rat>::infinity(), Rat(0)});
  return tests;
}

int apply_decision(const bolshev::TernaryDecisionDist<Rat>& d) {
  if (d.p1 == 1) return 1;
  if (d.p0 == 1) return 0;
  REQUIRE(d.p2 == 1);
  return 2;
}

}  // namespace

TEST_CASE("optimal rule on the reference model", "[bolshev]") {
  const auto m = reference_model<Rat>();

  const auto r1 = bolshev::bolshev_optimal(m, Rat(1, 10), Rat(1, 10));
  CHECK_FALSE(r1.non_unique);
  CHECK(r1.lower.k == ExtReal<Rat>::finite(Rat(1, 3)));
  CHECK(r1.lower.beta == Rat(3, 5));
  CHECK(r1.upper.k == ExtReal<Rat>::finite(Rat(3)));
  CHECK(r1.upper.beta == Rat(2, 5));
  CHECK(bolshev::risk_under_0(r1, m) == Rat(1, 10));
  CHECK(bolshev::risk_under_1(r1, m) == Rat(1, 10));

  // zero risk caps force abstention everywhere
  const auto r0 = bolshev::bolshev_optimal(m, Rat(0), Rat(0));
  CHECK_FALSE(r0.non_unique);
  CHECK(simple::expert_mean(m, r0.lower, 0) == 0);
  CHECK(Rat(1) - simple::expert_mean(m, r0.upper, 1) == 0);
  for (const char* w : {"A", "B", "C"}) {
    const auto d = bolshev::bolshev_apply(r0, m, w);
    CHECK(d.p2 == 1);
  }

  // crossing caps collapse to the single midpoint test
  const auto rx = bolshev::bolshev_optimal(m, Rat(3, 5), Rat(3, 5));
  CHECK(rx.non_unique);
  CHECK(rx.lower.k == ExtReal<Rat>::finite(Rat(1)));
  CHECK(rx.lower.beta == Rat(3, 5));
  CHECK(simple::compare_tests(rx.lower, rx.upper) == 0);
  for (const char* w : {"A", "B", "C"}) {
    const auto d = bolshev::bolshev_apply(rx, m, w);
    CHECK(d.p2 == 0);
    CHECK(d.p0 + d.p1 == 1);
  }
}

TEST_CASE("rule application on the reference model", "[bolshev]") {
  const auto m = reference_model<Rat>();
  const auto rule = bolshev::bolshev_optimal(m, Rat(1, 10), Rat(1, 10));
  const auto da = bolshev::bolshev_apply(rule, m, "A");
  CHECK(da.p0 == 0);
  CHECK(da.p1 == Rat(3, 5));
  CHECK(da.p2 == Rat(2, 5));
  const auto db = bolshev::bolshev_apply(rule, m, "B");
  CHECK(db.p0 == 0);
  CHECK(db.p1 == 0);
  CHECK(db.p2 == 1);
  const auto dc = bolshev::bolshev_apply(rule, m, "C");
  CHECK(dc.p0 == Rat(3, 5));
  CHECK(dc.p1 == 0);
  CHECK(dc.p2 == Rat(2, 5));
}

TEST_CASE("risk caps hold on random models", "[bolshev]") {
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<int> num(0, 24);
  for (int rep = 0; rep < 200; ++rep) {
    const auto m = testmodels::random_two_density(rng);
    const Rat a0(num(rng), 24), a1(num(rng), 24);
    const auto rule = bolshev::bolshev_optimal(m, a0, a1);
    CAPTURE(rep);
    CHECK(bolshev::risk_under_0(rule, m) <= a0);
    CHECK(bolshev::risk_under_1(rule, m) <= a1);
    for (const auto& o : m.outcomes) {
      const auto d = bolshev::bolshev_apply(rule, m, o.label);
      CHECK(d.p0 >= 0);
      CHECK(d.p1 >= 0);
      CHECK(d.p2 >= 0);
      CHECK(d.p0 + d.p1 + d.p2 == 1);
    }
  }
}

TEST_CASE("optimal rule minimizes abstention over a test grid", "[bolshev]") {
  std::mt19937_64 rng(808);
  std::uniform_int_distribution<int> num(0, 12);
  for (int rep = 0; rep < 20; ++rep) {
    const auto m = testmodels::random_two_density(rng, 5);
    const auto classes = simple::ratio_classes(m);
    const Rat a0(num(rng), 12), a1(num(rng), 12);
    const auto rule = bolshev::bolshev_optimal(m, a0, a1);
    const Rat opt_abst0 = simple::expert_mean(classes, rule.upper, 0) -
                          simple::expert_mean(classes, rule.lower, 0);
    const Rat opt_abst1 = simple::expert_mean(classes, rule.upper, 1) -
                          simple::expert_mean(classes, rule.lower, 1);

    const auto tests = grid_tests(classes, 8);
    std::vector<std::pair<Rat, Rat>> means;
    for (const auto& t : tests)
      means.push_back({simple::expert_mean(classes, t, 0),
                       simple::expert_mean(classes, t, 1)});
    for (size_t i = 0; i < tests.size(); ++i) {
      if (means[i].first > a0) continue;  // infeasible lower
      for (size_t j = 0; j < tests.size(); ++j) {
        if (bolshev::detail::compare_as_functions(classes, tests[i], tests[j]) > 0)
          continue;
        if (Rat(1) - means[j].second > a1) continue;  // infeasible upper
        CAPTURE(rep, i, j);
        CHECK(opt_abst0 <= means[j].first - means[i].first);
        CHECK(opt_abst1 <= means[j].second - means[i].second);
      }
    }
  }
}

TEST_CASE("plebiscite decisions on the reference model", "[bolshev]") {
  const auto m = reference_model<Rat>();
  const Rat a3(3, 10), a4(2, 5);
  CHECK(bolshev::plebiscite(m, "A", a3, a3) == PlebisciteDecision::decide_1);
  CHECK(bolshev::plebiscite(m, "B", a3, a3) == PlebisciteDecision::abstain);
  CHECK(bolshev::plebiscite(m, "B", a4, a4) == PlebisciteDecision::conflict);
  CHECK(bolshev::plebiscite(m, "C", a3, a3) == PlebisciteDecision::decide_0);
}

TEST_CASE("plebiscite coincides with the deterministic optimal rule", "[bolshev]") {
  // risk caps sitting exactly on cumulative class boundaries make the
  // optimal tests deterministic; the four-decision rule then reproduces the
  // three-decision one outcome by outcome.
  std::mt19937_64 rng(606);
  int exercised = 0;
  while (exercised < 25) {
    const auto m = testmodels::random_two_density(rng, 5);
    const auto classes = simple::ratio_classes(m);
    if (classes.front().k.is_zero() || classes.back().k.inf) continue;
    if (classes.size() < 2) continue;
    std::uniform_int_distribution<size_t> pick(0, classes.size() - 2);
    const size_t i = pick(rng);
    std::uniform_int_distribution<size_t> pick2(i, classes.size() - 1);
    const size_t j = pick2(rng);
    Rat a0 = 0, a1 = 1;
    for (size_t c = 0; c <= i; ++c) a0 += classes[c].mass0;
    for (size_t c = 0; c <= j; ++c) a1 -= classes[c].mass1;
    if (a0 >= 1 || a1 >= 1) continue;

    const auto rule = bolshev::bolshev_optimal(m, a0, a1);
    REQUIRE_FALSE(rule.non_unique);
    REQUIRE(rule.lower.beta == 1);
    REQUIRE(rule.upper.beta == 1);
    CHECK(rule.lower.k == classes[i].k);
    CHECK(rule.upper.k == classes[j].k);
    for (const auto& o : m.outcomes) {
      const auto pleb = bolshev::plebiscite(m, o.label, a0, a1);
      CHECK(pleb != PlebisciteDecision::conflict);
      const int det = apply_decision(bolshev::bolshev_apply(rule, m, o.label));
      CHECK(static_cast<int>(pleb) == det);
    }
    ++exercised;
  }
}

TEST_CASE("plebiscite is monotone in its thresholds", "[bolshev]") {
  std::mt19937_64 rng(1212);
  const std::vector<Rat> grid = {Rat(0), Rat(1, 8), Rat(1, 4), Rat(1, 2),
                                 Rat(3, 4), Rat(7, 8)};
  for (int rep = 0; rep < 15; ++rep) {
    const auto m = testmodels::random_two_density(rng);
    for (const auto& o : m.outcomes) {
      for (const Rat& a1 : grid) {
        bool locked = false;
        for (const Rat& a0 : grid) {  // ascending
          const auto d = bolshev::plebiscite(m, o.label, a0, a1);
          const bool in = d == PlebisciteDecision::decide_1 ||
                          d == PlebisciteDecision::conflict;
          if (locked) CHECK(in);
          locked = locked || in;
        }
      }
      for (const Rat& a0 : grid) {
        bool locked = false;
        for (const Rat& a1 : grid) {
          const auto d = bolshev::plebiscite(m, o.label, a0, a1);
          const bool in = d == PlebisciteDecision::decide_0 ||
                          d == PlebisciteDecision::conflict;
          if (locked) CHECK(in);
          locked = locked || in;
        }
      }
    }
  }
}

TEST_CASE("vote divergence values and antisymmetry", "[bolshev]") {
  const auto m = reference_model<Rat>();
  CHECK(bolshev::vote_divergence(m, "A") == Rat(-2, 3));
  CHECK(bolshev::vote_divergence(m, "B") == 0);
  CHECK(bolshev::vote_divergence(m, "C") == Rat(2, 3));

  simple::TwoDensityModel<Rat> sym;
  sym.outcomes.push_back({"a", Rat(0), Rat(1), Rat(1, 4), Rat(1, 4)});
  sym.outcomes.push_back({"b", Rat(1), Rat(2), Rat(3, 8), Rat(3, 8)});
  sym.validate();
  for (const auto& o : sym.outcomes) CHECK(bolshev::vote_divergence(sym, o.label) == 0);

  std::mt19937_64 rng(22);
  for (int rep = 0; rep < 25; ++rep) {
    const auto a = testmodels::random_two_density(rng);
    auto b = a;
    for (auto& o : b.outcomes) std::swap(o.p0, o.p1);
    for (const auto& o : a.outcomes) {
      CHECK(bolshev::vote_divergence(a, o.label) ==
            -bolshev::vote_divergence(b, o.label));
      CHECK(bolshev::vote_divergence(a, o.label) >= -1);
      CHECK(bolshev::vote_divergence(a, o.label) <= 1);
    }
  }
}

TEST_CASE("threshold and rule validation", "[bolshev]") {
  const auto m = reference_model<Rat>();
  CHECK_THROWS_AS(bolshev::plebiscite(m, "A", Rat(1), Rat(1, 2)), std::invalid_argument);
  CHECK_THROWS_AS(bolshev::plebiscite(m, "A", Rat(1, 2), Rat(1)), std::invalid_argument);
  CHECK_THROWS_AS(bolshev::bolshev_optimal(m, Rat(3, 2), Rat(1, 2)), std::invalid_argument);
  CHECK_THROWS_AS(bolshev::bolshev_optimal(m, Rat(1, 2), Rat(-1, 2)), std::invalid_argument);
  BolshevRule<Rat> bad{ftest(Rat(3), Rat(1, 2)), ftest(Rat(1, 3), Rat(1, 2)), false};
  CHECK_THROWS_AS(bolshev::bolshev_apply(bad, m, "A"), std::invalid_argument);
  const auto rule = bolshev::bolshev_optimal(m, Rat(1, 10), Rat(1, 10));
  CHECK_THROWS_AS(bolshev::bolshev_apply(rule, m, "Z"), std::invalid_argument);
}
