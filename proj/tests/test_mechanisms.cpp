#include "bfm/generators.hpp"
#include "bfm/mechanisms.hpp"
#include "bfm/verify.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bfm;
using bfm::test::additive;
using bfm::test::q;
using bfm::test::rs;

namespace {

Instance three_edges(const char* budget) {
  // a=0, b=1 on the left; x=0, y=1 on the right; unit costs.
  return Instance{rs({"1", "1", "1"}), q(budget),
                  Valuation(MatchingValuation{2, 2, {{0, 0, q("5")}, {0, 1, q("4")}, {1, 0, q("3")}}})};
}

// (e - 1)/(12e - 4) bracketed by truncated series for e.
std::pair<Rational, Rational> factor_bounds() {
  Rational e(0), term(1);
  for (long k = 0; k < 40; ++k) {
    if (k > 0) term /= Rational(k);
    e += term;
  }
  const Rational tail(1, 1000000000000000000L);  // far above the series remainder after 40 terms
  auto f = [](const Rational& x) { return (x - Rational(1)) / (Rational(12) * x - Rational(4)); };
  return {f(e), f(e + tail)};
}

}  // namespace

TEST_SUITE("mechanisms") {
  TEST_CASE("symmetric on the fair-share deviation instance") {
    const Outcome o = mech_symmetric(generate("appendixA", {{"eps", "1/10"}}, 0));
    CHECK(o.winners == AgentSet{0, 1});
    CHECK(o.payments == rs({"5", "5", "0"}));
  }

  TEST_CASE("symmetric cutoff and next-cost payment") {
    const Outcome o = mech_symmetric(test::symmetric({"1", "1", "1", "1"}, {"1", "2", "3", "4"}, "6"));
    CHECK(o.winners == AgentSet{0, 1});
    CHECK(o.payments == rs({"3", "3", "0", "0"}));
  }

  TEST_CASE("symmetric lower-bound instance") {
    const Outcome o = mech_symmetric(generate("symmetric_lb", {}, 0));
    CHECK(o.winners == AgentSet{0});
    CHECK(o.payments[0] == q("99/100"));
  }

  TEST_CASE("symmetric with nothing affordable") {
    const Outcome o = mech_symmetric(test::symmetric({"1", "1"}, {"3", "4"}, "2"));
    CHECK(o == Outcome::empty(2));
  }

  TEST_CASE("symmetric fair-share variant pays B/k") {
    const Outcome o = mech_symmetric(generate("appendixA", {{"eps", "1/10"}, {"deviated", "1"}}, 0),
                                     SymmetricPayment::kFairShare);
    CHECK(o.winners == AgentSet{0, 2});
    CHECK(o.payments == rs({"5", "0", "5"}));
    const Outcome t = mech_symmetric(generate("appendixA", {{"eps", "1/10"}, {"deviated", "1"}}, 0));
    CHECK(t.payments == rs({"49/10", "0", "49/10"}));
  }

  TEST_CASE("knapsack top item branch") {
    const Outcome o = mech_knapsack(additive({"6", "4", "2"}, {"2", "2", "2"}, "6"));
    CHECK(o.winners == AgentSet{0});
    CHECK(o.payments[0] == Rational(6));
  }

  TEST_CASE("knapsack single agent is paid the budget") {
    const Outcome o = mech_knapsack(additive({"5"}, {"1"}, "10"));
    CHECK(o.winners == AgentSet{0});
    CHECK(o.payments[0] == Rational(10));
  }

  TEST_CASE("knapsack greedy branch with tight conditions") {
    const Outcome o = mech_knapsack(additive({"1", "1", "1"}, {"1", "1", "1"}, "3"));
    CHECK(o.winners == AgentSet{0, 1, 2});
    CHECK(o.payments == rs({"1", "1", "1"}));
    CHECK(o.total_payment() == Rational(3));
  }

  TEST_CASE("knapsack payments are thresholds") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      const Instance inst = generate("random_additive", {{"n", "6"}}, seed);
      const AuditReport r = audit_truthfulness(find_mechanism("knapsack"), inst);
      CAPTURE(seed);
      CAPTURE(r.to_json());
      REQUIRE(r.passed());
    }
  }

  TEST_CASE("matching three-edge example") {
    const Outcome o = mech_matching(three_edges("4"));
    CHECK(o.winners == AgentSet{1, 2});
    CHECK(o.payments == rs({"0", "16/7", "12/7"}));
    CHECK(o.total_payment() == Rational(4));
    CHECK(mech_matching_neighbor(three_edges("4")) == o);
  }

  TEST_CASE("matching single edge") {
    const Instance inst{rs({"1"}), q("3"), Valuation(MatchingValuation{1, 1, {{0, 0, q("2")}}})};
    const Outcome o = mech_matching(inst);
    CHECK(o.winners == AgentSet{0});
    CHECK(o.payments[0] == Rational(3));
  }

  TEST_CASE("matching prefers the set on equal value") {
    // Top edge weight 5; the other two are disjoint and sum to 5.
    const Instance inst{rs({"1", "1", "1"}), q("4"),
                        Valuation(MatchingValuation{2, 2, {{0, 0, q("5")}, {0, 1, q("2")}, {1, 0, q("3")}}})};
    CHECK(matching_allocation(inst) == AgentSet{1, 2});
  }

  TEST_CASE("matching neighbor formula is not a threshold") {
    const Instance inst = generate("random_matching", {{"n", "7"}}, 5);
    const Outcome neighbor = mech_matching_neighbor(inst);
    CHECK(neighbor.winners == mech_matching(inst).winners);
    CHECK_FALSE(audit_outcome(inst, neighbor).passed());
    CHECK(audit_outcome(inst, mech_matching(inst)).passed());
    CHECK(audit_truthfulness(find_mechanism("matching"), inst).passed());
  }

  TEST_CASE("scaled budget factor is the floor at 10^-18") {
    const auto [lo, hi] = factor_bounds();
    const Rational& f = scaled_budget_factor();
    const Rational step(1, 1000000000000000000L);
    CHECK(f <= lo);
    CHECK(hi < f + step);
    CHECK(f.denominator_str() == "500000000000000000");
  }

  TEST_CASE("randomized mechanism on the coverage deviation instance") {
    const Instance inst = generate("appendixB_coverage", {}, 0);
    const RandomizedOutcome r = mech_submodular(inst);
    REQUIRE(r.branches.size() == 2);
    CHECK(r.branches[0].probability == q("1/2"));
    CHECK(r.branches[1].probability == q("1/2"));
    CHECK(r.branches[0].outcome.winners == AgentSet{2});
    CHECK(r.branches[0].outcome.payments[2] == q("1/2"));
    CHECK(r.branches[1].outcome.winners == AgentSet{0});
    CHECK(r.branches[1].outcome.payments[0] == Rational(1));
    CHECK(expected_value(r, inst) == q("13/2"));
    CHECK(*approximation_ratio(r, inst) == q("30/13"));
  }

  TEST_CASE("randomized mechanism with no cheap agents") {
    const Instance inst = test::symmetric({"2", "1", "1"}, {"3/4", "4/5", "9/10"}, "1");
    const RandomizedOutcome r = mech_submodular(inst);
    CHECK(r.branches[0].outcome == Outcome::empty(3));
    CHECK(r.branches[1].outcome.winners == AgentSet{0});
    CHECK(r.branches[1].outcome.payments[0] == Rational(1));
  }

  TEST_CASE("randomized mechanism pays within budget per branch") {
    for (const char* family : {"random_symmetric", "random_additive", "random_coverage", "random_matching"}) {
      for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const RandomizedOutcome r = mech_submodular(generate(family, {{"n", "8"}}, seed));
        Rational total(0);
        for (const auto& b : r.branches) {
          total += b.probability;
          CHECK(b.outcome.total_payment() <= Rational(1));
        }
        CHECK(total == Rational(1));
      }
    }
  }

  TEST_CASE("naive maximum on the coverage deviation instance") {
    Instance inst = generate("appendixB_coverage", {}, 0);
    CHECK(naive_max_allocation(inst) == AgentSet{1, 2});
    inst.costs[2] = q("1/4");
    CHECK(naive_max_allocation(inst) == AgentSet{0});
  }

  TEST_CASE("naive maximum and knapsack allocations overlap but differ on additive instances") {
    std::size_t same = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
      const Instance inst = generate("random_additive", {{"n", "7"}}, seed);
      same += naive_max_allocation(inst) == knapsack_allocation(inst);
      ++total;
    }
    CHECK(same > 0);
    CHECK(same < total);
  }

  TEST_CASE("Shapley sharing on a single covering agent") {
    const Instance inst{rs({"1/2", "1/2"}), q("1"), Valuation(CoverageValuation{3, {{0, 1, 2}, {0}}})};
    const Outcome o = mech_shapley_coverage(inst);
    CHECK(o.winners == AgentSet{0});
    CHECK(o.payments[0] == Rational(1));
  }

  TEST_CASE("Shapley sharing stops early on the chain") {
    const Instance inst = generate("shapley_chain", {{"n", "16"}}, 0);
    const Outcome o = mech_shapley_coverage(inst);
    CHECK(inst.valuation.evaluate(o.winners) <= Rational(8));
    CHECK(brute_force_opt(inst).value == Rational(17));
    CHECK(o.total_payment() <= inst.budget);
    CHECK(audit_outcome(inst, o).passed());
  }

  TEST_CASE("family mismatch") {
    const Instance cov = generate("appendixB_coverage", {}, 0);
    CHECK_THROWS_AS(mech_knapsack(cov), MechanismMismatch);
    CHECK_THROWS_AS(mech_symmetric(cov), MechanismMismatch);
    CHECK_THROWS_AS(mech_matching(cov), MechanismMismatch);
    CHECK_THROWS_AS(mech_shapley_coverage(generate("random_additive", {}, 0)), MechanismMismatch);
    CHECK_THROWS_AS(find_mechanism("knapsack").run(cov), MechanismMismatch);
    CHECK_NOTHROW(find_mechanism("submodular").run(cov));
  }

  TEST_CASE("agents above the budget never win") {
    const Instance inst = additive({"100", "1"}, {"2", "1/2"}, "1");
    CHECK(knapsack_allocation(inst) == AgentSet{1});
    CHECK(mech_knapsack(inst).payments[1] == Rational(1));
  }

  TEST_CASE("registry") {
    CHECK_THROWS_WITH_AS(find_mechanism("vcg"), doctest::Contains("knapsack"), std::invalid_argument);
    for (const auto& m : mechanisms()) {
      Rational total(0);
      for (const auto& b : m.branches) total += b.probability;
      CHECK(total == Rational(1));
    }
  }
}
