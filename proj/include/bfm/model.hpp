#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bfm/rational.hpp"
#include "bfm/valuation.hpp"

namespace bfm {

// One budget-limited reverse auction: agent costs (bids), the buyer's budget
// and the buyer's valuation over agent subsets.
struct Instance {
  std::vector<Rational> costs;
  Rational budget;
  Valuation valuation;

  std::size_t n() const { return costs.size(); }

  // Throws ValidationError naming the first violated invariant.
  void validate() const;

  // Same instance with agent `agent` bidding `bid` instead.
  Instance with_cost(AgentId agent, const Rational& bid) const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

// Deterministic mechanism result: allocated set plus one payment per agent.
struct Outcome {
  AgentSet winners;
  std::vector<Rational> payments;

  static Outcome empty(std::size_t n) { return Outcome{{}, std::vector<Rational>(n, Rational(0))}; }
  Rational total_payment() const;
  bool wins(AgentId agent) const { return contains(winners, agent); }

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct OutcomeBranch {
  Rational probability;
  Outcome outcome;
  friend bool operator==(const OutcomeBranch&, const OutcomeBranch&) = default;
};

// Explicit finite distribution over outcomes. Probabilities are positive and
// sum to one.
struct RandomizedOutcome {
  std::vector<OutcomeBranch> branches;

  void validate() const;
  friend bool operator==(const RandomizedOutcome&, const RandomizedOutcome&) = default;
};

// Checks normalization (losers paid 0) and no positive transfers; throws
// ValidationError. Budget feasibility and IR are audited, not enforced.
void validate_outcome(const Outcome& outcome, std::size_t n);

}  // namespace bfm
