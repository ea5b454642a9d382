#include "bfm/model.hpp"

#include <algorithm>

namespace bfm {

void Instance::validate() const {
  if (costs.empty()) throw ValidationError("n >= 1: instance has no agents");
  for (std::size_t i = 0; i < costs.size(); ++i) {
    if (costs[i].sign() < 0) {
      throw ValidationError("costs nonnegative: cost[" + std::to_string(i) + "] = " + costs[i].str());
    }
  }
  if (budget.sign() <= 0) throw ValidationError("budget positive: budget = " + budget.str());
  if (valuation.size() != costs.size()) {
    throw ValidationError("valuation dimension = n: valuation covers " + std::to_string(valuation.size()) +
                          " agents, instance has " + std::to_string(costs.size()));
  }
}

Instance Instance::with_cost(AgentId agent, const Rational& bid) const {
  Instance out = *this;
  out.costs.at(agent) = bid;
  return out;
}

Rational Outcome::total_payment() const {
  Rational total(0);
  for (const auto& p : payments) total += p;
  return total;
}

void RandomizedOutcome::validate() const {
  Rational total(0);
  for (std::size_t b = 0; b < branches.size(); ++b) {
    if (branches[b].probability.sign() <= 0) {
      throw ValidationError("branch probabilities positive: branch " + std::to_string(b) + " has " +
                            branches[b].probability.str());
    }
    total += branches[b].probability;
  }
  if (total != Rational(1)) throw ValidationError("branch probabilities sum to 1: sum is " + total.str());
}

void validate_outcome(const Outcome& outcome, std::size_t n) {
  if (outcome.payments.size() != n) {
    throw ValidationError("payments dimension = n: got " + std::to_string(outcome.payments.size()));
  }
  if (!std::is_sorted(outcome.winners.begin(), outcome.winners.end()) ||
      std::adjacent_find(outcome.winners.begin(), outcome.winners.end()) != outcome.winners.end()) {
    throw ValidationError("winners sorted and unique");
  }
  for (const AgentId w : outcome.winners) {
    if (w >= n) throw ValidationError("winners in range: agent " + std::to_string(w));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (outcome.payments[i].sign() < 0) {
      throw ValidationError("no positive transfers: payment[" + std::to_string(i) + "] = " + outcome.payments[i].str());
    }
    if (!outcome.wins(i) && !outcome.payments[i].is_zero()) {
      throw ValidationError("normalized: loser " + std::to_string(i) + " paid " + outcome.payments[i].str());
    }
  }
}

}  // namespace bfm
