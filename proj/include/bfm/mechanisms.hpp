#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfm/greedy.hpp"
#include "bfm/model.hpp"

namespace bfm {

// Mechanism applied to a valuation family it does not support.
class MechanismMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Agents whose bid does not exceed the budget. Every mechanism discards the
// others before running: they can never be paid their cost.
AgentSet eligible_agents(const Instance& instance);

// Lower rational approximation of (e-1)/(12e-4) with denominator 10^18.
const Rational& scaled_budget_factor();

enum class SymmetricPayment { kThreshold, kFairShare };

// Cheapest-first; k the largest index with c_k <= B/k. Winners are paid
// min(B/k, c_{k+1}), or B/k for every winner under kFairShare.
Outcome mech_symmetric(const Instance& instance, SymmetricPayment rule = SymmetricPayment::kThreshold);
AgentSet symmetric_allocation(const Instance& instance);

Outcome mech_knapsack(const Instance& instance);
AgentSet knapsack_allocation(const Instance& instance);

// Max-weight edge alone (paid B) or the proportional-share set over the rest,
// whichever is worth more. Set members are paid their exact threshold bid.
Outcome mech_matching(const Instance& instance);
// Same allocation, paid min(w_e B / sum w, w_e c_r / w_r) with r the cheapest
// per unit weight among e's neighbors and the first rejected edge. This is
// not the threshold in general (it can fall below cost); kept for comparison.
Outcome mech_matching_neighbor(const Instance& instance);
AgentSet matching_allocation(const Instance& instance);

// Both branches of the randomized mechanism, probability 1/2 each.
RandomizedOutcome mech_submodular(const Instance& instance);
Outcome submodular_greedy_branch(const Instance& instance);
AgentSet submodular_greedy_allocation(const Instance& instance);
Outcome submodular_max_branch(const Instance& instance);
AgentSet submodular_max_allocation(const Instance& instance);

// Greedy with Shapley-value cost sharing; not truthful, shipped for comparison.
Outcome mech_shapley_coverage(const Instance& instance);
AgentSet shapley_allocation(const Instance& instance);

// Best of the proportional-share set over the others and the top singleton.
// Not monotone; shipped for comparison.
Outcome mech_naive_max(const Instance& instance);
AgentSet naive_max_allocation(const Instance& instance);

// Deterministic component of a (possibly randomized) mechanism.
struct DeterministicRule {
  std::string name;
  Rational probability;
  std::function<AgentSet(const Instance&)> allocate;
  std::function<Outcome(const Instance&)> run;
};

struct Mechanism {
  std::string name;
  std::optional<ValuationKind> required_kind;  // nullopt: any family
  std::vector<DeterministicRule> branches;
  std::optional<Rational> proven_ratio;
  bool claimed_truthful = true;

  // Throws MechanismMismatch when the instance's family is unsupported.
  void check_applicable(const Instance& instance) const;
  bool applicable(const Instance& instance) const;
  RandomizedOutcome run(const Instance& instance) const;
  bool deterministic() const { return branches.size() == 1; }
};

// Registered names: symmetric, symmetric_fair_share, knapsack, matching,
// matching_neighbor, submodular, shapley, naive_max.
const std::vector<Mechanism>& mechanisms();
// Throws std::invalid_argument listing the valid names.
const Mechanism& find_mechanism(const std::string& name);
std::vector<std::string> mechanism_names();

}  // namespace bfm
