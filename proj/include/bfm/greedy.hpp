#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bfm/model.hpp"

namespace bfm {

// Greedy sort by marginal value per unit cost over a subset of agents.
//
// order[t] is the agent picked at step t and marginals[t] its marginal value
// relative to order[0..t-1]; prefix_values[t] = V(order[0..t]). Ranking per
// step: positive marginal at zero cost first, then positive finite ratios,
// then zero marginals; ties go to the lower agent index.
//
// When the trace was produced under a budget, `accepted` is the length of the
// maximal prefix meeting c_t * V(S_t) <= budget * V_t with V_t > 0, and the
// order stops right after the first rejected agent (if any).
struct GreedyTrace {
  std::vector<AgentId> order;
  std::vector<Rational> marginals;
  std::vector<Rational> prefix_values;
  std::size_t accepted = 0;

  AgentSet winners() const;
  std::optional<AgentId> first_rejected() const;
  Rational winners_value() const { return accepted == 0 ? Rational(0) : prefix_values[accepted - 1]; }
};

// Full greedy order over `subset` (no stopping). Throws std::invalid_argument
// on an empty subset.
GreedyTrace greedy_order(const Instance& instance, const AgentSet& subset, ValueOracle& oracle);

// Greedy order truncated at the first agent failing the proportional-share
// condition under `budget`.
GreedyTrace proportional_share_trace(const Instance& instance, const AgentSet& subset, const Rational& budget,
                                     ValueOracle& oracle);

// Winners of the proportional-share rule: the maximal greedy prefix where
// every position satisfies c_i <= budget * V_i / V(S_i).
AgentSet proportional_share_rule(const Instance& instance, const AgentSet& subset, const Rational& budget,
                                 ValueOracle& oracle);

// The best next agent among `candidates` given the current prefix, with its
// marginal value. nullopt when `candidates` is empty.
struct GreedyPick {
  AgentId agent;
  Rational marginal;
};
std::optional<GreedyPick> best_next(const Instance& instance, const std::vector<AgentId>& prefix,
                                    const Rational& prefix_value, const std::vector<AgentId>& candidates,
                                    ValueOracle& oracle);

// True when `a` (marginal ma) ranks ahead of `b` (marginal mb) in the greedy sort.
bool ranks_ahead(AgentId a, const Rational& ma, const Rational& ca, AgentId b, const Rational& mb,
                 const Rational& cb);

struct ThresholdDetail {
  AgentId agent = 0;
  Rational theta;
  std::size_t witness_position = 0;  // 1-based position in the agent-removed order
  ExtRational cbar;                  // cost-per-value of the occupant, rescaled; inf past the end
  Rational rho;                      // budget share at that position
};

// Supremum bid at which `agent` is still allocated by the proportional-share
// rule over `subset` (agent included), computed from the greedy run without
// her: max over positions j of min(cbar_j, rho_j).
ThresholdDetail threshold_for_agent(const Instance& instance, const AgentSet& subset, const Rational& budget,
                                    AgentId agent, ValueOracle& oracle);

// Exact supremum winning bid of `agent` for a rule that depends on her bid
// only through her position in the proportional-share run over `subset`
// (so its outcome is constant between consecutive breakpoints). `wins`
// evaluates the full rule at a bid; it is called once per breakpoint interval.
Rational position_threshold(const Instance& instance, const AgentSet& subset, const Rational& budget, AgentId agent,
                            ValueOracle& oracle, const std::function<bool(const Rational&)>& wins);

// Threshold details for every winner of proportional_share_rule(subset, budget).
// Throws std::invalid_argument when there are no winners.
std::vector<ThresholdDetail> threshold_payments(const Instance& instance, const AgentSet& subset,
                                                const Rational& budget, ValueOracle& oracle);

}  // namespace bfm
