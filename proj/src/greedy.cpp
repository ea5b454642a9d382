#include "bfm/greedy.hpp"

#include <stdexcept>

namespace bfm {

namespace {

// 2: positive marginal at zero cost, 1: positive finite ratio, 0: zero marginal.
int rank_class(const Rational& marginal, const Rational& cost) {
  if (marginal.sign() <= 0) return 0;
  return cost.is_zero() ? 2 : 1;
}

bool meets_share_condition(const Rational& cost, const Rational& marginal, const Rational& prefix_value,
                           const Rational& budget) {
  return marginal.sign() > 0 && cost * prefix_value <= budget * marginal;
}

GreedyTrace run_greedy(const Instance& instance, const AgentSet& subset, ValueOracle& oracle,
                       const Rational* budget) {
  if (subset.empty()) throw std::invalid_argument("greedy: empty agent subset");
  GreedyTrace trace;
  std::vector<AgentId> remaining = subset;
  Rational value(0);
  while (!remaining.empty()) {
    const auto pick = best_next(instance, trace.order, value, remaining, oracle);
    std::erase(remaining, pick->agent);
    value += pick->marginal;
    trace.order.push_back(pick->agent);
    trace.marginals.push_back(pick->marginal);
    trace.prefix_values.push_back(value);
    if (budget == nullptr) continue;
    if (!meets_share_condition(instance.costs[pick->agent], pick->marginal, value, *budget)) break;
    ++trace.accepted;
  }
  return trace;
}

}  // namespace

AgentSet GreedyTrace::winners() const {
  return make_agent_set(std::vector<AgentId>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(accepted)));
}

std::optional<AgentId> GreedyTrace::first_rejected() const {
  if (order.size() > accepted) return order[accepted];
  return std::nullopt;
}

bool ranks_ahead(AgentId a, const Rational& ma, const Rational& ca, AgentId b, const Rational& mb,
                 const Rational& cb) {
  const int ka = rank_class(ma, ca);
  const int kb = rank_class(mb, cb);
  if (ka != kb) return ka > kb;
  if (ka == 1) {
    const Rational lhs = ma * cb;
    const Rational rhs = mb * ca;
    if (lhs != rhs) return lhs > rhs;
  }
  return a < b;
}

std::optional<GreedyPick> best_next(const Instance& instance, const std::vector<AgentId>& prefix,
                                    const Rational& prefix_value, const std::vector<AgentId>& candidates,
                                    ValueOracle& oracle) {
  std::optional<GreedyPick> best;
  std::vector<AgentId> probe = prefix;
  probe.push_back(0);
  for (const AgentId j : candidates) {
    probe.back() = j;
    Rational m = oracle.value(make_agent_set(probe)) - prefix_value;
    if (!best || ranks_ahead(j, m, instance.costs[j], best->agent, best->marginal, instance.costs[best->agent])) {
      best = GreedyPick{j, std::move(m)};
    }
  }
  return best;
}

GreedyTrace greedy_order(const Instance& instance, const AgentSet& subset, ValueOracle& oracle) {
  return run_greedy(instance, subset, oracle, nullptr);
}

GreedyTrace proportional_share_trace(const Instance& instance, const AgentSet& subset, const Rational& budget,
                                     ValueOracle& oracle) {
  return run_greedy(instance, subset, oracle, &budget);
}

AgentSet proportional_share_rule(const Instance& instance, const AgentSet& subset, const Rational& budget,
                                 ValueOracle& oracle) {
  if (subset.empty()) return {};
  return proportional_share_trace(instance, subset, budget, oracle).winners();
}

namespace {

struct Piece {
  ExtRational cbar;
  Rational rho;
};

// Position j of the agent-removed run: the bid below which `agent` overtakes
// its occupant (cbar_j) and the largest bid she can be accepted at there (rho_j).
std::vector<Piece> threshold_pieces(const Instance& instance, const AgentSet& subset, const Rational& budget,
                                    AgentId agent, ValueOracle& oracle) {
  const AgentSet others = without_agent(subset, agent);
  GreedyTrace trace;
  if (!others.empty()) trace = proportional_share_trace(instance, others, budget, oracle);
  std::vector<Piece> pieces;
  std::vector<AgentId> prefix;
  Rational prefix_value(0);
  for (std::size_t j = 0; j <= trace.accepted; ++j) {
    const Rational with_i = oracle.value(with_agent(make_agent_set(prefix), agent));
    const Rational vi = with_i - prefix_value;
    Piece piece{std::nullopt, vi.sign() > 0 ? budget * vi / with_i : Rational(0)};
    if (j < trace.order.size()) {
      const Rational& vj = trace.marginals[j];
      if (vj.sign() > 0) piece.cbar = vi * instance.costs[trace.order[j]] / vj;
      else if (vi.sign() <= 0) piece.cbar = Rational(0);
      prefix.push_back(trace.order[j]);
      prefix_value = trace.prefix_values[j];
    }
    pieces.push_back(std::move(piece));
  }
  return pieces;
}

}  // namespace

ThresholdDetail threshold_for_agent(const Instance& instance, const AgentSet& subset, const Rational& budget,
                                    AgentId agent, ValueOracle& oracle) {
  const std::vector<Piece> pieces = threshold_pieces(instance, subset, budget, agent, oracle);
  ThresholdDetail best;
  best.agent = agent;
  for (std::size_t j = 0; j < pieces.size(); ++j) {
    const Rational value = pieces[j].cbar ? min(*pieces[j].cbar, pieces[j].rho) : pieces[j].rho;
    if (j == 0 || value > best.theta) {
      best.theta = value;
      best.witness_position = j + 1;
      best.cbar = pieces[j].cbar;
      best.rho = pieces[j].rho;
    }
  }
  return best;
}

Rational position_threshold(const Instance& instance, const AgentSet& subset, const Rational& budget, AgentId agent,
                            ValueOracle& oracle, const std::function<bool(const Rational&)>& wins) {
  const std::vector<Piece> pieces = threshold_pieces(instance, subset, budget, agent, oracle);
  Rational theta(0);
  Rational lower(0);  // she sits at position j exactly for bids in [lower, cbar_j)
  for (const Piece& piece : pieces) {
    const Rational upper = piece.cbar ? min(*piece.cbar, piece.rho) : piece.rho;
    if (upper > theta && upper >= lower) {
      const Rational probe = upper == lower ? upper : (lower + upper) / Rational(2);
      if (wins(probe)) theta = upper;
    }
    if (!piece.cbar) break;
    lower = max(lower, *piece.cbar);
  }
  return theta;
}

std::vector<ThresholdDetail> threshold_payments(const Instance& instance, const AgentSet& subset,
                                                const Rational& budget, ValueOracle& oracle) {
  const AgentSet winners = proportional_share_rule(instance, subset, budget, oracle);
  if (winners.empty()) throw std::invalid_argument("threshold_payments: empty winner set");
  std::vector<ThresholdDetail> out;
  out.reserve(winners.size());
  for (const AgentId i : winners) out.push_back(threshold_for_agent(instance, subset, budget, i, oracle));
  return out;
}

}  // namespace bfm
