#include "bfm/mechanisms.hpp"

#include <algorithm>
#include <numeric>

namespace bfm {

namespace {

void require_kind(const Instance& instance, ValuationKind kind, const char* mechanism) {
  if (instance.valuation.kind() != kind) {
    throw MechanismMismatch(std::string(mechanism) + " requires valuation kind " + to_string(kind) + ", got " +
                            to_string(instance.valuation.kind()));
  }
}

Outcome single_winner(const Instance& instance, AgentId agent, const Rational& payment) {
  Outcome o = Outcome::empty(instance.n());
  o.winners = {agent};
  o.payments[agent] = payment;
  return o;
}

// argmax V({i}) over `agents`, lowest index on ties. `agents` must be nonempty.
AgentId best_singleton(const AgentSet& agents, ValueOracle& oracle) {
  AgentId best = agents.front();
  Rational best_value = oracle.value(std::vector<AgentId>{best});
  for (const AgentId i : agents) {
    const Rational v = oracle.value(std::vector<AgentId>{i});
    if (v > best_value) {
      best = i;
      best_value = v;
    }
  }
  return best;
}

// Agents sorted by (cost, index) and the symmetric cutoff k.
std::pair<std::vector<AgentId>, std::size_t> symmetric_cutoff(const Instance& instance) {
  std::vector<AgentId> order(instance.n());
  std::iota(order.begin(), order.end(), AgentId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](AgentId a, AgentId b) { return instance.costs[a] < instance.costs[b]; });
  std::size_t k = 0;
  for (std::size_t t = 1; t <= order.size(); ++t) {
    if (instance.costs[order[t - 1]] <= instance.budget / Rational(static_cast<long>(t))) k = t;
  }
  return {order, k};
}

Rational additive_sum(const AgentSet& set, const std::vector<Rational>& v) {
  Rational s(0);
  for (const AgentId i : set) s += v[i];
  return s;
}

Outcome knapsack_impl(const Instance& instance, bool with_payments) {
  require_kind(instance, ValuationKind::kAdditive, "knapsack");
  const AgentSet eligible = eligible_agents(instance);
  Outcome out = Outcome::empty(instance.n());
  if (eligible.empty()) return out;
  const auto& v = instance.valuation.as<AdditiveValuation>().v;
  const Rational& budget = instance.budget;
  ValueOracle oracle(instance.valuation);
  const GreedyTrace trace = proportional_share_trace(instance, eligible, budget, oracle);
  const AgentSet prefix = trace.winners();

  AgentId top = eligible.front();
  for (const AgentId i : eligible) {
    if (v[i] > v[top]) top = i;
  }
  if (additive_sum(without_agent(prefix, top), v) > v[top]) {
    out.winners = prefix;
    if (!with_payments) return out;
    const Rational total = additive_sum(prefix, v);
    const auto rejected = trace.first_rejected();
    for (const AgentId i : prefix) {
      Rational theta = v[i] * budget / total;
      if (rejected && v[*rejected].sign() > 0) theta = min(theta, v[i] * instance.costs[*rejected] / v[*rejected]);
      out.payments[i] = theta;
    }
    return out;
  }

  out.winners = {top};
  if (!with_payments) return out;
  // The top agent wins while she stays in the proportional-share set, or while
  // she ranks ahead of the first prefix of the others whose value exceeds hers.
  Rational theta = budget;
  const AgentSet others = without_agent(eligible, top);
  if (!others.empty()) {
    const GreedyTrace rest = proportional_share_trace(instance, others, budget, oracle);
    for (std::size_t t = 0; t < rest.accepted; ++t) {
      if (rest.prefix_values[t] > v[top]) {
        const AgentId a = rest.order[t];
        const Rational overtake = v[top] * instance.costs[a] / v[a];
        theta = max(threshold_for_agent(instance, eligible, budget, top, oracle).theta, overtake);
        break;
      }
    }
  }
  out.payments[top] = theta;
  return out;
}

enum class MatchingPayment { kNone, kThreshold, kNeighbor };

Outcome matching_impl(const Instance& instance, MatchingPayment payment) {
  const bool with_payments = payment != MatchingPayment::kNone;
  require_kind(instance, ValuationKind::kMatching, "matching");
  const AgentSet eligible = eligible_agents(instance);
  Outcome out = Outcome::empty(instance.n());
  if (eligible.empty()) return out;
  const auto& edges = instance.valuation.as<MatchingValuation>().edges;
  const Rational& budget = instance.budget;

  AgentId top = eligible.front();
  for (const AgentId e : eligible) {
    if (edges[e].weight > edges[top].weight) top = e;
  }
  const AgentSet considered = without_agent(eligible, top);
  ValueOracle oracle(instance.valuation);
  GreedyTrace trace;
  if (!considered.empty()) trace = proportional_share_trace(instance, considered, budget, oracle);
  const AgentSet prefix = trace.winners();
  if (oracle.value(prefix) < edges[top].weight) {
    out.winners = {top};
    if (with_payments) out.payments[top] = budget;
    return out;
  }
  out.winners = prefix;
  if (!with_payments) return out;

  if (payment == MatchingPayment::kThreshold) {
    for (const AgentId e : prefix) {
      auto wins = [&](const Rational& bid) {
        return contains(matching_impl(instance.with_cost(e, bid), MatchingPayment::kNone).winners, e);
      };
      out.payments[e] = position_threshold(instance, considered, budget, e, oracle, wins);
    }
    return out;
  }

  Rational total(0);
  for (const AgentId e : prefix) total += edges[e].weight;
  const auto rejected = trace.first_rejected();
  auto adjacent = [&](AgentId a, AgentId b) {
    return edges[a].left == edges[b].left || edges[a].right == edges[b].right;
  };
  for (const AgentId e : prefix) {
    Rational theta = edges[e].weight * budget / total;
    // Cheapest cost-per-weight among neighbors of e and the first rejected edge.
    std::optional<AgentId> r;
    auto consider = [&](AgentId d) {
      if (edges[d].weight.sign() <= 0) return;
      if (!r || instance.costs[d] * edges[*r].weight < instance.costs[*r] * edges[d].weight) r = d;
    };
    for (const AgentId d : considered) {
      if (d != e && adjacent(d, e)) consider(d);
    }
    if (rejected) consider(*rejected);
    if (r) theta = min(theta, edges[e].weight * instance.costs[*r] / edges[*r].weight);
    out.payments[e] = theta;
  }
  return out;
}

Outcome matching_threshold_impl(const Instance& x, bool with_payments) {
  return matching_impl(x, with_payments ? MatchingPayment::kThreshold : MatchingPayment::kNone);
}
Outcome matching_neighbor_impl(const Instance& x, bool with_payments) {
  return matching_impl(x, with_payments ? MatchingPayment::kNeighbor : MatchingPayment::kNone);
}

Outcome submodular_greedy_impl(const Instance& instance, bool with_payments) {
  Outcome out = Outcome::empty(instance.n());
  const AgentSet eligible = eligible_agents(instance);
  if (eligible.empty()) return out;
  const Rational& budget = instance.budget;
  const Rational half = budget / Rational(2);
  ValueOracle oracle(instance.valuation);
  const AgentId top = best_singleton(eligible, oracle);
  AgentSet pool;
  for (const AgentId i : eligible) {
    if (i != top && instance.costs[i] <= half) pool.push_back(i);
  }
  if (pool.empty()) return out;
  const AgentId second = best_singleton(pool, oracle);
  const AgentSet rest = without_agent(pool, second);
  const Rational scaled = scaled_budget_factor() * budget;
  const AgentSet prefix = proportional_share_rule(instance, rest, scaled, oracle);
  out.winners = with_agent(prefix, second);
  if (!with_payments) return out;
  out.payments[second] = half;
  if (!prefix.empty()) {
    for (const auto& d : threshold_payments(instance, rest, scaled, oracle)) out.payments[d.agent] = min(d.theta, half);
  }
  return out;
}

Outcome submodular_max_impl(const Instance& instance, bool with_payments) {
  const AgentSet eligible = eligible_agents(instance);
  if (eligible.empty()) return Outcome::empty(instance.n());
  ValueOracle oracle(instance.valuation);
  const AgentId top = best_singleton(eligible, oracle);
  return single_winner(instance, top, with_payments ? instance.budget : Rational(0));
}

Outcome shapley_impl(const Instance& instance, bool with_payments) {
  require_kind(instance, ValuationKind::kCoverage, "shapley");
  const auto& cover = instance.valuation.as<CoverageValuation>();
  Outcome out = Outcome::empty(instance.n());
  std::vector<AgentId> remaining = eligible_agents(instance);
  ValueOracle oracle(instance.valuation);
  std::vector<AgentId> selected;
  std::vector<Rational> shares;
  Rational value(0);
  while (!remaining.empty()) {
    const auto pick = best_next(instance, selected, value, remaining, oracle);
    if (pick->marginal.sign() <= 0) break;
    std::vector<AgentId> tentative = selected;
    tentative.push_back(pick->agent);
    std::vector<long> multiplicity(cover.ground_size, 0);
    for (const AgentId s : tentative) {
      for (const std::size_t u : cover.sets[s]) ++multiplicity[u];
    }
    const Rational covered = value + pick->marginal;
    std::vector<Rational> tentative_shares;
    bool affordable = true;
    for (const AgentId s : tentative) {
      Rational xi(0);
      for (const std::size_t u : cover.sets[s]) xi += Rational(1, multiplicity[u]);
      Rational share = instance.budget * xi / covered;
      if (share < instance.costs[s]) {
        affordable = false;
        break;
      }
      tentative_shares.push_back(std::move(share));
    }
    if (!affordable) break;
    selected = std::move(tentative);
    shares = std::move(tentative_shares);
    value = covered;
    std::erase(remaining, pick->agent);
  }
  out.winners = make_agent_set(selected);
  if (with_payments) {
    for (std::size_t t = 0; t < selected.size(); ++t) out.payments[selected[t]] = shares[t];
  }
  return out;
}

Outcome naive_max_impl(const Instance& instance, bool with_payments) {
  const AgentSet eligible = eligible_agents(instance);
  if (eligible.empty()) return Outcome::empty(instance.n());
  ValueOracle oracle(instance.valuation);
  const AgentId top = best_singleton(eligible, oracle);
  const AgentSet rest = without_agent(eligible, top);
  const AgentSet prefix = proportional_share_rule(instance, rest, instance.budget, oracle);
  if (oracle.value(prefix) < oracle.value(std::vector<AgentId>{top})) {
    return single_winner(instance, top, with_payments ? instance.budget : Rational(0));
  }
  Outcome out = Outcome::empty(instance.n());
  out.winners = prefix;
  if (with_payments && !prefix.empty()) {
    for (const auto& d : threshold_payments(instance, rest, instance.budget, oracle)) {
      out.payments[d.agent] = min(d.theta, instance.budget);
    }
  }
  return out;
}

DeterministicRule rule(std::string name, Rational probability, Outcome (*impl)(const Instance&, bool)) {
  return DeterministicRule{std::move(name), std::move(probability),
                           [impl](const Instance& x) { return impl(x, false).winners; },
                           [impl](const Instance& x) { return impl(x, true); }};
}

Outcome symmetric_threshold_impl(const Instance& x, bool) { return mech_symmetric(x, SymmetricPayment::kThreshold); }
Outcome symmetric_fair_impl(const Instance& x, bool) { return mech_symmetric(x, SymmetricPayment::kFairShare); }

std::vector<Mechanism> build_registry() {
  std::vector<Mechanism> r;
  r.push_back({"symmetric", ValuationKind::kSymmetric, {rule("symmetric", 1, symmetric_threshold_impl)}, Rational(2), true});
  r.push_back({"symmetric_fair_share", ValuationKind::kSymmetric,
               {rule("symmetric_fair_share", 1, symmetric_fair_impl)}, std::nullopt, false});
  r.push_back({"knapsack", ValuationKind::kAdditive, {rule("knapsack", 1, knapsack_impl)}, Rational(6), true});
  r.push_back({"matching", ValuationKind::kMatching, {rule("matching", 1, matching_threshold_impl)}, Rational(6165, 1000), true});
  r.push_back({"matching_neighbor", ValuationKind::kMatching, {rule("matching_neighbor", 1, matching_neighbor_impl)},
               std::nullopt, false});
  r.push_back({"submodular",
               std::nullopt,
               {rule("submodular.greedy", Rational(1, 2), submodular_greedy_impl),
                rule("submodular.max", Rational(1, 2), submodular_max_impl)},
               Rational(112),
               true});
  r.push_back({"shapley", ValuationKind::kCoverage, {rule("shapley", 1, shapley_impl)}, std::nullopt, false});
  r.push_back({"naive_max", std::nullopt, {rule("naive_max", 1, naive_max_impl)}, std::nullopt, false});
  return r;
}

}  // namespace

AgentSet eligible_agents(const Instance& instance) {
  AgentSet out;
  for (AgentId i = 0; i < instance.n(); ++i) {
    if (instance.costs[i] <= instance.budget) out.push_back(i);
  }
  return out;
}

const Rational& scaled_budget_factor() {
  static const Rational factor(mpq_class(mpz_class("60039096300920106"), mpz_class("1000000000000000000")));
  return factor;
}

Outcome mech_symmetric(const Instance& instance, SymmetricPayment rule) {
  require_kind(instance, ValuationKind::kSymmetric, "symmetric");
  const auto [order, k] = symmetric_cutoff(instance);
  Outcome out = Outcome::empty(instance.n());
  if (k == 0) return out;
  Rational pay = instance.budget / Rational(static_cast<long>(k));
  if (rule == SymmetricPayment::kThreshold && k < order.size()) pay = min(pay, instance.costs[order[k]]);
  std::vector<AgentId> winners(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  out.winners = make_agent_set(std::move(winners));
  for (const AgentId i : out.winners) out.payments[i] = pay;
  return out;
}

AgentSet symmetric_allocation(const Instance& instance) { return mech_symmetric(instance).winners; }

Outcome mech_knapsack(const Instance& instance) { return knapsack_impl(instance, true); }
AgentSet knapsack_allocation(const Instance& instance) { return knapsack_impl(instance, false).winners; }

Outcome mech_matching(const Instance& instance) { return matching_impl(instance, MatchingPayment::kThreshold); }
Outcome mech_matching_neighbor(const Instance& instance) { return matching_impl(instance, MatchingPayment::kNeighbor); }
AgentSet matching_allocation(const Instance& instance) {
  return matching_impl(instance, MatchingPayment::kNone).winners;
}

Outcome submodular_greedy_branch(const Instance& instance) { return submodular_greedy_impl(instance, true); }
AgentSet submodular_greedy_allocation(const Instance& instance) {
  return submodular_greedy_impl(instance, false).winners;
}
Outcome submodular_max_branch(const Instance& instance) { return submodular_max_impl(instance, true); }
AgentSet submodular_max_allocation(const Instance& instance) { return submodular_max_impl(instance, false).winners; }

RandomizedOutcome mech_submodular(const Instance& instance) {
  return RandomizedOutcome{{OutcomeBranch{Rational(1, 2), submodular_greedy_branch(instance)},
                            OutcomeBranch{Rational(1, 2), submodular_max_branch(instance)}}};
}

Outcome mech_shapley_coverage(const Instance& instance) { return shapley_impl(instance, true); }
AgentSet shapley_allocation(const Instance& instance) { return shapley_impl(instance, false).winners; }

Outcome mech_naive_max(const Instance& instance) { return naive_max_impl(instance, true); }
AgentSet naive_max_allocation(const Instance& instance) { return naive_max_impl(instance, false).winners; }

void Mechanism::check_applicable(const Instance& instance) const {
  if (required_kind && instance.valuation.kind() != *required_kind) {
    throw MechanismMismatch(name + " requires valuation kind " + to_string(*required_kind) + ", got " +
                            to_string(instance.valuation.kind()));
  }
}

bool Mechanism::applicable(const Instance& instance) const {
  return !required_kind || instance.valuation.kind() == *required_kind;
}

RandomizedOutcome Mechanism::run(const Instance& instance) const {
  check_applicable(instance);
  RandomizedOutcome out;
  for (const auto& b : branches) out.branches.push_back(OutcomeBranch{b.probability, b.run(instance)});
  return out;
}

const std::vector<Mechanism>& mechanisms() {
  static const std::vector<Mechanism> registry = build_registry();
  return registry;
}

std::vector<std::string> mechanism_names() {
  std::vector<std::string> out;
  for (const auto& m : mechanisms()) out.push_back(m.name);
  return out;
}

const Mechanism& find_mechanism(const std::string& name) {
  for (const auto& m : mechanisms()) {
    if (m.name == name) return m;
  }
  std::string valid;
  for (const auto& n : mechanism_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown mechanism '" + name + "' (valid: " + valid + ")");
}

}  // namespace bfm
