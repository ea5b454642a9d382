#include "bfm/verify.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "bfm/codec.hpp"
#include "json.hpp"

namespace bfm {

namespace {

using nlohmann::json;

Rational bisection_width(const Rational& budget) { return budget * pow2_neg(40); }

bool wins_with_bid(const AllocationFn& allocate, const Instance& instance, AgentId agent, const Rational& bid) {
  return contains(allocate(instance.with_cost(agent, bid)), agent);
}

std::set<Rational> candidate_bids(const Instance& instance, AgentId agent, const std::vector<Rational>& payments) {
  const Rational& B = instance.budget;
  std::set<Rational> bids{Rational(0), B, instance.costs[agent]};
  for (const Rational& c : instance.costs) bids.insert(c);
  for (std::size_t m = 1; m <= instance.n(); ++m) bids.insert(B / Rational(static_cast<long>(m)));
  const Rational nudge = B * pow2_neg(20);
  for (const Rational& p : payments) {
    bids.insert(p);
    bids.insert(p + nudge);
    bids.insert(p - nudge);
  }
  for (long t = 1; t < 64; ++t) bids.insert(B * Rational(t, 64));
  std::set<Rational> clamped;
  for (const Rational& b : bids) {
    if (b.sign() >= 0 && b <= B) clamped.insert(b);
  }
  return clamped;
}

std::string describe(const AgentSet& s) { return to_string(s); }

json check_json(const AuditCheck& c) { return json{{"name", c.name}, {"pass", c.pass}, {"evidence", c.evidence}}; }

}  // namespace

// ---------------------------------------------------------------------------

Optimum brute_force_opt(const Instance& instance) {
  const std::size_t n = instance.n();
  Rational total_cost(0);
  for (const Rational& c : instance.costs) total_cost += c;
  if (total_cost <= instance.budget) {
    const AgentSet all = all_agents(n);
    return Optimum{all, instance.valuation.evaluate(all)};
  }
  if (n > kBruteForceMaxAgents) {
    throw BruteForceRefused("brute force limited to " + std::to_string(kBruteForceMaxAgents) + " agents, got " +
                            std::to_string(n));
  }
  Optimum best{{}, Rational(0)};
  std::vector<AgentId> current;
  // Preorder over sorted index lists enumerates subsets lexicographically, so
  // keeping only strict improvements keeps the smallest optimal subset.
  auto visit = [&](auto&& self, std::size_t start, const Rational& spent) -> void {
    if (!current.empty()) {
      Rational v = instance.valuation.evaluate(current);
      if (v > best.value) best = Optimum{current, std::move(v)};
    }
    for (std::size_t j = start; j < n; ++j) {
      const Rational next = spent + instance.costs[j];
      if (next > instance.budget) continue;
      current.push_back(j);
      self(self, j + 1, next);
      current.pop_back();
    }
  };
  visit(visit, 0, Rational(0));
  return best;
}

// ---------------------------------------------------------------------------

void AuditReport::add(std::string name, bool pass, std::string evidence) {
  checks.push_back(AuditCheck{std::move(name), pass, std::move(evidence)});
}

bool AuditReport::passed() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

std::size_t AuditReport::passed_count() const {
  std::size_t k = 0;
  for (const auto& c : checks) k += c.pass;
  return k;
}

void AuditReport::merge(const AuditReport& other, const std::string& prefix) {
  for (const auto& c : other.checks) checks.push_back(AuditCheck{prefix + c.name, c.pass, c.evidence});
  for (const auto& note : other.notes) notes.push_back(prefix + note);
  if (!counterexample && other.counterexample) counterexample = other.counterexample;
}

std::string AuditReport::to_json() const {
  json j;
  j["subject"] = subject;
  j["instance_digest"] = instance_digest;
  j["passed"] = passed();
  json cs = json::array();
  for (const auto& c : checks) cs.push_back(check_json(c));
  j["checks"] = cs;
  j["notes"] = notes;
  if (counterexample) {
    j["counterexample"] = json{{"agent", counterexample->agent},
                               {"low", counterexample->low.str()},
                               {"high", counterexample->high.str()},
                               {"violation", counterexample->violation}};
  } else {
    j["counterexample"] = nullptr;
  }
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

AuditReport audit_outcome(const Instance& instance, const Outcome& outcome) {
  AuditReport r;
  r.subject = "outcome";
  r.instance_digest = instance_digest(instance);
  const std::size_t n = instance.n();
  if (outcome.payments.size() != n) {
    r.add("dimensions", false, "payments has " + std::to_string(outcome.payments.size()) + " entries, n = " +
                                   std::to_string(n));
    return r;
  }
  const Rational total = outcome.total_payment();
  r.add("budget_feasible", total <= instance.budget,
        "sum of payments " + total.str() + " vs budget " + instance.budget.str());

  std::string ir = "all winners paid at least their cost";
  bool ir_ok = true;
  for (const AgentId i : outcome.winners) {
    if (i >= n) continue;
    if (outcome.payments[i] < instance.costs[i]) {
      ir_ok = false;
      ir = "agent " + std::to_string(i) + " paid " + outcome.payments[i].str() + " below cost " +
           instance.costs[i].str();
      break;
    }
  }
  r.add("individually_rational", ir_ok, ir);

  std::string norm = "losers paid 0";
  bool norm_ok = true;
  for (AgentId i = 0; i < n; ++i) {
    if (!outcome.wins(i) && !outcome.payments[i].is_zero()) {
      norm_ok = false;
      norm = "loser " + std::to_string(i) + " paid " + outcome.payments[i].str();
      if (!r.counterexample) {
        r.counterexample = Counterexample{i, instance.costs[i], instance.costs[i], norm};
      }
      break;
    }
  }
  r.add("normalized", norm_ok, norm);

  std::string transfers = "all payments nonnegative";
  bool transfers_ok = true;
  for (AgentId i = 0; i < n; ++i) {
    if (outcome.payments[i].sign() < 0) {
      transfers_ok = false;
      transfers = "agent " + std::to_string(i) + " paid " + outcome.payments[i].str();
      break;
    }
  }
  r.add("no_positive_transfers", transfers_ok, transfers);

  bool ids_ok = true;
  for (std::size_t t = 0; t < outcome.winners.size(); ++t) {
    if (outcome.winners[t] >= n || (t > 0 && outcome.winners[t - 1] >= outcome.winners[t])) ids_ok = false;
  }
  r.add("winners_well_formed", ids_ok, "winners " + describe(outcome.winners));
  return r;
}

AuditReport audit_outcome(const Instance& instance, const RandomizedOutcome& outcome) {
  AuditReport r;
  r.subject = "randomized outcome";
  r.instance_digest = instance_digest(instance);
  Rational total(0);
  bool positive = true;
  for (const auto& b : outcome.branches) {
    total += b.probability;
    positive = positive && b.probability.sign() > 0;
  }
  r.add("probabilities", positive && total == Rational(1) && !outcome.branches.empty(),
        "branch probabilities sum to " + total.str());
  for (std::size_t b = 0; b < outcome.branches.size(); ++b) {
    r.merge(audit_outcome(instance, outcome.branches[b].outcome), "branch" + std::to_string(b) + ".");
  }
  return r;
}

// ---------------------------------------------------------------------------

ThresholdBracket bisect_threshold(const AllocationFn& allocate, const Instance& instance, AgentId agent) {
  const Rational& B = instance.budget;
  ThresholdBracket br;
  br.wins_at_zero = wins_with_bid(allocate, instance, agent, Rational(0));
  if (wins_with_bid(allocate, instance, agent, B)) {
    br.low = B;
    br.high = B;
    br.wins_at_budget = true;
    return br;
  }
  Rational lo = instance.costs[agent];
  Rational hi = B;
  if (!wins_with_bid(allocate, instance, agent, lo)) {
    throw std::invalid_argument("bisect_threshold: agent " + std::to_string(agent) + " loses at her own bid");
  }
  const Rational width = bisection_width(B);
  while (hi - lo > width) {
    const Rational mid = (lo + hi) / Rational(2);
    if (wins_with_bid(allocate, instance, agent, mid)) lo = mid;
    else hi = mid;
  }
  br.low = lo;
  br.high = hi;
  return br;
}

AuditReport audit_rule_truthfulness(const DeterministicRule& rule, const Instance& instance) {
  AuditReport r;
  r.subject = rule.name;
  r.instance_digest = instance_digest(instance);
  const Outcome outcome = rule.run(instance);
  const Rational& B = instance.budget;

  for (AgentId i = 0; i < instance.n(); ++i) {
    const std::string who = "agent" + std::to_string(i);
    const bool winner = outcome.wins(i);
    const bool alloc_wins = wins_with_bid(rule.allocate, instance, i, instance.costs[i]);
    r.add(who + ".allocation_consistent", alloc_wins == winner,
          std::string("run says ") + (winner ? "win" : "lose") + ", allocation says " + (alloc_wins ? "win" : "lose"));

    std::vector<std::pair<Rational, bool>> grid;
    for (const Rational& b : candidate_bids(instance, i, {outcome.payments[i]})) {
      grid.emplace_back(b, wins_with_bid(rule.allocate, instance, i, b));
    }
    auto largest_loss_below = [&](const Rational& x) {
      std::optional<Rational> out;
      for (const auto& [b, w] : grid) {
        if (b < x && !w) out = b;
      }
      return out;
    };
    // Prefer the truthful bid as the winning side of the reported pair.
    std::optional<Rational> high;
    if (alloc_wins && largest_loss_below(instance.costs[i])) {
      high = instance.costs[i];
    } else {
      for (auto it = grid.rbegin(); it != grid.rend() && !high; ++it) {
        if (it->second && largest_loss_below(it->first)) high = it->first;
      }
    }
    if (high) {
      const Rational low = *largest_loss_below(*high);
      const std::string msg = who + " wins at bid " + high->str() + " but loses at lower bid " + low.str();
      r.add(who + ".monotone", false, msg);
      if (!r.counterexample) r.counterexample = Counterexample{i, low, *high, "non-monotone allocation: " + msg};
    } else {
      r.add(who + ".monotone", true, std::to_string(grid.size()) + " candidate bids, win set is a prefix");
    }

    if (!winner) continue;
    const Rational& pay = outcome.payments[i];
    if (!alloc_wins) {
      r.add(who + ".threshold", false, "winner whose own bid loses under the allocation rule");
      continue;
    }
    const ThresholdBracket br = bisect_threshold(rule.allocate, instance, i);
    if (br.wins_at_budget) {
      const bool ok = pay == B;
      r.add(who + ".threshold", ok, "wins at B (threshold = B), paid " + pay.str());
      if (!ok && !r.counterexample) {
        r.counterexample = Counterexample{i, pay, B, "still wins at bid B but is paid " + pay.str()};
      }
    } else {
      const bool ok = br.low <= pay && pay <= br.high;
      r.add(who + ".threshold", ok, "payment " + pay.str() + ", bracket [" + br.low.str() + ", " + br.high.str() + "]");
      if (!ok && !r.counterexample) {
        r.counterexample = Counterexample{i, br.low, br.high, "payment " + pay.str() + " outside threshold bracket"};
      }
    }
  }
  return r;
}

AuditReport audit_truthfulness(const Mechanism& mechanism, const Instance& instance) {
  mechanism.check_applicable(instance);
  AuditReport r;
  r.subject = mechanism.name;
  r.instance_digest = instance_digest(instance);
  for (const auto& rule : mechanism.branches) {
    const AuditReport part = audit_rule_truthfulness(rule, instance);
    r.merge(part, mechanism.deterministic() ? "" : rule.name + ".");
  }
  return r;
}

// ---------------------------------------------------------------------------

Rational expected_value(const RandomizedOutcome& outcome, const Instance& instance) {
  Rational ev(0);
  for (const auto& b : outcome.branches) ev += b.probability * instance.valuation.evaluate(b.outcome.winners);
  return ev;
}

ExtRational approximation_ratio(const RandomizedOutcome& outcome, const Instance& instance) {
  const Optimum opt = brute_force_opt(instance);
  const Rational ev = expected_value(outcome, instance);
  if (ev.is_zero()) return opt.value.is_zero() ? ExtRational(Rational(1)) : std::nullopt;
  return opt.value / ev;
}

ExtRational approximation_ratio(const Mechanism& mechanism, const Instance& instance) {
  return approximation_ratio(mechanism.run(instance), instance);
}

// ---------------------------------------------------------------------------

AuditReport audit_characterization(const std::string& subject, const AllocationFn& allocate, const Instance& instance,
                                   std::size_t samples, std::uint64_t seed) {
  AuditReport r;
  r.subject = subject;
  r.instance_digest = instance_digest(instance);
  const std::size_t n = instance.n();
  const Rational& B = instance.budget;

  std::vector<std::vector<Rational>> profiles{instance.costs};
  std::mt19937_64 rng(seed);
  const long grid = 256;
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<Rational> costs(n);
    for (auto& c : costs) c = B * Rational(static_cast<long>(rng() % grid) + 1, grid);
    profiles.push_back(std::move(costs));
  }

  std::optional<std::string> anonymity_failure;
  std::optional<std::string> stability_failure;
  std::size_t anonymity_trials = 0;
  std::size_t stability_trials = 0;
  for (std::size_t s = 0; s < profiles.size(); ++s) {
    Instance profile = instance;
    profile.costs = profiles[s];
    const AgentSet winners = allocate(profile);
    for (const AgentId i : winners) {
      for (AgentId j = 0; j < n && !anonymity_failure; ++j) {
        if (j == i) continue;
        Instance swapped = profile;
        std::swap(swapped.costs[i], swapped.costs[j]);
        ++anonymity_trials;
        if (!contains(allocate(swapped), j)) {
          anonymity_failure = "profile " + std::to_string(s) + ": agent " + std::to_string(i) +
                              " wins, but agent " + std::to_string(j) + " loses after exchanging their costs";
        }
      }
      for (const Rational& lowered : {Rational(0), profile.costs[i] / Rational(2)}) {
        if (stability_failure) break;
        const AgentSet after = allocate(profile.with_cost(i, lowered));
        ++stability_trials;
        for (const AgentId j : winners) {
          if (j != i && !contains(after, j)) {
            stability_failure = "profile " + std::to_string(s) + ": agent " + std::to_string(i) + " lowering to " +
                                lowered.str() + " evicts agent " + std::to_string(j);
            break;
          }
        }
      }
    }
  }

  const std::string sampled = " (sampled, " + std::to_string(profiles.size()) + " profiles)";
  if (anonymity_failure) r.notes.push_back("premises not established: anonymity fails, " + *anonymity_failure);
  if (stability_failure) r.notes.push_back("premises not established: weak stability fails, " + *stability_failure);
  if (anonymity_failure || stability_failure) return r;

  r.add("premise.anonymity", true, std::to_string(anonymity_trials) + " exchanges" + sampled);
  r.add("premise.weak_stability", true, std::to_string(stability_trials) + " lowered bids" + sampled);
  const AgentSet winners = allocate(instance);
  bool ok = true;
  std::string evidence = "every winner bids at most B/|S|";
  if (!winners.empty()) {
    const Rational share = B / Rational(static_cast<long>(winners.size()));
    for (const AgentId i : winners) {
      if (instance.costs[i] > share) {
        ok = false;
        evidence = "agent " + std::to_string(i) + " bids " + instance.costs[i].str() + " > B/|S| = " + share.str();
        r.counterexample = Counterexample{i, share, instance.costs[i], evidence};
        break;
      }
    }
  }
  r.add("budget_share", ok, evidence);
  return r;
}

AuditReport audit_characterization(const Mechanism& mechanism, const Instance& instance, std::size_t samples,
                                   std::uint64_t seed) {
  mechanism.check_applicable(instance);
  if (!mechanism.deterministic()) {
    throw std::invalid_argument("audit_characterization: " + mechanism.name + " is randomized");
  }
  return audit_characterization(mechanism.name, mechanism.branches.front().allocate, instance, samples, seed);
}

}  // namespace bfm
