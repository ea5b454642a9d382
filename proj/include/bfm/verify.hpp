#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfm/mechanisms.hpp"
#include "bfm/model.hpp"

namespace bfm {

class BruteForceRefused : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline constexpr std::size_t kBruteForceMaxAgents = 22;

struct Optimum {
  AgentSet subset;
  Rational value;
};

// Exact max V(S) subject to the budget; lexicographically smallest subset on
// ties. Refuses n > 22 unless every agent fits in the budget together.
Optimum brute_force_opt(const Instance& instance);

struct AuditCheck {
  std::string name;
  bool pass = true;
  std::string evidence;
};

// A bid pair for one agent: `low` < `high`, with the violation described.
struct Counterexample {
  AgentId agent = 0;
  Rational low;
  Rational high;
  std::string violation;
};

struct AuditReport {
  std::string subject;
  std::string instance_digest;
  std::vector<AuditCheck> checks;
  std::optional<Counterexample> counterexample;
  // Observations that are neither passes nor failures (unmet premises).
  std::vector<std::string> notes;

  void add(std::string name, bool pass, std::string evidence);
  bool passed() const;
  std::size_t passed_count() const;
  // Appends all checks of `other`, prefixing names; keeps the first counterexample.
  void merge(const AuditReport& other, const std::string& prefix);
  std::string to_json() const;
};

// Budget feasibility, individual rationality, normalization and no positive
// transfers. Randomized outcomes are audited branch by branch.
AuditReport audit_outcome(const Instance& instance, const Outcome& outcome);
AuditReport audit_outcome(const Instance& instance, const RandomizedOutcome& outcome);

using AllocationFn = std::function<AgentSet(const Instance&)>;

// Win/lose boundary of `agent`'s bid, in [0, B].
struct ThresholdBracket {
  Rational low;   // a winning bid
  Rational high;  // a losing bid (== low when the agent wins at B)
  bool wins_at_budget = false;
  bool wins_at_zero = true;
};

// Bisects from the agent's own bid (which must win) up to B to width
// B * 2^-40.
ThresholdBracket bisect_threshold(const AllocationFn& allocate, const Instance& instance, AgentId agent);

// For every branch and agent: the win indicator is nonincreasing over a
// candidate bid set, and each winner's payment lies in the bisected bracket
// (or equals B when she still wins at B).
AuditReport audit_truthfulness(const Mechanism& mechanism, const Instance& instance);
AuditReport audit_rule_truthfulness(const DeterministicRule& rule, const Instance& instance);

// OPT / E[V(allocated)]; nullopt (+inf) when the mechanism gets nothing and
// OPT > 0; 1 when both are zero.
ExtRational approximation_ratio(const Mechanism& mechanism, const Instance& instance);
ExtRational approximation_ratio(const RandomizedOutcome& outcome, const Instance& instance);
Rational expected_value(const RandomizedOutcome& outcome, const Instance& instance);

// Samples anonymity (exchanging two agents' costs) and weak stability (a
// winner lowering her bid keeps every other winner), over `samples` seeded
// perturbed cost profiles. Only when both premises hold on every sample is
// c_i <= B/|S| asserted for the winners of the actual run.
AuditReport audit_characterization(const Mechanism& mechanism, const Instance& instance, std::size_t samples = 16,
                                   std::uint64_t seed = 0);
AuditReport audit_characterization(const std::string& subject, const AllocationFn& allocate, const Instance& instance,
                                   std::size_t samples = 16, std::uint64_t seed = 0);

}  // namespace bfm
