#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "bfm/rational.hpp"

namespace bfm {

using AgentId = std::size_t;
// Sorted, duplicate-free list of agent indices.
using AgentSet = std::vector<AgentId>;

// Thrown when a queried subset names an agent outside [0, n) or repeats one.
class InvalidSubset : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Thrown when a constructed object violates one of its invariants. The
// message always starts with the invariant's name.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ValuationKind { kSymmetric, kAdditive, kCoverage, kMatching };

std::string to_string(ValuationKind kind);
ValuationKind valuation_kind_from_string(const std::string& name);

// V(S) = r_0 + ... + r_{|S|-1}, with r nonincreasing and nonnegative.
struct SymmetricValuation {
  std::vector<Rational> r;
  friend bool operator==(const SymmetricValuation&, const SymmetricValuation&) = default;
};

// V(S) = sum of v_i over S.
struct AdditiveValuation {
  std::vector<Rational> v;
  friend bool operator==(const AdditiveValuation&, const AdditiveValuation&) = default;
};

// V(S) = |union of sets[i] over S|; sets are stored sorted and deduplicated.
struct CoverageValuation {
  std::size_t ground_size = 0;
  std::vector<std::vector<std::size_t>> sets;
  friend bool operator==(const CoverageValuation&, const CoverageValuation&) = default;
};

struct MatchingEdge {
  std::size_t left = 0;
  std::size_t right = 0;
  Rational weight;
  friend bool operator==(const MatchingEdge&, const MatchingEdge&) = default;
};

// V(S) = weight of a maximum-weight matching using edges in S. Submodular
// (an OXS valuation) when no two edges share a right vertex; arbitrary
// bipartite edge sets are evaluated exactly but need not be submodular.
struct MatchingValuation {
  std::size_t left_size = 0;
  std::size_t right_size = 0;
  std::vector<MatchingEdge> edges;
  friend bool operator==(const MatchingValuation&, const MatchingValuation&) = default;
};

// Immutable, validated set function over agents [0, size()). Safe to share
// across threads.
class Valuation {
 public:
  using Data = std::variant<SymmetricValuation, AdditiveValuation, CoverageValuation, MatchingValuation>;

  explicit Valuation(Data data);

  ValuationKind kind() const { return static_cast<ValuationKind>(data_.index()); }
  std::size_t size() const { return size_; }
  const Data& data() const { return data_; }

  template <class T>
  const T& as() const { return std::get<T>(data_); }

  // Exact V(S). Throws InvalidSubset for out-of-range or repeated agents.
  Rational evaluate(std::span<const AgentId> subset) const;

  friend bool operator==(const Valuation& a, const Valuation& b) { return a.data_ == b.data_; }

 private:
  Rational evaluate_matching(std::span<const AgentId> subset) const;

  Data data_;
  std::size_t size_ = 0;
  // Coverage sets as bitsets over the ground set.
  std::vector<std::vector<std::uint64_t>> cover_bits_;
};

// Value-query access to a valuation with a query counter. The counter is the
// only mutable state: use one oracle per thread.
class ValueOracle {
 public:
  explicit ValueOracle(const Valuation& valuation);
  explicit ValueOracle(Valuation&&) = delete;

  const Valuation& valuation() const { return *valuation_; }
  std::size_t size() const { return valuation_->size(); }

  Rational value(std::span<const AgentId> subset);
  // V(S + i) - V(S); costs two value queries. Throws std::invalid_argument if i is in S.
  Rational marginal(AgentId agent, std::span<const AgentId> subset);

  std::uint64_t queries_made() const { return queries_; }

 private:
  const Valuation* valuation_;
  std::uint64_t queries_ = 0;
  // Results keyed by subset bitmask; only used when size() <= 64.
  std::unordered_map<std::uint64_t, Rational> memo_;
};

// Helpers over sorted agent sets.
AgentSet make_agent_set(std::vector<AgentId> agents);
AgentSet with_agent(const AgentSet& set, AgentId agent);
AgentSet without_agent(const AgentSet& set, AgentId agent);
bool contains(const AgentSet& set, AgentId agent);
AgentSet all_agents(std::size_t n);
std::string to_string(const AgentSet& set);

}  // namespace bfm
