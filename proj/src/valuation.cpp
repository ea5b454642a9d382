#include "bfm/valuation.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace bfm {

namespace {

constexpr std::size_t kWordBits = 64;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_nonnegative(const std::vector<Rational>& xs, const char* invariant) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].sign() < 0) {
      throw ValidationError(std::string(invariant) + ": entry " + std::to_string(i) + " is " + xs[i].str());
    }
  }
}

// Validates ids and returns a bitmask of the subset (or throws).
std::vector<bool> checked_membership(std::span<const AgentId> subset, std::size_t n) {
  std::vector<bool> seen(n, false);
  for (const AgentId a : subset) {
    if (a >= n) throw InvalidSubset("agent " + std::to_string(a) + " out of range [0, " + std::to_string(n) + ")");
    if (seen[a]) throw InvalidSubset("agent " + std::to_string(a) + " repeated in subset");
    seen[a] = true;
  }
  return seen;
}

// Exhaustive maximum-weight matching over a small edge list.
class MatchingSearch {
 public:
  MatchingSearch(const std::vector<const MatchingEdge*>& edges) : edges_(edges), suffix_(edges.size() + 1) {
    for (std::size_t i = edges_.size(); i-- > 0;) suffix_[i] = suffix_[i + 1] + edges_[i]->weight;
  }

  Rational run() {
    search(0, Rational(0));
    return best_;
  }

 private:
  void search(std::size_t pos, const Rational& acc) {
    if (acc > best_) best_ = acc;
    if (pos == edges_.size()) return;
    if (acc + suffix_[pos] <= best_) return;
    const MatchingEdge& e = *edges_[pos];
    if (!contains_id(left_, e.left) && !contains_id(right_, e.right)) {
      left_.push_back(e.left);
      right_.push_back(e.right);
      search(pos + 1, acc + e.weight);
      left_.pop_back();
      right_.pop_back();
    }
    search(pos + 1, acc);
  }

  static bool contains_id(const std::vector<std::size_t>& ids, std::size_t id) {
    return std::find(ids.begin(), ids.end(), id) != ids.end();
  }

  const std::vector<const MatchingEdge*>& edges_;
  std::vector<Rational> suffix_;
  std::vector<std::size_t> left_;
  std::vector<std::size_t> right_;
  Rational best_{0};
};

}  // namespace

std::string to_string(ValuationKind kind) {
  switch (kind) {
    case ValuationKind::kSymmetric: return "symmetric";
    case ValuationKind::kAdditive: return "additive";
    case ValuationKind::kCoverage: return "coverage";
    case ValuationKind::kMatching: return "matching";
  }
  return "unknown";
}

ValuationKind valuation_kind_from_string(const std::string& name) {
  if (name == "symmetric") return ValuationKind::kSymmetric;
  if (name == "additive") return ValuationKind::kAdditive;
  if (name == "coverage") return ValuationKind::kCoverage;
  if (name == "matching") return ValuationKind::kMatching;
  throw std::invalid_argument("unknown valuation kind '" + name + "'");
}

Valuation::Valuation(Data data) : data_(std::move(data)) {
  std::visit(Overloaded{
                 [&](SymmetricValuation& s) {
                   require_nonnegative(s.r, "symmetric increments nonnegative");
                   for (std::size_t i = 1; i < s.r.size(); ++i) {
                     if (s.r[i] > s.r[i - 1]) {
                       throw ValidationError("symmetric increments nonincreasing: r[" + std::to_string(i) +
                                             "] = " + s.r[i].str() + " > r[" + std::to_string(i - 1) +
                                             "] = " + s.r[i - 1].str());
                     }
                   }
                   size_ = s.r.size();
                 },
                 [&](AdditiveValuation& a) {
                   require_nonnegative(a.v, "additive values nonnegative");
                   size_ = a.v.size();
                 },
                 [&](CoverageValuation& c) {
                   const std::size_t words = (c.ground_size + kWordBits - 1) / kWordBits;
                   for (std::size_t i = 0; i < c.sets.size(); ++i) {
                     auto& set = c.sets[i];
                     std::sort(set.begin(), set.end());
                     set.erase(std::unique(set.begin(), set.end()), set.end());
                     std::vector<std::uint64_t> bits(words, 0);
                     for (const std::size_t u : set) {
                       if (u >= c.ground_size) {
                         throw ValidationError("coverage sets within ground set: set " + std::to_string(i) +
                                               " has element " + std::to_string(u) + " >= ground_size " +
                                               std::to_string(c.ground_size));
                       }
                       bits[u / kWordBits] |= std::uint64_t{1} << (u % kWordBits);
                     }
                     cover_bits_.push_back(std::move(bits));
                   }
                   size_ = c.sets.size();
                 },
                 [&](MatchingValuation& m) {
                   for (std::size_t i = 0; i < m.edges.size(); ++i) {
                     const auto& e = m.edges[i];
                     if (e.weight.sign() < 0) {
                       throw ValidationError("matching weights nonnegative: edge " + std::to_string(i) + " has " +
                                             e.weight.str());
                     }
                     if (e.left >= m.left_size || e.right >= m.right_size) {
                       throw ValidationError("matching edge endpoints in range: edge " + std::to_string(i));
                     }
                   }
                   size_ = m.edges.size();
                 },
             },
             data_);
}

Rational Valuation::evaluate(std::span<const AgentId> subset) const {
  checked_membership(subset, size_);
  return std::visit(Overloaded{
                        [&](const SymmetricValuation& s) {
                          Rational total(0);
                          for (std::size_t i = 0; i < subset.size(); ++i) total += s.r[i];
                          return total;
                        },
                        [&](const AdditiveValuation& a) {
                          Rational total(0);
                          for (const AgentId i : subset) total += a.v[i];
                          return total;
                        },
                        [&](const CoverageValuation& c) {
                          const std::size_t words = (c.ground_size + kWordBits - 1) / kWordBits;
                          std::vector<std::uint64_t> acc(words, 0);
                          for (const AgentId i : subset) {
                            for (std::size_t w = 0; w < words; ++w) acc[w] |= cover_bits_[i][w];
                          }
                          long covered = 0;
                          for (const auto w : acc) covered += std::popcount(w);
                          return Rational(covered);
                        },
                        [&](const MatchingValuation&) { return evaluate_matching(subset); },
                    },
                    data_);
}

Rational Valuation::evaluate_matching(std::span<const AgentId> subset) const {
  const auto& m = as<MatchingValuation>();
  std::vector<const MatchingEdge*> edges;
  edges.reserve(subset.size());
  for (const AgentId i : subset) {
    if (m.edges[i].weight.sign() > 0) edges.push_back(&m.edges[i]);
  }
  // Heavier edges first tightens the pruning bound early.
  std::stable_sort(edges.begin(), edges.end(),
                   [](const MatchingEdge* a, const MatchingEdge* b) { return a->weight > b->weight; });
  return MatchingSearch(edges).run();
}

ValueOracle::ValueOracle(const Valuation& valuation) : valuation_(&valuation) {}

Rational ValueOracle::value(std::span<const AgentId> subset) {
  ++queries_;
  if (size() > 64) return valuation_->evaluate(subset);
  std::uint64_t key = 0;
  for (const AgentId a : subset) {
    if (a >= size()) throw InvalidSubset("agent " + std::to_string(a) + " out of range [0, " + std::to_string(size()) + ")");
    const std::uint64_t bit = std::uint64_t{1} << a;
    if (key & bit) throw InvalidSubset("agent " + std::to_string(a) + " repeated in subset");
    key |= bit;
  }
  if (const auto it = memo_.find(key); it != memo_.end()) return it->second;
  Rational v = valuation_->evaluate(subset);
  memo_.emplace(key, v);
  return v;
}

Rational ValueOracle::marginal(AgentId agent, std::span<const AgentId> subset) {
  if (std::find(subset.begin(), subset.end(), agent) != subset.end()) {
    throw std::invalid_argument("marginal: agent " + std::to_string(agent) + " already in subset");
  }
  std::vector<AgentId> extended(subset.begin(), subset.end());
  extended.push_back(agent);
  return value(extended) - value(subset);
}

AgentSet make_agent_set(std::vector<AgentId> agents) {
  std::sort(agents.begin(), agents.end());
  agents.erase(std::unique(agents.begin(), agents.end()), agents.end());
  return agents;
}

AgentSet with_agent(const AgentSet& set, AgentId agent) {
  AgentSet out = set;
  const auto it = std::lower_bound(out.begin(), out.end(), agent);
  if (it == out.end() || *it != agent) out.insert(it, agent);
  return out;
}

AgentSet without_agent(const AgentSet& set, AgentId agent) {
  AgentSet out;
  out.reserve(set.size());
  for (const AgentId a : set) {
    if (a != agent) out.push_back(a);
  }
  return out;
}

bool contains(const AgentSet& set, AgentId agent) { return std::binary_search(set.begin(), set.end(), agent); }

AgentSet all_agents(std::size_t n) {
  AgentSet out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i;
  return out;
}

std::string to_string(const AgentSet& set) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < set.size(); ++i) os << (i ? "," : "") << set[i];
  os << '}';
  return os.str();
}

}  // namespace bfm
