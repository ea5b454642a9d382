#include "bfm/generators.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <random>
#include <set>

namespace bfm {

namespace {

// Reads typed parameters and rejects names the family does not know.
class ParamReader {
 public:
  ParamReader(const std::string& family, const GeneratorParams& params) : family_(family), params_(params) {}

  std::size_t count(const std::string& key, std::size_t fallback, std::size_t lo, std::size_t hi) {
    used_.insert(key);
    const auto it = params_.find(key);
    if (it == params_.end()) return fallback;
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(it->second, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != it->second.size()) fail(key, "expected a nonnegative integer, got '" + it->second + "'");
    if (v < lo || v > hi) fail(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<std::size_t>(v);
  }

  Rational rational(const std::string& key, const Rational& fallback) {
    used_.insert(key);
    const auto it = params_.find(key);
    if (it == params_.end()) return fallback;
    try {
      return Rational::parse(it->second);
    } catch (const std::invalid_argument& e) {
      fail(key, e.what());
    }
  }

  std::string text(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    const auto it = params_.find(key);
    return it == params_.end() ? fallback : it->second;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    throw InvalidParams(family_ + ": parameter '" + key + "' " + why);
  }

  void finish() const {
    for (const auto& [key, value] : params_) {
      if (!used_.count(key)) throw InvalidParams(family_ + ": unknown parameter '" + key + "'");
    }
  }

 private:
  std::string family_;
  const GeneratorParams& params_;
  std::set<std::string> used_;
};

// mt19937_64's output sequence is fixed by the standard; the distributions
// are not, so sampling is done by hand.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  // Uniform integer in [lo, hi].
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo + 1;
    if (span == 0) return engine_();
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + x % span;
  }

  // `count` distinct integers from [lo, hi], in draw order.
  std::vector<std::uint64_t> distinct(std::size_t count, std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::uint64_t> pool;
    for (std::uint64_t v = lo; v <= hi; ++v) pool.push_back(v);
    for (std::size_t i = 0; i < count; ++i) std::swap(pool[i], pool[uniform(i, pool.size() - 1)]);
    pool.resize(count);
    return pool;
  }

 private:
  std::mt19937_64 engine_;
};

std::vector<Rational> distinct_costs(Sampler& rng, std::size_t n, const Rational& budget, std::size_t den) {
  const std::size_t grid = std::max(den, 2 * n);
  std::vector<Rational> costs;
  for (const auto a : rng.distinct(n, 1, grid)) {
    costs.push_back(budget * Rational(static_cast<long>(a), static_cast<long>(grid)));
  }
  return costs;
}

Rational quarter_units(Sampler& rng, std::uint64_t lo, std::uint64_t hi) {
  return Rational(static_cast<long>(rng.uniform(lo, hi)), 4);
}

Rational positive_budget(ParamReader& p) {
  const Rational b = p.rational("B", Rational(1));
  if (b.sign() <= 0) p.fail("B", "must be positive");
  return b;
}

Instance random_symmetric(ParamReader& p, Sampler& rng) {
  const std::size_t n = p.count("n", 6, 1, 64);
  const Rational budget = positive_budget(p);
  const std::size_t den = p.count("den", 24, 1, 1u << 20);
  std::vector<Rational> r;
  for (std::size_t i = 0; i < n; ++i) r.push_back(quarter_units(rng, 0, 40));
  std::sort(r.begin(), r.end(), std::greater<>());
  return Instance{distinct_costs(rng, n, budget, den), budget, Valuation(SymmetricValuation{std::move(r)})};
}

Instance random_additive(ParamReader& p, Sampler& rng) {
  const std::size_t n = p.count("n", 6, 1, 64);
  const Rational budget = positive_budget(p);
  const std::size_t den = p.count("den", 24, 1, 1u << 20);
  std::vector<Rational> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(quarter_units(rng, 0, 40));
  return Instance{distinct_costs(rng, n, budget, den), budget, Valuation(AdditiveValuation{std::move(v)})};
}

Instance random_coverage(ParamReader& p, Sampler& rng) {
  const std::size_t n = p.count("n", 6, 1, 64);
  const Rational budget = positive_budget(p);
  const std::size_t den = p.count("den", 24, 1, 1u << 20);
  const std::size_t ground = p.count("ground", 2 * n, 1, 4096);
  CoverageValuation c;
  c.ground_size = ground;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t size = rng.uniform(1, std::max<std::size_t>(1, (ground + 1) / 2));
    std::vector<std::size_t> set;
    for (const auto u : rng.distinct(size, 0, ground - 1)) set.push_back(u);
    c.sets.push_back(std::move(set));
  }
  return Instance{distinct_costs(rng, n, budget, den), budget, Valuation(std::move(c))};
}

Instance random_matching(ParamReader& p, Sampler& rng) {
  const std::size_t n = p.count("n", 8, 1, 16);
  const Rational budget = positive_budget(p);
  const std::size_t den = p.count("den", 24, 1, 1u << 20);
  const std::size_t left = p.count("left", 3, 1, 32);
  const bool general = p.count("general", 0, 0, 1) == 1;
  MatchingValuation m;
  m.left_size = left;
  if (!general) {
    // Every edge ends in its own right vertex: edges conflict only through
    // shared left vertices, which keeps the valuation submodular.
    m.right_size = n;
    for (std::size_t e = 0; e < n; ++e) {
      m.edges.push_back(MatchingEdge{rng.uniform(0, left - 1), e, quarter_units(rng, 1, 40)});
    }
  } else {
    const std::size_t right = p.count("right", 3, 1, 32);
    m.right_size = right;
    // Distinct endpoint pairs while they last, then parallel edges.
    std::vector<std::uint64_t> pairs = rng.distinct(std::min(n, left * right), 0, left * right - 1);
    while (pairs.size() < n) pairs.push_back(rng.uniform(0, left * right - 1));
    for (const auto pair : pairs) {
      m.edges.push_back(MatchingEdge{pair / right, pair % right, quarter_units(rng, 1, 40)});
    }
  }
  return Instance{distinct_costs(rng, n, budget, den), budget, Valuation(std::move(m))};
}

Instance symmetric_lb(ParamReader& p) {
  const std::size_t n = p.count("n", 4, 2, 1024);
  const Rational budget = positive_budget(p);
  const Rational delta = p.rational("delta", Rational(1, 100));
  if (delta.sign() <= 0 || delta >= budget) p.fail("delta", "must lie in (0, B)");
  std::vector<Rational> costs(n, budget - delta);
  costs[0] = delta;
  return Instance{std::move(costs), budget, Valuation(SymmetricValuation{std::vector<Rational>(n, Rational(1))})};
}

Instance additive_lb(ParamReader& p) {
  const std::size_t n = p.count("n", 4, 2, 1024);
  const Rational budget = positive_budget(p);
  const Rational delta = p.rational("delta", Rational(1, 100));
  const Rational d = p.rational("d", Rational(1));
  if (delta.sign() <= 0 || delta * Rational(2) >= budget) p.fail("delta", "must lie in (0, B/2)");
  if (d.sign() <= 0) p.fail("d", "must be positive");
  const Rational base_count(static_cast<long>(n - 1));
  std::vector<Rational> costs(n, (budget - delta * Rational(2)) / base_count);
  std::vector<Rational> values(n, d / base_count);
  costs[0] = delta;
  values[0] = d;
  return Instance{std::move(costs), budget, Valuation(AdditiveValuation{std::move(values)})};
}

Instance appendix_a(ParamReader& p) {
  const Rational eps = p.rational("eps", Rational(1, 100));
  const std::size_t deviated = p.count("deviated", 0, 0, 1);
  if (eps.sign() <= 0 || eps >= Rational(1)) p.fail("eps", "must lie in (0, 1)");
  std::vector<Rational> costs{Rational(3), Rational(5) - eps, Rational(5)};
  if (deviated) costs[2] = Rational(5) - eps * Rational(2);
  return Instance{std::move(costs), Rational(10), Valuation(SymmetricValuation{{Rational(1), Rational(1), Rational(1)}})};
}

Instance appendix_b_coverage(ParamReader& p) {
  const Rational eps = p.rational("eps", Rational(1, 100));
  if (eps.sign() <= 0 || eps >= Rational(1, 4)) p.fail("eps", "must lie in (0, 1/4)");
  auto range = [](std::size_t lo, std::size_t count) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(lo + i);
    return out;
  };
  const auto w = range(0, 7);
  const auto x = range(7, 2);
  const auto y = range(9, 2);
  const auto z = range(11, 4);
  auto unite = [](std::vector<std::size_t> a, const std::vector<std::size_t>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  CoverageValuation c{15, {w, unite(x, y), unite(x, z)}};
  return Instance{{eps, Rational(7, 24), Rational(1, 2)}, Rational(1), Valuation(std::move(c))};
}

Instance shapley_chain(ParamReader& p) {
  const std::size_t n = p.count("n", 16, 2, 4096);
  CoverageValuation c;
  c.ground_size = n + 1;
  std::vector<Rational> costs;
  const long scale = 1000L * static_cast<long>(n);
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t chain_index = a + 1;
    if (a == 0) {
      c.sets.push_back({0, 1});
    } else {
      c.sets.push_back({chain_index % 2, chain_index});
    }
    // eps strictly decreasing in the agent index.
    const Rational eps(static_cast<long>(n - a), scale);
    costs.push_back(Rational(1) - eps);
  }
  return Instance{std::move(costs), Rational(static_cast<long>(n)), Valuation(std::move(c))};
}

Instance corkscrew(ParamReader& p) {
  const std::size_t n = p.count("n", 6, 2, 256);
  const Rational budget = positive_budget(p);
  const std::string kind = p.text("kind", "coverage");
  const long heavy = 100L * static_cast<long>(n);
  std::vector<Rational> costs(n, budget / Rational(10L * static_cast<long>(n)));
  costs[0] = budget / Rational(20L * static_cast<long>(n));
  if (kind == "coverage") {
    CoverageValuation c;
    c.ground_size = static_cast<std::size_t>(heavy) + n - 1;
    std::vector<std::size_t> essential;
    for (long u = 0; u < heavy; ++u) essential.push_back(static_cast<std::size_t>(u));
    c.sets.push_back(std::move(essential));
    for (std::size_t a = 1; a < n; ++a) c.sets.push_back({static_cast<std::size_t>(heavy) + a - 1});
    return Instance{std::move(costs), budget, Valuation(std::move(c))};
  }
  if (kind == "additive") {
    std::vector<Rational> v(n, Rational(1));
    v[0] = Rational(heavy);
    return Instance{std::move(costs), budget, Valuation(AdditiveValuation{std::move(v)})};
  }
  if (kind == "matching") {
    if (n > 16) p.fail("n", "must be <= 16 for kind=matching");
    MatchingValuation m{n, n, {}};
    m.edges.push_back(MatchingEdge{0, 0, Rational(heavy)});
    for (std::size_t a = 1; a < n; ++a) m.edges.push_back(MatchingEdge{a, a, Rational(1)});
    return Instance{std::move(costs), budget, Valuation(std::move(m))};
  }
  p.fail("kind", "must be coverage, additive or matching");
}

}  // namespace

const std::vector<std::string>& generator_families() {
  static const std::vector<std::string> families{
      "random_symmetric", "random_additive", "random_coverage", "random_matching", "symmetric_lb",
      "additive_lb",      "appendixA",       "appendixB_coverage", "shapley_chain", "corkscrew"};
  return families;
}

Instance generate(const std::string& family, const GeneratorParams& params, std::uint64_t seed) {
  ParamReader p(family, params);
  Sampler rng(seed);
  Instance inst = [&]() -> Instance {
    if (family == "random_symmetric") return random_symmetric(p, rng);
    if (family == "random_additive") return random_additive(p, rng);
    if (family == "random_coverage") return random_coverage(p, rng);
    if (family == "random_matching") return random_matching(p, rng);
    if (family == "symmetric_lb") return symmetric_lb(p);
    if (family == "additive_lb") return additive_lb(p);
    if (family == "appendixA") return appendix_a(p);
    if (family == "appendixB_coverage") return appendix_b_coverage(p);
    if (family == "shapley_chain") return shapley_chain(p);
    if (family == "corkscrew") return corkscrew(p);
    std::string names;
    for (const auto& f : generator_families()) names += (names.empty() ? "" : ", ") + f;
    throw UnknownFamily("unknown family '" + family + "'; valid families: " + names);
  }();
  p.finish();
  inst.validate();
  return inst;
}

}  // namespace bfm
