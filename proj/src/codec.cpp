#include "bfm/codec.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace bfm {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ParseError("field '" + field + "': " + what, 0, field);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) field_error(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) field_error(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

Rational read_rational(const json& j, const std::string& path) {
  if (!j.is_string()) field_error(path, "expected a rational string \"p/q\"");
  try {
    return Rational::parse(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    field_error(path, e.what());
  }
}

std::size_t read_index(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) field_error(path, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

const json& read_array(const json& j, const std::string& path) {
  if (!j.is_array()) field_error(path, "expected an array");
  return j;
}

std::vector<Rational> read_rationals(const json& obj, const std::string& key, const std::string& path) {
  const std::string p = join(path, key);
  const json& arr = read_array(require(obj, key, path), p);
  std::vector<Rational> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(read_rational(arr[i], index(p, i)));
  return out;
}

json rationals_json(const std::vector<Rational>& xs) {
  json arr = json::array();
  for (const auto& x : xs) arr.push_back(x.str());
  return arr;
}

json valuation_json(const Valuation& valuation) {
  json v;
  v["kind"] = to_string(valuation.kind());
  switch (valuation.kind()) {
    case ValuationKind::kSymmetric: v["r"] = rationals_json(valuation.as<SymmetricValuation>().r); break;
    case ValuationKind::kAdditive: v["v"] = rationals_json(valuation.as<AdditiveValuation>().v); break;
    case ValuationKind::kCoverage: {
      const auto& c = valuation.as<CoverageValuation>();
      v["ground_size"] = c.ground_size;
      v["sets"] = c.sets;
      break;
    }
    case ValuationKind::kMatching: {
      const auto& m = valuation.as<MatchingValuation>();
      v["left_size"] = m.left_size;
      v["right_size"] = m.right_size;
      json edges = json::array();
      for (const auto& e : m.edges) edges.push_back(json::array({e.left, e.right, e.weight.str()}));
      v["edges"] = edges;
      break;
    }
  }
  return v;
}

Valuation valuation_from(const json& v, const std::string& path) {
  const json& kind_json = require(v, "kind", path);
  if (!kind_json.is_string()) field_error(join(path, "kind"), "expected a string");
  ValuationKind kind;
  try {
    kind = valuation_kind_from_string(kind_json.get<std::string>());
  } catch (const std::invalid_argument& e) {
    field_error(join(path, "kind"), e.what());
  }
  switch (kind) {
    case ValuationKind::kSymmetric: return Valuation(SymmetricValuation{read_rationals(v, "r", path)});
    case ValuationKind::kAdditive: return Valuation(AdditiveValuation{read_rationals(v, "v", path)});
    case ValuationKind::kCoverage: {
      CoverageValuation c;
      c.ground_size = read_index(require(v, "ground_size", path), join(path, "ground_size"));
      const std::string sp = join(path, "sets");
      const json& sets = read_array(require(v, "sets", path), sp);
      for (std::size_t i = 0; i < sets.size(); ++i) {
        const json& s = read_array(sets[i], index(sp, i));
        std::vector<std::size_t> elems;
        for (std::size_t k = 0; k < s.size(); ++k) elems.push_back(read_index(s[k], index(index(sp, i), k)));
        c.sets.push_back(std::move(elems));
      }
      return Valuation(std::move(c));
    }
    case ValuationKind::kMatching: {
      MatchingValuation m;
      m.left_size = read_index(require(v, "left_size", path), join(path, "left_size"));
      m.right_size = read_index(require(v, "right_size", path), join(path, "right_size"));
      const std::string ep = join(path, "edges");
      const json& edges = read_array(require(v, "edges", path), ep);
      for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string p = index(ep, i);
        const json& e = read_array(edges[i], p);
        if (e.size() != 3) field_error(p, "expected [left, right, \"weight\"]");
        m.edges.push_back(MatchingEdge{read_index(e[0], index(p, 0)), read_index(e[1], index(p, 1)),
                                       read_rational(e[2], index(p, 2))});
      }
      return Valuation(std::move(m));
    }
  }
  field_error(join(path, "kind"), "unsupported");
}

json parse_document(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < upto; ++i) line += text[i] == '\n';
    throw ParseError("line " + std::to_string(line) + ": " + e.what(), line, "");
  }
}

json outcome_json(const Outcome& o) {
  json j;
  j["winners"] = o.winners;
  j["payments"] = rationals_json(o.payments);
  return j;
}

Outcome outcome_from(const json& j, const std::string& path) {
  Outcome o;
  const std::string wp = join(path, "winners");
  const json& winners = read_array(require(j, "winners", path), wp);
  for (std::size_t i = 0; i < winners.size(); ++i) o.winners.push_back(read_index(winners[i], index(wp, i)));
  o.payments = read_rationals(j, "payments", path);
  try {
    validate_outcome(o, o.payments.size());
  } catch (const ValidationError& e) {
    field_error(path.empty() ? "outcome" : path, e.what());
  }
  return o;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t line, std::string field)
    : std::runtime_error(message), line_(line), field_(std::move(field)) {}

std::string instance_to_json(const Instance& instance) {
  json j;
  j["n"] = instance.n();
  j["budget"] = instance.budget.str();
  j["costs"] = rationals_json(instance.costs);
  j["valuation"] = valuation_json(instance.valuation);
  return dump(j);
}

Instance instance_from_json(std::string_view text) {
  const json j = parse_document(text);
  if (!j.is_object()) field_error("", "instance must be a JSON object");
  const std::size_t n = read_index(require(j, "n", ""), "n");
  Rational budget = read_rational(require(j, "budget", ""), "budget");
  std::vector<Rational> costs = read_rationals(j, "costs", "");
  if (costs.size() != n) field_error("costs", "expected " + std::to_string(n) + " entries, got " + std::to_string(costs.size()));
  Instance inst{std::move(costs), std::move(budget), valuation_from(require(j, "valuation", ""), "valuation")};
  inst.validate();
  return inst;
}

std::string outcome_to_json(const Outcome& outcome) { return dump(outcome_json(outcome)); }

Outcome outcome_from_json(std::string_view text) { return outcome_from(parse_document(text), ""); }

std::string randomized_outcome_to_json(const RandomizedOutcome& outcome) {
  json branches = json::array();
  for (const auto& b : outcome.branches) {
    json jb;
    jb["prob"] = b.probability.str();
    jb["outcome"] = outcome_json(b.outcome);
    branches.push_back(jb);
  }
  json j;
  j["branches"] = branches;
  return dump(j);
}

RandomizedOutcome randomized_outcome_from_json(std::string_view text) {
  const json j = parse_document(text);
  const json& branches = read_array(require(j, "branches", ""), "branches");
  RandomizedOutcome out;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const std::string p = index("branches", i);
    out.branches.push_back(OutcomeBranch{read_rational(require(branches[i], "prob", p), join(p, "prob")),
                                         outcome_from(require(branches[i], "outcome", p), join(p, "outcome"))});
  }
  out.validate();
  return out;
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void save_instance(const Instance& instance, const std::filesystem::path& path) {
  write_text_file(path, instance_to_json(instance));
}

std::string instance_digest(const Instance& instance) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char ch : instance_to_json(instance)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace bfm
