#include "bfm/suite.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "bfm/codec.hpp"
#include "json.hpp"

namespace bfm {

namespace {

using nlohmann::json;

constexpr const char* kDefaultSuite = R"({
  "max_n": 12,
  "workers": 1,
  "cases": [
    {"family": "random_symmetric", "params": {"n": "8"}, "seeds": [0, 29], "mechanisms": ["symmetric", "submodular"], "expect": "pass"},
    {"family": "random_additive", "params": {"n": "7"}, "seeds": [0, 29], "mechanisms": ["knapsack", "submodular"], "expect": "pass"},
    {"family": "random_coverage", "params": {"n": "6"}, "seeds": [0, 19], "mechanisms": ["submodular"], "expect": "pass"},
    {"family": "random_matching", "params": {"n": "7"}, "seeds": [0, 19], "mechanisms": ["matching", "submodular"], "expect": "pass"},
    {"family": "symmetric_lb", "params": {}, "seeds": [0, 0], "mechanisms": ["symmetric"], "expect": "pass"},
    {"family": "additive_lb", "params": {}, "seeds": [0, 0], "mechanisms": ["knapsack"], "expect": "pass"},
    {"family": "appendixA", "params": {"eps": "1/10"}, "seeds": [0, 0], "mechanisms": ["symmetric"], "expect": "pass"},
    {"family": "appendixA", "params": {"eps": "1/10", "deviated": "1"}, "seeds": [0, 0], "mechanisms": ["symmetric_fair_share"], "expect": "fail"},
    {"family": "appendixB_coverage", "params": {}, "seeds": [0, 0], "mechanisms": ["submodular"], "expect": "pass"},
    {"family": "appendixB_coverage", "params": {}, "seeds": [0, 0], "mechanisms": ["naive_max"], "expect": "fail"},
    {"family": "corkscrew", "params": {"kind": "additive"}, "seeds": [0, 0], "mechanisms": ["knapsack", "submodular"], "expect": "pass"}
  ]
})";

[[noreturn]] void config_error(const std::string& what) { throw SuiteConfigError("suite config: " + what); }

std::string param_text(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return v.dump();
  config_error("param '" + key + "' must be a string or integer");
}

SuiteCase case_from_json(const json& j, std::size_t index) {
  const std::string where = "cases[" + std::to_string(index) + "]";
  if (!j.is_object()) config_error(where + " must be an object");
  SuiteCase c;
  if (!j.contains("family") || !j["family"].is_string()) config_error(where + ".family must be a string");
  c.family = j["family"].get<std::string>();
  if (j.contains("params")) {
    if (!j["params"].is_object()) config_error(where + ".params must be an object");
    for (const auto& [k, v] : j["params"].items()) c.params[k] = param_text(v, k);
  }
  if (!j.contains("seeds") || !j["seeds"].is_array() || j["seeds"].size() != 2 || !j["seeds"][0].is_number_unsigned() ||
      !j["seeds"][1].is_number_unsigned()) {
    config_error(where + ".seeds must be [from, to] with nonnegative integers");
  }
  c.seed_from = j["seeds"][0].get<std::uint64_t>();
  c.seed_to = j["seeds"][1].get<std::uint64_t>();
  if (c.seed_to < c.seed_from) config_error(where + ".seeds range is empty");
  if (!j.contains("mechanisms") || !j["mechanisms"].is_array()) config_error(where + ".mechanisms must be an array");
  for (const auto& m : j["mechanisms"]) {
    if (!m.is_string()) config_error(where + ".mechanisms entries must be strings");
    c.mechanisms.push_back(m.get<std::string>());
  }
  const std::string expect = j.value("expect", std::string("pass"));
  if (expect != "pass" && expect != "fail") config_error(where + ".expect must be \"pass\" or \"fail\"");
  c.expect_pass = expect == "pass";
  return c;
}

std::string csv_ratio(const ExtRational& r) {
  if (!r) return "inf,1";
  return r->numerator_str() + "," + r->denominator_str();
}

}  // namespace

SuiteConfig suite_config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    config_error(e.what());
  }
  if (!j.is_object()) config_error("top level must be an object");
  SuiteConfig cfg;
  if (j.contains("max_n")) {
    if (!j["max_n"].is_number_unsigned()) config_error("max_n must be a nonnegative integer");
    cfg.max_n = j["max_n"].get<std::size_t>();
  }
  if (cfg.max_n > kBruteForceMaxAgents) {
    config_error("max_n " + std::to_string(cfg.max_n) + " exceeds the brute-force limit " +
                 std::to_string(kBruteForceMaxAgents));
  }
  if (j.contains("workers")) {
    if (!j["workers"].is_number_unsigned() || j["workers"].get<std::size_t>() == 0) {
      config_error("workers must be a positive integer");
    }
    cfg.workers = j["workers"].get<std::size_t>();
  }
  if (j.contains("cases")) {
    if (!j["cases"].is_array()) config_error("cases must be an array");
    for (std::size_t i = 0; i < j["cases"].size(); ++i) cfg.cases.push_back(case_from_json(j["cases"][i], i));
  }
  return cfg;
}

const SuiteConfig& default_suite() {
  static const SuiteConfig cfg = suite_config_from_json(kDefaultSuite);
  return cfg;
}

SuiteRow audit_case(const Mechanism& mechanism, const std::string& family, std::uint64_t seed,
                    const Instance& instance, bool expect_pass) {
  SuiteRow row;
  row.mechanism = mechanism.name;
  row.family = family;
  row.seed = seed;
  row.n = instance.n();
  row.expect_pass = expect_pass;

  const RandomizedOutcome outcome = mechanism.run(instance);
  AuditReport report;
  report.subject = mechanism.name;
  report.instance_digest = instance_digest(instance);
  report.merge(audit_outcome(instance, outcome), "outcome.");
  report.merge(audit_truthfulness(mechanism, instance), "truthful.");
  row.ratio = approximation_ratio(outcome, instance);
  if (mechanism.proven_ratio) {
    const bool within = row.ratio && *row.ratio <= *mechanism.proven_ratio;
    report.add("ratio", within, "OPT/E[V] = " + ext_str(row.ratio) + ", bound " + mechanism.proven_ratio->str());
  }
  row.checks_passed = report.passed_count();
  row.checks_total = report.checks.size();
  row.passed = report.passed();
  row.report = std::move(report);
  return row;
}

SuiteResult run_suite(const SuiteConfig& config) {
  struct Job {
    const Mechanism* mechanism;
    const SuiteCase* suite_case;
    std::uint64_t seed;
    Instance instance;
  };
  std::vector<Job> jobs;
  for (const auto& c : config.cases) {
    std::vector<const Mechanism*> mechs;
    for (const auto& name : c.mechanisms) {
      try {
        mechs.push_back(&find_mechanism(name));
      } catch (const std::invalid_argument& e) {
        config_error(e.what());
      }
    }
    for (std::uint64_t seed = c.seed_from;; ++seed) {
      Instance inst = [&] {
        try {
          return generate(c.family, c.params, seed);
        } catch (const std::invalid_argument& e) {
          config_error(e.what());
        }
      }();
      if (inst.n() > config.max_n) {
        config_error(c.family + " seed " + std::to_string(seed) + " has n = " + std::to_string(inst.n()) +
                     " above max_n " + std::to_string(config.max_n));
      }
      for (const Mechanism* m : mechs) {
        m->check_applicable(inst);
        jobs.push_back(Job{m, &c, seed, inst});
      }
      if (seed == c.seed_to) break;
    }
  }

  SuiteResult result;
  result.rows.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      const Job& job = jobs[k];
      result.rows[k] = audit_case(*job.mechanism, job.suite_case->family, job.seed, job.instance,
                                  job.suite_case->expect_pass);
    }
  };
  const std::size_t workers = std::min<std::size_t>(config.workers, std::max<std::size_t>(1, jobs.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::stable_sort(result.rows.begin(), result.rows.end(), [](const SuiteRow& a, const SuiteRow& b) {
    if (a.report.instance_digest != b.report.instance_digest) return a.report.instance_digest < b.report.instance_digest;
    return a.mechanism < b.mechanism;
  });
  return result;
}

std::size_t SuiteResult::unexpected() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const SuiteRow& r) { return r.unexpected(); }));
}

std::string SuiteResult::csv() const {
  std::string out = "mechanism,family,seed,n,ratio_num,ratio_den,checks_passed,checks_total,expected,result\n";
  for (const auto& r : rows) {
    out += r.mechanism + "," + r.family + "," + std::to_string(r.seed) + "," + std::to_string(r.n) + "," +
           csv_ratio(r.ratio) + "," + std::to_string(r.checks_passed) + "," + std::to_string(r.checks_total) + "," +
           (r.expect_pass ? "pass" : "fail") + "," + (r.passed ? "pass" : "fail") + "\n";
  }
  return out;
}

std::string SuiteResult::json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json entry = nlohmann::json::parse(r.report.to_json());
    entry["family"] = r.family;
    entry["seed"] = r.seed;
    entry["expected"] = r.expect_pass ? "pass" : "fail";
    entry["ratio"] = ext_str(r.ratio);
    arr.push_back(entry);
  }
  return arr.dump(2) + "\n";
}

}  // namespace bfm
