#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bfm/generators.hpp"
#include "bfm/verify.hpp"

namespace bfm {

class SuiteConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// One family with fixed params over an inclusive seed range, run through
// each listed mechanism. `expect_pass` false marks a regression target.
struct SuiteCase {
  std::string family;
  GeneratorParams params;
  std::uint64_t seed_from = 0;
  std::uint64_t seed_to = 0;
  std::vector<std::string> mechanisms;
  bool expect_pass = true;
};

// {"max_n": 12, "workers": 1,
//  "cases": [{"family": "random_additive", "params": {"n": "6"},
//             "seeds": [0, 49], "mechanisms": ["knapsack"], "expect": "pass"}]}
struct SuiteConfig {
  std::size_t max_n = 12;
  std::size_t workers = 1;
  std::vector<SuiteCase> cases;
};

SuiteConfig suite_config_from_json(std::string_view text);
const SuiteConfig& default_suite();

struct SuiteRow {
  std::string mechanism;
  std::string family;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  ExtRational ratio;
  std::size_t checks_passed = 0;
  std::size_t checks_total = 0;
  bool expect_pass = true;
  bool passed = false;
  AuditReport report;

  bool unexpected() const { return passed != expect_pass; }
};

struct SuiteResult {
  std::vector<SuiteRow> rows;  // sorted by (instance digest, mechanism)
  std::size_t unexpected() const;
  std::string csv() const;
  std::string json() const;
};

// Throws SuiteConfigError for bad cases (unknown family or mechanism, caps)
// and MechanismMismatch when a mechanism does not fit a family.
SuiteResult run_suite(const SuiteConfig& config);
SuiteRow audit_case(const Mechanism& mechanism, const std::string& family, std::uint64_t seed,
                    const Instance& instance, bool expect_pass);

}  // namespace bfm
