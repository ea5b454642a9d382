#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bfm/codec.hpp"
#include "bfm/generators.hpp"
#include "bfm/mechanisms.hpp"
#include "bfm/suite.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAuditFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitMismatch = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text;
  else bfm::write_text_file(path, text);
}

bfm::GeneratorParams parse_params(const std::vector<std::string>& pairs) {
  bfm::GeneratorParams out;
  for (const auto& kv : pairs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--param expects key=value, got '" + kv + "'");
    out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

std::string payments_text(const bfm::Outcome& o) {
  std::string s;
  for (const auto& p : o.payments) s += (s.empty() ? "" : ", ") + p.str();
  return "(" + s + ")";
}

void print_summary(const bfm::Instance& inst, const bfm::RandomizedOutcome& out) {
  for (std::size_t b = 0; b < out.branches.size(); ++b) {
    const auto& br = out.branches[b];
    std::cout << "branch " << b << " prob " << br.probability << ": winners " << bfm::to_string(br.outcome.winners)
              << " payments " << payments_text(br.outcome) << " value "
              << inst.valuation.evaluate(br.outcome.winners) << " total " << br.outcome.total_payment() << " budget "
              << inst.budget << "\n";
  }
}

const bfm::OutcomeBranch& sample_branch(const bfm::RandomizedOutcome& out, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const bfm::Rational u(mpq_class(mpz_class(std::to_string(rng() >> 11)), mpz_class(1) << 53));
  bfm::Rational acc(0);
  for (const auto& b : out.branches) {
    acc += b.probability;
    if (u < acc) return b;
  }
  return out.branches.back();
}

int cmd_generate(const std::string& family, const std::vector<std::string>& params, std::uint64_t seed,
                 const std::string& out) {
  const bfm::Instance inst = bfm::generate(family, parse_params(params), seed);
  emit(out, bfm::instance_to_json(inst));
  return kExitOk;
}

int cmd_run(const std::string& mech, const std::string& in, const std::string& out, bool sample, std::uint64_t seed) {
  const bfm::Mechanism& m = bfm::find_mechanism(mech);
  const bfm::Instance inst = bfm::load_instance(in);
  const bfm::RandomizedOutcome result = m.run(inst);
  if (sample) {
    const bfm::OutcomeBranch& b = sample_branch(result, seed);
    print_summary(inst, bfm::RandomizedOutcome{{bfm::OutcomeBranch{bfm::Rational(1), b.outcome}}});
    if (!out.empty()) bfm::write_text_file(out, bfm::outcome_to_json(b.outcome));
    return kExitOk;
  }
  print_summary(inst, result);
  if (!out.empty()) {
    bfm::write_text_file(out, m.deterministic() ? bfm::outcome_to_json(result.branches.front().outcome)
                                                : bfm::randomized_outcome_to_json(result));
  }
  return kExitOk;
}

int cmd_audit(const std::string& config, const std::string& csv, const std::string& json) {
  const bfm::SuiteConfig cfg = config.empty() ? bfm::default_suite() : bfm::suite_config_from_json(read_file(config));
  const bfm::SuiteResult result = bfm::run_suite(cfg);
  emit(csv, result.csv());
  if (!json.empty()) bfm::write_text_file(json, result.json());
  const std::size_t bad = result.unexpected();
  std::cerr << result.rows.size() << " audited, " << bad << " unexpected\n";
  for (const auto& r : result.rows) {
    if (r.unexpected()) {
      std::cerr << "unexpected " << (r.passed ? "pass" : "fail") << ": " << r.mechanism << " on " << r.family
                << " seed " << r.seed << "\n";
    }
  }
  return bad == 0 ? kExitOk : kExitAuditFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budget-feasible procurement mechanisms: generate instances, run mechanisms, audit them."};
  app.require_subcommand(1);

  std::string family, gen_out;
  std::vector<std::string> params;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("generate", "Write an instance of a generator family");
  gen->add_option("--family", family, "Generator family")->required();
  gen->add_option("--param", params, "Family parameter key=value (repeatable)");
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--out", gen_out, "Output path (default stdout)");

  std::string mech, run_in, run_out;
  bool sample = false;
  std::uint64_t run_seed = 0;
  auto* run = app.add_subcommand("run", "Run a mechanism on an instance file");
  run->add_option("--mech", mech, "Mechanism name")->required();
  run->add_option("--in", run_in, "Instance file")->required();
  run->add_option("--out", run_out, "Outcome file");
  run->add_flag("--sample", sample, "Sample one branch of a randomized mechanism");
  run->add_option("--seed", run_seed, "Seed for --sample");

  std::string config, csv, json;
  auto* audit = app.add_subcommand("audit", "Run an audit suite (built-in default without --config)");
  audit->add_option("--config", config, "Suite config JSON");
  audit->add_option("--csv", csv, "CSV summary path (default stdout)");
  audit->add_option("--json", json, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) return cmd_generate(family, params, gen_seed, gen_out);
    if (*run) return cmd_run(mech, run_in, run_out, sample, run_seed);
    if (*audit) return cmd_audit(config, csv, json);
  } catch (const bfm::MechanismMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMismatch;
  } catch (const bfm::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
