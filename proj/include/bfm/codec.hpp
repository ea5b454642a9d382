#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "bfm/model.hpp"

namespace bfm {

// Malformed input file. `line()` is set for syntax errors (1-based, 0 when
// unknown); `field()` names the offending JSON path for schema errors.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::string field);
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

// Instance file:
//   {"n": 3, "budget": "p/q", "costs": ["p/q", ...],
//    "valuation": {"kind": "symmetric", "r": [...]}
//               | {"kind": "additive", "v": [...]}
//               | {"kind": "coverage", "ground_size": g, "sets": [[0, 4], ...]}
//               | {"kind": "matching", "left_size": l, "right_size": r,
//                  "edges": [[left, right, "w"], ...]}}
// Output is canonical (sorted keys, two-space indent, trailing newline), so
// equal instances serialize to identical bytes.
std::string instance_to_json(const Instance& instance);
Instance instance_from_json(std::string_view text);

std::string outcome_to_json(const Outcome& outcome);
Outcome outcome_from_json(std::string_view text);
// {"branches": [{"prob": "1/2", "outcome": {...}}, ...]}
std::string randomized_outcome_to_json(const RandomizedOutcome& outcome);
RandomizedOutcome randomized_outcome_from_json(std::string_view text);

Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& instance, const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Stable 64-bit FNV-1a digest of the canonical instance JSON, as 16 hex chars.
std::string instance_digest(const Instance& instance);

}  // namespace bfm
