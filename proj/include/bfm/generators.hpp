#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfm/model.hpp"

namespace bfm {

using GeneratorParams = std::map<std::string, std::string>;

class UnknownFamily : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Bad parameter value or unknown parameter name for a family.
class InvalidParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

const std::vector<std::string>& generator_families();

// Deterministic in (family, params, seed). Families and their parameters
// (defaults in parentheses; B defaults to 1 unless noted):
//   random_symmetric   n(6) B den(24)
//   random_additive    n(6) B den(24)
//   random_coverage    n(6) B den(24) ground(2n)
//   random_matching    n(8) B den(24) left(3)   each edge has its own right vertex
//                      general(0) right(3)      general=1: arbitrary bipartite edges
//   symmetric_lb       n(4) B delta(1/100)      one cost delta, n-1 costs B-delta, V(S)=|S|
//   additive_lb        n(4) B delta(1/100) d(1) item of value d and cost delta plus
//                                               n-1 items splitting value d and cost B-2delta
//   appendixA          eps(1/100) deviated(0)   costs (3, 5-eps, 5), B=10, r=(1,1,1);
//                                               deviated=1 moves agent 2 to 5-2eps
//   appendixB_coverage eps(1/100)               |W|=7,|X|=2,|Y|=2,|Z|=4, B=1,
//                                               T0=W, T1=X+Y, T2=X+Z, costs (eps, 7/24, 1/2)
//   shapley_chain      n(16)                    T0={u0,u1}, Ti={u_(i+1 mod 2), u_(i+1)}, B=n
//   corkscrew          n(6) B kind(coverage)    agent 0 carries almost all value
// Random costs are distinct multiples of B/den in (0, B].
Instance generate(const std::string& family, const GeneratorParams& params, std::uint64_t seed);

}  // namespace bfm
