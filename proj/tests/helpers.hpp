#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "bfm/model.hpp"

namespace bfm::test {

inline Rational q(const char* text) { return Rational::parse(text); }

inline std::vector<Rational> rs(std::initializer_list<const char*> xs) {
  std::vector<Rational> out;
  for (const char* x : xs) out.push_back(Rational::parse(x));
  return out;
}

inline Instance additive(std::initializer_list<const char*> v, std::initializer_list<const char*> c, const char* B) {
  return Instance{rs(c), q(B), Valuation(AdditiveValuation{rs(v)})};
}

inline Instance symmetric(std::initializer_list<const char*> r, std::initializer_list<const char*> c, const char* B) {
  return Instance{rs(c), q(B), Valuation(SymmetricValuation{rs(r)})};
}

// Every subset of [0, n) as a sorted agent list, by bitmask.
inline AgentSet subset_of(std::size_t n, unsigned mask) {
  AgentSet s;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask & (1u << i)) s.push_back(i);
  }
  return s;
}

}  // namespace bfm::test
