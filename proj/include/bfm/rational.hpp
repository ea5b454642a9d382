#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace bfm {

// Exact rational number in canonical form (gcd(num, den) = 1, den > 0).
// Thin value wrapper over GMP's mpq_class; it exists so that arithmetic
// results are always materialized (no expression templates leaking through
// `auto`) and so that the textual "p/q" form has one owner.
class Rational {
 public:
  Rational() = default;
  Rational(long value) : q_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(int value) : q_(value) {}   // NOLINT(google-explicit-constructor)
  Rational(long num, long den);
  explicit Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

  // Accepts "p", "p/q", optional leading '-'. Throws std::invalid_argument.
  static Rational parse(std::string_view text);

  std::string str() const;  // "p" when den == 1, else "p/q"
  std::string numerator_str() const { return q_.get_num().get_str(); }
  std::string denominator_str() const { return q_.get_den().get_str(); }
  double to_double() const { return q_.get_d(); }
  int sign() const { return sgn(q_); }
  bool is_zero() const { return sign() == 0; }
  const mpq_class& raw() const { return q_; }

  // Largest rational with the given denominator that does not exceed *this.
  Rational floor_to_denominator(const mpz_class& den) const;

  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.q_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) == 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  mpq_class q_{0};
};

Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);

// 2^-exponent as an exact rational.
Rational pow2_neg(unsigned exponent);

// Value on the extended half-line [0, +inf]; nullopt encodes +inf.
using ExtRational = std::optional<Rational>;

inline bool ext_less(const ExtRational& a, const ExtRational& b) {
  if (!a) return false;
  if (!b) return true;
  return *a < *b;
}
inline ExtRational ext_min(const ExtRational& a, const ExtRational& b) { return ext_less(b, a) ? b : a; }
inline ExtRational ext_max(const ExtRational& a, const ExtRational& b) { return ext_less(a, b) ? b : a; }
std::string ext_str(const ExtRational& a);

}  // namespace bfm
