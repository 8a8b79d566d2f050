#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace towerplex {

/// Exact rational scalar backed by GMP. Always canonical: lowest terms,
/// positive denominator, value equality.
class Rat {
 public:
  Rat() : v_(0) {}
  Rat(long n) : v_(n) {}  // NOLINT: implicit by design, integers embed
  Rat(long n, long d);
  explicit Rat(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

  /// Parses "p/q" or "p" (lowest terms not required on input).
  static Rat from_string(std::string_view text);

  const mpz_class& num() const { return v_.get_num(); }
  const mpz_class& den() const { return v_.get_den(); }
  const mpq_class& mpq() const { return v_; }

  bool is_zero() const { return sgn(v_) == 0; }
  int sign() const { return sgn(v_); }
  Rat abs() const;

  /// Canonical textual form "p/q" ("p" when q = 1).
  std::string str() const;

  /// Decimal approximation, round-half-even at `sig` significant digits.
  /// Scientific notation, e.g. "8.33333333333e-2"; exact zero prints "0".
  std::string decimal(int sig = 12) const;

  /// Exact conversion for values known to be small integers.
  std::int64_t to_int64() const;

  double to_double() const { return v_.get_d(); }

  friend Rat operator+(const Rat& a, const Rat& b) { return Rat(mpq_class(a.v_ + b.v_)); }
  friend Rat operator-(const Rat& a, const Rat& b) { return Rat(mpq_class(a.v_ - b.v_)); }
  friend Rat operator*(const Rat& a, const Rat& b) { return Rat(mpq_class(a.v_ * b.v_)); }
  friend Rat operator/(const Rat& a, const Rat& b);
  friend Rat operator-(const Rat& a) { return Rat(mpq_class(-a.v_)); }

  Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
  Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
  Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
  Rat& operator/=(const Rat& o);

  friend bool operator==(const Rat& a, const Rat& b) { return cmp(a.v_, b.v_) == 0; }
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
    int c = cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  mpq_class v_;
};

std::ostream& operator<<(std::ostream& os, const Rat& r);

Rat rat_min(const Rat& a, const Rat& b);
Rat rat_max(const Rat& a, const Rat& b);

/// Largest power of two (possibly negative exponent) strictly below x. x > 0.
Rat largest_pow2_strictly_below(const Rat& x);

/// Smallest positive-integer power of two strictly above x.
std::uint64_t smallest_pow2_strictly_above(const Rat& x);

}  // namespace towerplex
