#include "towerplex/rat.hpp"

#include <ostream>
#include <stdexcept>

#include "towerplex/errors.hpp"

namespace towerplex {

Rat::Rat(long n, long d) {
  if (d == 0) throw std::invalid_argument("rational with zero denominator");
  v_ = mpq_class(n, d);
  v_.canonicalize();
}

Rat Rat::from_string(std::string_view text) {
  auto bad = [&] { return std::invalid_argument("malformed rational '" + std::string(text) + "'"); };
  if (text.empty()) throw bad();
  std::string num, den = "1";
  auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    num = std::string(text);
  } else {
    num = std::string(text.substr(0, slash));
    den = std::string(text.substr(slash + 1));
    if (num.empty() || den.empty() || den.find('/') != std::string::npos) throw bad();
  }
  try {
    mpz_class n(num), d(den);
    if (d == 0) throw bad();
    mpq_class q(n, d);
    q.canonicalize();
    return Rat(std::move(q));
  } catch (const std::invalid_argument&) {
    throw bad();
  }
}

Rat Rat::abs() const {
  mpq_class a = v_;
  if (sgn(a) < 0) a = -a;
  return Rat(std::move(a));
}

std::string Rat::str() const {
  if (den() == 1) return num().get_str();
  return num().get_str() + "/" + den().get_str();
}

Rat operator/(const Rat& a, const Rat& b) {
  if (b.is_zero()) throw std::invalid_argument("rational division by zero");
  return Rat(mpq_class(a.v_ / b.v_));
}

Rat& Rat::operator/=(const Rat& o) {
  if (o.is_zero()) throw std::invalid_argument("rational division by zero");
  v_ /= o.v_;
  return *this;
}

std::int64_t Rat::to_int64() const {
  if (den() != 1 || !num().fits_slong_p())
    throw Error(ErrorCode::InternalInvariant, "rational " + str() + " is not a small integer");
  return num().get_si();
}

namespace {

mpz_class pow10(unsigned long k) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, k);
  return p;
}

}  // namespace

std::string Rat::decimal(int sig) const {
  if (is_zero()) return "0";
  mpz_class a = ::abs(num());
  const mpz_class& d = den();

  // Find e with 10^(e-1) <= a/d < 10^e.
  long e = static_cast<long>(mpz_sizeinbase(a.get_mpz_t(), 10)) -
           static_cast<long>(mpz_sizeinbase(d.get_mpz_t(), 10)) + 1;
  auto value_lt_pow = [&](long k) {
    // a/d < 10^k ?
    if (k >= 0) return a < d * pow10(static_cast<unsigned long>(k));
    return a * pow10(static_cast<unsigned long>(-k)) < d;
  };
  while (!value_lt_pow(e)) ++e;
  while (value_lt_pow(e - 1)) --e;

  // digits = round_half_even(a * 10^(sig-e) / d), an integer in [10^(sig-1), 10^sig].
  mpz_class n = a, dd = d;
  long scale = sig - e;
  if (scale >= 0)
    n *= pow10(static_cast<unsigned long>(scale));
  else
    dd *= pow10(static_cast<unsigned long>(-scale));
  mpz_class q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), dd.get_mpz_t());
  mpz_class twice = 2 * r;
  if (twice > dd || (twice == dd && mpz_odd_p(q.get_mpz_t()))) q += 1;
  if (q == pow10(static_cast<unsigned long>(sig))) {
    q = pow10(static_cast<unsigned long>(sig - 1));
    ++e;
  }

  std::string digits = q.get_str();
  std::string out;
  if (sign() < 0) out += '-';
  out += digits[0];
  out += '.';
  out += digits.substr(1);
  out += 'e';
  long exp10 = e - 1;
  out += (exp10 < 0 ? "-" : "+") + std::to_string(exp10 < 0 ? -exp10 : exp10);
  return out;
}

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

Rat rat_min(const Rat& a, const Rat& b) { return a < b ? a : b; }
Rat rat_max(const Rat& a, const Rat& b) { return a > b ? a : b; }

Rat largest_pow2_strictly_below(const Rat& x) {
  if (x.sign() <= 0) throw std::invalid_argument("largest_pow2_strictly_below needs x > 0");
  Rat p(1);
  if (p < x) {
    while (p + p < x) p += p;
    return p;
  }
  Rat half(1, 2);
  do p *= half; while (!(p < x));
  return p;
}

std::uint64_t smallest_pow2_strictly_above(const Rat& x) {
  std::uint64_t p = 1;
  while (!(Rat(static_cast<long>(p)) > x)) {
    if (p > (UINT64_C(1) << 62))
      throw Error(ErrorCode::InternalInvariant, "power-of-two search overflow");
    p <<= 1;
  }
  return p;
}

}  // namespace towerplex
