#include "perfectoid/valexp.hpp"

#include <limits>

#include "perfectoid/error.hpp"

namespace perfectoid {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::config_mismatch: return "config_mismatch";
    case ErrorKind::dencap_overflow: return "dencap_overflow";
    case ErrorKind::insufficient_precision: return "insufficient_precision";
    case ErrorKind::indeterminate: return "indeterminate";
    case ErrorKind::not_found: return "not_found";
    case ErrorKind::budget_exhausted: return "budget_exhausted";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::parse: return "parse";
  }
  return "unknown";
}

std::int64_t ipow(std::int64_t base, int exp) {
  if (exp < 0) fail(ErrorKind::invalid_argument, "negative exponent in ipow");
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && std::abs(r) > std::numeric_limits<std::int64_t>::max() / std::abs(base))
      fail(ErrorKind::budget_exhausted, "integer power overflows 64 bits");
    r *= base;
  }
  return r;
}

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

int vp(std::int64_t n, int p) {
  if (n == 0) return std::numeric_limits<int>::max();
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

Rational floor(const Rational& r) { return Rational(floor_div(r.numerator(), r.denominator())); }

Rational ceil(const Rational& r) { return -floor(-r); }

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational parse_rational(const std::string& s) {
  try {
    std::size_t slash = s.find('/');
    std::size_t used = 0;
    if (slash == std::string::npos) {
      std::int64_t n = std::stoll(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return Rational(n);
    }
    std::string a = s.substr(0, slash), b = s.substr(slash + 1);
    std::int64_t n = std::stoll(a, &used);
    if (used != a.size()) throw std::invalid_argument(s);
    std::int64_t d = std::stoll(b, &used);
    if (used != b.size() || d == 0) throw std::invalid_argument(s);
    return Rational(n, d);
  } catch (const std::logic_error&) {
    fail(ErrorKind::parse, "not a rational number: '" + s + "'");
  }
}

bool in_zp_inverse(const Rational& r, int p) {
  std::int64_t d = r.denominator();
  while (d % p == 0) d /= p;
  return d == 1;
}

ValExp::ValExp(int p, std::int64_t num, int denpow) : p_(p), num_(num), denpow_(denpow) {
  if (num < 0 || denpow < 0) fail(ErrorKind::invalid_argument, "ValExp must be nonnegative");
  while (denpow_ > 0 && num_ % p_ == 0) {
    num_ /= p_;
    --denpow_;
  }
  if (num_ == 0) denpow_ = 0;
}

ValExp ValExp::from_rational(int p, const Rational& r) {
  if (r < 0) fail(ErrorKind::invalid_argument, "ValExp must be nonnegative, got " + perfectoid::to_string(r));
  std::int64_t d = r.denominator();
  int k = 0;
  while (d % p == 0) {
    d /= p;
    ++k;
  }
  if (d != 1)
    fail(ErrorKind::invalid_argument,
         "exponent " + perfectoid::to_string(r) + " is not in Z[1/" + std::to_string(p) + "]");
  return ValExp(p, r.numerator(), k);
}

ValExp ValExp::from_index(int p, std::int64_t index, int dencap) { return ValExp(p, index, dencap); }

Rational ValExp::value() const { return Rational(num_, ipow(p_, denpow_)); }

std::int64_t ValExp::to_index(int dencap) const {
  if (denpow_ > dencap)
    fail(ErrorKind::dencap_overflow, "exponent " + to_string() + " needs denominator p^" +
                                         std::to_string(denpow_) + " beyond dencap " +
                                         std::to_string(dencap));
  return num_ * ipow(p_, dencap - denpow_);
}

std::string ValExp::to_string() const { return perfectoid::to_string(value()); }

std::strong_ordering operator<=>(const ValExp& a, const ValExp& b) {
  Rational x = a.value(), y = b.value();
  if (x < y) return std::strong_ordering::less;
  if (y < x) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

ValExp operator+(const ValExp& a, const ValExp& b) { return ValExp::from_rational(a.p(), a.value() + b.value()); }

}  // namespace perfectoid
