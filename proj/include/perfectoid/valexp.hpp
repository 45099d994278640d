#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include <boost/rational.hpp>

namespace perfectoid {

using Rational = boost::rational<std::int64_t>;

// Checked integer power; throws budget_exhausted on int64 overflow.
std::int64_t ipow(std::int64_t base, int exp);
bool is_prime(int n);
std::int64_t floor_div(std::int64_t a, std::int64_t b);
std::int64_t floor_mod(std::int64_t a, std::int64_t b);

// p-adic valuation of a nonzero integer.
int vp(std::int64_t n, int p);

Rational floor(const Rational& r);
Rational ceil(const Rational& r);
std::string to_string(const Rational& r);
Rational parse_rational(const std::string& s);

// True when the denominator of r is a power of p.
bool in_zp_inverse(const Rational& r, int p);

// An element num / p^denpow of Z[1/p] with num >= 0, kept normalized so that
// p does not divide num unless denpow == 0.
class ValExp {
 public:
  ValExp() = default;
  ValExp(int p, std::int64_t num, int denpow);

  static ValExp from_rational(int p, const Rational& r);
  // Exponent index on the grid (1/p^dencap)Z.
  static ValExp from_index(int p, std::int64_t index, int dencap);

  int p() const noexcept { return p_; }
  std::int64_t num() const noexcept { return num_; }
  int denpow() const noexcept { return denpow_; }

  Rational value() const;
  // num * p^(dencap - denpow); dencap_overflow when denpow > dencap.
  std::int64_t to_index(int dencap) const;

  std::string to_string() const;

  friend bool operator==(const ValExp& a, const ValExp& b) noexcept {
    return a.num_ == b.num_ && a.denpow_ == b.denpow_;
  }
  friend std::strong_ordering operator<=>(const ValExp& a, const ValExp& b);
  friend ValExp operator+(const ValExp& a, const ValExp& b);

 private:
  int p_ = 2;
  std::int64_t num_ = 0;
  int denpow_ = 0;
};

}  // namespace perfectoid
