#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "perfectoid/config.hpp"
#include "perfectoid/valexp.hpp"

namespace perfectoid {

enum class Kind { untilt, tilt };

const char* to_string(Kind kind) noexcept;

struct Term {
  ValExp exponent;
  int digit = 0;

  friend bool operator==(const Term&, const Term&) = default;
};

// A truncated element of K° (Kind::untilt, digits sum a_e p^e with carries)
// or of K♭° (Kind::tilt, digits sum a_e t^e over F_p). Digits are stored
// densely on the grid (1/p^dencap)Z; the vector length is the precision
// index, so the element is known modulo p^(size/grid).
template <Kind K>
class Element {
 public:
  static constexpr Kind kind = K;

  explicit Element(const FieldConfig& cfg);  // zero known to full precision

  static Element zero(const FieldConfig& cfg, std::int64_t prec_index);
  static Element from_int(const FieldConfig& cfg, std::int64_t value);
  static Element monomial(const FieldConfig& cfg, int digit, const ValExp& exponent);
  static Element from_terms(const FieldConfig& cfg, const std::vector<Term>& terms,
                            const ValExp& precexp);
  // Digits are taken verbatim; each must lie in [0, p).
  static Element from_digits(const FieldConfig& cfg, std::vector<std::uint8_t> digits);
  // Canonical form of sum coeffs[i] * base^(i/grid); negative or large
  // coefficients are normalized (carries for untilt, reduction mod p for tilt).
  static Element from_coefficients(const FieldConfig& cfg, std::vector<std::int64_t> coeffs);

  const FieldConfig& config() const noexcept { return cfg_; }
  std::int64_t prec_index() const noexcept { return static_cast<std::int64_t>(digits_.size()); }
  ValExp precexp() const;
  std::span<const std::uint8_t> digits() const noexcept { return digits_; }
  int digit_at(std::int64_t index) const noexcept;
  std::vector<Term> terms() const;

  // Smallest index carrying a nonzero digit; nullopt when zero at precision.
  std::optional<std::int64_t> valuation_index() const noexcept;
  std::optional<ValExp> valuation() const;
  // Valuation index, or the precision index for elements zero at precision
  // (a lower bound for the true valuation).
  std::int64_t valuation_bound() const noexcept;
  bool is_zero() const noexcept { return !valuation_index().has_value(); }
  bool is_unit() const noexcept { return valuation_index() == std::int64_t{0}; }

  Element truncated(std::int64_t prec_index) const;
  // Pads with zero digits up to prec_index (capped at the config limit):
  // picks the canonical lift of a truncated element.
  Element extended(std::int64_t prec_index) const;

  Element operator-() const;
  Element& operator+=(const Element& rhs);
  Element& operator-=(const Element& rhs);
  Element& operator*=(const Element& rhs);
  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator*(Element a, const Element& b) { return a *= b; }

  Element pow(std::uint64_t e) const;
  // Multiplication by base^(index/grid); precision grows by the same amount.
  Element shifted_up(std::int64_t index) const;
  // Exact division by base^(index/grid); requires valuation >= index.
  Element shifted_down(std::int64_t index) const;
  Element inverse() const;  // unit required
  // Exact quotient a / b with v(a) >= v(b).
  Element divided_by(const Element& b) const;

  // Same value on another grid or precision. Refining the grid is exact;
  // coarsening fails with dencap_overflow when a digit is off the new grid.
  Element recast(const FieldConfig& target) const;

  // Tilt only: exponent scaling by p and by 1/p.
  Element frobenius() const
    requires(K == Kind::tilt);
  Element pth_root() const
    requires(K == Kind::tilt);

  friend bool operator==(const Element& a, const Element& b) noexcept {
    return a.cfg_ == b.cfg_ && a.digits_ == b.digits_;
  }

  // Agreement modulo base^(index/grid) ignoring the stored precisions.
  bool congruent(const Element& other, std::int64_t index) const;

 private:
  FieldConfig cfg_;
  std::vector<std::uint8_t> digits_;
};

using UntiltElement = Element<Kind::untilt>;
using TiltElement = Element<Kind::tilt>;

extern template class Element<Kind::untilt>;
extern template class Element<Kind::tilt>;

// K°/p = K♭°/t: keep the digits of exponent < 1 and swap p for t.
TiltElement reduce_mod_uniformizer(const UntiltElement& a);
// Digit-preserving section of the reduction; result known modulo p^1.
UntiltElement lift_mod_uniformizer(const TiltElement& a);
// Digits of exponent in [lo, lo + 1) reinterpreted over the tilt, exponents
// unchanged. For x with v(x) >= lo this is t^lo * reduce(x / p^lo).
TiltElement tilt_window(const UntiltElement& a, const Rational& lo);
// Some y with y^p = a mod p^k (0 < k <= 1), determined modulo p^(k/p).
UntiltElement pth_root_mod(const UntiltElement& a, const ValExp& k);

}  // namespace perfectoid
