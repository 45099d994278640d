#pragma once

#include <vector>

#include "perfectoid/element.hpp"

namespace perfectoid {

// x^sharp = lim (lift of x^(1/p^n))^(p^n), modulo p^target. The tilt element
// is read as its canonical representative (digits past its precision are
// zero). The strict form insists on x.precexp >= target and on every result
// digit below target fitting the dencap grid; otherwise it throws.
UntiltElement sharp(const TiltElement& x, int target_prec);
UntiltElement sharp(const TiltElement& x, const Rational& target);

// Same computation, but returns whatever prefix is attainable: the result's
// precision stops at the first digit that falls off the grid or at the
// working-size budget.
UntiltElement sharp_max(const TiltElement& x, const Rational& target);

// If x is only known modulo t^K, its sharp is determined modulo
// p^(min_j (j + K/p^j)); K is a rational exponent.
Rational sharp_guaranteed_precision(int p, const Rational& k);

// Teichmuller lift of a residue digit, to full precision.
UntiltElement sharp_const(const FieldConfig& cfg, int digit);

class WittVector {
 public:
  static constexpr int max_length = 4;

  WittVector(const FieldConfig& cfg, std::vector<TiltElement> components);
  static WittVector zero(const FieldConfig& cfg, int length);
  static WittVector teichmuller(const TiltElement& x, int length);

  const FieldConfig& config() const noexcept { return cfg_; }
  int length() const noexcept { return static_cast<int>(components_.size()); }
  const std::vector<TiltElement>& components() const noexcept { return components_; }

  friend WittVector operator+(const WittVector& a, const WittVector& b);
  friend WittVector operator*(const WittVector& a, const WittVector& b);
  friend WittVector operator-(const WittVector& a);
  friend WittVector operator-(const WittVector& a, const WittVector& b) { return a + (-b); }
  friend bool operator==(const WittVector& a, const WittVector& b) { return a.components_ == b.components_; }

 private:
  FieldConfig cfg_;
  std::vector<TiltElement> components_;
};

// theta(x_0, ..., x_{n-1}) = sum_i (x_i^(1/p^i))^sharp p^i modulo p^n.
UntiltElement theta(const WittVector& a);

}  // namespace perfectoid
