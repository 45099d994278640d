#pragma once

#include <optional>
#include <string>
#include <vector>

#include "perfectoid/polyroots.hpp"
#include "perfectoid/tatealg.hpp"

namespace perfectoid {

// Points of Spa(K<T>, K°<T>) that finite data can describe. Type 4 points
// are not modeled.
enum class PointType { type1, type23, type5 };
enum class Side { less, greater };  // direction of a type 5 point

class AdicPoint {
 public:
  static AdicPoint classical(const UntiltElement& center);
  static AdicPoint disc(const UntiltElement& center, const Rational& q);  // |T - c| <= p^-q
  static AdicPoint gauss(const FieldConfig& cfg);
  static AdicPoint type5(const UntiltElement& center, const Rational& q, Side sign);

  PointType type() const noexcept { return type_; }
  const UntiltElement& center() const noexcept { return center_; }
  const Rational& q() const noexcept { return q_; }  // meaningless for type 1
  Side sign() const noexcept { return sign_; }
  const FieldConfig& config() const noexcept { return center_.config(); }

  // "type1" .. "type5"; type 2 iff the radius lies in |K^x| = p^Z[1/p].
  std::string classification() const;
  int rank() const noexcept { return type_ == PointType::type5 ? 2 : 1; }

 private:
  AdicPoint(PointType t, UntiltElement c, Rational q, Side s)
      : type_(t), center_(std::move(c)), q_(q), sign_(s) {}

  PointType type_;
  UntiltElement center_;
  Rational q_;
  Side sign_;
};

// |f(x)| written as p^-exponent * rho^k, where rho is the infinitesimal
// ratio gamma / r of a type 5 point (rho < 1 for Side::less, > 1 for
// Side::greater). Rank one values have k = 0. When `exact` is false the
// exponent is only a lower bound (the value may be smaller, even zero).
struct Value {
  Rational exponent;
  std::int64_t k = 0;
  Side sign = Side::less;
  bool infinite = false;  // f(x) = 0 exactly
  bool exact = true;

  std::string to_string() const;
};

Value operator*(const Value& a, const Value& b);

// -1, 0, 1 as |a| <, =, > |b|. Throws indeterminate when precision cannot
// decide.
int compare_abs(const Value& a, const Value& b);

Value eval(const UntiltPolynomial& f, const AdicPoint& x);

struct RationalSubset {
  std::vector<UntiltPolynomial> numerators;
  UntiltPolynomial denominator;
};

// Requires some numerator to be the constant p^M.
void validate(const RationalSubset& U);
bool in_rational_subset(const AdicPoint& x, const RationalSubset& U);

// x generizes y: y lies in the closure of x.
bool specializes(const AdicPoint& x, const AdicPoint& y);
bool same_point(const AdicPoint& x, const AdicPoint& y);
// Generizations of x from the most general down to x itself.
std::vector<AdicPoint> generizations(const AdicPoint& x);

struct TiltCheck {
  ValBound sharp_side;  // exponent of |f^sharp(x)|
  ValBound tilt_side;   // exponent of |f(x^flat)|
  Verdict verdict = Verdict::indeterminate;
};

// |f(x^flat)| = |f^sharp(x)| for a one-variable tilt element f and x the
// Gauss point or the classical point with tilt coordinate z.
TiltCheck tilt_point_check(const TiltTate& f, const TiltPoint& x);

}  // namespace perfectoid
