#pragma once

#include <optional>
#include <vector>

#include "perfectoid/element.hpp"

namespace perfectoid {

// Dense univariate polynomial, coefficient i at index i.
template <Kind K>
class Polynomial {
 public:
  using Coeff = Element<K>;

  Polynomial(const FieldConfig& cfg, std::vector<Coeff> coeffs);
  static Polynomial constant(const Coeff& c);
  // X^d + sum coeffs[i] X^i.
  static Polynomial monic(const FieldConfig& cfg, std::vector<Coeff> lower);

  const FieldConfig& config() const noexcept { return cfg_; }
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Coeff>& coeffs() const noexcept { return coeffs_; }
  const Coeff& operator[](int i) const { return coeffs_.at(i); }

  Coeff eval(const Coeff& x) const;
  Polynomial derivative() const;
  Polynomial taylor_shift(const Coeff& c) const;  // P(X + c)
  Polynomial scaled(const Coeff& c) const;        // P(cX)
  // Drops leading coefficients that are zero at their precision.
  Polynomial trimmed() const;

  Polynomial times(const Polynomial& other) const;
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) { return a.times(b); }
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

 private:
  FieldConfig cfg_;
  std::vector<Coeff> coeffs_;
};

using TiltPolynomial = Polynomial<Kind::tilt>;
using UntiltPolynomial = Polynomial<Kind::untilt>;

extern template class Polynomial<Kind::untilt>;
extern template class Polynomial<Kind::tilt>;

struct NewtonSegment {
  Rational slope;  // valuation of the roots on this segment
  int multiplicity = 0;

  friend bool operator==(const NewtonSegment&, const NewtonSegment&) = default;
};

struct NewtonPolygon {
  // Low-order coefficients that vanish at precision; counted as roots X = 0.
  int zero_roots = 0;
  std::vector<NewtonSegment> segments;  // root valuations ascending

  friend bool operator==(const NewtonPolygon&, const NewtonPolygon&) = default;
};

// Lower hull of (i, v(a_i)). Throws indeterminate when a coefficient that is
// zero at precision could still touch the hull.
template <Kind K>
NewtonPolygon newton_polygon(const Polynomial<K>& P);

// Newton iteration from x0 under v(P(x0)) > 2 v(P'(x0)). The result carries
// the precision at which it is determined.
template <Kind K>
Element<K> hensel_root(const Polynomial<K>& P, const Element<K>& x0);

// Digit-by-digit root search over the tilt along Newton slopes that sit on
// the grid. nullopt when the search space is exhausted without a root.
std::optional<TiltElement> charp_root(const TiltPolynomial& P, int node_budget = 20000);

// Coefficient i becomes (a_i^(1/p^n))^sharp, evaluated as far as the grid
// allows.
UntiltPolynomial fw_transfer(const TiltPolynomial& P, int n);

// Valuation of the discriminant, via the Sylvester resultant of P and P'.
Rational discriminant_valuation(const UntiltPolynomial& P);

// 1 - v(disc P_n) for P_n = fw_transfer(P, n). Positive margin means the
// reduction mod p already pins the splitting behaviour (Krasner); the margin
// climbs towards 1 as the transfer stabilizes.
Rational stabilization_margin(const TiltPolynomial& P, int n);

struct MixedRootResult {
  UntiltElement root;
  int stages = 0;
  ValExp residual;  // lower bound for v(P(root)), i.e. the precision reached
};

// Successive approximation P_{k+1}(X) = P_k(cX + y^sharp) / p^mu with y a
// root of P_k mod p found over the tilt.
MixedRootResult mixed_root_refine(const UntiltPolynomial& P, int max_stages = 0);

}  // namespace perfectoid
