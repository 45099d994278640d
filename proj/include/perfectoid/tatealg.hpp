#pragma once

#include <map>
#include <string>
#include <vector>

#include "perfectoid/element.hpp"

namespace perfectoid {

// Exponent vector of T_0^e_0 ... T_n^e_n with e_j in Z[1/p], e_j >= 0.
using Monomial = std::vector<Rational>;

Rational total_degree(const Monomial& m);
bool divides(const Monomial& a, const Monomial& b);  // a | b
std::string to_string(const Monomial& m);

// Graded lexicographic: total degree first, then T_0 > T_1 > ...
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

// Finite sum of monomials with coefficients in K° or K♭°, known modulo
// base^(prec_index/grid). Coefficients are stored truncated to that
// precision; terms vanishing there are dropped.
template <Kind K>
class TatePoly {
 public:
  using Coeff = Element<K>;
  using Terms = std::map<Monomial, Coeff, GrlexLess>;

  TatePoly(const FieldConfig& cfg, int nvars);  // zero, full precision
  TatePoly(const FieldConfig& cfg, int nvars, std::int64_t prec_index);
  static TatePoly variable(const FieldConfig& cfg, int nvars, int j);
  static TatePoly constant(const FieldConfig& cfg, int nvars, const Coeff& c);
  static TatePoly term(const FieldConfig& cfg, int nvars, const Monomial& m, const Coeff& c);

  const FieldConfig& config() const noexcept { return cfg_; }
  int nvars() const noexcept { return nvars_; }
  std::int64_t prec_index() const noexcept { return prec_; }
  ValExp precexp() const { return ValExp::from_index(cfg_.p, prec_, cfg_.dencap); }
  const Terms& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }

  // Minimum coefficient valuation (index), or the precision when zero.
  std::int64_t gauss_valuation_bound() const noexcept;
  // Common total degree, or nullopt if the element is not homogeneous.
  std::optional<Rational> degree() const;

  void add_term(const Monomial& m, const Coeff& c);
  TatePoly truncated(std::int64_t prec_index) const;
  TatePoly extended(std::int64_t prec_index) const;
  TatePoly shifted_up(std::int64_t index) const;    // times base^(index/grid)
  TatePoly shifted_down(std::int64_t index) const;  // exact division
  TatePoly recast(const FieldConfig& target) const;

  TatePoly operator-() const;
  TatePoly& operator+=(const TatePoly& rhs);
  TatePoly& operator-=(const TatePoly& rhs);
  friend TatePoly operator+(TatePoly a, const TatePoly& b) { return a += b; }
  friend TatePoly operator-(TatePoly a, const TatePoly& b) { return a -= b; }
  TatePoly times(const TatePoly& rhs) const;
  friend TatePoly operator*(const TatePoly& a, const TatePoly& b) { return a.times(b); }
  TatePoly scaled(const Coeff& c) const;
  TatePoly pow(std::uint64_t e) const;

  // Tilt only: g^(1/p), coefficients and exponents.
  TatePoly pth_root() const
    requires(K == Kind::tilt);
  // Value at a point of the unit polydisc (tilt only, so fractional
  // exponents are p-th roots).
  Coeff eval(const std::vector<Coeff>& x) const
    requires(K == Kind::tilt);

  friend bool operator==(const TatePoly& a, const TatePoly& b) {
    return a.cfg_ == b.cfg_ && a.nvars_ == b.nvars_ && a.prec_ == b.prec_ && a.terms_ == b.terms_;
  }

 private:
  FieldConfig cfg_;
  int nvars_;
  std::int64_t prec_;
  Terms terms_;
};

using TiltTate = TatePoly<Kind::tilt>;
using UntiltTate = TatePoly<Kind::untilt>;

extern template class TatePoly<Kind::untilt>;
extern template class TatePoly<Kind::tilt>;

// Coefficientwise reduction mod p and reinterpretation over the tilt, read as
// an exact tilt element.
TiltTate reduce_coefficients(const UntiltTate& f);

// The multiplicative map R♭ -> R, g^sharp = lim (lift g^(1/p^n))^(p^n),
// modulo p^target. Mixed terms appear: (T_0 + T_1)^sharp != T_0 + T_1.
UntiltTate sharp_element(const TiltTate& g, const Rational& target);
UntiltTate sharp_element_max(const TiltTate& g, const Rational& target);

// f = g_0^sharp + p g_1^sharp + ... + p^c g_c^sharp mod p^(c+1).
std::vector<TiltTate> decompose(const UntiltTate& f, int c);

struct ApproxStep {
  Rational c;      // level reached after the step
  Rational eps_c;  // epsilon(c) at that level
  Rational kappa;  // exponent c_prev + 1 - eps + eps(c)
  int divisions = 0;
  std::vector<Rational> used_i;  // grid points i that carried a term
};

struct ApproxResult {
  TiltTate g;
  Rational step;
  std::vector<ApproxStep> steps;
};

// g homogeneous of the same degree with
// |f(x) - g^sharp(x)| <= |p|^(1-eps) max(|f(x)|, |p|^c) everywhere.
ApproxResult approximate(const UntiltTate& f, const Rational& c, const Rational& eps);

// A point of the polydisc given by tilt coordinates z (the classical point
// x = z^sharp), or the Gauss point.
struct TiltPoint {
  bool gauss = false;
  std::vector<TiltElement> coords;
  std::string label;
};

// Gauss point plus classical points with coordinates drawn from
// {0, 1, t^(1/p), t, 1 + t}, deterministic, `count` points in total.
std::vector<TiltPoint> standard_sample(const FieldConfig& cfg, int nvars, int count);

enum class Verdict { pass, fail, indeterminate };
const char* to_string(Verdict v) noexcept;

// A valuation known exactly or only as a lower bound.
struct ValBound {
  Rational value;
  bool exact = false;
  std::string to_string() const;
};

struct PointReport {
  std::string label;
  ValBound vf, vg, vdiff;
  Verdict equality = Verdict::indeterminate;    // max(|f|,|p|^c) = max(|g^sharp|,|p|^c)
  Verdict inequality = Verdict::indeterminate;  // |f - g^sharp| <= |p|^(1-eps) max(|f|,|p|^c)
  Verdict overall() const;
};

struct ContractReport {
  std::vector<PointReport> points;
  Verdict overall() const;
};

ContractReport verify_contract(const UntiltTate& f, const TiltTate& g, const Rational& c, const Rational& eps,
                               const std::vector<TiltPoint>& points);

}  // namespace perfectoid
