#include "perfectoid/adicdisc.hpp"

#include <algorithm>

#include "perfectoid/error.hpp"
#include "perfectoid/tiltkit.hpp"

namespace perfectoid {

AdicPoint AdicPoint::classical(const UntiltElement& center) {
  return AdicPoint(PointType::type1, center, Rational(0), Side::less);
}

AdicPoint AdicPoint::disc(const UntiltElement& center, const Rational& q) {
  if (q < 0) fail(ErrorKind::invalid_argument, "disc radius exponent must be >= 0 (unit disc)");
  return AdicPoint(PointType::type23, center, q, Side::less);
}

AdicPoint AdicPoint::gauss(const FieldConfig& cfg) { return disc(UntiltElement(cfg), Rational(0)); }

AdicPoint AdicPoint::type5(const UntiltElement& center, const Rational& q, Side sign) {
  if (q < 0) fail(ErrorKind::invalid_argument, "type 5 radius exponent must be >= 0");
  if (!in_zp_inverse(q, center.config().p))
    fail(ErrorKind::invalid_argument, "type 5 points sit at type 2 points; radius exponent " + to_string(q) +
                                          " is not in Z[1/p]");
  if (sign == Side::greater && q == Rational(0))
    fail(ErrorKind::invalid_argument, "the outward type 5 point of the Gauss point leaves the unit disc");
  return AdicPoint(PointType::type5, center, q, sign);
}

std::string AdicPoint::classification() const {
  switch (type_) {
    case PointType::type1: return "type1";
    case PointType::type23: return in_zp_inverse(q_, config().p) ? "type2" : "type3";
    case PointType::type5: return "type5";
  }
  return "?";
}

std::string Value::to_string() const {
  std::string s = exact ? "" : ">=";
  if (infinite) return s + "inf";
  s += perfectoid::to_string(exponent);
  if (k != 0) s = "(" + s + ", " + std::to_string(k) + ", " + (sign == Side::less ? "<" : ">") + ")";
  return s;
}

Value operator*(const Value& a, const Value& b) {
  Value r;
  r.exact = a.exact && b.exact;
  if ((a.infinite && a.exact) || (b.infinite && b.exact)) {
    r.infinite = true;
    r.exact = true;
    return r;
  }
  r.infinite = false;
  r.exponent = a.exponent + b.exponent;
  r.k = a.k + b.k;
  r.sign = a.k != 0 ? a.sign : b.sign;
  return r;
}

namespace {

// Ordering of exact nonzero values by absolute value.
int key_compare(const Value& a, const Value& b) {
  if (a.exponent != b.exponent) return a.exponent < b.exponent ? 1 : -1;
  if (a.k == b.k) return 0;
  if (a.k != 0 && b.k != 0 && a.sign != b.sign)
    fail(ErrorKind::invalid_argument, "values of different type 5 points are not comparable");
  const Side s = a.k != 0 ? a.sign : b.sign;
  // rho < 1: a higher power of rho is smaller
  const bool a_bigger = s == Side::less ? a.k < b.k : a.k > b.k;
  return a_bigger ? 1 : -1;
}

[[noreturn]] void undecided(const Value& a, const Value& b) {
  fail(ErrorKind::indeterminate, "cannot compare " + a.to_string() + " with " + b.to_string() + " at this precision");
}

}  // namespace

int compare_abs(const Value& a, const Value& b) {
  if (a.exact && b.exact) {
    if (a.infinite || b.infinite) return a.infinite == b.infinite ? 0 : (a.infinite ? -1 : 1);
    return key_compare(a, b);
  }
  if (!a.exact && !b.exact) undecided(a, b);
  // One side is only bounded above in absolute value.
  if (!a.exact) {
    if (b.infinite) undecided(a, b);
    if (!a.infinite && a.exponent > b.exponent) return -1;
    undecided(a, b);
  }
  if (a.infinite) undecided(a, b);
  if (!b.infinite && b.exponent > a.exponent) return 1;
  undecided(a, b);
}

Value eval(const UntiltPolynomial& f, const AdicPoint& x) {
  require_same(f.config(), x.config());
  const Rational grid(f.config().grid());
  Value out;
  out.sign = x.sign();
  if (x.type() == PointType::type1) {
    const UntiltElement y = f.eval(x.center());
    if (auto v = y.valuation_index()) {
      out.exponent = Rational(*v) / grid;
    } else {
      out.exponent = Rational(y.prec_index()) / grid;
      out.exact = false;
    }
    return out;
  }

  // sup |a_n| r^n (types 2, 3) or max |a_n| gamma^n (type 5) around the center.
  const UntiltPolynomial g = f.taylor_shift(x.center());
  const bool rank2 = x.type() == PointType::type5;
  std::optional<Value> best;
  std::vector<std::pair<Rational, std::int64_t>> bounds;
  for (int n = 0; n <= g.degree(); ++n) {
    const auto& a = g[n];
    if (auto v = a.valuation_index()) {
      Value c;
      c.exponent = Rational(*v) / grid + x.q() * n;
      c.k = rank2 ? n : 0;
      c.sign = x.sign();
      if (!best || key_compare(c, *best) > 0) best = c;
    } else {
      bounds.emplace_back(Rational(a.prec_index()) / grid + x.q() * n, rank2 ? n : 0);
    }
  }
  if (!best) {
    out.exact = false;
    out.exponent = bounds.empty() ? Rational(0) : std::min_element(bounds.begin(), bounds.end())->first;
    return out;
  }
  out = *best;
  for (const auto& [lo, k] : bounds) {
    if (lo > best->exponent) continue;
    if (lo == best->exponent) {
      // an unknown term could tie on the exponent; it only matters when it
      // would win the rank-2 tie-break
      Value c = *best;
      c.k = k;
      if (!rank2 || key_compare(c, *best) <= 0) continue;
    }
    out.exact = false;
    out.exponent = std::min(out.exponent, lo);
  }
  return out;
}

void validate(const RationalSubset& U) {
  if (U.numerators.empty()) fail(ErrorKind::invalid_argument, "rational subset needs numerators");
  const FieldConfig& cfg = U.denominator.config();
  bool has_unit_ideal = false;
  for (const auto& f : U.numerators) {
    require_same(cfg, f.config());
    if (f.degree() != 0) continue;
    const auto terms = f[0].terms();
    if (terms.size() == 1 && terms[0].digit == 1 && terms[0].exponent.denpow() == 0) has_unit_ideal = true;
  }
  if (!has_unit_ideal)
    fail(ErrorKind::invalid_argument, "rational subset needs a numerator p^M so the numerators generate the unit ideal");
}

bool in_rational_subset(const AdicPoint& x, const RationalSubset& U) {
  validate(U);
  const Value g = eval(U.denominator, x);
  for (const auto& f : U.numerators)
    if (compare_abs(eval(f, x), g) > 0) return false;
  return true;
}

namespace {

// Decides v(a - b) >= q (or > q when strict) at working precision.
bool close(const UntiltElement& a, const UntiltElement& b, const Rational& q, bool strict) {
  const UntiltElement d = a - b;
  const Rational grid(a.config().grid());
  if (auto v = d.valuation_index()) {
    const Rational e = Rational(*v) / grid;
    return strict ? e > q : e >= q;
  }
  const Rational known = Rational(d.prec_index()) / grid;
  if (strict ? known > q : known >= q) return true;
  fail(ErrorKind::indeterminate, "centers agree to p^" + to_string(known) + " only; cannot compare discs of radius p^-" +
                                     to_string(q));
}

}  // namespace

bool same_point(const AdicPoint& x, const AdicPoint& y) {
  require_same(x.config(), y.config());
  if (x.type() != y.type()) return false;
  switch (x.type()) {
    case PointType::type1: {
      const UntiltElement d = x.center() - y.center();
      return d.is_zero();
    }
    case PointType::type23:
      return x.q() == y.q() && close(x.center(), y.center(), x.q(), false);
    case PointType::type5:
      return x.q() == y.q() && x.sign() == y.sign() &&
             close(x.center(), y.center(), x.q(), x.sign() == Side::less);
  }
  return false;
}

bool specializes(const AdicPoint& x, const AdicPoint& y) {
  if (same_point(x, y)) return true;
  // Only type 2 points have proper specializations: the type 5 points at the
  // same disc, one per direction.
  if (x.type() != PointType::type23 || y.type() != PointType::type5) return false;
  if (!in_zp_inverse(x.q(), x.config().p) || x.q() != y.q()) return false;
  return close(x.center(), y.center(), x.q(), false);
}

std::vector<AdicPoint> generizations(const AdicPoint& x) {
  if (x.type() == PointType::type5) return {AdicPoint::disc(x.center(), x.q()), x};
  return {x};
}

namespace {

ValBound exponent_of(const UntiltElement& y) {
  const Rational grid(y.config().grid());
  if (auto v = y.valuation_index()) return {Rational(*v) / grid, true};
  return {Rational(y.prec_index()) / grid, false};
}

ValBound exponent_of(const TiltElement& y) {
  const Rational grid(y.config().grid());
  if (auto v = y.valuation_index()) return {Rational(*v) / grid, true};
  return {Rational(y.prec_index()) / grid, false};
}

TiltElement exact_power(const TiltElement& z, const Rational& e) {
  TiltElement r = z;
  for (std::int64_t d = e.denominator(); d > 1; d /= z.config().p) r = r.pth_root().extended(z.config().limit());
  return r.pow(static_cast<std::uint64_t>(e.numerator()));
}

}  // namespace

TiltCheck tilt_point_check(const TiltTate& f, const TiltPoint& x) {
  if (f.nvars() != 1) fail(ErrorKind::invalid_argument, "tilt_point_check works on the one-variable disc");
  const FieldConfig& cfg = f.config();
  const Rational target(cfg.prec);
  const UntiltTate fs = sharp_element_max(f, target);
  TiltCheck r;
  if (x.gauss) {
    r.tilt_side = {Rational(f.gauss_valuation_bound()) / Rational(cfg.grid()), !f.is_zero()};
    r.sharp_side = {Rational(fs.gauss_valuation_bound()) / Rational(cfg.grid()), !fs.is_zero()};
  } else {
    if (x.coords.size() != 1) fail(ErrorKind::invalid_argument, "point must have one coordinate");
    const TiltElement& z = x.coords.front();
    r.tilt_side = exponent_of(f.eval({z}));
    // f^sharp at z^sharp: (z^sharp)^e = (z^e)^sharp for e in Z[1/p]
    UntiltElement acc = UntiltElement::zero(cfg, fs.prec_index());
    for (const auto& [m, c] : fs.terms()) acc += c * sharp_max(exact_power(z, m[0]), target);
    r.sharp_side = exponent_of(acc.truncated(fs.prec_index()));
  }
  const ValBound &a = r.sharp_side, &b = r.tilt_side;
  if (a.exact && b.exact)
    r.verdict = a.value == b.value ? Verdict::pass : Verdict::fail;
  else if ((a.exact && !b.exact && b.value > a.value) || (b.exact && !a.exact && a.value > b.value))
    r.verdict = Verdict::fail;
  return r;
}

}  // namespace perfectoid
