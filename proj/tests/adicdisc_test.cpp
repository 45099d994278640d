#include <doctest.h>

#include "gen.hpp"
#include "perfectoid/adicdisc.hpp"
#include "perfectoid/error.hpp"
#include "perfectoid/tiltkit.hpp"

using namespace perfectoid;

namespace {

UntiltElement ui(const FieldConfig& cfg, std::int64_t v) { return UntiltElement::from_int(cfg, v); }

UntiltPolynomial poly(const FieldConfig& cfg, std::vector<std::int64_t> c) {
  std::vector<UntiltElement> out;
  for (auto v : c) out.push_back(ui(cfg, v));
  return UntiltPolynomial(cfg, out);
}

Value rank1(Rational e) { return Value{e}; }

// Random point of a random type, centers on the integer grid.
AdicPoint random_point(gen::Rng& rng, const FieldConfig& cfg) {
  const UntiltElement c = UntiltElement::from_int(cfg, gen::uniform(rng, 0, 30));
  switch (gen::uniform(rng, 0, 3)) {
    case 0: return AdicPoint::classical(c);
    case 1: return AdicPoint::disc(c, Rational(gen::uniform(rng, 0, 4), cfg.p));
    case 2: return AdicPoint::disc(c, Rational(gen::uniform(rng, 1, 4), 3 * cfg.p + 1));
    default:
      return AdicPoint::type5(c, Rational(gen::uniform(rng, 1, 4), cfg.p), gen::uniform(rng, 0, 1) ? Side::less : Side::greater);
  }
}

UntiltPolynomial random_poly(gen::Rng& rng, const FieldConfig& cfg) {
  std::vector<UntiltElement> c;
  const int d = gen::uniform(rng, 0, 4);
  for (int i = 0; i <= d; ++i) c.push_back(gen::untilt(rng, cfg, 0.2));
  return UntiltPolynomial(cfg, c);
}

}  // namespace

TEST_CASE("point classification") {
  FieldConfig cfg(3, 4, 1);
  CHECK(AdicPoint::gauss(cfg).classification() == "type2");
  CHECK(AdicPoint::disc(ui(cfg, 0), Rational(1, 2)).classification() == "type3");
  CHECK(AdicPoint::disc(ui(cfg, 0), Rational(2, 9)).classification() == "type2");
  CHECK(AdicPoint::classical(ui(cfg, 3)).classification() == "type1");
  CHECK(AdicPoint::type5(ui(cfg, 0), 0, Side::less).rank() == 2);
  CHECK_THROWS_AS(AdicPoint::type5(ui(cfg, 0), 0, Side::greater), Error);
  CHECK_THROWS_AS(AdicPoint::type5(ui(cfg, 0), Rational(1, 2), Side::less), Error);
  CHECK_THROWS_AS(AdicPoint::disc(ui(cfg, 0), -1), Error);
}

TEST_CASE("evaluation examples") {
  FieldConfig cfg(3, 4, 1);
  // T^2 + pT + p at the Gauss point: min(1, 1, 0)
  auto v = eval(poly(cfg, {3, 3, 1}), AdicPoint::gauss(cfg));
  CHECK(v.exact);
  CHECK(v.exponent == Rational(0));
  // T^2 at the type 3 point of radius p^(-1/2)
  v = eval(poly(cfg, {0, 0, 1}), AdicPoint::disc(ui(cfg, 0), Rational(1, 2)));
  CHECK(v.exponent == Rational(1));
  // T at (0, q = 0, <) is gamma < 1
  v = eval(poly(cfg, {0, 1}), AdicPoint::type5(ui(cfg, 0), 0, Side::less));
  CHECK(v.exponent == Rational(0));
  CHECK(v.k == 1);
  CHECK(compare_abs(v, rank1(0)) < 0);
  // around center 1 the polynomial T - 1 is small, T is a unit
  auto x = AdicPoint::disc(ui(cfg, 1), 1);
  CHECK(eval(poly(cfg, {-1, 1}), x).exponent == Rational(1));
  CHECK(eval(poly(cfg, {0, 1}), x).exponent == Rational(0));
  // classical point p: T^2 - p^2 vanishes, only a bound comes back
  v = eval(poly(cfg, {-9, 0, 1}), AdicPoint::classical(ui(cfg, 3)));
  CHECK_FALSE(v.exact);
  CHECK(v.exponent == Rational(4));
}

TEST_CASE("rank two order") {
  Value a{Rational(1), 1, Side::less}, b{Rational(1), 2, Side::less}, c{Rational(1), 2, Side::greater};
  CHECK(compare_abs(a, b) > 0);  // gamma^1 > gamma^2 below r
  CHECK(compare_abs(c, Value{Rational(1), 1, Side::greater}) > 0);
  CHECK(compare_abs(Value{Rational(1, 2), 5, Side::less}, a) > 0);
  CHECK(compare_abs(a, a) == 0);
  CHECK((a * b).k == 3);
  Value bound{Rational(2)};
  bound.exact = false;
  CHECK(compare_abs(bound, rank1(1)) < 0);
  CHECK_THROWS_AS(compare_abs(bound, rank1(3)), Error);
}

TEST_CASE("rational subsets") {
  FieldConfig cfg(3, 4, 1);
  const auto pM = poly(cfg, {81});  // p^4 = p^prec vanishes at precision
  const auto p3 = poly(cfg, {27});
  const auto T = poly(cfg, {0, 1}), one = poly(cfg, {1}), p = poly(cfg, {3});
  CHECK_THROWS_AS(validate(RationalSubset{{T}, one}), Error);
  CHECK_THROWS_AS(validate(RationalSubset{{T, pM}, one}), Error);
  CHECK(in_rational_subset(AdicPoint::gauss(cfg), RationalSubset{{T, p3}, one}));
  // {1 <= |T|} misses the inward type 5 point where |T| = gamma < 1
  CHECK_FALSE(in_rational_subset(AdicPoint::type5(ui(cfg, 0), 0, Side::less), RationalSubset{{one, p3}, T}));
  CHECK(in_rational_subset(AdicPoint::gauss(cfg), RationalSubset{{one, p3}, T}));
  CHECK(in_rational_subset(AdicPoint::classical(ui(cfg, 3)), RationalSubset{{T, p3}, p}));
  CHECK_FALSE(in_rational_subset(AdicPoint::classical(ui(cfg, 1)), RationalSubset{{T, p3}, p}));
}

TEST_CASE("specialization") {
  FieldConfig cfg(3, 4, 1);
  auto g = AdicPoint::gauss(cfg);
  auto y = AdicPoint::type5(ui(cfg, 0), 0, Side::less);
  CHECK(specializes(g, y));
  CHECK_FALSE(specializes(y, g));
  CHECK_FALSE(specializes(AdicPoint::classical(ui(cfg, 0)), g));
  CHECK(specializes(g, g));
  CHECK(specializes(g, AdicPoint::type5(ui(cfg, 2), 0, Side::less)));
  CHECK_FALSE(specializes(g, AdicPoint::type5(ui(cfg, 0), 1, Side::less)));
  CHECK_FALSE(specializes(AdicPoint::disc(ui(cfg, 0), Rational(1, 2)), y));
  // the two inward directions at 0 and 3 below the Gauss point coincide
  CHECK(same_point(y, AdicPoint::type5(ui(cfg, 3), 0, Side::less)));
  CHECK_FALSE(same_point(y, AdicPoint::type5(ui(cfg, 1), 0, Side::less)));
  auto chain = generizations(y);
  REQUIRE(chain.size() == 2);  // rank 2: one strict generization
  CHECK(specializes(chain[0], chain[1]));
  CHECK(generizations(g).size() == 1);
}

TEST_CASE("specialization is a partial order on a sample") {
  FieldConfig cfg(2, 4, 1);
  gen::Rng rng(5);
  std::vector<AdicPoint> pts;
  for (int i = 0; i < 30; ++i) pts.push_back(random_point(rng, cfg));
  for (const auto& a : pts)
    for (const auto& b : pts) {
      if (specializes(a, b) && specializes(b, a)) CHECK(same_point(a, b));
      for (const auto& c : pts)
        if (specializes(a, b) && specializes(b, c)) CHECK(specializes(a, c));
    }
  for (const auto& a : pts) {
    auto chain = generizations(a);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) CHECK(specializes(chain[i], chain[i + 1]));
  }
}

TEST_CASE("eval is multiplicative and ultrametric") {
  gen::Rng rng(17);
  for (int p : {2, 3}) {
    FieldConfig cfg(p, 6, 1);
    int decided = 0;
    for (int trial = 0; trial < 200; ++trial) {
      auto f = random_poly(rng, cfg), g = random_poly(rng, cfg);
      auto x = random_point(rng, cfg);
      const Value vf = eval(f, x), vg = eval(g, x), vfg = eval(f * g, x);
      if (vf.exact && vg.exact && vfg.exact) {
        ++decided;
        CHECK(compare_abs(vfg, vf * vg) == 0);
      }
      const std::size_t n = std::max(f.coeffs().size(), g.coeffs().size());
      std::vector<UntiltElement> s(n, UntiltElement::zero(cfg, cfg.limit()));
      for (std::size_t i = 0; i < n; ++i) {
        if (i < f.coeffs().size()) s[i] += f[i];
        if (i < g.coeffs().size()) s[i] += g[i];
      }
      const Value vs = eval(UntiltPolynomial(cfg, s), x);
      if (vs.exact && vf.exact && vg.exact) CHECK(compare_abs(vs, compare_abs(vf, vg) >= 0 ? vf : vg) <= 0);
    }
    CHECK(decided > 100);
  }
}

TEST_CASE("tilt point check") {
  FieldConfig cfg(2, 4, 3);
  auto T = TiltTate::variable(cfg, 1, 0);
  auto t = TiltElement::monomial(cfg, 1, ValExp(2, 1, 0));
  TiltPoint at_t{false, {t}, "t"};
  auto r = tilt_point_check(T, at_t);
  CHECK(r.verdict == Verdict::pass);
  CHECK(r.tilt_side.value == Rational(1));
  r = tilt_point_check(TiltTate::constant(cfg, 1, TiltElement::from_int(cfg, 1)), at_t);
  CHECK(r.sharp_side.value == Rational(0));
  CHECK(r.verdict == Verdict::pass);
  r = tilt_point_check(T + TiltTate::constant(cfg, 1, t), TiltPoint{true, {}, "gauss"});
  CHECK(r.verdict == Verdict::pass);
  CHECK(r.sharp_side.value == Rational(0));

  // preimages of rational subsets agree on a sample
  gen::Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    TiltTate f(cfg, 1), g(cfg, 1);
    for (int k = 0; k < 2; ++k) {
      f.add_term({Rational(gen::uniform(rng, 0, 2))}, TiltElement::monomial(cfg, 1, ValExp(2, gen::uniform(rng, 0, 4), 0)));
      g.add_term({Rational(gen::uniform(rng, 0, 2))}, TiltElement::monomial(cfg, 1, ValExp(2, gen::uniform(rng, 0, 4), 0)));
    }
    const TiltElement z = TiltElement::monomial(cfg, 1, ValExp(2, gen::uniform(rng, 1, 3), 0)) +
                          TiltElement::from_int(cfg, gen::uniform(rng, 0, 1));
    TiltPoint x{false, {z}, "z"};
    auto rf = tilt_point_check(f, x), rg = tilt_point_check(g, x);
    CHECK(rf.verdict != Verdict::fail);
    CHECK(rg.verdict != Verdict::fail);
    if (rf.verdict == Verdict::pass && rg.verdict == Verdict::pass)
      CHECK((rf.tilt_side.value >= rg.tilt_side.value) == (rf.sharp_side.value >= rg.sharp_side.value));
  }
}
