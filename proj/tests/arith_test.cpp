#include <doctest.h>

#include "gen.hpp"
#include "perfectoid/element.hpp"
#include "perfectoid/error.hpp"

using namespace perfectoid;

namespace {

ValExp ve(int p, std::int64_t num, int denpow) { return ValExp(p, num, denpow); }

// Oracle for untilt elements supported on the integer grid: the plain integer
// sum of digit * p^k, compared modulo p^N.
std::int64_t as_integer(const UntiltElement& a) {
  const auto& cfg = a.config();
  std::int64_t r = 0;
  for (const Term& t : a.terms()) {
    REQUIRE(t.exponent.denpow() == 0);
    r += t.digit * ipow(cfg.p, static_cast<int>(t.exponent.num()));
  }
  return r;
}

}  // namespace

TEST_CASE("ValExp normalization and order") {
  CHECK(ve(3, 3, 1) == ve(3, 1, 0));
  CHECK(ve(3, 0, 4).denpow() == 0);
  CHECK(ve(3, 1, 2) < ve(3, 1, 1));
  CHECK((ve(3, 1, 1) + ve(3, 2, 1)) == ve(3, 1, 0));
  CHECK(ValExp::from_rational(2, Rational(3, 8)) == ve(2, 3, 3));
  CHECK_THROWS_AS(ValExp::from_rational(3, Rational(1, 2)), Error);
  CHECK(ve(3, 1, 2).to_index(3) == 3);
  CHECK_THROWS_AS(ve(3, 1, 3).to_index(2), Error);
}

TEST_CASE("base-p carries") {
  FieldConfig cfg(3, 8, 2);
  auto two = UntiltElement::from_int(cfg, 2);
  auto sum = two + two;
  REQUIRE(sum.terms().size() == 2);
  CHECK(sum.terms()[0] == Term{ve(3, 0, 0), 1});
  CHECK(sum.terms()[1] == Term{ve(3, 1, 0), 1});

  auto a = UntiltElement::monomial(cfg, 2, ve(3, 1, 1));
  auto s = a + a;
  REQUIRE(s.terms().size() == 2);
  CHECK(s.terms()[0] == Term{ve(3, 1, 1), 1});
  CHECK(s.terms()[1] == Term{ve(3, 4, 1), 1});
}

TEST_CASE("characteristic p square") {
  FieldConfig cfg(3, 8, 2);
  auto x = TiltElement::monomial(cfg, 1, ve(3, 1, 1)) + TiltElement::monomial(cfg, 1, ve(3, 1, 0));
  auto sq = x * x;
  std::vector<Term> want{{ve(3, 2, 1), 1}, {ve(3, 4, 1), 2}, {ve(3, 2, 0), 1}};
  CHECK(sq.terms() == want);
}

TEST_CASE("valuation") {
  FieldConfig cfg(3, 8, 2);
  auto a = UntiltElement::monomial(cfg, 1, ve(3, 1, 2)) + UntiltElement::from_int(cfg, 3);
  CHECK(*a.valuation() == ve(3, 1, 2));
  CHECK_FALSE(UntiltElement(cfg).valuation().has_value());
  auto b = UntiltElement::from_int(cfg, 2) + UntiltElement::monomial(cfg, 1, ve(3, 5, 1));
  CHECK(*b.valuation() == ve(3, 0, 0));
}

TEST_CASE("frobenius and pth_root") {
  FieldConfig cfg(3, 8, 2);
  auto x = TiltElement::monomial(cfg, 1, ve(3, 1, 1)) + TiltElement::monomial(cfg, 1, ve(3, 1, 0));
  auto r = x.pth_root();
  std::vector<Term> want{{ve(3, 1, 2), 1}, {ve(3, 1, 1), 1}};
  CHECK(r.terms() == want);
  CHECK(TiltElement::monomial(cfg, 1, ve(3, 1, 1)).frobenius().terms() == std::vector<Term>{{ve(3, 1, 0), 1}});
  CHECK(TiltElement::from_int(cfg, 1).pth_root().terms() == std::vector<Term>{{ve(3, 0, 0), 1}});
  CHECK_THROWS_AS(TiltElement::monomial(cfg, 1, ve(3, 1, 2)).pth_root(), Error);
}

TEST_CASE("reduction and lift") {
  FieldConfig cfg(3, 8, 2);
  auto a = UntiltElement::monomial(cfg, 2, ve(3, 1, 1)) + UntiltElement::monomial(cfg, 1, ve(3, 4, 1));
  auto r = reduce_mod_uniformizer(a);
  CHECK(r.terms() == std::vector<Term>{{ve(3, 1, 1), 2}});
  CHECK(r.precexp() == ve(3, 1, 0));
  auto l = lift_mod_uniformizer(TiltElement::monomial(cfg, 1, ve(3, 8, 2)));
  CHECK(l.terms() == std::vector<Term>{{ve(3, 8, 2), 1}});
  CHECK(reduce_mod_uniformizer(UntiltElement::from_int(cfg, 3)).is_zero());
}

TEST_CASE("pth_root_mod") {
  FieldConfig cfg(3, 4, 2);
  auto y = pth_root_mod(UntiltElement::from_int(cfg, 3), ve(3, 1, 0));
  // p^(1/3) is only determined modulo p^(1/3), where it vanishes.
  CHECK(y.precexp() == ve(3, 1, 1));
  CHECK(y == UntiltElement::monomial(cfg, 1, ve(3, 1, 1)).truncated(y.prec_index()));
  CHECK(pth_root_mod(UntiltElement::from_int(cfg, 1), ve(3, 1, 0)).terms() == std::vector<Term>{{ve(3, 0, 0), 1}});

  // a = 2 + p^(1/3): compare against every expansion below 1/3 on grid 1/27.
  FieldConfig fine(3, 2, 3);
  auto a = UntiltElement::from_int(fine, 2) + UntiltElement::monomial(fine, 1, ve(3, 1, 1));
  auto root = pth_root_mod(a, ve(3, 1, 0));
  CHECK(root.terms() == std::vector<Term>{{ve(3, 0, 0), 2}, {ve(3, 1, 2), 1}});
  const std::int64_t k = ValExp(3, 1, 0).to_index(3), bound = k / 3;
  int matches = 0;
  for (int d0 = 0; d0 < 3; ++d0)
    for (int d1 = 0; d1 < 3; ++d1)
      for (int d3 = 0; d3 < 3; ++d3) {
        auto y = UntiltElement::from_int(fine, d0) + UntiltElement::monomial(fine, d1, ve(3, 1, 3)) +
                 UntiltElement::monomial(fine, d3, ve(3, 1, 2));
        if (!y.pow(3).congruent(a, k)) continue;
        ++matches;
        CHECK(y.truncated(bound) == root);
      }
  CHECK(matches >= 1);
}

TEST_CASE("integer oracle on the integer grid") {
  gen::Rng rng(7);
  for (int p : {2, 3, 5}) {
    FieldConfig cfg(p, 8, 0);
    const std::int64_t mod = ipow(p, 8);
    for (int i = 0; i < 200; ++i) {
      auto a = gen::untilt(rng, cfg, 0.5), b = gen::untilt(rng, cfg, 0.5);
      CHECK(as_integer(a + b) == (as_integer(a) + as_integer(b)) % mod);
      CHECK(as_integer(a * b) == (as_integer(a) * as_integer(b)) % mod);
      CHECK(as_integer(a - b) == floor_mod(as_integer(a) - as_integer(b), mod));
    }
  }
}

TEST_CASE_TEMPLATE("ring axioms", E, UntiltElement, TiltElement) {
  gen::Rng rng(11);
  for (int p : {2, 3, 5}) {
    FieldConfig cfg(p, 8, 2);
    auto zero = E(cfg), one = E::from_int(cfg, 1);
    for (int i = 0; i < 50; ++i) {
      auto a = gen::element<E::kind>(rng, cfg), b = gen::element<E::kind>(rng, cfg),
           c = gen::element<E::kind>(rng, cfg);
      CHECK((a + b) + c == a + (b + c));
      CHECK((a * b) * c == a * (b * c));
      CHECK(a * b == b * a);
      CHECK(a + b == b + a);
      CHECK(a * (b + c) == a * b + a * c);
      CHECK(a + zero == a);
      CHECK(a * one == a);
      CHECK((a - a).is_zero());
      CHECK(a + (-a) == zero);
    }
  }
}

TEST_CASE_TEMPLATE("precision tracking", E, UntiltElement, TiltElement) {
  gen::Rng rng(3);
  FieldConfig cfg(3, 6, 1);
  for (int i = 0; i < 200; ++i) {
    auto a = gen::element<E::kind>(rng, cfg, 0.3, true), b = gen::element<E::kind>(rng, cfg, 0.3, true);
    auto s = a + b;
    CHECK(s.prec_index() == std::min(a.prec_index(), b.prec_index()));
    auto m = a * b;
    CHECK(m.prec_index() == std::min({a.prec_index() + b.valuation_bound(), b.prec_index() + a.valuation_bound(),
                                      cfg.limit()}));
    // Any completion of the inputs agrees with the product up to its precision.
    auto ea = a.extended(cfg.limit()) + gen::element<E::kind>(rng, cfg).shifted_up(a.prec_index()).truncated(cfg.limit());
    auto eb = b.extended(cfg.limit());
    CHECK((ea * eb).congruent(m.extended(cfg.limit()), m.prec_index()));
    auto va = a.valuation_index(), vb = b.valuation_index();
    if (va && vb && *va + *vb < m.prec_index()) CHECK(*m.valuation_index() == *va + *vb);
    if (va && vb && *va != *vb && std::min(*va, *vb) < s.prec_index())
      CHECK(*s.valuation_index() == std::min(*va, *vb));
  }
}

TEST_CASE("frobenius is a ring map and inverts pth_root") {
  gen::Rng rng(5);
  for (int p : {2, 3, 5}) {
    FieldConfig cfg(p, 8, 2);
    for (int i = 0; i < 100; ++i) {
      auto a = gen::tilt(rng, cfg), b = gen::tilt(rng, cfg);
      CHECK((a * b).frobenius() == a.frobenius() * b.frobenius());
      CHECK((a + b).frobenius() == a.frobenius() + b.frobenius());
      CHECK(a.frobenius().pth_root().truncated(a.prec_index()) == a.truncated(cfg.limit() / p));
      auto c = a.truncated(cfg.limit() / p).frobenius();
      CHECK(c.pth_root().frobenius() == c);
    }
  }
}

TEST_CASE("reduction is a ring homomorphism") {
  gen::Rng rng(9);
  for (int p : {2, 3, 5}) {
    FieldConfig cfg(p, 4, 2);
    for (int i = 0; i < 100; ++i) {
      auto a = gen::untilt(rng, cfg), b = gen::untilt(rng, cfg);
      CHECK(reduce_mod_uniformizer(a + b) == reduce_mod_uniformizer(a) + reduce_mod_uniformizer(b));
      auto prod = reduce_mod_uniformizer(a) * reduce_mod_uniformizer(b);
      CHECK(reduce_mod_uniformizer(a * b) == prod.truncated(cfg.grid()));
      auto t = reduce_mod_uniformizer(a);
      CHECK(reduce_mod_uniformizer(lift_mod_uniformizer(t)) == t);
    }
  }
}

TEST_CASE("inverse and exact division") {
  gen::Rng rng(13);
  for (int p : {2, 3}) {
    FieldConfig cfg(p, 6, 2);
    for (int i = 0; i < 50; ++i) {
      auto u = gen::untilt(rng, cfg) + UntiltElement::from_int(cfg, 1);
      if (!u.is_unit()) continue;
      CHECK(u * u.inverse() == UntiltElement::from_int(cfg, 1));
      auto t = gen::tilt(rng, cfg) + TiltElement::from_int(cfg, 1);
      if (t.is_unit()) CHECK(t * t.inverse() == TiltElement::from_int(cfg, 1));
      auto b = u.shifted_up(3);
      auto a = gen::untilt(rng, cfg).shifted_up(5).truncated(cfg.limit());
      auto q = a.divided_by(b);
      CHECK((q * b).congruent(a, (q * b).prec_index()));
    }
  }
}

TEST_CASE("recast between grids") {
  FieldConfig coarse(3, 4, 1), fine(3, 4, 3);
  auto a = UntiltElement::monomial(coarse, 2, ValExp(3, 1, 1)) + UntiltElement::from_int(coarse, 5);
  auto b = a.recast(fine);
  CHECK(b.terms() == a.terms());
  CHECK(b.recast(coarse) == a);
  CHECK_THROWS_AS(UntiltElement::monomial(fine, 1, ValExp(3, 1, 3)).recast(coarse), Error);
}

TEST_CASE("mixed configs are rejected") {
  FieldConfig a(3, 4, 1), b(3, 5, 1);
  CHECK_THROWS_AS(UntiltElement(a) + UntiltElement(b), Error);
}
