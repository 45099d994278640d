#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <set>

#include "gen.hpp"
#include "perfectoid/error.hpp"
#include "perfectoid/toric.hpp"

using namespace perfectoid;

namespace {

using Gens = std::vector<LatticeVec>;

std::int64_t binomial(int n, int k) {
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Direct enumeration of {u in Z^n : u_i >= 0, sum u_i <= d}.
std::int64_t simplex_points(int n, int d) {
  if (n == 0) return 1;
  std::int64_t total = 0;
  for (int x = 0; x <= d; ++x) total += simplex_points(n - 1, d - x);
  return total;
}

// w in cone(gens) for rank 2, by Caratheodory: some pair or single generator
// carries w with nonnegative coefficients.
bool in_cone_2d(const Gens& gens, const LatticeVec& w) {
  if (w[0] == 0 && w[1] == 0) return true;
  for (const auto& a : gens)
    if (a[0] * w[1] - a[1] * w[0] == 0 && a[0] * w[0] + a[1] * w[1] > 0) return true;
  for (const auto& a : gens)
    for (const auto& b : gens) {
      const std::int64_t det = a[0] * b[1] - a[1] * b[0];
      if (det == 0) continue;
      const std::int64_t x = w[0] * b[1] - w[1] * b[0], y = a[0] * w[1] - a[1] * w[0];
      if ((det > 0 && x >= 0 && y >= 0) || (det < 0 && x <= 0 && y <= 0)) return true;
    }
  return false;
}

TWeilDivisor hyperplane(const Fan& fan, Rational a) {
  TWeilDivisor d{std::vector<Rational>(fan.rays.size(), Rational(0))};
  d.coefficients.back() = a;
  return d;
}

UntiltTate linear_form(const FieldConfig& cfg, int nvars) {
  UntiltTate f(cfg, nvars);
  for (int j = 0; j < nvars; ++j) f += UntiltTate::variable(cfg, nvars, j);
  return f;
}

}  // namespace

TEST_CASE("dual cone examples") {
  CHECK(dual_cone(Cone::make(2, {{1, 0}, {0, 1}})).generators == Gens{{0, 1}, {1, 0}});
  CHECK(dual_cone(Cone::make(2, {{1, 0}})).generators == Gens{{0, -1}, {0, 1}, {1, 0}});
  CHECK(dual_cone(Cone::make(2, {{1, 0}, {1, 2}})).generators == Gens{{0, 1}, {2, -1}});
  CHECK(dual_cone(Cone::make(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}})).generators.size() == 3);
  // four rays over a square
  CHECK(dual_cone(Cone::make(3, {{1, 0, 1}, {0, 1, 1}, {-1, 0, 1}, {0, -1, 1}})).generators.size() == 4);
  CHECK_THROWS_AS(Cone::make(2, {{1, 0}, {-1, 0}}), Error);
  CHECK(Cone::make(2, {{2, 0}, {1, 1}, {0, 3}}).generators == Gens{{0, 1}, {1, 0}});
  // simplicial in rank 4 is allowed, the non-simplicial case is not
  CHECK(dual_cone(Cone::make(4, {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}})).generators.size() == 4);
  CHECK_THROWS_AS(
      dual_cone(Cone::make(4, {{1, 0, 0, 1}, {0, 1, 0, 1}, {-1, 0, 0, 1}, {0, -1, 0, 1}, {0, 0, 1, 1}})), Error);
}

TEST_CASE("dual cone matches brute force and is an involution") {
  std::set<LatticeVec> prim;
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b)
      if (std::gcd(a, b) == 1) prim.insert({a, b});
  int cones = 0;
  for (const auto& u : prim)
    for (const auto& v : prim) {
      if (u >= v || u[0] * v[1] - u[1] * v[0] == 0) continue;
      const Cone sigma = Cone::make(2, {u, v});
      const Cone dual = dual_cone(sigma);
      CHECK(dual_cone(dual) == sigma);
      for (int x = -6; x <= 6; ++x)
        for (int y = -6; y <= 6; ++y) {
          const bool in_dual = u[0] * x + u[1] * y >= 0 && v[0] * x + v[1] * y >= 0;
          CHECK(in_cone_2d(dual.generators, {x, y}) == in_dual);
        }
      ++cones;
    }
  CHECK(cones > 200);
}

TEST_CASE("fans") {
  auto p1 = validate_fan(1, {{{1}}, {{-1}}});
  CHECK(is_smooth(p1));
  CHECK(is_complete(p1));
  auto p2 = validate_fan(2, {{{1, 0}, {0, 1}}, {{0, 1}, {-1, -1}}, {{-1, -1}, {1, 0}}});
  CHECK(p2.rays == Gens{{1, 0}, {0, 1}, {-1, -1}});
  CHECK(p2.cones.size() == 7);
  CHECK(is_smooth(p2));
  CHECK(is_complete(p2));
  CHECK(is_projective_space(p2));
  auto p1p1 = validate_fan(2, {{{1, 0}, {0, 1}}, {{0, 1}, {-1, 0}}, {{-1, 0}, {0, -1}}, {{0, -1}, {1, 0}}});
  CHECK(is_smooth(p1p1));
  CHECK(is_complete(p1p1));
  CHECK_FALSE(is_projective_space(p1p1));
  auto singular = validate_fan(2, {{{1, 0}, {1, 2}}});
  CHECK_FALSE(is_smooth(singular));
  CHECK_FALSE(is_complete(singular));
  CHECK_THROWS_AS(validate_fan(2, {{{1, 0}, {0, 1}}, {{1, 1}, {-1, 1}}}), Error);
  // a cone sitting inside another without being a face
  CHECK_THROWS_AS(validate_fan(2, {{{1, 0}, {0, 1}}, {{1, 1}}}), Error);
  CHECK(validate_fan(2, {{{1, 0}, {0, 1}}, {{1, 0}}}).maximal.size() == 1);
  for (int n = 1; n <= 3; ++n) {
    auto pn = projective_space_fan(n);
    CHECK(is_smooth(pn));
    CHECK(is_complete(pn));
    CHECK(pn.maximal.size() == static_cast<std::size_t>(n + 1));
  }
  // weighted projective plane P(1,1,2): complete, not smooth
  auto wp = validate_fan(2, {{{1, 0}, {0, 1}}, {{0, 1}, {-1, -2}}, {{-1, -2}, {1, 0}}});
  CHECK(is_complete(wp));
  CHECK_FALSE(is_smooth(wp));
}

TEST_CASE("sections of divisors") {
  auto p2 = projective_space_fan(2);
  auto pts = sections(p2, hyperplane(p2, 1), 3, 0);
  std::set<SectionPoint> got(pts.begin(), pts.end());
  CHECK(got == std::set<SectionPoint>{{0, 0}, {1, 0}, {0, 1}});
  for (int n = 1; n <= 3; ++n) {
    auto pn = projective_space_fan(n);
    for (int d = 0; d <= 5; ++d) {
      const auto count = static_cast<std::int64_t>(sections(pn, hyperplane(pn, d), 2, 0).size());
      CHECK(count == binomial(n + d, n));
      CHECK(count == simplex_points(n, d));
    }
  }
  // linearly equivalent divisors: D on any single ray of P^2 is a hyperplane
  for (int r = 0; r < 3; ++r) {
    TWeilDivisor d{{0, 0, 0}};
    d.coefficients[r] = 1;
    CHECK(sections(p2, d, 2, 0).size() == 3);
  }
}

TEST_CASE("sections agree with brute force") {
  gen::Rng rng(77);
  const std::vector<Fan> fans{projective_space_fan(2),
                              validate_fan(2, {{{1, 0}, {0, 1}}, {{0, 1}, {-1, 0}}, {{-1, 0}, {0, -1}}, {{0, -1}, {1, 0}}}),
                              validate_fan(2, {{{1, 0}, {0, 1}}, {{0, 1}, {-1, -2}}, {{-1, -2}, {1, 0}}})};
  for (int trial = 0; trial < 60; ++trial) {
    const Fan& fan = fans[trial % fans.size()];
    TWeilDivisor d;
    for (std::size_t i = 0; i < fan.rays.size(); ++i) d.coefficients.push_back(gen::uniform(rng, -2, 3));
    std::set<SectionPoint> expect;
    for (int x = -20; x <= 20; ++x)
      for (int y = -20; y <= 20; ++y) {
        bool ok = true;
        for (std::size_t i = 0; i < fan.rays.size(); ++i)
          ok = ok && Rational(x * fan.rays[i][0] + y * fan.rays[i][1]) >= -d.coefficients[i];
        if (ok) expect.insert({x, y});
      }
    const auto pts = sections(fan, d, 2, 0);
    CHECK(std::set<SectionPoint>(pts.begin(), pts.end()) == expect);
    CHECK(std::is_sorted(pts.begin(), pts.end()));
  }
}

TEST_CASE("fractional sections") {
  auto p2 = projective_space_fan(2);
  std::vector<SectionPoint> pts;
  std::set<SectionPoint> got;
  pts = sections(p2, hyperplane(p2, Rational(1, 3)), 3, 1);
  got = std::set<SectionPoint>(pts.begin(), pts.end());
  CHECK(got == std::set<SectionPoint>{{0, 0}, {Rational(1, 3), 0}, {0, Rational(1, 3)}});
  CHECK(sections(p2, hyperplane(p2, -1), 3, 0).empty());
  CHECK_THROWS_AS(sections(validate_fan(2, {{{1, 0}, {0, 1}}}), TWeilDivisor{{0, 0}}, 2, 0), Error);
  CHECK_THROWS_AS(sections(p2, hyperplane(p2, Rational(1, 2)), 3, 1), Error);
  CHECK_THROWS_AS(sections(p2, TWeilDivisor{{1}}, 3, 0), Error);
}

TEST_CASE("sections are monotone and frobenius injects") {
  gen::Rng rng(11);
  auto p1p1 = validate_fan(2, {{{1, 0}, {0, 1}}, {{0, 1}, {-1, 0}}, {{-1, 0}, {0, -1}}, {{0, -1}, {1, 0}}});
  for (const Fan& fan : {projective_space_fan(2), p1p1}) {
    for (int trial = 0; trial < 30; ++trial) {
      TWeilDivisor d, e;
      for (std::size_t i = 0; i < fan.rays.size(); ++i) {
        d.coefficients.push_back(Rational(gen::uniform(rng, 0, 6), 3));
        e.coefficients.push_back(d.coefficients.back() + Rational(gen::uniform(rng, 0, 3), 3));
      }
      const auto sd = sections(fan, d, 3, 1), se = sections(fan, e, 3, 1);
      std::set<SectionPoint> big(se.begin(), se.end());
      for (const auto& u : sd) CHECK(big.count(u) == 1);

      TWeilDivisor pd = d;
      for (auto& a : pd.coefficients) a *= 3;
      const auto spd = sections(fan, pd, 3, 1);
      std::set<SectionPoint> target(spd.begin(), spd.end()), images;
      for (const auto& u : sd) {
        auto v = frobenius_pullback(u, 3);
        CHECK(target.count(v) == 1);
        images.insert(v);
      }
      CHECK(images.size() == sd.size());
    }
  }
  CHECK(frobenius_pullback(SectionPoint{Rational(1, 3), 0}, 3) == SectionPoint{1, 0});
}

TEST_CASE("frobenius on homogeneous coordinates") {
  FieldConfig cfg(3, 3, 2);
  auto f = linear_form(cfg, 3);
  auto h = f;
  for (int n = 1; n <= 2; ++n) {
    h = frobenius_pullback(h);
    REQUIRE(h.size() == 3);
    for (const auto& [m, c] : h.terms()) {
      CHECK(total_degree(m) == Rational(ipow(3, n)));
      CHECK(c == UntiltElement::from_int(cfg, 1));
    }
  }
  auto g = TiltTate::term(cfg, 2, {Rational(1, 3), Rational(2, 3)}, TiltElement::monomial(cfg, 1, ValExp(3, 1, 1)));
  auto fg = frobenius_pullback(g);
  CHECK(fg.terms().begin()->first == Monomial{Rational(1), Rational(2)});
  CHECK(fg.terms().begin()->second == TiltElement::monomial(cfg, 1, ValExp(3, 1, 0)));
}

TEST_CASE("hypersurface transfer on P^2") {
  FieldConfig cfg(2, 4, 8);
  auto p2 = projective_space_fan(2);
  const auto start = std::chrono::steady_clock::now();
  auto res = hypersurface_transfer(p2, linear_form(cfg, 3), 1, Rational(1, 2));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(res.report.overall() == Verdict::pass);
  CHECK(res.report.points.size() == 50);
  CHECK(res.degree == Rational(1));
  CHECK(res.h_degree.denominator() == 1);
  for (const auto& [m, c] : res.h.terms())
    for (const auto& e : m) CHECK(e.denominator() == 1);
  CHECK(res.h == [&] {
    auto x = res.approx.g;
    for (int i = 0; i < res.s; ++i) x = frobenius_pullback(x);
    return x;
  }());
  CHECK(secs < 30);

  // a sharp transfers back to itself
  auto g0 = TiltTate::variable(cfg, 3, 0) * TiltTate::variable(cfg, 3, 1);
  auto f = sharp_element(g0, Rational(cfg.prec));
  auto back = hypersurface_transfer(p2, f, 2, Rational(1, 2));
  CHECK(back.approx.g == g0.truncated(back.approx.g.prec_index()));
  CHECK(back.s == 0);
  CHECK(back.h_degree == Rational(2));

  CHECK_THROWS_AS(hypersurface_transfer(p2, linear_form(cfg, 2), 1, Rational(1, 2)), Error);
  auto p1p1 = validate_fan(2, {{{1, 0}, {0, 1}}, {{0, 1}, {-1, 0}}, {{-1, 0}, {0, -1}}, {{0, -1}, {1, 0}}});
  CHECK_THROWS_AS(hypersurface_transfer(p1p1, linear_form(cfg, 3), 1, Rational(1, 2)), Error);
  auto inhom = linear_form(cfg, 3) + UntiltTate::constant(cfg, 3, UntiltElement::from_int(cfg, 1));
  CHECK_THROWS_AS(hypersurface_transfer(p2, inhom, 1, Rational(1, 2)), Error);
}

TEST_CASE("complete intersection degree") {
  FieldConfig cfg(2, 4, 8);
  auto p2 = projective_space_fan(2);
  auto q = UntiltTate::variable(cfg, 3, 0) * UntiltTate::variable(cfg, 3, 1) +
           UntiltTate::variable(cfg, 3, 2).pow(2).scaled(UntiltElement::from_int(cfg, 2));
  auto ci = complete_intersection(p2, linear_form(cfg, 3), q, 1, Rational(1, 2), 20);
  CHECK(ci.degree == Rational(2));
  CHECK(ci.first.report.overall() == Verdict::pass);
  CHECK(ci.second.report.overall() == Verdict::pass);
}
