#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "gen.hpp"
#include "perfectoid/error.hpp"
#include "perfectoid/io.hpp"

using namespace perfectoid;
using io::Json;

namespace {

template <Kind K>
TatePoly<K> random_tate(gen::Rng& rng, const FieldConfig& cfg, int nvars) {
  TatePoly<K> f(cfg, nvars, gen::uniform(rng, 1, static_cast<int>(cfg.limit())));
  for (int k = gen::uniform(rng, 0, 4); k > 0; --k) {
    Monomial m;
    for (int j = 0; j < nvars; ++j) m.push_back(Rational(gen::uniform(rng, 0, 4), cfg.p));
    f.add_term(m, gen::element<K>(rng, cfg, 0.3));
  }
  return f;
}

bool throws_parse(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind() == ErrorKind::parse;
  }
  return false;
}

}  // namespace

TEST_CASE("element json and text round trip") {
  gen::Rng rng(23);
  for (int p : {2, 3, 5}) {
    FieldConfig cfg(p, 4, 2);
    for (int trial = 0; trial < 100; ++trial) {
      const auto a = gen::element<Kind::untilt>(rng, cfg, 0.3, true);
      const auto b = gen::element<Kind::tilt>(rng, cfg, 0.3, true);
      const std::string sa = io::print(io::to_json(a)), sb = io::print(io::to_json(b));
      CHECK(io::element_from_json<Kind::untilt>(io::parse_document(sa)) == a);
      CHECK(io::element_from_json<Kind::tilt>(io::parse_document(sb)) == b);
      CHECK(io::reprint(sa, cfg) == sa);
      CHECK(io::reprint(sb, cfg) == sb);
      CHECK(io::element_from_text<Kind::untilt>(cfg, io::to_text(a)) == a);
      CHECK(io::to_text(io::element_from_text<Kind::tilt>(cfg, io::to_text(b))) == io::to_text(b));
    }
  }
}

TEST_CASE("element formats") {
  FieldConfig cfg(3, 8, 2);
  auto a = UntiltElement::monomial(cfg, 2, ValExp(3, 1, 1)) + UntiltElement::monomial(cfg, 1, ValExp(3, 4, 1));
  CHECK(io::to_text(a) == "2*p^(1/3) + 1*p^(4/3) + O(p^8)");
  CHECK(io::to_json(a).dump() ==
        R"({"kind":"untilt","p":3,"prec":8,"dencap":2,"precexp":{"num":8,"denpow":0},"terms":[{"num":1,"denpow":1,"digit":2},{"num":4,"denpow":1,"digit":1}]})");
  CHECK(io::to_text(TiltElement(cfg)) == "O(t^8)");
  CHECK(io::to_text(UntiltElement::from_int(cfg, 1).truncated(4)) == "1*p^0 + O(p^(4/9))");
}

TEST_CASE("non-canonical documents are rejected") {
  FieldConfig cfg(3, 2, 1);
  const std::string good = io::print(io::to_json(UntiltElement::from_int(cfg, 1)));
  CHECK(io::reprint(good, cfg) == good);
  auto edit = [&](auto fn) {
    Json j = io::parse_document(good);
    fn(j);
    return j;
  };
  CHECK(throws_parse([&] { io::parse_document("{\"kind\":"); }));
  CHECK(throws_parse([&] { io::element_from_json<Kind::tilt>(io::parse_document(good)); }));
  CHECK(throws_parse([&] { io::element_from_json<Kind::untilt>(edit([](Json& j) { j["terms"][0]["digit"] = 0; })); }));
  CHECK(throws_parse([&] {
    io::element_from_json<Kind::untilt>(edit([](Json& j) { j["terms"][0] = Json{{"num", 3}, {"denpow", 1}, {"digit", 1}}; }));
  }));
  CHECK(throws_parse([&] { io::element_from_json<Kind::untilt>(edit([](Json& j) { j["extra"] = 1; })); }));
  CHECK(throws_parse([&] { io::element_from_json<Kind::untilt>(edit([](Json& j) { j["precexp"]["num"] = 9; })); }));
  CHECK(throws_parse([&] {
    io::element_from_json<Kind::untilt>(edit([](Json& j) {
      j["terms"] = Json::array({Json{{"num", 1}, {"denpow", 1}, {"digit", 1}}, Json{{"num", 0}, {"denpow", 0}, {"digit", 1}}});
    }));
  }));
  CHECK(throws_parse([&] { io::element_from_text<Kind::untilt>(cfg, "1*p^0 + O(p^2"); }));
  CHECK(throws_parse([&] { io::element_from_text<Kind::untilt>(cfg, "01*p^0 + O(p^2)"); }));
  CHECK(throws_parse([&] { io::element_from_text<Kind::untilt>(cfg, "1*p^1/3 + O(p^2)"); }));
  CHECK(throws_parse([&] { io::rational_from_json("2/4"); }));
  CHECK(throws_parse([&] { io::reprint("{\"unknown\":1}", cfg); }));
}

TEST_CASE("structured documents round trip") {
  gen::Rng rng(29);
  FieldConfig cfg(2, 4, 2);
  for (int trial = 0; trial < 40; ++trial) {
    const auto f = random_tate<Kind::untilt>(rng, cfg, gen::uniform(rng, 1, 3));
    const auto g = random_tate<Kind::tilt>(rng, cfg, 2);
    const std::string sf = io::print(io::to_json(f)), sg = io::print(io::to_json(g));
    CHECK(io::tate_from_json<Kind::untilt>(io::parse_document(sf)) == f);
    CHECK(io::reprint(sf, cfg) == sf);
    CHECK(io::reprint(sg, cfg) == sg);

    std::vector<UntiltElement> c;
    for (int i = gen::uniform(rng, 0, 3); i >= 0; --i) c.push_back(gen::untilt(rng, cfg));
    const UntiltPolynomial P(cfg, c);
    const std::string sp = io::print(io::to_json(P));
    CHECK(io::polynomial_from_json<Kind::untilt>(io::parse_document(sp)) == P);
    CHECK(io::reprint(sp, cfg) == sp);

    const WittVector w(cfg, {gen::tilt(rng, cfg), gen::tilt(rng, cfg)});
    const std::string sw = io::print(io::to_json(w));
    CHECK(io::witt_from_json(io::parse_document(sw)) == w);
    CHECK(io::reprint(sw, cfg) == sw);
  }
  const auto u = UntiltElement::from_int(cfg, 2);
  for (const auto& x : {AdicPoint::gauss(cfg), AdicPoint::classical(u), AdicPoint::disc(u, Rational(1, 2)),
                        AdicPoint::disc(u, 0), AdicPoint::type5(u, 1, Side::greater)}) {
    const std::string s = io::print(io::to_json(x));
    CHECK(io::reprint(s, cfg) == s);
    CHECK(same_point(io::point_from_json(io::parse_document(s), cfg), x));
  }
  CHECK(throws_parse([&] {
    io::point_from_json(Json{{"type", "disc"}, {"center", io::to_json(UntiltElement(cfg))}, {"q", "0"}}, cfg);
  }));
  const std::string fan = io::print(io::to_json(projective_space_fan(2)));
  CHECK(io::reprint(fan, cfg) == fan);
  CHECK(io::to_json(projective_space_fan(2)).dump() == R"({"rank":2,"cones":[[[1,0],[0,1]],[[0,1],[-1,-1]],[[-1,-1],[1,0]]]})");
  const std::string div = io::print(io::to_json(TWeilDivisor{{0, 0, Rational(1, 2)}}));
  CHECK(io::reprint(div, cfg) == div);
  const UntiltPolynomial T(cfg, {UntiltElement(cfg), UntiltElement::from_int(cfg, 1)});
  const UntiltPolynomial pM(cfg, {UntiltElement::from_int(cfg, 8)});
  const std::string sub = io::print(io::to_json(RationalSubset{{T, pM}, UntiltPolynomial(cfg, {UntiltElement::from_int(cfg, 1)})}));
  CHECK(io::reprint(sub, cfg) == sub);
}

TEST_CASE("newton polygon json") {
  FieldConfig cfg(2, 4, 1);
  const UntiltPolynomial P(cfg, {-UntiltElement::from_int(cfg, 2), UntiltElement(cfg), UntiltElement::from_int(cfg, 1)});
  CHECK(io::to_json(newton_polygon(P)).dump() == R"([{"slope":"1/2","mult":2}])");
}

TEST_CASE("fixtures reprint byte for byte") {
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(PERFECTOID_FIXTURE_DIR)) {
    if (e.path().extension() != ".json") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    CAPTURE(e.path().filename().string());
    CHECK(io::reprint(ss.str(), FieldConfig(2, 8, 2)) == ss.str());
    ++files;
  }
  CHECK(files >= 10);
}
