#include "perfectoid/io.hpp"

#include <algorithm>
#include <initializer_list>

#include "perfectoid/error.hpp"

namespace perfectoid::io {

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorKind::parse, what); }

void expect_keys(const Json& j, std::initializer_list<const char*> keys, const char* what) {
  if (!j.is_object()) bad(std::string(what) + ": expected an object");
  if (j.size() != keys.size()) bad(std::string(what) + ": expected " + std::to_string(keys.size()) + " keys");
  auto it = j.begin();
  for (const char* k : keys) {
    if (it.key() != k) bad(std::string(what) + ": expected key \"" + k + "\" in this position, got \"" + it.key() + "\"");
    ++it;
  }
}

std::int64_t integer(const Json& j, const char* what) {
  if (!j.is_number_integer()) bad(std::string(what) + " must be an integer");
  return j.get<std::int64_t>();
}

const std::string& string(const Json& j, const char* what) {
  if (!j.is_string()) bad(std::string(what) + " must be a string");
  return j.get_ref<const std::string&>();
}

Json valexp_json(const ValExp& e) { return Json{{"num", e.num()}, {"denpow", e.denpow()}}; }

ValExp valexp_from_json(const Json& j, int p) {
  expect_keys(j, {"num", "denpow"}, "exponent");
  const auto num = integer(j["num"], "num");
  const auto den = integer(j["denpow"], "denpow");
  if (num < 0 || den < 0) bad("exponent parts must be nonnegative");
  ValExp e(p, num, static_cast<int>(den));
  if (e.num() != num || e.denpow() != den) bad("exponent " + std::to_string(num) + "/p^" + std::to_string(den) +
                                               " is not normalized");
  return e;
}

FieldConfig config_from_json(const Json& j) {
  return FieldConfig(static_cast<int>(integer(j["p"], "p")), static_cast<int>(integer(j["prec"], "prec")),
                     static_cast<int>(integer(j["dencap"], "dencap")));
}

Kind kind_from_json(const Json& j) {
  const auto& k = string(j, "kind");
  if (k == "untilt") return Kind::untilt;
  if (k == "tilt") return Kind::tilt;
  bad("kind must be \"untilt\" or \"tilt\", got \"" + k + "\"");
}

std::string exponent_text(const Rational& e) {
  const std::string s = to_string(e);
  return e.denominator() == 1 ? s : "(" + s + ")";
}

template <Kind K>
constexpr const char* base() {
  return K == Kind::untilt ? "p" : "t";
}

Rational canonical_rational(const std::string& s) {
  Rational r;
  try {
    r = parse_rational(s);
  } catch (const Error&) {
    bad("malformed rational \"" + s + "\"");
  }
  if (to_string(r) != s) bad("rational \"" + s + "\" is not in lowest terms");
  return r;
}

Rational exponent_from_text(const std::string& s) {
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') {
    const Rational r = canonical_rational(s.substr(1, s.size() - 2));
    if (r.denominator() == 1) bad("integer exponent written in parentheses: " + s);
    return r;
  }
  const Rational r = canonical_rational(s);
  if (r.denominator() != 1) bad("fractional exponent needs parentheses: " + s);
  return r;
}

Json side_json(Side s) { return s == Side::less ? "<" : ">"; }

}  // namespace

std::string print(const Json& j) { return j.dump(2) + "\n"; }

Json parse_document(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
}

Json rational_json(const Rational& r) { return to_string(r); }

Rational rational_from_json(const Json& j) { return canonical_rational(string(j, "rational")); }

template <Kind K>
Json to_json(const Element<K>& a) {
  const FieldConfig& cfg = a.config();
  Json terms = Json::array();
  for (const Term& t : a.terms())
    terms.push_back(Json{{"num", t.exponent.num()}, {"denpow", t.exponent.denpow()}, {"digit", t.digit}});
  return Json{{"kind", to_string(K)},          {"p", cfg.p},
              {"prec", cfg.prec},              {"dencap", cfg.dencap},
              {"precexp", valexp_json(a.precexp())}, {"terms", terms}};
}

template <Kind K>
Element<K> element_from_json(const Json& j) {
  expect_keys(j, {"kind", "p", "prec", "dencap", "precexp", "terms"}, "element");
  if (kind_from_json(j["kind"]) != K) bad(std::string("expected a ") + to_string(K) + " element");
  const FieldConfig cfg = config_from_json(j);
  const ValExp precexp = valexp_from_json(j["precexp"], cfg.p);
  if (!j["terms"].is_array()) bad("terms must be an array");
  std::vector<Term> terms;
  for (const auto& t : j["terms"]) {
    expect_keys(t, {"num", "denpow", "digit"}, "term");
    Json e{{"num", t["num"]}, {"denpow", t["denpow"]}};
    terms.push_back(Term{valexp_from_json(e, cfg.p), static_cast<int>(integer(t["digit"], "digit"))});
    if (terms.size() > 1 && !(terms[terms.size() - 2].exponent < terms.back().exponent))
      bad("terms must be sorted by strictly increasing exponent");
  }
  try {
    return Element<K>::from_terms(cfg, terms, precexp);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::parse) throw;
    bad(std::string("element: ") + e.what());
  }
}

AnyElement any_element_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind")) bad("element: missing kind");
  if (kind_from_json(j["kind"]) == Kind::untilt) return element_from_json<Kind::untilt>(j);
  return element_from_json<Kind::tilt>(j);
}

template <Kind K>
std::string to_text(const Element<K>& a) {
  std::string s;
  for (const Term& t : a.terms())
    s += std::to_string(t.digit) + "*" + base<K>() + "^" + exponent_text(t.exponent.value()) + " + ";
  return s + "O(" + base<K>() + "^" + exponent_text(a.precexp().value()) + ")";
}

template <Kind K>
Element<K> element_from_text(const FieldConfig& cfg, const std::string& s) {
  const std::string b = base<K>();
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(" + ", pos);
    parts.push_back(s.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
    if (next == std::string::npos) break;
    pos = next + 3;
  }
  const std::string& tail = parts.back();
  const std::string open = "O(" + b + "^";
  if (tail.rfind(open, 0) != 0 || tail.back() != ')') bad("element text must end with O(" + b + "^e)");
  const Rational prec = exponent_from_text(tail.substr(open.size(), tail.size() - open.size() - 1));
  std::vector<Term> terms;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    const std::string& part = parts[i];
    const auto star = part.find("*" + b + "^");
    if (star == std::string::npos || star == 0) bad("malformed term \"" + part + "\"");
    const std::string digit = part.substr(0, star);
    if (!std::all_of(digit.begin(), digit.end(), [](char c) { return c >= '0' && c <= '9'; }) || digit.size() > 3 ||
        (digit.size() > 1 && digit[0] == '0'))
      bad("malformed digit in \"" + part + "\"");
    const ValExp e = ValExp::from_rational(cfg.p, exponent_from_text(part.substr(star + 3)));
    if (!terms.empty() && !(terms.back().exponent < e)) bad("terms must be sorted by increasing exponent");
    terms.push_back(Term{e, std::stoi(digit)});
  }
  try {
    return Element<K>::from_terms(cfg, terms, ValExp::from_rational(cfg.p, prec));
  } catch (const Error& e) {
    bad(std::string("element: ") + e.what());
  }
}

Json to_json(const WittVector& w) {
  Json comps = Json::array();
  for (const auto& c : w.components()) comps.push_back(to_json(c));
  return Json{{"length", w.length()}, {"components", comps}};
}

WittVector witt_from_json(const Json& j) {
  expect_keys(j, {"length", "components"}, "witt vector");
  const auto n = integer(j["length"], "length");
  if (!j["components"].is_array() || static_cast<std::int64_t>(j["components"].size()) != n || n < 1)
    bad("witt vector: components must be a nonempty array of the stated length");
  std::vector<TiltElement> comps;
  for (const auto& c : j["components"]) comps.push_back(element_from_json<Kind::tilt>(c));
  try {
    return WittVector(comps.front().config(), comps);
  } catch (const Error& e) {
    bad(std::string("witt vector: ") + e.what());
  }
}

template <Kind K>
Json to_json(const Polynomial<K>& P) {
  Json out = Json::array();
  for (const auto& c : P.coeffs()) out.push_back(to_json(c));
  return out;
}

template <Kind K>
Polynomial<K> polynomial_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) bad("polynomial must be a nonempty array of coefficients");
  std::vector<Element<K>> coeffs;
  for (const auto& c : j) coeffs.push_back(element_from_json<K>(c));
  try {
    return Polynomial<K>(coeffs.front().config(), coeffs);
  } catch (const Error& e) {
    bad(std::string("polynomial: ") + e.what());
  }
}

template <Kind K>
std::string to_text(const Polynomial<K>& P) {
  std::string s;
  for (int i = 0; i <= P.degree(); ++i) {
    if (i) s += " + ";
    s += "[" + to_text(P[i]) + "]";
    if (i == 1) s += "*X";
    if (i > 1) s += "*X^" + std::to_string(i);
  }
  return s;
}

Json to_json(const NewtonPolygon& np) {
  Json out = Json::array();
  for (const auto& s : np.segments) out.push_back(Json{{"slope", to_string(s.slope)}, {"mult", s.multiplicity}});
  if (np.zero_roots) out.push_back(Json{{"slope", "inf"}, {"mult", np.zero_roots}});
  return out;
}

template <Kind K>
Json to_json(const TatePoly<K>& f) {
  const FieldConfig& cfg = f.config();
  Json terms = Json::array();
  for (const auto& [m, c] : f.terms()) {
    Json exps = Json::array();
    for (const auto& e : m) exps.push_back(to_string(e));
    terms.push_back(Json{{"exps", exps}, {"coeff", to_json(c)}});
  }
  const auto d = f.degree();
  return Json{{"kind", to_string(K)},
              {"p", cfg.p},
              {"prec", cfg.prec},
              {"dencap", cfg.dencap},
              {"nvars", f.nvars()},
              {"precexp", valexp_json(f.precexp())},
              {"degree", d ? Json(to_string(*d)) : Json(nullptr)},
              {"terms", terms}};
}

template <Kind K>
TatePoly<K> tate_from_json(const Json& j) {
  expect_keys(j, {"kind", "p", "prec", "dencap", "nvars", "precexp", "degree", "terms"}, "tate element");
  if (kind_from_json(j["kind"]) != K) bad(std::string("expected a ") + to_string(K) + " tate element");
  const FieldConfig cfg = config_from_json(j);
  const auto nvars = integer(j["nvars"], "nvars");
  if (nvars < 1 || nvars > 16) bad("nvars must be in 1..16");
  const ValExp precexp = valexp_from_json(j["precexp"], cfg.p);
  std::int64_t prec = 0;
  try {
    prec = precexp.to_index(cfg.dencap);
  } catch (const Error& e) {
    bad(std::string("tate element: ") + e.what());
  }
  if (prec > cfg.limit()) bad("tate element: precexp beyond prec");
  TatePoly<K> f(cfg, static_cast<int>(nvars), prec);
  if (!j["terms"].is_array()) bad("terms must be an array");
  std::optional<Monomial> last;
  for (const auto& t : j["terms"]) {
    expect_keys(t, {"exps", "coeff"}, "tate term");
    if (!t["exps"].is_array()) bad("exps must be an array");
    Monomial m;
    for (const auto& e : t["exps"]) m.push_back(rational_from_json(e));
    if (last && !GrlexLess{}(*last, m)) bad("tate terms must be sorted in increasing grlex order");
    last = m;
    const auto c = element_from_json<K>(t["coeff"]);
    if (!(c.config() == cfg)) bad("tate term coefficient has a different config");
    if (c.prec_index() != prec) bad("tate term coefficient must carry the element's precexp");
    if (c.is_zero()) bad("tate terms must have nonzero coefficients");
    try {
      f.add_term(m, c);
    } catch (const Error& e) {
      bad(std::string("tate term: ") + e.what());
    }
  }
  const auto d = f.degree();
  const Json want = d ? Json(to_string(*d)) : Json(nullptr);
  if (j["degree"] != want) bad("tate element: degree field does not match the terms");
  return f;
}

template <Kind K>
std::string to_text(const TatePoly<K>& f) {
  std::string s;
  for (const auto& [m, c] : f.terms()) {
    if (!s.empty()) s += " + ";
    s += "[" + to_text(c) + "]*" + to_string(m);
  }
  const std::string o = std::string("O(") + base<K>() + "^" + exponent_text(f.precexp().value()) + ")";
  return s.empty() ? o : s + " + " + o;
}

Json to_json(const Fan& fan) { return Json{{"rank", fan.rank}, {"cones", fan.input}}; }

Fan fan_from_json(const Json& j) {
  expect_keys(j, {"rank", "cones"}, "fan");
  const auto rank = integer(j["rank"], "rank");
  if (rank < 1 || rank > 8) bad("fan rank must be in 1..8");
  if (!j["cones"].is_array()) bad("cones must be an array");
  std::vector<std::vector<LatticeVec>> cones;
  for (const auto& c : j["cones"]) {
    if (!c.is_array()) bad("each cone must be an array of generators");
    std::vector<LatticeVec> gens;
    for (const auto& g : c) {
      if (!g.is_array() || static_cast<std::int64_t>(g.size()) != rank) bad("generator length must equal the rank");
      LatticeVec v;
      for (const auto& x : g) v.push_back(integer(x, "generator entry"));
      gens.push_back(v);
    }
    cones.push_back(gens);
  }
  return validate_fan(static_cast<int>(rank), cones);
}

Json to_json(const TWeilDivisor& d) {
  Json c = Json::array();
  for (const auto& a : d.coefficients) c.push_back(to_string(a));
  return Json{{"coefficients", c}};
}

TWeilDivisor divisor_from_json(const Json& j) {
  expect_keys(j, {"coefficients"}, "divisor");
  if (!j["coefficients"].is_array()) bad("coefficients must be an array");
  TWeilDivisor d;
  for (const auto& a : j["coefficients"]) d.coefficients.push_back(rational_from_json(a));
  return d;
}

Json to_json(const AdicPoint& x) {
  switch (x.type()) {
    case PointType::type1:
      return Json{{"type", "classical"}, {"center", to_json(x.center())}};
    case PointType::type23:
      if (x.q().numerator() == 0 && x.center() == UntiltElement(x.config())) return Json{{"type", "gauss"}};
      return Json{{"type", "disc"}, {"center", to_json(x.center())}, {"q", to_string(x.q())}};
    case PointType::type5:
      break;
  }
  return Json{{"type", "type5"}, {"center", to_json(x.center())}, {"q", to_string(x.q())}, {"side", side_json(x.sign())}};
}

AdicPoint point_from_json(const Json& j, const FieldConfig& cfg) {
  if (!j.is_object() || !j.contains("type")) bad("point: missing type");
  const auto& type = string(j["type"], "type");
  try {
    if (type == "gauss") {
      expect_keys(j, {"type"}, "gauss point");
      return AdicPoint::gauss(cfg);
    }
    if (type == "classical") {
      expect_keys(j, {"type", "center"}, "classical point");
      return AdicPoint::classical(element_from_json<Kind::untilt>(j["center"]));
    }
    if (type == "disc") {
      expect_keys(j, {"type", "center", "q"}, "disc point");
      auto x = AdicPoint::disc(element_from_json<Kind::untilt>(j["center"]), rational_from_json(j["q"]));
      if (to_json(x)["type"] != "disc") bad("the unit disc around 0 is written {\"type\":\"gauss\"}");
      return x;
    }
    if (type == "type5") {
      expect_keys(j, {"type", "center", "q", "side"}, "type 5 point");
      const auto& side = string(j["side"], "side");
      if (side != "<" && side != ">") bad("side must be \"<\" or \">\"");
      return AdicPoint::type5(element_from_json<Kind::untilt>(j["center"]), rational_from_json(j["q"]),
                              side == "<" ? Side::less : Side::greater);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::parse) throw;
    bad(std::string("point: ") + e.what());
  }
  bad("point type must be gauss, classical, disc or type5, got \"" + type + "\"");
}

Json to_json(const RationalSubset& U) {
  Json nums = Json::array();
  for (const auto& f : U.numerators) nums.push_back(to_json(f));
  return Json{{"numerators", nums}, {"denominator", to_json(U.denominator)}};
}

RationalSubset subset_from_json(const Json& j) {
  expect_keys(j, {"numerators", "denominator"}, "rational subset");
  if (!j["numerators"].is_array() || j["numerators"].empty()) bad("numerators must be a nonempty array");
  std::vector<UntiltPolynomial> nums;
  for (const auto& f : j["numerators"]) nums.push_back(polynomial_from_json<Kind::untilt>(f));
  RationalSubset U{nums, polynomial_from_json<Kind::untilt>(j["denominator"])};
  try {
    validate(U);
  } catch (const Error& e) {
    bad(std::string("rational subset: ") + e.what());
  }
  return U;
}

Json to_json(const Value& v) {
  return Json{{"exponent", v.infinite ? Json("inf") : Json(to_string(v.exponent))},
              {"k", v.k},
              {"side", side_json(v.sign)},
              {"exact", v.exact},
              {"text", v.to_string()}};
}

Json to_json(const ValBound& b) { return Json{{"value", to_string(b.value)}, {"exact", b.exact}}; }

Json to_json(const ContractReport& r) {
  Json pts = Json::array();
  for (const auto& pt : r.points)
    pts.push_back(Json{{"label", pt.label},
                       {"vf", to_json(pt.vf)},
                       {"vg", to_json(pt.vg)},
                       {"vdiff", to_json(pt.vdiff)},
                       {"equality", to_string(pt.equality)},
                       {"inequality", to_string(pt.inequality)}});
  return Json{{"overall", to_string(r.overall())}, {"points", pts}};
}

Json to_json(const ApproxResult& r) {
  Json steps = Json::array();
  for (const auto& s : r.steps) {
    Json used = Json::array();
    for (const auto& i : s.used_i) used.push_back(to_string(i));
    steps.push_back(Json{{"c", to_string(s.c)},
                         {"eps_c", to_string(s.eps_c)},
                         {"kappa", to_string(s.kappa)},
                         {"divisions", s.divisions},
                         {"used_i", used}});
  }
  return Json{{"g", to_json(r.g)}, {"step", to_string(r.step)}, {"steps", steps}};
}

std::string reprint(const std::string& text, const FieldConfig& point_cfg) {
  const Json j = parse_document(text);
  if (j.is_array()) {
    if (j.empty() || !j.front().is_object() || !j.front().contains("kind")) bad("polynomial: empty or untyped");
    if (kind_from_json(j.front()["kind"]) == Kind::untilt) return print(to_json(polynomial_from_json<Kind::untilt>(j)));
    return print(to_json(polynomial_from_json<Kind::tilt>(j)));
  }
  if (!j.is_object() || j.empty()) bad("unrecognized document");
  if (j.contains("kind") && j.contains("nvars")) {
    if (kind_from_json(j["kind"]) == Kind::untilt) return print(to_json(tate_from_json<Kind::untilt>(j)));
    return print(to_json(tate_from_json<Kind::tilt>(j)));
  }
  if (j.contains("kind")) return std::visit([](const auto& a) { return print(to_json(a)); }, any_element_from_json(j));
  if (j.contains("length")) return print(to_json(witt_from_json(j)));
  if (j.contains("rank")) return print(to_json(fan_from_json(j)));
  if (j.contains("coefficients")) return print(to_json(divisor_from_json(j)));
  if (j.contains("type")) return print(to_json(point_from_json(j, point_cfg)));
  if (j.contains("numerators")) return print(to_json(subset_from_json(j)));
  bad("unrecognized document");
}

template Json to_json(const Element<Kind::untilt>&);
template Json to_json(const Element<Kind::tilt>&);
template Element<Kind::untilt> element_from_json(const Json&);
template Element<Kind::tilt> element_from_json(const Json&);
template std::string to_text(const Element<Kind::untilt>&);
template std::string to_text(const Element<Kind::tilt>&);
template Element<Kind::untilt> element_from_text(const FieldConfig&, const std::string&);
template Element<Kind::tilt> element_from_text(const FieldConfig&, const std::string&);
template Json to_json(const Polynomial<Kind::untilt>&);
template Json to_json(const Polynomial<Kind::tilt>&);
template Polynomial<Kind::untilt> polynomial_from_json(const Json&);
template Polynomial<Kind::tilt> polynomial_from_json(const Json&);
template std::string to_text(const Polynomial<Kind::untilt>&);
template std::string to_text(const Polynomial<Kind::tilt>&);
template Json to_json(const TatePoly<Kind::untilt>&);
template Json to_json(const TatePoly<Kind::tilt>&);
template TatePoly<Kind::untilt> tate_from_json(const Json&);
template TatePoly<Kind::tilt> tate_from_json(const Json&);
template std::string to_text(const TatePoly<Kind::untilt>&);
template std::string to_text(const TatePoly<Kind::tilt>&);

}  // namespace perfectoid::io
