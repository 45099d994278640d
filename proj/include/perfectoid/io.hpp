#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "perfectoid/adicdisc.hpp"
#include "perfectoid/polyroots.hpp"
#include "perfectoid/tatealg.hpp"
#include "perfectoid/tiltkit.hpp"
#include "perfectoid/toric.hpp"

namespace perfectoid::io {

using Json = nlohmann::ordered_json;

// Parsers accept only canonical data (normalized exponents, sorted terms,
// keys in print order), so print(parse(s)) == s whenever s was laid out by
// print. Violations raise Error(parse).
std::string print(const Json& j);  // two-space indent, trailing newline
Json parse_document(const std::string& text);

template <Kind K>
Json to_json(const Element<K>& a);
template <Kind K>
Element<K> element_from_json(const Json& j);
using AnyElement = std::variant<UntiltElement, TiltElement>;
AnyElement any_element_from_json(const Json& j);

// "2*p^(1/3) + 1*p^(4/3) + O(p^8)"; t instead of p for the tilt.
template <Kind K>
std::string to_text(const Element<K>& a);
template <Kind K>
Element<K> element_from_text(const FieldConfig& cfg, const std::string& s);

Json to_json(const WittVector& w);
WittVector witt_from_json(const Json& j);

// Array of coefficient elements, index = degree.
template <Kind K>
Json to_json(const Polynomial<K>& P);
template <Kind K>
Polynomial<K> polynomial_from_json(const Json& j);
template <Kind K>
std::string to_text(const Polynomial<K>& P);

Json to_json(const NewtonPolygon& np);

template <Kind K>
Json to_json(const TatePoly<K>& f);
template <Kind K>
TatePoly<K> tate_from_json(const Json& j);
template <Kind K>
std::string to_text(const TatePoly<K>& f);

Json to_json(const Fan& fan);  // the cones as given
Fan fan_from_json(const Json& j);
Json to_json(const TWeilDivisor& d);
TWeilDivisor divisor_from_json(const Json& j);

// {"type":"gauss"} needs the caller's config; other points carry a center.
Json to_json(const AdicPoint& x);
AdicPoint point_from_json(const Json& j, const FieldConfig& cfg);
Json to_json(const RationalSubset& U);
RationalSubset subset_from_json(const Json& j);
Json to_json(const Value& v);

Json to_json(const ValBound& b);
Json to_json(const ContractReport& r);
Json to_json(const ApproxResult& r);

Json rational_json(const Rational& r);  // "1/2"
Rational rational_from_json(const Json& j);

// Dispatch on the shape of a fixture document and re-print it.
std::string reprint(const std::string& text, const FieldConfig& point_cfg);

}  // namespace perfectoid::io
