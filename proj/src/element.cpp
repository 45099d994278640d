#include "perfectoid/element.hpp"

#include <algorithm>

#include "perfectoid/error.hpp"
#include "convolution.hpp"

namespace perfectoid {

const char* to_string(Kind kind) noexcept { return kind == Kind::untilt ? "untilt" : "tilt"; }

namespace {

// Canonical digits of sum c[k] * base^(k/grid), truncated at c.size().
template <Kind K>
std::vector<std::uint8_t> normalize(std::vector<std::int64_t>& c, int p, std::int64_t grid) {
  const auto n = static_cast<std::int64_t>(c.size());
  std::vector<std::uint8_t> out(c.size());
  for (std::int64_t k = 0; k < n; ++k) {
    std::int64_t v = c[k];
    if constexpr (K == Kind::untilt) {
      std::int64_t q = floor_div(v, p);
      v -= q * p;
      if (q != 0 && k + grid < n) c[k + grid] += q;
    } else {
      v = floor_mod(v, p);
    }
    out[k] = static_cast<std::uint8_t>(v);
  }
  return out;
}

int inverse_mod_p(int d, int p) {
  for (int x = 1; x < p; ++x)
    if ((d * x) % p == 1) return x;
  fail(ErrorKind::invalid_argument, "digit has no inverse mod p");
}

}  // namespace

template <Kind K>
Element<K>::Element(const FieldConfig& cfg) : cfg_(cfg), digits_(cfg.limit(), 0) {}

template <Kind K>
Element<K> Element<K>::zero(const FieldConfig& cfg, std::int64_t prec_index) {
  Element e(cfg);
  e.digits_.assign(std::clamp<std::int64_t>(prec_index, 0, cfg.limit()), 0);
  return e;
}

template <Kind K>
Element<K> Element<K>::from_int(const FieldConfig& cfg, std::int64_t value) {
  std::vector<std::int64_t> c(cfg.limit(), 0);
  c[0] = value;
  return from_coefficients(cfg, std::move(c));
}

template <Kind K>
Element<K> Element<K>::monomial(const FieldConfig& cfg, int digit, const ValExp& exponent) {
  if (digit < 0 || digit >= cfg.p) fail(ErrorKind::invalid_argument, "digit out of range");
  Element e(cfg);
  std::int64_t idx = exponent.to_index(cfg.dencap);
  if (idx < cfg.limit()) e.digits_[idx] = static_cast<std::uint8_t>(digit);
  return e;
}

template <Kind K>
Element<K> Element<K>::from_terms(const FieldConfig& cfg, const std::vector<Term>& terms,
                                  const ValExp& precexp) {
  std::int64_t prec = precexp.to_index(cfg.dencap);
  if (prec > cfg.limit() || prec < 0)
    fail(ErrorKind::invalid_argument, "precexp " + precexp.to_string() + " exceeds prec " + std::to_string(cfg.prec));
  Element e = zero(cfg, prec);
  for (const Term& t : terms) {
    if (t.digit < 1 || t.digit >= cfg.p)
      fail(ErrorKind::invalid_argument, "digit " + std::to_string(t.digit) + " not in {1..p-1}");
    std::int64_t idx = t.exponent.to_index(cfg.dencap);
    if (idx >= prec)
      fail(ErrorKind::invalid_argument, "term exponent " + t.exponent.to_string() + " not below precexp");
    if (e.digits_[idx] != 0) fail(ErrorKind::invalid_argument, "duplicate exponent " + t.exponent.to_string());
    e.digits_[idx] = static_cast<std::uint8_t>(t.digit);
  }
  return e;
}

template <Kind K>
Element<K> Element<K>::from_digits(const FieldConfig& cfg, std::vector<std::uint8_t> digits) {
  if (static_cast<std::int64_t>(digits.size()) > cfg.limit()) digits.resize(cfg.limit());
  for (auto d : digits)
    if (d >= cfg.p) fail(ErrorKind::invalid_argument, "digit out of range");
  Element e(cfg);
  e.digits_ = std::move(digits);
  return e;
}

template <Kind K>
Element<K> Element<K>::from_coefficients(const FieldConfig& cfg, std::vector<std::int64_t> coeffs) {
  if (static_cast<std::int64_t>(coeffs.size()) > cfg.limit()) coeffs.resize(cfg.limit());
  Element e(cfg);
  e.digits_ = normalize<K>(coeffs, cfg.p, cfg.grid());
  return e;
}

template <Kind K>
ValExp Element<K>::precexp() const {
  return ValExp::from_index(cfg_.p, prec_index(), cfg_.dencap);
}

template <Kind K>
int Element<K>::digit_at(std::int64_t index) const noexcept {
  if (index < 0 || index >= prec_index()) return 0;
  return digits_[index];
}

template <Kind K>
std::vector<Term> Element<K>::terms() const {
  std::vector<Term> out;
  for (std::int64_t i = 0; i < prec_index(); ++i)
    if (digits_[i] != 0) out.push_back({ValExp::from_index(cfg_.p, i, cfg_.dencap), digits_[i]});
  return out;
}

template <Kind K>
std::optional<std::int64_t> Element<K>::valuation_index() const noexcept {
  for (std::int64_t i = 0; i < prec_index(); ++i)
    if (digits_[i] != 0) return i;
  return std::nullopt;
}

template <Kind K>
std::optional<ValExp> Element<K>::valuation() const {
  auto v = valuation_index();
  if (!v) return std::nullopt;
  return ValExp::from_index(cfg_.p, *v, cfg_.dencap);
}

template <Kind K>
std::int64_t Element<K>::valuation_bound() const noexcept {
  return valuation_index().value_or(prec_index());
}

template <Kind K>
Element<K> Element<K>::truncated(std::int64_t prec_index) const {
  Element e = *this;
  if (prec_index < this->prec_index()) e.digits_.resize(std::max<std::int64_t>(prec_index, 0));
  return e;
}

template <Kind K>
Element<K> Element<K>::extended(std::int64_t prec_index) const {
  Element e = *this;
  prec_index = std::min(prec_index, cfg_.limit());
  if (prec_index > this->prec_index()) e.digits_.resize(prec_index, 0);
  return e;
}

template <Kind K>
Element<K> Element<K>::operator-() const {
  std::vector<std::int64_t> c(digits_.begin(), digits_.end());
  for (auto& v : c) v = -v;
  Element e(cfg_);
  e.digits_ = normalize<K>(c, cfg_.p, cfg_.grid());
  return e;
}

template <Kind K>
Element<K>& Element<K>::operator+=(const Element& rhs) {
  require_same(cfg_, rhs.cfg_);
  std::int64_t n = std::min(prec_index(), rhs.prec_index());
  std::vector<std::int64_t> c(n);
  for (std::int64_t i = 0; i < n; ++i) c[i] = std::int64_t{digits_[i]} + rhs.digits_[i];
  digits_ = normalize<K>(c, cfg_.p, cfg_.grid());
  return *this;
}

template <Kind K>
Element<K>& Element<K>::operator-=(const Element& rhs) {
  require_same(cfg_, rhs.cfg_);
  std::int64_t n = std::min(prec_index(), rhs.prec_index());
  std::vector<std::int64_t> c(n);
  for (std::int64_t i = 0; i < n; ++i) c[i] = std::int64_t{digits_[i]} - rhs.digits_[i];
  digits_ = normalize<K>(c, cfg_.p, cfg_.grid());
  return *this;
}

template <Kind K>
Element<K>& Element<K>::operator*=(const Element& rhs) {
  require_same(cfg_, rhs.cfg_);
  const std::int64_t va = valuation_bound(), vb = rhs.valuation_bound();
  const std::int64_t n = std::min({prec_index() + vb, rhs.prec_index() + va, cfg_.limit()});
  std::vector<std::int64_t> c = detail::convolve(digits_, rhs.digits_, n);
  digits_ = normalize<K>(c, cfg_.p, cfg_.grid());
  return *this;
}

template <Kind K>
Element<K> Element<K>::pow(std::uint64_t e) const {
  Element result = from_int(cfg_, 1).truncated(cfg_.limit());
  Element base = *this;
  bool first = true;
  while (e > 0) {
    if (e & 1) {
      result = first ? base : result * base;
      first = false;
    }
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

template <Kind K>
Element<K> Element<K>::shifted_up(std::int64_t index) const {
  if (index < 0) return shifted_down(-index);
  Element e = zero(cfg_, std::min(prec_index() + index, cfg_.limit()));
  for (std::int64_t i = 0; i + index < e.prec_index(); ++i) e.digits_[i + index] = digits_[i];
  return e;
}

template <Kind K>
Element<K> Element<K>::shifted_down(std::int64_t index) const {
  if (index < 0) return shifted_up(-index);
  if (valuation_bound() < index)
    fail(ErrorKind::precondition, "exact division by a power of the uniformizer needs larger valuation");
  Element e = zero(cfg_, prec_index() - index);
  for (std::int64_t i = index; i < prec_index(); ++i) e.digits_[i - index] = digits_[i];
  return e;
}

template <Kind K>
Element<K> Element<K>::inverse() const {
  if (!is_unit()) fail(ErrorKind::precondition, "inverse of a non-unit");
  const std::int64_t n = prec_index();
  Element x = from_int(cfg_, inverse_mod_p(digits_[0], cfg_.p)).truncated(n);
  const Element two = from_int(cfg_, 2).truncated(n);
  for (int iter = 0; iter < 80; ++iter) {
    Element next = (x * (two - *this * x)).truncated(n);
    if (next == x) return x;
    x = next;
  }
  fail(ErrorKind::budget_exhausted, "inverse iteration did not stabilize");
}

template <Kind K>
Element<K> Element<K>::divided_by(const Element& b) const {
  require_same(cfg_, b.cfg_);
  auto w = b.valuation_index();
  if (!w) fail(ErrorKind::indeterminate, "division by an element that is zero at working precision");
  if (valuation_bound() < *w) fail(ErrorKind::precondition, "quotient is not integral");
  return shifted_down(*w) * b.shifted_down(*w).inverse();
}

template <Kind K>
Element<K> Element<K>::recast(const FieldConfig& target) const {
  if (target.p != cfg_.p) fail(ErrorKind::config_mismatch, "recast across different p");
  if (target.dencap >= cfg_.dencap) {
    const std::int64_t scale = ipow(cfg_.p, target.dencap - cfg_.dencap);
    Element e = zero(target, std::min(prec_index() * scale, target.limit()));
    for (std::int64_t i = 0; i < prec_index() && i * scale < e.prec_index(); ++i) e.digits_[i * scale] = digits_[i];
    return e;
  }
  const std::int64_t scale = ipow(cfg_.p, cfg_.dencap - target.dencap);
  Element e = zero(target, std::min(prec_index() / scale, target.limit()));
  for (std::int64_t i = 0; i < prec_index(); ++i) {
    if (!digits_[i]) continue;
    if (i % scale != 0) {
      if (i / scale >= e.prec_index()) break;
      fail(ErrorKind::dencap_overflow, "digit at exponent " + ValExp::from_index(cfg_.p, i, cfg_.dencap).to_string() +
                                           " is off the grid of " + target.describe());
    }
    if (i / scale < e.prec_index()) e.digits_[i / scale] = digits_[i];
  }
  return e;
}

template <Kind K>
Element<K> Element<K>::frobenius() const
  requires(K == Kind::tilt)
{
  const int p = cfg_.p;
  Element e = zero(cfg_, std::min(prec_index() * p, cfg_.limit()));
  for (std::int64_t i = 0; i < prec_index() && i * p < e.prec_index(); ++i) e.digits_[i * p] = digits_[i];
  return e;
}

template <Kind K>
Element<K> Element<K>::pth_root() const
  requires(K == Kind::tilt)
{
  const int p = cfg_.p;
  Element e = zero(cfg_, prec_index() / p);
  for (std::int64_t i = 0; i < prec_index(); ++i) {
    if (!digits_[i]) continue;
    if (i % p != 0)
      fail(ErrorKind::dencap_overflow, "p-th root of t^" + ValExp::from_index(p, i, cfg_.dencap).to_string() +
                                           " needs denominator beyond dencap " + std::to_string(cfg_.dencap));
    if (i / p < e.prec_index()) e.digits_[i / p] = digits_[i];
  }
  return e;
}

template <Kind K>
bool Element<K>::congruent(const Element& other, std::int64_t index) const {
  require_same(cfg_, other.cfg_);
  if (index > prec_index() || index > other.prec_index())
    fail(ErrorKind::insufficient_precision, "congruence beyond known precision");
  return std::equal(digits_.begin(), digits_.begin() + index, other.digits_.begin());
}

template class Element<Kind::untilt>;
template class Element<Kind::tilt>;

TiltElement reduce_mod_uniformizer(const UntiltElement& a) {
  const auto n = std::min(a.prec_index(), a.config().grid());
  auto d = a.digits();
  return TiltElement::from_digits(a.config(), std::vector<std::uint8_t>(d.begin(), d.begin() + n));
}

UntiltElement lift_mod_uniformizer(const TiltElement& a) {
  const auto n = std::min(a.prec_index(), a.config().grid());
  auto d = a.digits();
  return UntiltElement::from_digits(a.config(), std::vector<std::uint8_t>(d.begin(), d.begin() + n));
}

TiltElement tilt_window(const UntiltElement& a, const Rational& lo) {
  const FieldConfig& cfg = a.config();
  const Rational g(cfg.grid());
  const std::int64_t first = ceil(lo * g).numerator();
  const std::int64_t last = std::min(ceil((lo + 1) * g).numerator(), a.prec_index());
  std::vector<std::uint8_t> d(cfg.limit(), 0);
  for (std::int64_t i = std::max<std::int64_t>(first, 0); i < last; ++i) d[i] = a.digits()[i];
  return TiltElement::from_digits(cfg, std::move(d));
}

UntiltElement pth_root_mod(const UntiltElement& a, const ValExp& k) {
  const FieldConfig& cfg = a.config();
  if (k.value() <= 0 || k.value() > 1) fail(ErrorKind::precondition, "pth_root_mod needs 0 < k <= 1");
  const std::int64_t kidx = k.to_index(cfg.dencap);
  if (a.prec_index() < kidx) fail(ErrorKind::insufficient_precision, "input not known modulo p^k");
  TiltElement r = reduce_mod_uniformizer(a).truncated(kidx).pth_root();
  return lift_mod_uniformizer(r).truncated(kidx / cfg.p);
}

}  // namespace perfectoid
