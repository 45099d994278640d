#include "perfectoid/tatealg.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

#include "perfectoid/error.hpp"
#include "perfectoid/tiltkit.hpp"

namespace perfectoid {

Rational total_degree(const Monomial& m) {
  Rational s(0);
  for (const auto& e : m) s += e;
  return s;
}

bool divides(const Monomial& a, const Monomial& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t j = 0; j < a.size(); ++j)
    if (a[j] > b[j]) return false;
  return true;
}

std::string to_string(const Monomial& m) {
  std::string s;
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (m[j].numerator() == 0) continue;
    if (!s.empty()) s += "*";
    s += "T" + std::to_string(j);
    if (m[j] != Rational(1)) s += "^(" + to_string(m[j]) + ")";
  }
  return s.empty() ? "1" : s;
}

namespace {

// Sum of exponents as num / den without gcd work; denominators of a monomial
// are powers of one prime, so the largest is a common multiple.
std::pair<std::int64_t, std::int64_t> degree_fraction(const Monomial& m) {
  std::int64_t den = 1;
  for (const auto& e : m) den = std::max<std::int64_t>(den, e.denominator());
  std::int64_t num = 0;
  for (const auto& e : m) num += e.numerator() * (den / e.denominator());
  return {num, den};
}

}  // namespace

bool GrlexLess::operator()(const Monomial& a, const Monomial& b) const {
  const auto [na, da] = degree_fraction(a);
  const auto [nb, db] = degree_fraction(b);
  const __int128 x = static_cast<__int128>(na) * db, y = static_cast<__int128>(nb) * da;
  if (x != y) return x < y;
  for (std::size_t j = 0; j < a.size() && j < b.size(); ++j) {
    if (a[j].numerator() * b[j].denominator() != b[j].numerator() * a[j].denominator())
      return a[j] < b[j];
  }
  return a.size() < b.size();
}

namespace {

void check_monomial(const Monomial& m, int nvars, int p) {
  if (static_cast<int>(m.size()) != nvars)
    fail(ErrorKind::invalid_argument, "monomial has " + std::to_string(m.size()) + " exponents, expected " +
                                          std::to_string(nvars));
  for (const auto& e : m) {
    if (e < 0) fail(ErrorKind::invalid_argument, "negative exponent in monomial");
    if (!in_zp_inverse(e, p))
      fail(ErrorKind::invalid_argument, "exponent " + to_string(e) + " is not in Z[1/" + std::to_string(p) + "]");
  }
}

Monomial scale_monomial(const Monomial& m, const Rational& s) {
  Monomial out = m;
  for (auto& e : out) e *= s;
  return out;
}

}  // namespace

template <Kind K>
TatePoly<K>::TatePoly(const FieldConfig& cfg, int nvars) : TatePoly(cfg, nvars, cfg.limit()) {}

template <Kind K>
TatePoly<K>::TatePoly(const FieldConfig& cfg, int nvars, std::int64_t prec_index)
    : cfg_(cfg), nvars_(nvars), prec_(std::clamp<std::int64_t>(prec_index, 0, cfg.limit())) {
  if (nvars < 1) fail(ErrorKind::invalid_argument, "need at least one variable");
}

template <Kind K>
TatePoly<K> TatePoly<K>::variable(const FieldConfig& cfg, int nvars, int j) {
  Monomial m(nvars, Rational(0));
  m.at(j) = 1;
  return term(cfg, nvars, m, Coeff::from_int(cfg, 1));
}

template <Kind K>
TatePoly<K> TatePoly<K>::constant(const FieldConfig& cfg, int nvars, const Coeff& c) {
  return term(cfg, nvars, Monomial(nvars, Rational(0)), c);
}

template <Kind K>
TatePoly<K> TatePoly<K>::term(const FieldConfig& cfg, int nvars, const Monomial& m, const Coeff& c) {
  TatePoly t(cfg, nvars);
  t.add_term(m, c);
  return t;
}

template <Kind K>
std::int64_t TatePoly<K>::gauss_valuation_bound() const noexcept {
  std::int64_t v = prec_;
  for (const auto& [m, c] : terms_) v = std::min(v, c.valuation_bound());
  return v;
}

template <Kind K>
std::optional<Rational> TatePoly<K>::degree() const {
  std::optional<Rational> d;
  for (const auto& [m, c] : terms_) {
    const Rational e = total_degree(m);
    if (d && *d != e) return std::nullopt;
    d = e;
  }
  return d ? d : Rational(0);
}

template <Kind K>
void TatePoly<K>::add_term(const Monomial& m, const Coeff& c) {
  check_monomial(m, nvars_, cfg_.p);
  require_same(cfg_, c.config());
  if (c.prec_index() < prec_) *this = truncated(c.prec_index());
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    Coeff v = c.truncated(prec_);
    if (!v.is_zero()) terms_.emplace(m, std::move(v));
    return;
  }
  it->second = (it->second + c).truncated(prec_);
  if (it->second.is_zero()) terms_.erase(it);
}

template <Kind K>
TatePoly<K> TatePoly<K>::truncated(std::int64_t prec_index) const {
  TatePoly out(cfg_, nvars_, std::min(prec_, prec_index));
  for (const auto& [m, c] : terms_) {
    Coeff v = c.truncated(out.prec_);
    if (!v.is_zero()) out.terms_.emplace(m, std::move(v));
  }
  return out;
}

template <Kind K>
TatePoly<K> TatePoly<K>::extended(std::int64_t prec_index) const {
  TatePoly out(cfg_, nvars_, std::max(prec_, std::min(prec_index, cfg_.limit())));
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, c.extended(out.prec_));
  return out;
}

template <Kind K>
TatePoly<K> TatePoly<K>::shifted_up(std::int64_t index) const {
  TatePoly out(cfg_, nvars_, std::min(prec_ + index, cfg_.limit()));
  for (const auto& [m, c] : terms_) {
    Coeff v = c.shifted_up(index).truncated(out.prec_);
    if (!v.is_zero()) out.terms_.emplace(m, std::move(v));
  }
  return out;
}

template <Kind K>
TatePoly<K> TatePoly<K>::shifted_down(std::int64_t index) const {
  if (gauss_valuation_bound() < index) fail(ErrorKind::precondition, "Tate element not divisible as requested");
  TatePoly out(cfg_, nvars_, prec_ - index);
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, c.shifted_down(index));
  return out;
}

template <Kind K>
TatePoly<K> TatePoly<K>::recast(const FieldConfig& target) const {
  TatePoly out(target, nvars_, 0);
  std::int64_t prec = target.limit();
  std::vector<std::pair<Monomial, Coeff>> moved;
  for (const auto& [m, c] : terms_) moved.emplace_back(m, c.recast(target));
  prec = std::min(prec, Coeff::zero(cfg_, prec_).recast(target).prec_index());
  out.prec_ = prec;
  for (auto& [m, c] : moved) {
    Coeff v = c.truncated(prec);
    if (!v.is_zero()) out.terms_.emplace(m, std::move(v));
  }
  return out;
}

template <Kind K>
TatePoly<K> TatePoly<K>::operator-() const {
  TatePoly out(cfg_, nvars_, prec_);
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
  return out;
}

template <Kind K>
TatePoly<K>& TatePoly<K>::operator+=(const TatePoly& rhs) {
  require_same(cfg_, rhs.cfg_);
  if (nvars_ != rhs.nvars_) fail(ErrorKind::invalid_argument, "variable count mismatch");
  if (rhs.prec_ < prec_) *this = truncated(rhs.prec_);
  for (const auto& [m, c] : rhs.terms_) add_term(m, c.truncated(prec_));
  return *this;
}

template <Kind K>
TatePoly<K>& TatePoly<K>::operator-=(const TatePoly& rhs) {
  return *this += -rhs;
}

template <Kind K>
TatePoly<K> TatePoly<K>::times(const TatePoly& rhs) const {
  require_same(cfg_, rhs.cfg_);
  if (nvars_ != rhs.nvars_) fail(ErrorKind::invalid_argument, "variable count mismatch");
  const std::int64_t prec = std::min({prec_ + rhs.gauss_valuation_bound(), rhs.prec_ + gauss_valuation_bound(),
                                      cfg_.limit()});
  TatePoly out(cfg_, nvars_, prec);
  using Entry = std::tuple<std::int64_t, const Monomial*, const Coeff*>;
  auto sorted = [](const Terms& t) {
    std::vector<Entry> v;
    for (const auto& [m, c] : t) v.emplace_back(c.valuation_bound(), &m, &c);
    std::stable_sort(v.begin(), v.end(), [](const Entry& x, const Entry& y) { return std::get<0>(x) < std::get<0>(y); });
    return v;
  };
  const auto lhs_terms = sorted(terms_), rhs_terms = sorted(rhs.terms_);
  for (const auto& [va, pa, pca] : lhs_terms)
    for (const auto& [vb, pb, pcb] : rhs_terms) {
      if (va + vb >= prec) break;
      const Monomial &ma = *pa, &mb = *pb;
      Monomial m(nvars_);
      for (int j = 0; j < nvars_; ++j) m[j] = ma[j] + mb[j];
      Coeff v = (*pca * *pcb).truncated(prec);
      auto it = out.terms_.find(m);
      if (it == out.terms_.end())
        out.terms_.emplace(std::move(m), std::move(v));
      else
        it->second += v;
    }
  for (auto it = out.terms_.begin(); it != out.terms_.end();) {
    if (it->second.is_zero())
      it = out.terms_.erase(it);
    else
      ++it;
  }
  return out;
}

template <Kind K>
TatePoly<K> TatePoly<K>::scaled(const Coeff& c) const {
  return times(constant(cfg_, nvars_, c));
}

template <Kind K>
TatePoly<K> TatePoly<K>::pow(std::uint64_t e) const {
  TatePoly result = constant(cfg_, nvars_, Coeff::from_int(cfg_, 1));
  TatePoly base = *this;
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
TatePoly<K> TatePoly<K>::pth_root() const
  requires(K == Kind::tilt)
{
  TatePoly out(cfg_, nvars_, prec_ / cfg_.p);
  for (const auto& [m, c] : terms_) {
    Coeff r = c.pth_root().truncated(out.prec_);
    if (!r.is_zero()) out.terms_.emplace(scale_monomial(m, Rational(1, cfg_.p)), std::move(r));
  }
  return out;
}

namespace {

// Powers x_j^(n/den) of exact coordinates for every exponent a set of
// monomials needs; p-th roots of exact elements are exact.
class PowerTable {
 public:
  template <class Terms>
  PowerTable(const Terms& terms, const std::vector<TiltElement>& x) : x_(x) {
    for (const auto& [m, c] : terms)
      for (const auto& e : m) den_ = std::max<std::int64_t>(den_, e.denominator());
    const FieldConfig& cfg = x.front().config();
    for (const auto& z : x) {
      TiltElement r = z;
      for (std::int64_t d = den_; d > 1; d /= cfg.p) r = r.pth_root().extended(cfg.limit());
      table_.push_back({TiltElement::from_int(cfg, 1)});
      roots_.push_back(std::move(r));
    }
  }

  TiltElement monomial(const Monomial& m) {
    TiltElement v = TiltElement::from_int(x_.front().config(), 1);
    for (std::size_t j = 0; j < m.size(); ++j) {
      const std::int64_t n = m[j].numerator() * (den_ / m[j].denominator());
      if (n == 0) continue;
      if (x_[j].is_zero()) return TiltElement(x_.front().config());
      auto& t = table_[j];
      while (static_cast<std::int64_t>(t.size()) <= n) t.push_back(t.back() * roots_[j]);
      v = v * t[n];
    }
    return v;
  }

 private:
  const std::vector<TiltElement>& x_;
  std::int64_t den_ = 1;
  std::vector<TiltElement> roots_;
  std::vector<std::vector<TiltElement>> table_;
};

}  // namespace

template <Kind K>
typename TatePoly<K>::Coeff TatePoly<K>::eval(const std::vector<Coeff>& x) const
  requires(K == Kind::tilt)
{
  if (static_cast<int>(x.size()) != nvars_) fail(ErrorKind::invalid_argument, "point has wrong dimension");
  Coeff acc = Coeff::zero(cfg_, prec_);
  PowerTable table(terms_, x);
  for (const auto& [m, c] : terms_) {
    TiltElement v = table.monomial(m);
    if (!v.is_zero()) acc += c * v;
  }
  return acc.truncated(prec_);
}

template class TatePoly<Kind::untilt>;
template class TatePoly<Kind::tilt>;

TiltTate reduce_coefficients(const UntiltTate& f) {
  TiltTate g(f.config(), f.nvars());
  for (const auto& [m, c] : f.terms()) g.add_term(m, reduce_mod_uniformizer(c).extended(f.config().limit()));
  return g;
}

// ---------------------------------------------------------------------------
// Multiplicative sharp of a Tate element.

namespace {

constexpr std::int64_t kWorkBudget = std::int64_t{1} << 14;
constexpr std::size_t kTermBudget = 40000;

// Moves an element of a finer working grid onto cfg. `cap` shrinks to the
// first digit that has no place on cfg's grid.
UntiltElement onto_grid(const UntiltElement& z, const FieldConfig& cfg, std::int64_t& cap, bool& clipped) {
  const FieldConfig& w = z.config();
  const std::int64_t ratio = w.dencap >= cfg.dencap ? ipow(cfg.p, w.dencap - cfg.dencap) : 1;
  const std::int64_t up = w.dencap >= cfg.dencap ? 1 : ipow(cfg.p, cfg.dencap - w.dencap);
  std::vector<std::uint8_t> out(cap, 0);
  for (std::int64_t j = 0; j < z.prec_index(); ++j) {
    if (!z.digits()[j]) continue;
    if (j % ratio != 0) {
      if (j / ratio < cap) {
        cap = j / ratio;
        clipped = true;
      }
      break;
    }
    const std::int64_t c = j / ratio * up;
    if (c >= cap) break;
    out[c] = z.digits()[j];
  }
  out.resize(cap);
  return UntiltElement::from_digits(cfg, std::move(out));
}

// z^p modulo base^(prec/grid), expanded over multisets of terms. A multiset
// with more than one distinct term carries a multinomial coefficient of
// valuation exactly 1, which prunes most mixed products.
UntiltTate pth_power(const UntiltTate& z, std::int64_t prec) {
  const FieldConfig& w = z.config();
  const int p = w.p, nv = z.nvars();
  prec = std::min(prec, w.limit());

  std::int64_t den = 1;
  for (const auto& [m, c] : z.terms())
    for (const auto& e : m) den = std::max<std::int64_t>(den, e.denominator());
  struct Item {
    std::vector<std::int64_t> exps;
    UntiltElement coeff;
    std::int64_t val;
  };
  std::vector<Item> items;
  for (const auto& [m, c] : z.terms()) {
    std::vector<std::int64_t> ex(nv);
    for (int j = 0; j < nv; ++j) ex[j] = (m[j] * den).numerator();
    items.push_back({std::move(ex), c.truncated(prec), c.valuation_bound()});
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.val < b.val; });

  std::int64_t factorial = 1;
  for (int k = 2; k <= p; ++k) factorial *= k;

  std::map<std::vector<std::int64_t>, UntiltElement> acc;
  std::vector<int> chosen;
  std::vector<std::int64_t> ex(nv, 0);

  auto leaf = [&](const UntiltElement& prod) {
    std::int64_t coef = factorial;
    for (std::size_t a = 0; a < chosen.size();) {
      std::size_t b = a;
      std::int64_t run = 1;
      while (b < chosen.size() && chosen[b] == chosen[a]) run *= static_cast<std::int64_t>(++b - a);
      coef /= run;
      a = b;
    }
    UntiltElement v = coef == 1 ? prod : (UntiltElement::from_int(w, coef) * prod).truncated(prec);
    if (v.is_zero()) return;
    auto it = acc.find(ex);
    if (it == acc.end())
      acc.emplace(ex, std::move(v));
    else
      it->second = (it->second + v).truncated(prec);
  };

  auto rec = [&](auto&& self, std::size_t start, int depth, const UntiltElement* prod, std::int64_t val) -> void {
    if (depth == p) {
      leaf(*prod);
      return;
    }
    for (std::size_t j = start; j < items.size(); ++j) {
      const bool mixed = depth > 0 && static_cast<int>(j) != chosen.front();
      const std::int64_t bound = val + (p - depth) * items[j].val + (mixed ? w.grid() : 0);
      if (bound >= prec) {
        if (mixed || depth == 0) break;
        continue;
      }
      UntiltElement next = prod ? (*prod * items[j].coeff).truncated(prec) : items[j].coeff;
      if (next.is_zero() && depth + 1 < p) continue;
      chosen.push_back(static_cast<int>(j));
      for (int t = 0; t < nv; ++t) ex[t] += items[j].exps[t];
      self(self, j, depth + 1, &next, val + items[j].val);
      for (int t = 0; t < nv; ++t) ex[t] -= items[j].exps[t];
      chosen.pop_back();
    }
  };
  rec(rec, 0, 0, nullptr, 0);

  UntiltTate out(w, nv, prec);
  for (auto& [e, c] : acc) {
    if (c.is_zero()) continue;
    Monomial m(nv);
    for (int j = 0; j < nv; ++j) m[j] = Rational(e[j], den);
    out.add_term(m, c.extended(prec));
  }
  return out;
}

UntiltTate sharp_tate(const TiltTate& g, const Rational& target, bool strict) {
  const FieldConfig& cfg = g.config();
  const int p = cfg.p, m = cfg.dencap, nv = g.nvars();
  const std::int64_t grid = cfg.grid();
  const std::int64_t tidx = std::min(ceil(target * Rational(grid)).numerator(), cfg.limit());
  if (strict && g.prec_index() < tidx)
    fail(ErrorKind::insufficient_precision, "sharp of a Tate element to p^" + to_string(target) +
                                                " needs it modulo t^" + to_string(target));
  const std::int64_t v = g.gauss_valuation_bound();
  if (g.is_zero() || v >= tidx) return UntiltTate(cfg, nv, tidx);

  const TiltTate h = g.shifted_down(v);
  const std::int64_t want = tidx - v;
  const int stages = static_cast<int>(ceil(Rational(want, grid)).numerator());

  UntiltTate best(cfg, nv, 0);
  for (int i = 0; i < stages; ++i) {
    std::int64_t span = grid;
    for (int k = 0; k < i && span < cfg.limit(); ++k) span *= p;
    int min_vp = std::numeric_limits<int>::max();
    for (const auto& [mon, c] : h.terms())
      for (std::int64_t idx = 1; idx < std::min(span, c.prec_index()); ++idx)
        if (c.digits()[idx]) min_vp = std::min(min_vp, vp(idx, p));
    const int level = min_vp == std::numeric_limits<int>::max() ? 0 : std::max(0, m + i - min_vp);
    if (level > 30 || ipow(p, level) > kWorkBudget / (i + 1)) {
      if (strict) fail(ErrorKind::budget_exhausted, "sharp of a Tate element needs working grid p^" + std::to_string(level));
      break;
    }
    const FieldConfig work(p, i + 1, level);
    const int shift = level - m - i;

    UntiltTate F(work, nv);
    const Rational root_scale(1, ipow(p, i));
    for (const auto& [mon, c] : h.terms()) {
      std::vector<std::uint8_t> yd(work.limit(), 0);
      bool any = false;
      for (std::int64_t idx = 0; idx < std::min(span, c.prec_index()); ++idx) {
        if (!c.digits()[idx]) continue;
        yd[shift >= 0 ? idx * ipow(p, shift) : idx / ipow(p, -shift)] = c.digits()[idx];
        any = true;
      }
      if (any) F.add_term(scale_monomial(mon, root_scale), UntiltElement::from_digits(work, std::move(yd)));
    }
    UntiltTate z = F;
    bool over = false;
    // F^(p^k) only matters modulo p^(k+1).
    for (int k = 0; k < i && !over; ++k) {
      z = pth_power(z, (k + 2) * work.grid());
      over = z.size() > kTermBudget;
    }
    if (over) {
      if (strict) fail(ErrorKind::budget_exhausted, "sharp of a Tate element exceeds the term budget");
      break;
    }

    std::int64_t cap = std::min(want, (i + 1) * grid);
    bool clipped = false;
    std::vector<std::pair<Monomial, UntiltElement>> mapped;
    for (const auto& [mon, c] : z.terms()) mapped.emplace_back(mon, onto_grid(c, cfg, cap, clipped));
    UntiltTate stage(cfg, nv, cap);
    for (auto& [mon, c] : mapped) stage.add_term(mon, c.truncated(cap).extended(cap));
    stage = stage.shifted_up(v);
    if (clipped) {
      if (strict)
        fail(ErrorKind::dencap_overflow, "sharp of a Tate element has a digit off the grid of " + cfg.describe() +
                                             " below p^" + to_string(target) + "; raise dencap");
      return stage.prec_index() > best.prec_index() ? stage : best;
    }
    best = stage;
  }
  return best;
}

}  // namespace

UntiltTate sharp_element(const TiltTate& g, const Rational& target) { return sharp_tate(g, target, true); }

UntiltTate sharp_element_max(const TiltTate& g, const Rational& target) { return sharp_tate(g, target, false); }

std::vector<TiltTate> decompose(const UntiltTate& f, int c) {
  const FieldConfig& cfg = f.config();
  if (c < 0) fail(ErrorKind::invalid_argument, "decompose depth must be nonnegative");
  if (c + 1 > cfg.prec) fail(ErrorKind::insufficient_precision, "decompose depth exceeds prec");
  if (f.prec_index() < (c + 1) * cfg.grid())
    fail(ErrorKind::insufficient_precision, "input not known modulo p^" + std::to_string(c + 1));
  for (const auto& [m, a] : f.terms())
    if (a.valuation_bound() < 0) fail(ErrorKind::invalid_argument, "non-integral coefficient");
  UntiltTate rest = f.truncated((c + 1) * cfg.grid());
  std::vector<TiltTate> out;
  for (int i = 0; i <= c; ++i) {
    out.push_back(reduce_coefficients(rest));
    if (i == c) break;
    UntiltTate diff = rest - sharp_element(out.back(), Rational(c + 1 - i));
    rest = diff.shifted_down(cfg.grid());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Approximation Lemma.

namespace {

// i runs over {0, 1/p, ..., 1}; finer grids multiply the terms of g.
constexpr int kIGridLevel = 1;
constexpr int kDivisionBudget = 200000;

TiltTate window(const UntiltTate& q, const Rational& lo) {
  TiltTate out(q.config(), q.nvars());
  for (const auto& [m, c] : q.terms()) out.add_term(m, tilt_window(c.extended(q.config().limit()), lo));
  return out;
}

}  // namespace

ApproxResult approximate(const UntiltTate& f, const Rational& c, const Rational& eps) {
  const FieldConfig& cfg = f.config();
  const int p = cfg.p, nv = f.nvars();
  const Rational grid(cfg.grid());
  if (!(eps > 0 && eps < 1) || !in_zp_inverse(eps, p))
    fail(ErrorKind::invalid_argument, "eps must lie in Z[1/p] with 0 < eps < 1");
  if (c < 0 || !in_zp_inverse(c, p)) fail(ErrorKind::invalid_argument, "c must be a nonnegative element of Z[1/p]");
  if (!f.degree()) fail(ErrorKind::invalid_argument, "approximate needs a homogeneous element");
  for (const auto& [m, a] : f.terms())
    if (a.valuation_bound() < 0) fail(ErrorKind::invalid_argument, "non-integral coefficient");

  ApproxResult result{reduce_coefficients(f), eps / p, {}};
  const Rational a = result.step;
  const int steps = static_cast<int>(ceil(c / a).numerator());
  int level = 0;
  while (ipow(p, level) < steps + 1) ++level;
  const Rational delta = (eps - a) / Rational(ipow(p, level));

  TiltTate& g = result.g;
  const std::int64_t ilevel_den = ipow(p, kIGridLevel);
  for (int k = 0; k < steps; ++k) {
    const Rational ck = a * k;
    const Rational eps_next = eps - a - delta * (k + 1);
    const Rational kappa = ck + 1 - eps + eps_next;
    const Rational hprec_r = (ck + 1) * grid;
    if (hprec_r.denominator() != 1)
      fail(ErrorKind::dencap_overflow, "level " + to_string(ck) + " is off the grid; raise dencap");
    const std::int64_t hprec = hprec_r.numerator();
    if (hprec > cfg.limit()) fail(ErrorKind::insufficient_precision, "prec too small for c = " + to_string(c));
    if (f.prec_index() < hprec) fail(ErrorKind::insufficient_precision, "f not known modulo p^" + to_string(ck + 1));

    const UntiltTate gs = sharp_element(g, ck + 1);
    UntiltTate h = (f.truncated(hprec) - gs).truncated(hprec);

    // Powers g^i over the i-grid, their sharps, and the accumulated r_i.
    std::map<Rational, TiltTate> gpow;
    std::map<Rational, UntiltTate> gsharp{{Rational(1), gs}};
    std::map<Rational, UntiltTate> quotients;
    TiltTate root = g;
    for (int r = 0; r < kIGridLevel; ++r) root = root.pth_root().extended(cfg.limit());
    auto power = [&](const Rational& i) -> const TiltTate& {
      auto it = gpow.find(i);
      if (it != gpow.end()) return it->second;
      TiltTate gi = i == Rational(1) ? g : root.pow(static_cast<std::uint64_t>((i * ilevel_den).numerator()));
      return gpow.emplace(i, gi).first->second;
    };
    auto sharp_power = [&](const Rational& i) -> const UntiltTate& {
      auto it = gsharp.find(i);
      if (it != gsharp.end()) return it->second;
      return gsharp.emplace(i, sharp_element(power(i), ck + 1)).first->second;
    };

    // Terms of each G_i sorted by valuation, so products below precision
    // come first.
    using Entry = std::tuple<std::int64_t, const Monomial*, const UntiltElement*>;
    std::map<Rational, std::vector<Entry>> sorted_terms;
    auto by_valuation = [&](const Rational& i, const UntiltTate& Gi) -> const std::vector<Entry>& {
      auto it = sorted_terms.find(i);
      if (it != sorted_terms.end()) return it->second;
      std::vector<Entry> v;
      for (const auto& [m, c] : Gi.terms()) v.emplace_back(c.valuation_bound(), &m, &c);
      std::stable_sort(v.begin(), v.end(), [](const Entry& x, const Entry& y) { return std::get<0>(x) < std::get<0>(y); });
      return sorted_terms.emplace(i, std::move(v)).first->second;
    };

    ApproxStep record{ck + a, eps_next, kappa, 0, {}};
    UntiltTate::Terms hm = h.terms();
    while (!hm.empty()) {
      if (++record.divisions > kDivisionBudget)
        fail(ErrorKind::budget_exhausted, "expansion did not terminate at level " + to_string(ck));
      const Monomial lm = hm.rbegin()->first;
      const UntiltElement lc = hm.rbegin()->second;
      const std::int64_t vl = *lc.valuation_index();
      bool done = false;
      for (std::int64_t j = ilevel_den; j >= 0 && !done; --j) {
        const Rational i(j, ilevel_den);
        const UntiltTate& Gi = sharp_power(i);
        if (Gi.is_zero()) continue;
        const auto& [gm, gc] = *Gi.terms().rbegin();
        if (!divides(gm, lm)) continue;
        const std::int64_t vg = *gc.valuation_index();
        if (Rational(vl - vg) / grid < kappa - ck * i) continue;
        Monomial qm(nv);
        for (int t = 0; t < nv; ++t) qm[t] = lm[t] - gm[t];
        const UntiltElement q = lc.divided_by(gc).extended(cfg.limit());
        const std::int64_t vq = q.valuation_bound();
        // h -= q T^qm G_i, in place
        for (const auto& [val, m, c] : by_valuation(i, Gi)) {
          if (vq + val >= hprec) break;
          Monomial mm(nv);
          for (int t = 0; t < nv; ++t) mm[t] = qm[t] + (*m)[t];
          UntiltElement v = (q * *c).truncated(hprec);
          auto it = hm.find(mm);
          if (it == hm.end()) {
            hm.emplace(std::move(mm), (-v).extended(hprec));
          } else {
            it->second = (it->second - v).truncated(hprec).extended(hprec);
            if (it->second.is_zero()) hm.erase(it);
          }
        }
        auto [it, fresh] = quotients.try_emplace(i, UntiltTate(cfg, nv));
        it->second.add_term(qm, q);
        if (fresh) record.used_i.push_back(i);
        if (!hm.empty() && hm.rbegin()->first == lm)
          fail(ErrorKind::precondition, "leading term did not cancel at level " + to_string(ck));
        done = true;
      }
      if (!done)
        fail(ErrorKind::not_found, "no expansion term for " + to_string(lm) + " (valuation " +
                                       to_string(Rational(vl) / grid) + ") at level " + to_string(ck));
    }

    // Terms of g beyond t^keep move g^sharp only by p^(c'+1-eps+eps(c'))
    // or less, which the estimate at level c' absorbs.
    const Rational need = ck + a + 1 - eps + eps_next;
    std::int64_t keep = 1;
    while (keep < cfg.limit() && sharp_guaranteed_precision(p, Rational(keep) / grid) < need) ++keep;
    TiltTate next = g.truncated(keep);
    for (const auto& [i, q] : quotients) {
      TiltTate s = window(q, kappa - ck * i).truncated(keep);
      if (!s.is_zero()) next += (power(i).truncated(keep) * s).truncated(keep);
    }
    g = next.extended(cfg.limit());
    std::sort(record.used_i.begin(), record.used_i.end());
    result.steps.push_back(std::move(record));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Contract verifier: evaluates f and g^sharp at points and compares
// valuations; shares nothing with approximate beyond arith and sharp.

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "?";
}

std::string ValBound::to_string() const { return (exact ? "" : ">=") + perfectoid::to_string(value); }

Verdict PointReport::overall() const {
  if (equality == Verdict::fail || inequality == Verdict::fail) return Verdict::fail;
  if (equality == Verdict::pass && inequality == Verdict::pass) return Verdict::pass;
  return Verdict::indeterminate;
}

Verdict ContractReport::overall() const {
  Verdict v = Verdict::pass;
  for (const auto& pt : points) {
    if (pt.overall() == Verdict::fail) return Verdict::fail;
    if (pt.overall() == Verdict::indeterminate) v = Verdict::indeterminate;
  }
  return v;
}

namespace {

ValBound valuation_of(const UntiltElement& x) {
  const Rational grid(x.config().grid());
  if (auto v = x.valuation_index()) return {Rational(*v) / grid, true};
  return {Rational(x.prec_index()) / grid, false};
}

ValBound gauss_valuation(const UntiltTate& f) {
  const Rational grid(f.config().grid());
  return {Rational(f.gauss_valuation_bound()) / grid, !f.is_zero()};
}

// min(v, c) when it is decided.
std::optional<Rational> capped(const ValBound& v, const Rational& c) {
  if (v.exact || v.value >= c) return std::min(v.value, c);
  return std::nullopt;
}

}  // namespace

std::vector<TiltPoint> standard_sample(const FieldConfig& cfg, int nvars, int count) {
  const int p = cfg.p;
  const std::vector<std::pair<TiltElement, std::string>> values{
      {TiltElement(cfg), "0"},
      {TiltElement::from_int(cfg, 1), "1"},
      {TiltElement::monomial(cfg, 1, ValExp(p, 1, 1)), "t^(1/" + std::to_string(p) + ")"},
      {TiltElement::monomial(cfg, 1, ValExp(p, 1, 0)), "t"},
      {TiltElement::from_int(cfg, 1) + TiltElement::monomial(cfg, 1, ValExp(p, 1, 0)), "1+t"},
  };
  std::vector<TiltPoint> out;
  out.push_back({true, {}, "gauss"});
  std::int64_t total = ipow(static_cast<std::int64_t>(values.size()), nvars);
  const std::int64_t want = std::max(0, count - 1);
  for (std::int64_t k = 0; k < std::min(want, total); ++k) {
    std::int64_t idx = want >= total ? k : k * total / want;
    TiltPoint pt;
    pt.label = "(";
    for (int j = 0; j < nvars; ++j) {
      const auto& [z, name] = values[idx % values.size()];
      idx /= static_cast<std::int64_t>(values.size());
      pt.coords.push_back(z);
      pt.label += (j ? "," : "") + name;
    }
    pt.label += ")";
    out.push_back(std::move(pt));
  }
  return out;
}

ContractReport verify_contract(const UntiltTate& f, const TiltTate& g, const Rational& c, const Rational& eps,
                               const std::vector<TiltPoint>& points) {
  require_same(f.config(), g.config());
  if (f.nvars() != g.nvars()) fail(ErrorKind::invalid_argument, "f and g live in different variable counts");
  const FieldConfig& cfg = f.config();
  const Rational target = std::min(c + 1, Rational(cfg.prec));

  ContractReport report;
  for (const TiltPoint& pt : points) {
    PointReport r;
    r.label = pt.label;
    if (pt.gauss) {
      // The sharp of a large g is the expensive part: compute it only as far
      // as the two comparisons need.
      r.vf = gauss_valuation(f);
      Rational depth = target;
      if (const auto mf = capped(r.vf, c)) depth = std::min(target, std::max(1 - eps + *mf, Rational(0)));
      UntiltTate gs = sharp_element_max(g, depth);
      if (gs.is_zero() && depth < std::min(c, target)) gs = sharp_element_max(g, target);
      r.vg = gauss_valuation(gs);
      r.vdiff = gauss_valuation(f - gs);
    } else {
      if (static_cast<int>(pt.coords.size()) != f.nvars())
        fail(ErrorKind::invalid_argument, "point " + pt.label + " has wrong dimension");
      UntiltElement fx(cfg);
      PowerTable table(f.terms(), pt.coords);
      for (const auto& [m, a] : f.terms()) fx += a * sharp_max(table.monomial(m), target);
      fx = fx.truncated(f.prec_index());
      const UntiltElement gx = sharp_max(g.eval(pt.coords), target);
      r.vf = valuation_of(fx);
      r.vg = valuation_of(gx);
      r.vdiff = valuation_of(fx - gx);
    }
    const auto mf = capped(r.vf, c), mg = capped(r.vg, c);
    if (mf && mg) r.equality = *mf == *mg ? Verdict::pass : Verdict::fail;
    if (mf) {
      const Rational threshold = 1 - eps + *mf;
      if (r.vdiff.exact)
        r.inequality = r.vdiff.value >= threshold ? Verdict::pass : Verdict::fail;
      else if (r.vdiff.value >= threshold)
        r.inequality = Verdict::pass;
    }
    report.points.push_back(std::move(r));
  }
  return report;
}

}  // namespace perfectoid
