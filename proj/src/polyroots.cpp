#include "perfectoid/polyroots.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "perfectoid/error.hpp"
#include "perfectoid/tiltkit.hpp"

namespace perfectoid {

template <Kind K>
Polynomial<K>::Polynomial(const FieldConfig& cfg, std::vector<Coeff> coeffs) : cfg_(cfg), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) fail(ErrorKind::invalid_argument, "polynomial needs at least one coefficient");
  for (const auto& c : coeffs_) require_same(cfg_, c.config());
}

template <Kind K>
Polynomial<K> Polynomial<K>::constant(const Coeff& c) {
  return Polynomial(c.config(), {c});
}

template <Kind K>
Polynomial<K> Polynomial<K>::monic(const FieldConfig& cfg, std::vector<Coeff> lower) {
  lower.push_back(Coeff::from_int(cfg, 1));
  return Polynomial(cfg, std::move(lower));
}

template <Kind K>
typename Polynomial<K>::Coeff Polynomial<K>::eval(const Coeff& x) const {
  Coeff acc = coeffs_.back();
  for (int i = degree() - 1; i >= 0; --i) acc = acc * x + coeffs_[i];
  return acc;
}

template <Kind K>
Polynomial<K> Polynomial<K>::derivative() const {
  if (degree() == 0) return Polynomial(cfg_, {Coeff(cfg_)});
  std::vector<Coeff> d;
  for (int i = 1; i <= degree(); ++i) d.push_back(coeffs_[i] * Coeff::from_int(cfg_, i));
  return Polynomial(cfg_, std::move(d));
}

template <Kind K>
Polynomial<K> Polynomial<K>::taylor_shift(const Coeff& c) const {
  // Horner in the ring of polynomials: acc <- acc * (X + c) + a_i.
  std::vector<Coeff> acc{coeffs_.back()};
  for (int i = degree() - 1; i >= 0; --i) {
    std::vector<Coeff> next(acc.size() + 1, Coeff(cfg_));
    for (std::size_t j = 0; j < acc.size(); ++j) {
      next[j + 1] += acc[j];
      next[j] += acc[j] * c;
    }
    next[0] += coeffs_[i];
    acc = std::move(next);
  }
  return Polynomial(cfg_, std::move(acc));
}

template <Kind K>
Polynomial<K> Polynomial<K>::scaled(const Coeff& c) const {
  std::vector<Coeff> out;
  Coeff power = Coeff::from_int(cfg_, 1);
  for (int i = 0; i <= degree(); ++i) {
    out.push_back(coeffs_[i] * power);
    power = power * c;
  }
  return Polynomial(cfg_, std::move(out));
}

template <Kind K>
Polynomial<K> Polynomial<K>::trimmed() const {
  std::vector<Coeff> c = coeffs_;
  while (c.size() > 1 && c.back().is_zero()) c.pop_back();
  return Polynomial(cfg_, std::move(c));
}

template <Kind K>
Polynomial<K> Polynomial<K>::times(const Polynomial& other) const {
  require_same(cfg_, other.cfg_);
  std::vector<Coeff> out(degree() + other.degree() + 1, Coeff(cfg_));
  for (int i = 0; i <= degree(); ++i)
    for (int j = 0; j <= other.degree(); ++j) out[i + j] += coeffs_[i] * other.coeffs_[j];
  return Polynomial(cfg_, std::move(out));
}

template class Polynomial<Kind::untilt>;
template class Polynomial<Kind::tilt>;

// ---------------------------------------------------------------------------

namespace {

struct HullPoint {
  int i;
  Rational h;
};

Rational height(const Rational& h1, int i1, const Rational& h2, int i2, int i) {
  return h1 + (h2 - h1) * Rational(i - i1, i2 - i1);
}

}  // namespace

template <Kind K>
NewtonPolygon newton_polygon(const Polynomial<K>& P) {
  const auto& a = P.coeffs();
  const int d = P.degree();
  const Rational grid(P.config().grid());
  if (a[d].is_zero()) fail(ErrorKind::indeterminate, "leading coefficient is zero at working precision");

  NewtonPolygon np;
  while (np.zero_roots < d && a[np.zero_roots].is_zero()) ++np.zero_roots;

  std::vector<HullPoint> hull;
  std::vector<HullPoint> unknown;
  for (int i = np.zero_roots; i <= d; ++i) {
    if (a[i].is_zero()) {
      unknown.push_back({i, Rational(a[i].prec_index()) / grid});
      continue;
    }
    HullPoint pt{i, Rational(*a[i].valuation_index()) / grid};
    // Monotone chain, lower side.
    while (hull.size() >= 2) {
      const HullPoint& o = hull[hull.size() - 2];
      const HullPoint& q = hull.back();
      // Drop q when it lies on or above the segment o -> pt.
      if ((q.h - o.h) * Rational(pt.i - o.i) >= (pt.h - o.h) * Rational(q.i - o.i))
        hull.pop_back();
      else
        break;
    }
    hull.push_back(pt);
  }

  for (const HullPoint& u : unknown) {
    for (std::size_t k = 0; k + 1 < hull.size(); ++k)
      if (hull[k].i < u.i && u.i < hull[k + 1].i &&
          u.h <= height(hull[k].h, hull[k].i, hull[k + 1].h, hull[k + 1].i, u.i))
        fail(ErrorKind::indeterminate, "coefficient of X^" + std::to_string(u.i) +
                                           " is zero at precision but may lie on the Newton polygon");
  }

  for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
    const int len = hull[k + 1].i - hull[k].i;
    np.segments.push_back({(hull[k].h - hull[k + 1].h) / Rational(len), len});
  }
  std::sort(np.segments.begin(), np.segments.end(),
            [](const NewtonSegment& x, const NewtonSegment& y) { return x.slope < y.slope; });
  return np;
}

template NewtonPolygon newton_polygon(const Polynomial<Kind::untilt>&);
template NewtonPolygon newton_polygon(const Polynomial<Kind::tilt>&);

template <Kind K>
Element<K> hensel_root(const Polynomial<K>& P, const Element<K>& x0) {
  const FieldConfig& cfg = P.config();
  const auto dP = P.derivative();
  Element<K> x = x0.extended(cfg.limit());
  auto fx = P.eval(x), dfx = dP.eval(x);
  auto w = dfx.valuation_index();
  if (!w) fail(ErrorKind::precondition, "P'(x0) vanishes at working precision");
  if (fx.valuation_bound() <= 2 * *w)
    fail(ErrorKind::precondition, "Hensel condition v(P(x0)) > 2 v(P'(x0)) fails");
  for (int iter = 0; iter < 64; ++iter) {
    if (fx.is_zero()) return x.truncated(fx.prec_index() - *w);
    if (dfx.valuation_index() != w) fail(ErrorKind::precondition, "v(P'(x)) moved during Newton iteration");
    x = (x - fx.divided_by(dfx)).extended(cfg.limit());
    fx = P.eval(x);
    dfx = dP.eval(x);
  }
  fail(ErrorKind::budget_exhausted, "Newton iteration did not converge in 64 steps");
}

template Element<Kind::untilt> hensel_root(const Polynomial<Kind::untilt>&, const Element<Kind::untilt>&);
template Element<Kind::tilt> hensel_root(const Polynomial<Kind::tilt>&, const Element<Kind::tilt>&);

// ---------------------------------------------------------------------------

std::optional<TiltElement> charp_root(const TiltPolynomial& P, int node_budget) {
  const FieldConfig& cfg = P.config();
  const int p = cfg.p;
  const Rational grid(cfg.grid());
  int nodes = 0;

  std::function<std::optional<TiltElement>(const TiltPolynomial&, const TiltElement&, std::int64_t)> search =
      [&](const TiltPolynomial& Q0, const TiltElement& root, std::int64_t last) -> std::optional<TiltElement> {
    if (++nodes > node_budget)
      fail(ErrorKind::budget_exhausted, "root search exceeded " + std::to_string(node_budget) + " nodes");
    const TiltPolynomial Q = Q0.trimmed();
    if (Q[0].is_zero()) return root;
    if (Q.degree() < 1) return std::nullopt;
    const NewtonPolygon np = newton_polygon(Q);

    // Segment endpoints are recovered from the polygon walked right to left.
    std::vector<std::pair<int, int>> spans;  // (left index, right index) per segment
    {
      int right = Q.degree();
      for (const NewtonSegment& s : np.segments) {
        spans.emplace_back(right - s.multiplicity, right);
        right -= s.multiplicity;
      }
    }
    // segments ascend in root valuation, i.e. walk from the right end: the
    // deepest roots come last, and we try them first.
    for (int k = static_cast<int>(np.segments.size()) - 1; k >= 0; --k) {
      const Rational s = np.segments[k].slope;
      const Rational sidx = s * grid;
      if (sidx.denominator() != 1) continue;
      const std::int64_t step = sidx.numerator();
      if (step <= last || step >= cfg.limit()) continue;
      const auto [lo, hi] = spans[k];
      const std::int64_t base = *Q[lo].valuation_index() + lo * step;
      std::vector<int> residual(hi - lo + 1, 0);
      for (int i = lo; i <= hi; ++i) {
        if (Q[i].is_zero()) continue;
        const std::int64_t v = *Q[i].valuation_index();
        if (v + i * step == base) residual[i - lo] = Q[i].digits()[v];
      }
      for (int c = 1; c < p; ++c) {
        std::int64_t val = 0, pw = 1;
        for (int r : residual) {
          val = (val + r * pw) % p;
          pw = pw * c % p;
        }
        if (val != 0) continue;
        const TiltElement shift = TiltElement::monomial(cfg, c, ValExp::from_index(p, step, cfg.dencap));
        if (auto found = search(Q.taylor_shift(shift), root + shift, step)) return found;
      }
    }
    return std::nullopt;
  };
  return search(P, TiltElement(cfg), -1);
}

UntiltPolynomial fw_transfer(const TiltPolynomial& P, int n) {
  if (n < 0) fail(ErrorKind::invalid_argument, "transfer depth must be nonnegative");
  const FieldConfig& cfg = P.config();
  std::vector<UntiltElement> out;
  for (const auto& a : P.coeffs()) {
    TiltElement r = a;
    for (int k = 0; k < n; ++k) r = r.pth_root();
    out.push_back(sharp_max(r, Rational(cfg.prec)));
  }
  return UntiltPolynomial(cfg, std::move(out));
}

Rational discriminant_valuation(const UntiltPolynomial& P) {
  const FieldConfig& cfg = P.config();
  const int d = P.degree();
  if (d < 1) fail(ErrorKind::invalid_argument, "discriminant of a constant");
  if (d > 6) fail(ErrorKind::invalid_argument, "discriminant supports degree <= 6");
  const auto dP = P.derivative();
  const int n = 2 * d - 1;
  // Sylvester rows: d-1 shifts of P, d shifts of P'.
  std::vector<std::vector<UntiltElement>> rows(n, std::vector<UntiltElement>(n, UntiltElement(cfg)));
  for (int r = 0; r < d - 1; ++r)
    for (int i = 0; i <= d; ++i) rows[r][r + i] = P[d - i];
  for (int r = 0; r < d; ++r)
    for (int i = 0; i < d; ++i) rows[d - 1 + r][r + i] = dP[d - 1 - i];

  // Determinant by summing over partial permutations; state = used columns.
  std::map<unsigned, UntiltElement> dp;
  dp.emplace(0u, UntiltElement::from_int(cfg, 1));
  for (int r = 0; r < n; ++r) {
    std::map<unsigned, UntiltElement> next;
    for (const auto& [mask, acc] : dp) {
      for (int c = 0; c < n; ++c) {
        if (mask & (1u << c)) continue;
        if (rows[r][c].is_zero() && rows[r][c].prec_index() == cfg.limit()) continue;
        const int above = __builtin_popcount(mask >> (c + 1));
        UntiltElement term = acc * rows[r][c];
        if (above % 2) term = -term;
        auto it = next.find(mask | (1u << c));
        if (it == next.end())
          next.emplace(mask | (1u << c), term);
        else
          it->second += term;
      }
    }
    dp = std::move(next);
  }
  const UntiltElement det = dp.count((1u << n) - 1) ? dp.at((1u << n) - 1) : UntiltElement(cfg);
  auto vr = det.valuation();
  if (!vr) fail(ErrorKind::indeterminate, "resultant vanishes at working precision");
  auto vl = P[d].valuation();
  if (!vl) fail(ErrorKind::indeterminate, "leading coefficient vanishes at working precision");
  return vr->value() - vl->value();
}

Rational stabilization_margin(const TiltPolynomial& P, int n) {
  return Rational(1) - discriminant_valuation(fw_transfer(P, n));
}

// ---------------------------------------------------------------------------

MixedRootResult mixed_root_refine(const UntiltPolynomial& P, int max_stages) {
  const FieldConfig& cfg = P.config();
  const int p = cfg.p, d = P.degree();
  if (d < 1) fail(ErrorKind::invalid_argument, "root of a constant polynomial");
  if (!(P[d] == UntiltElement::from_int(cfg, 1).truncated(P[d].prec_index())) || !P[d].is_unit())
    fail(ErrorKind::precondition, "mixed_root_refine expects a monic polynomial");
  if (max_stages <= 0) max_stages = cfg.prec * static_cast<int>(cfg.grid()) + 1;

  // Work with twice the precision so the divisions by p^mu do not eat into
  // the digits we report.
  const FieldConfig work(p, 2 * cfg.prec, cfg.dencap);
  std::vector<UntiltElement> lifted;
  for (const auto& a : P.coeffs()) lifted.push_back(a.recast(work).extended(work.limit()));
  UntiltPolynomial Pk(work, std::move(lifted));

  UntiltElement root(work), scale = UntiltElement::from_int(work, 1);
  auto residual = [&](const UntiltElement& r) { return P.eval(r.recast(cfg).extended(cfg.limit())); };

  for (int stage = 1; stage <= max_stages; ++stage) {
    std::vector<TiltElement> reduced;
    for (const auto& a : Pk.coeffs()) reduced.push_back(reduce_mod_uniformizer(a));
    TiltPolynomial Q(work, std::move(reduced));
    auto y = charp_root(Q.trimmed());
    if (!y) fail(ErrorKind::not_found, "stage " + std::to_string(stage) + ": reduction has no root over the tilt");
    const UntiltElement ys = sharp_max(y->truncated(work.grid()), Rational(work.prec));

    UntiltPolynomial S = Pk.taylor_shift(ys);
    root += scale * ys;
    auto res = residual(root);
    if (res.is_zero())
      return {root.recast(cfg).truncated(cfg.limit()), stage, res.precexp()};

    const NewtonPolygon np = newton_polygon(S);
    if (np.zero_roots > 0) fail(ErrorKind::insufficient_precision, "working precision exhausted before the residual vanished");
    const Rational s = np.segments.back().slope;
    const Rational sidx = s * Rational(work.grid());
    if (sidx.denominator() != 1)
      fail(ErrorKind::dencap_overflow, "stage " + std::to_string(stage) + ": rescaling by p^" + to_string(s) +
                                           " needs a finer grid than dencap " + std::to_string(cfg.dencap));
    const UntiltElement c = UntiltElement::monomial(work, 1, ValExp::from_index(p, sidx.numerator(), work.dencap));
    scale = scale * c;
    UntiltPolynomial next = S.scaled(c);
    std::int64_t mu = work.limit();
    for (const auto& a : next.coeffs()) mu = std::min(mu, a.valuation_bound());
    std::vector<UntiltElement> divided;
    for (const auto& a : next.coeffs()) divided.push_back(a.shifted_down(mu));
    Pk = UntiltPolynomial(work, std::move(divided));
  }
  fail(ErrorKind::budget_exhausted, "no root to precision after " + std::to_string(max_stages) + " stages");
}

}  // namespace perfectoid
