#include "perfectoid/tiltkit.hpp"

#include <algorithm>
#include <limits>

#include "perfectoid/error.hpp"

namespace perfectoid {

namespace {

// Working configurations larger than this are refused.
constexpr std::int64_t kSharpBudget = std::int64_t{1} << 17;

UntiltElement sharp_impl(const TiltElement& x, const Rational& target, bool strict) {
  const FieldConfig& cfg = x.config();
  const int p = cfg.p, m = cfg.dencap;
  const std::int64_t grid = cfg.grid();
  if (target < 0) fail(ErrorKind::invalid_argument, "negative sharp target");
  const std::int64_t tidx = std::min(ceil(target * Rational(grid)).numerator(), cfg.limit());
  if (strict && x.prec_index() < tidx)
    fail(ErrorKind::insufficient_precision, "sharp to p^" + to_string(target) + " needs the input modulo t^" +
                                                to_string(target) + ", have t^" + x.precexp().to_string());

  auto v = x.valuation_index();
  if (!v || *v >= tidx) return UntiltElement::zero(cfg, tidx);

  // x = t^v u with u a unit; x^sharp = p^v u^sharp.
  const TiltElement u = x.shifted_down(*v);
  const std::int64_t want = tidx - *v;  // relative precision index
  const int stages = static_cast<int>(ceil(Rational(want, grid)).numerator());

  UntiltElement best = UntiltElement::zero(cfg, 0);
  for (int i = 0; i < stages; ++i) {
    // u^(1/p^i) mod t only sees the digits of u below exponent p^i.
    std::int64_t span_end = grid;
    for (int k = 0; k < i && span_end < u.prec_index(); ++k) span_end *= p;
    span_end = std::min(span_end, u.prec_index());
    int min_vp = std::numeric_limits<int>::max();
    for (std::int64_t idx = 1; idx < span_end; ++idx)
      if (u.digits()[idx]) min_vp = std::min(min_vp, vp(idx, p));
    const int level = min_vp == std::numeric_limits<int>::max() ? 0 : std::max(0, m + i - min_vp);

    const std::int64_t wgrid = level <= 40 ? ipow(p, level) : kSharpBudget;
    if (wgrid > kSharpBudget / (i + 1)) {
      if (strict)
        fail(ErrorKind::budget_exhausted, "sharp needs a working grid of p^" + std::to_string(level) +
                                              " at stage " + std::to_string(i));
      break;
    }
    const FieldConfig work(p, i + 1, level);

    // Digit at index idx (exponent idx/grid) moves to exponent idx/(grid p^i),
    // which is index idx * p^(level - m - i) on the working grid.
    std::vector<std::uint8_t> yd(work.limit(), 0);
    for (std::int64_t idx = 0; idx < span_end; ++idx) {
      if (!u.digits()[idx]) continue;
      const int shift = level - m - i;
      const std::int64_t w = shift >= 0 ? idx * ipow(p, shift) : idx / ipow(p, -shift);
      yd[w] = u.digits()[idx];
    }
    UntiltElement z = UntiltElement::from_digits(work, std::move(yd));
    for (int k = 0; k < i; ++k) z = z.pow(p);

    // Back onto the caller's grid; the first off-grid digit bounds what we know.
    std::int64_t cap = std::min(want, (i + 1) * grid);
    bool clipped = false;
    std::vector<std::uint8_t> out(cap, 0);
    const std::int64_t ratio = level >= m ? ipow(p, level - m) : 1;
    const std::int64_t up = level >= m ? 1 : ipow(p, m - level);
    for (std::int64_t j = 0; j < z.prec_index(); ++j) {
      if (!z.digits()[j]) continue;
      if (j % ratio != 0) {
        const std::int64_t floor_idx = j / ratio;
        if (floor_idx < cap) {
          cap = floor_idx;
          clipped = true;
        }
        break;
      }
      const std::int64_t c = j / ratio * up;
      if (c >= cap) break;
      out[c] = z.digits()[j];
    }
    out.resize(cap);
    UntiltElement stage = UntiltElement::from_digits(cfg, std::move(out)).shifted_up(*v);
    if (clipped) {
      if (strict)
        fail(ErrorKind::dencap_overflow, "sharp has a digit off the grid of " + cfg.describe() + " below p^" +
                                             to_string(target) + "; raise dencap");
      if (stage.prec_index() > best.prec_index()) best = stage;
      return best;
    }
    best = stage;
  }
  return best;
}

}  // namespace

UntiltElement sharp(const TiltElement& x, int target_prec) { return sharp_impl(x, Rational(target_prec), true); }

UntiltElement sharp(const TiltElement& x, const Rational& target) { return sharp_impl(x, target, true); }

UntiltElement sharp_max(const TiltElement& x, const Rational& target) { return sharp_impl(x, target, false); }

Rational sharp_guaranteed_precision(int p, const Rational& k) {
  Rational best = k;
  Rational scaled = k;
  for (int j = 1; j < 64; ++j) {
    scaled /= p;
    best = std::min(best, Rational(j) + scaled);
    if (Rational(j) > best) break;
  }
  return best;
}

UntiltElement sharp_const(const FieldConfig& cfg, int digit) {
  if (digit < 0 || digit >= cfg.p) fail(ErrorKind::invalid_argument, "digit out of range for sharp_const");
  UntiltElement y = UntiltElement::from_int(cfg, digit);
  for (int i = 0; i <= cfg.prec; ++i) {
    UntiltElement next = y.pow(cfg.p);
    if (next == y) break;
    y = next;
  }
  return y;
}

// ---------------------------------------------------------------------------
// Witt vectors through ghost components. Components are lifted digitwise to
// integer series in t^(1/grid) with coefficients mod p^n, where the ghost map
// is injective, and the sums/products are read back by peeling off p^k.

namespace {

using Series = std::vector<std::int64_t>;

struct GhostRing {
  int p;
  std::int64_t mod;
  std::int64_t len;

  Series mul(const Series& a, const Series& b) const {
    Series c(len, 0);
    for (std::int64_t i = 0; i < len; ++i) {
      if (!a[i]) continue;
      for (std::int64_t j = 0; i + j < len; ++j)
        if (b[j]) c[i + j] = (c[i + j] + a[i] * b[j]) % mod;
    }
    return c;
  }

  Series pow(Series a, std::int64_t e) const {
    Series r(len, 0);
    r[0] = 1 % mod;
    while (e > 0) {
      if (e & 1) r = mul(r, a);
      e >>= 1;
      if (e) a = mul(a, a);
    }
    return r;
  }

  Series lift(const TiltElement& x) const {
    Series s(len, 0);
    for (std::int64_t i = 0; i < x.prec_index() && i < len; ++i) s[i] = x.digits()[i];
    return s;
  }

  std::vector<Series> ghost(const std::vector<Series>& x) const {
    const int n = static_cast<int>(x.size());
    std::vector<Series> w(n, Series(len, 0));
    for (int k = 0; k < n; ++k)
      for (int i = 0; i <= k; ++i) {
        Series term = pow(x[i], ipow(p, k - i));
        const std::int64_t pi = ipow(p, i);
        for (std::int64_t j = 0; j < len; ++j) w[k][j] = (w[k][j] + pi * term[j]) % mod;
      }
    return w;
  }

  std::vector<Series> unghost(const std::vector<Series>& w) const {
    const int n = static_cast<int>(w.size());
    std::vector<Series> s;
    for (int k = 0; k < n; ++k) {
      Series rest = w[k];
      for (int i = 0; i < k; ++i) {
        Series term = pow(s[i], ipow(p, k - i));
        const std::int64_t pi = ipow(p, i);
        for (std::int64_t j = 0; j < len; ++j) rest[j] = floor_mod(rest[j] - pi * term[j], mod);
      }
      const std::int64_t pk = ipow(p, k);
      for (std::int64_t j = 0; j < len; ++j) {
        if (rest[j] % pk != 0) fail(ErrorKind::precondition, "ghost component not divisible; internal inconsistency");
        rest[j] /= pk;
      }
      s.push_back(std::move(rest));
    }
    return s;
  }
};

template <typename Op>
WittVector witt_combine(const WittVector& a, const WittVector& b, Op op) {
  require_same(a.config(), b.config());
  if (a.length() != b.length())
    fail(ErrorKind::invalid_argument, "Witt length mismatch: " + std::to_string(a.length()) + " vs " +
                                          std::to_string(b.length()));
  const FieldConfig& cfg = a.config();
  const int n = a.length();
  GhostRing ring{cfg.p, ipow(cfg.p, n), cfg.limit()};
  std::vector<Series> xa, xb;
  for (int i = 0; i < n; ++i) {
    xa.push_back(ring.lift(a.components()[i]));
    xb.push_back(ring.lift(b.components()[i]));
  }
  auto wa = ring.ghost(xa), wb = ring.ghost(xb);
  std::vector<Series> w(n);
  for (int k = 0; k < n; ++k) w[k] = op(ring, wa[k], wb[k]);
  auto s = ring.unghost(w);

  std::vector<TiltElement> out;
  std::int64_t prec = cfg.limit();
  for (int k = 0; k < n; ++k) {
    prec = std::min({prec, a.components()[k].prec_index(), b.components()[k].prec_index()});
    out.push_back(TiltElement::from_coefficients(cfg, s[k]).truncated(prec));
  }
  return WittVector(cfg, std::move(out));
}

}  // namespace

WittVector::WittVector(const FieldConfig& cfg, std::vector<TiltElement> components)
    : cfg_(cfg), components_(std::move(components)) {
  if (components_.empty() || static_cast<int>(components_.size()) > max_length)
    fail(ErrorKind::invalid_argument, "Witt length must be between 1 and " + std::to_string(max_length));
  if (static_cast<int>(components_.size()) > cfg.prec)
    fail(ErrorKind::invalid_argument, "Witt length exceeds prec");
  for (const auto& c : components_) require_same(cfg_, c.config());
}

WittVector WittVector::zero(const FieldConfig& cfg, int length) {
  return WittVector(cfg, std::vector<TiltElement>(std::max(length, 0), TiltElement(cfg)));
}

WittVector WittVector::teichmuller(const TiltElement& x, int length) {
  std::vector<TiltElement> c(std::max(length, 0), TiltElement(x.config()));
  if (!c.empty()) c[0] = x;
  return WittVector(x.config(), std::move(c));
}

WittVector operator+(const WittVector& a, const WittVector& b) {
  return witt_combine(a, b, [](const GhostRing& r, const Series& x, const Series& y) {
    Series s(r.len);
    for (std::int64_t j = 0; j < r.len; ++j) s[j] = (x[j] + y[j]) % r.mod;
    return s;
  });
}

WittVector operator*(const WittVector& a, const WittVector& b) {
  return witt_combine(a, b, [](const GhostRing& r, const Series& x, const Series& y) { return r.mul(x, y); });
}

WittVector operator-(const WittVector& a) {
  return witt_combine(a, a, [](const GhostRing& r, const Series& x, const Series&) {
    Series s(r.len);
    for (std::int64_t j = 0; j < r.len; ++j) s[j] = floor_mod(-x[j], r.mod);
    return s;
  });
}

UntiltElement theta(const WittVector& a) {
  const FieldConfig& cfg = a.config();
  const int n = a.length();
  UntiltElement sum(cfg);
  for (int i = 0; i < n; ++i) {
    TiltElement root = a.components()[i];
    for (int k = 0; k < i; ++k) root = root.pth_root();
    sum += sharp(root, n - i).shifted_up(i * cfg.grid());
  }
  return sum.truncated(n * cfg.grid());
}

}  // namespace perfectoid
