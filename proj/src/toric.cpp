#include "perfectoid/toric.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "perfectoid/error.hpp"

namespace perfectoid {

namespace {

using Matrix = std::vector<std::vector<Rational>>;

bool is_zero(const Rational& r) { return r.numerator() == 0; }

std::int64_t dot(const LatticeVec& a, const LatticeVec& b) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

LatticeVec primitive(LatticeVec v) {
  std::int64_t g = 0;
  for (auto x : v) g = std::gcd(g, x);
  if (g > 1)
    for (auto& x : v) x /= g;
  return v;
}

LatticeVec negated(LatticeVec v) {
  for (auto& x : v) x = -x;
  return v;
}

std::string show(const LatticeVec& v) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ")";
  return os.str();
}

std::string show(const std::vector<LatticeVec>& gens) {
  std::string s = "cone(";
  for (std::size_t i = 0; i < gens.size(); ++i) s += (i ? "," : "") + show(gens[i]);
  return s + ")";
}

Matrix to_matrix(const std::vector<LatticeVec>& rows, int k) {
  Matrix m;
  for (const auto& r : rows) {
    std::vector<Rational> row(k);
    for (int j = 0; j < k; ++j) row[j] = Rational(r[j]);
    m.push_back(std::move(row));
  }
  return m;
}

// Reduced row echelon form in place; returns the pivot columns.
std::vector<int> rref(Matrix& m, int k) {
  std::vector<int> pivots;
  std::size_t row = 0;
  for (int col = 0; col < k && row < m.size(); ++col) {
    std::size_t sel = row;
    while (sel < m.size() && is_zero(m[sel][col])) ++sel;
    if (sel == m.size()) continue;
    std::swap(m[sel], m[row]);
    const Rational lead = m[row][col];
    for (auto& x : m[row]) x /= lead;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || is_zero(m[r][col])) continue;
      const Rational f = m[r][col];
      for (std::size_t j = 0; j < m[r].size(); ++j) m[r][j] -= f * m[row][j];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

int rank_of(const std::vector<LatticeVec>& rows, int k) {
  Matrix m = to_matrix(rows, k);
  return static_cast<int>(rref(m, k).size());
}

// Primitive integer basis of {x : <r, x> = 0 for all rows r}.
std::vector<LatticeVec> kernel_basis(const std::vector<LatticeVec>& rows, int k) {
  Matrix m = to_matrix(rows, k);
  const auto pivots = rref(m, k);
  std::vector<LatticeVec> out;
  for (int f = 0; f < k; ++f) {
    if (std::find(pivots.begin(), pivots.end(), f) != pivots.end()) continue;
    std::vector<Rational> x(k, Rational(0));
    x[f] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = -m[r][f];
    std::int64_t l = 1;
    for (const auto& v : x) l = std::lcm(l, v.denominator());
    LatticeVec v(k);
    for (int j = 0; j < k; ++j) v[j] = (x[j] * l).numerator();
    out.push_back(primitive(v));
  }
  return out;
}

std::int64_t determinant(const std::vector<LatticeVec>& rows) {
  const int k = static_cast<int>(rows.size());
  Matrix m = to_matrix(rows, k);
  Rational det = 1;
  for (int col = 0; col < k; ++col) {
    int sel = col;
    while (sel < k && is_zero(m[sel][col])) ++sel;
    if (sel == k) return 0;
    if (sel != col) {
      std::swap(m[sel], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (int r = col + 1; r < k; ++r) {
      const Rational f = m[r][col] / m[col][col];
      for (int j = col; j < k; ++j) m[r][j] -= f * m[col][j];
    }
  }
  return det.numerator();
}

void for_each_subset(int n, int r, const std::function<void(const std::vector<int>&)>& fn) {
  if (r < 0 || r > n) return;
  std::vector<int> idx(r);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(idx);
    int i = r - 1;
    while (i >= 0 && idx[i] == n - r + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// Generators of {u : <a, u> >= 0 for a in ineqs}: extreme rays of the part
// orthogonal to the lineality space, then both directions of its basis.
std::vector<LatticeVec> cone_from_inequalities(const std::vector<LatticeVec>& ineqs, int k) {
  const auto lin = kernel_basis(ineqs, k);
  std::set<LatticeVec> rays;
  const int r = k - 1 - static_cast<int>(lin.size());
  for_each_subset(static_cast<int>(ineqs.size()), r, [&](const std::vector<int>& idx) {
    std::vector<LatticeVec> rows = lin;
    for (int i : idx) rows.push_back(ineqs[i]);
    if (rank_of(rows, k) != k - 1) return;
    const LatticeVec u = kernel_basis(rows, k).front();
    for (const auto& cand : {u, negated(u)}) {
      if (std::all_of(ineqs.begin(), ineqs.end(), [&](const LatticeVec& a) { return dot(a, cand) >= 0; }))
        rays.insert(cand);
    }
  });
  std::vector<LatticeVec> out(rays.begin(), rays.end());
  for (const auto& l : lin) {
    out.push_back(l);
    out.push_back(negated(l));
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool same_generators(const Cone& a, const std::vector<LatticeVec>& gens) { return a.generators == gens; }

}  // namespace

Cone Cone::make(int rank, const std::vector<LatticeVec>& generators) {
  if (rank < 1) fail(ErrorKind::invalid_argument, "cone rank must be positive");
  std::set<LatticeVec> uniq;
  for (const auto& g : generators) {
    if (static_cast<int>(g.size()) != rank)
      fail(ErrorKind::invalid_argument, "generator " + show(g) + " has the wrong length for rank " + std::to_string(rank));
    if (std::all_of(g.begin(), g.end(), [](std::int64_t x) { return x == 0; })) continue;
    uniq.insert(primitive(g));
  }
  std::vector<LatticeVec> gens(uniq.begin(), uniq.end());
  if (rank_of(cone_from_inequalities(gens, rank), rank) != rank)
    fail(ErrorKind::invalid_argument, show(gens) + " contains a line through the origin");
  for (std::size_t i = 0; i < gens.size();) {
    std::vector<LatticeVec> others = gens;
    others.erase(others.begin() + static_cast<std::ptrdiff_t>(i));
    const auto dual = cone_from_inequalities(others, rank);
    if (std::all_of(dual.begin(), dual.end(), [&](const LatticeVec& u) { return dot(u, gens[i]) >= 0; }))
      gens = std::move(others);
    else
      ++i;
  }
  return Cone{rank, gens};
}

int Cone::dimension() const { return generators.empty() ? 0 : rank_of(generators, rank); }

bool Cone::is_simplicial() const { return dimension() == static_cast<int>(generators.size()); }

bool Cone::contains(const LatticeVec& v) const {
  const auto dual = cone_from_inequalities(generators, rank);
  return std::all_of(dual.begin(), dual.end(), [&](const LatticeVec& u) { return dot(u, v) >= 0; });
}

Cone dual_cone(const Cone& sigma) {
  if (sigma.rank > 3 && !sigma.is_simplicial())
    fail(ErrorKind::precondition, "dual cone of a non-simplicial cone needs rank <= 3");
  return Cone{sigma.rank, cone_from_inequalities(sigma.generators, sigma.rank)};
}

std::vector<Cone> faces(const Cone& sigma) {
  const auto dual = cone_from_inequalities(sigma.generators, sigma.rank);
  if (dual.size() > 20) fail(ErrorKind::budget_exhausted, "too many dual generators for face enumeration");
  std::set<std::vector<LatticeVec>> seen;
  for (std::uint32_t mask = 0; mask < (1u << dual.size()); ++mask) {
    LatticeVec u(sigma.rank, 0);
    for (std::size_t i = 0; i < dual.size(); ++i)
      if (mask >> i & 1)
        for (int j = 0; j < sigma.rank; ++j) u[j] += dual[i][j];
    std::vector<LatticeVec> face;
    for (const auto& g : sigma.generators)
      if (dot(u, g) == 0) face.push_back(g);
    seen.insert(face);
  }
  std::vector<Cone> out;
  for (const auto& f : seen) out.push_back(Cone{sigma.rank, f});
  std::stable_sort(out.begin(), out.end(),
                   [](const Cone& a, const Cone& b) { return a.dimension() < b.dimension(); });
  return out;
}

Cone intersect(const Cone& a, const Cone& b) {
  if (a.rank != b.rank) fail(ErrorKind::invalid_argument, "cones of different rank");
  auto ineqs = cone_from_inequalities(a.generators, a.rank);
  const auto db = cone_from_inequalities(b.generators, b.rank);
  ineqs.insert(ineqs.end(), db.begin(), db.end());
  return Cone::make(a.rank, cone_from_inequalities(ineqs, a.rank));
}

Fan validate_fan(int rank, const std::vector<std::vector<LatticeVec>>& input) {
  Fan fan;
  fan.rank = rank;
  fan.input = input;
  std::vector<Cone> given;
  for (const auto& gens : input) given.push_back(Cone::make(rank, gens));
  std::vector<std::vector<Cone>> face_lists;
  for (const auto& c : given) face_lists.push_back(faces(c));

  for (std::size_t i = 0; i < given.size(); ++i)
    for (std::size_t j = i + 1; j < given.size(); ++j) {
      const Cone meet = intersect(given[i], given[j]);
      auto is_face = [&](const std::vector<Cone>& fs) {
        return std::any_of(fs.begin(), fs.end(), [&](const Cone& f) { return same_generators(f, meet.generators); });
      };
      if (!is_face(face_lists[i]) || !is_face(face_lists[j]))
        fail(ErrorKind::invalid_argument, "cones #" + std::to_string(i) + " and #" + std::to_string(j) + " meet in " +
                                              show(meet.generators) + ", which is not a face of both");
    }

  std::set<std::vector<LatticeVec>> all;
  for (const auto& fs : face_lists)
    for (const auto& f : fs) all.insert(f.generators);
  for (const auto& g : all) fan.cones.push_back(Cone{rank, g});
  std::stable_sort(fan.cones.begin(), fan.cones.end(),
                   [](const Cone& a, const Cone& b) { return a.dimension() < b.dimension(); });

  for (std::size_t i = 0; i < given.size(); ++i) {
    bool proper_face = false;
    for (std::size_t j = 0; j < given.size() && !proper_face; ++j)
      if (j != i && given[j].generators != given[i].generators)
        for (const auto& f : face_lists[j])
          if (f.generators == given[i].generators) proper_face = true;
    const bool repeated = std::any_of(fan.maximal.begin(), fan.maximal.end(),
                                      [&](const Cone& c) { return c.generators == given[i].generators; });
    if (!proper_face && !repeated) fan.maximal.push_back(given[i]);
  }

  std::set<LatticeVec> ray_set;
  for (const auto& c : fan.cones)
    if (c.generators.size() == 1) ray_set.insert(c.generators.front());
  for (const auto& gens : input)
    for (const auto& g : gens) {
      if (std::all_of(g.begin(), g.end(), [](std::int64_t x) { return x == 0; })) continue;
      const LatticeVec v = primitive(g);
      if (ray_set.count(v) && std::find(fan.rays.begin(), fan.rays.end(), v) == fan.rays.end()) fan.rays.push_back(v);
    }
  return fan;
}

bool is_smooth(const Fan& fan) {
  for (const auto& c : fan.maximal) {
    const int d = static_cast<int>(c.generators.size());
    if (c.dimension() != d) return false;
    std::int64_t g = 0;
    for_each_subset(fan.rank, d, [&](const std::vector<int>& cols) {
      std::vector<LatticeVec> minor;
      for (const auto& v : c.generators) {
        LatticeVec row;
        for (int j : cols) row.push_back(v[j]);
        minor.push_back(row);
      }
      g = std::gcd(g, determinant(minor));
    });
    if (d > 0 && g != 1) return false;
  }
  return true;
}

bool is_complete(const Fan& fan) {
  if (fan.rank > 3) fail(ErrorKind::precondition, "completeness test needs rank <= 3");
  std::map<std::vector<LatticeVec>, int> walls;
  bool any = false;
  for (const auto& c : fan.cones) {
    if (c.dimension() != fan.rank) continue;
    any = true;
    for (const auto& f : faces(c))
      if (f.dimension() == fan.rank - 1) ++walls[f.generators];
  }
  if (!any) return false;
  return std::all_of(walls.begin(), walls.end(), [](const auto& w) { return w.second == 2; });
}

Fan projective_space_fan(int n) {
  if (n < 1) fail(ErrorKind::invalid_argument, "P^n needs n >= 1");
  std::vector<LatticeVec> rays;
  for (int i = 0; i < n; ++i) {
    LatticeVec e(n, 0);
    e[i] = 1;
    rays.push_back(e);
  }
  rays.push_back(LatticeVec(n, -1));
  std::vector<std::vector<LatticeVec>> cones;
  for (int i = 0; i <= n; ++i) {
    std::vector<LatticeVec> c;
    for (int j = 0; j < n; ++j) c.push_back(rays[(i + j) % (n + 1)]);
    cones.push_back(c);
  }
  return validate_fan(n, cones);
}

bool is_projective_space(const Fan& fan) {
  if (static_cast<int>(fan.rays.size()) != fan.rank + 1) return false;
  LatticeVec sum(fan.rank, 0);
  for (const auto& r : fan.rays)
    for (int j = 0; j < fan.rank; ++j) sum[j] += r[j];
  if (std::any_of(sum.begin(), sum.end(), [](std::int64_t x) { return x != 0; })) return false;
  if (!is_smooth(fan)) return false;
  if (fan.rank <= 3) return is_complete(fan);
  return static_cast<int>(fan.maximal.size()) == fan.rank + 1 &&
         std::all_of(fan.maximal.begin(), fan.maximal.end(), [&](const Cone& c) { return c.dimension() == fan.rank; });
}

std::vector<SectionPoint> sections(const Fan& fan, const TWeilDivisor& d, int p, int dencap) {
  const int k = fan.rank;
  const auto& rays = fan.rays;
  if (d.coefficients.size() != rays.size())
    fail(ErrorKind::invalid_argument, "divisor has " + std::to_string(d.coefficients.size()) + " coefficients for " +
                                          std::to_string(rays.size()) + " rays");
  for (const auto& a : d.coefficients)
    if (!in_zp_inverse(a, p)) fail(ErrorKind::invalid_argument, "coefficient " + to_string(a) + " is not in Z[1/p]");
  if (dencap < 0) fail(ErrorKind::invalid_argument, "dencap must be nonnegative");
  if (!kernel_basis(rays, k).empty() || !cone_from_inequalities(rays, k).empty())
    fail(ErrorKind::precondition, "section polytope is unbounded");

  // Vertices bound the polytope; they solve k independent tight constraints.
  std::vector<Rational> lo(k), hi(k);
  bool nonempty = false;
  for_each_subset(static_cast<int>(rays.size()), k, [&](const std::vector<int>& idx) {
    Matrix m;
    for (int i : idx) {
      std::vector<Rational> row(k + 1);
      for (int j = 0; j < k; ++j) row[j] = Rational(rays[i][j]);
      row[k] = -d.coefficients[i];
      m.push_back(std::move(row));
    }
    if (static_cast<int>(rref(m, k).size()) != k) return;
    std::vector<Rational> u(k);
    for (int j = 0; j < k; ++j) u[j] = m[j][k];
    for (std::size_t i = 0; i < rays.size(); ++i) {
      Rational s = 0;
      for (int j = 0; j < k; ++j) s += u[j] * rays[i][j];
      if (s < -d.coefficients[i]) return;
    }
    for (int j = 0; j < k; ++j) {
      lo[j] = nonempty ? std::min(lo[j], u[j]) : u[j];
      hi[j] = nonempty ? std::max(hi[j], u[j]) : u[j];
    }
    nonempty = true;
  });
  if (!nonempty) return {};

  const std::int64_t scale = ipow(p, dencap);
  LatticeVec a(k), b(k);
  Rational volume = 1;
  for (int j = 0; j < k; ++j) {
    a[j] = ceil(lo[j] * scale).numerator();
    b[j] = floor(hi[j] * scale).numerator();
    volume *= Rational(b[j] - a[j] + 1);
  }
  if (volume > Rational(20000000)) fail(ErrorKind::budget_exhausted, "section bounding box is too large");

  std::vector<SectionPoint> out;
  LatticeVec w = a;
  while (true) {
    bool ok = true;
    for (std::size_t i = 0; i < rays.size() && ok; ++i) ok = Rational(dot(w, rays[i])) >= -d.coefficients[i] * scale;
    if (ok) {
      SectionPoint u(k);
      for (int j = 0; j < k; ++j) u[j] = Rational(w[j], scale);
      out.push_back(std::move(u));
    }
    int j = k - 1;
    while (j >= 0 && w[j] == b[j]) w[j] = a[j], --j;
    if (j < 0) break;
    ++w[j];
  }
  return out;
}

SectionPoint frobenius_pullback(const SectionPoint& u, int p) {
  SectionPoint out(u);
  for (auto& x : out) x *= p;
  return out;
}

template <Kind K>
TatePoly<K> frobenius_pullback(const TatePoly<K>& h) {
  const int p = h.config().p;
  TatePoly<K> out(h.config(), h.nvars(), h.prec_index());
  for (const auto& [m, c] : h.terms()) {
    Monomial e(m);
    for (auto& x : e) x *= p;
    out.add_term(e, c.pow(static_cast<std::uint64_t>(p)));
  }
  return out;
}

template TatePoly<Kind::untilt> frobenius_pullback(const TatePoly<Kind::untilt>&);
template TatePoly<Kind::tilt> frobenius_pullback(const TatePoly<Kind::tilt>&);

std::vector<TiltPoint> projective_sample(const FieldConfig& cfg, int nvars, int count) {
  const auto all = standard_sample(cfg, nvars, static_cast<int>(1 + ipow(5, nvars)));
  std::vector<TiltPoint> normalized;
  for (const auto& pt : all)
    if (!pt.gauss && std::any_of(pt.coords.begin(), pt.coords.end(), [](const TiltElement& z) { return z.is_unit(); }))
      normalized.push_back(pt);
  std::vector<TiltPoint> out{all.front()};
  const std::int64_t total = static_cast<std::int64_t>(normalized.size());
  const std::int64_t want = std::max(0, count - 1);
  for (std::int64_t k = 0; k < std::min(want, total); ++k)
    out.push_back(normalized[want >= total ? k : k * total / want]);
  return out;
}

HypersurfaceTransfer hypersurface_transfer(const Fan& fan, const UntiltTate& f, const Rational& c,
                                           const Rational& eps, int sample_size) {
  if (!is_projective_space(fan)) fail(ErrorKind::precondition, "hypersurface transfer needs the fan of P^n");
  if (f.nvars() != fan.rank + 1)
    fail(ErrorKind::invalid_argument, "P^" + std::to_string(fan.rank) + " has " + std::to_string(fan.rank + 1) +
                                          " homogeneous coordinates, f uses " + std::to_string(f.nvars()));
  const auto deg = f.degree();
  if (!deg) fail(ErrorKind::precondition, "f is not homogeneous");

  HypersurfaceTransfer out{approximate(f, c, eps), *deg, 0, TiltTate(f.config(), f.nvars()), *deg, {}};
  const int p = f.config().p;
  std::int64_t den = deg->denominator();
  for (const auto& [m, coeff] : out.approx.g.terms())
    for (const auto& e : m) den = std::max(den, e.denominator());
  while (den > 1) {
    den /= p;
    ++out.s;
  }
  out.h = out.approx.g;
  for (int i = 0; i < out.s; ++i) {
    out.h = frobenius_pullback(out.h);
    out.h_degree *= p;
  }
  out.report = verify_contract(f, out.approx.g, c, eps, projective_sample(f.config(), f.nvars(), sample_size));
  return out;
}

CompleteIntersection complete_intersection(const Fan& fan, const UntiltTate& f1, const UntiltTate& f2,
                                           const Rational& c, const Rational& eps, int sample_size) {
  CompleteIntersection out{hypersurface_transfer(fan, f1, c, eps, sample_size),
                           hypersurface_transfer(fan, f2, c, eps, sample_size), 0};
  out.degree = out.first.degree * out.second.degree;
  return out;
}

}  // namespace perfectoid
