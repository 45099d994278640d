#pragma once

#include <cstdint>
#include <vector>

#include "perfectoid/tatealg.hpp"

namespace perfectoid {

using LatticeVec = std::vector<std::int64_t>;

// Polyhedral cone generated by primitive integer vectors. Cones built with
// make() are strongly convex with irredundant, sorted generators; dual
// cones may contain lines and keep both directions as generators.
struct Cone {
  int rank = 0;
  std::vector<LatticeVec> generators;

  static Cone make(int rank, const std::vector<LatticeVec>& generators);
  int dimension() const;
  bool is_simplicial() const;
  bool contains(const LatticeVec& v) const;
  friend bool operator==(const Cone&, const Cone&) = default;
};

// sigma^v = {u : <u, v> >= 0 for v in sigma}. Rank <= 3, or simplicial.
Cone dual_cone(const Cone& sigma);
// All faces including {0} and sigma itself, by increasing dimension.
std::vector<Cone> faces(const Cone& sigma);
Cone intersect(const Cone& a, const Cone& b);

struct Fan {
  int rank = 0;
  std::vector<std::vector<LatticeVec>> input;  // cones as given
  std::vector<Cone> maximal;
  std::vector<Cone> cones;      // face closure
  std::vector<LatticeVec> rays;  // in order of first appearance
};

Fan validate_fan(int rank, const std::vector<std::vector<LatticeVec>>& cones);
bool is_smooth(const Fan& fan);
bool is_complete(const Fan& fan);  // rank <= 3
// Standard fan of P^n: rays e_1..e_n, -(e_1+...+e_n).
Fan projective_space_fan(int n);
bool is_projective_space(const Fan& fan);

// One coefficient in Z[1/p] per ray of the fan.
struct TWeilDivisor {
  std::vector<Rational> coefficients;
};

using SectionPoint = std::vector<Rational>;

// Points u of (1/p^m)M with <u, v_i> >= -a_i, in lexicographic order.
std::vector<SectionPoint> sections(const Fan& fan, const TWeilDivisor& d, int p, int dencap);

// Multiplication by p on M, and its effect on homogeneous coordinates:
// exponents times p, coefficients raised to the p-th power.
SectionPoint frobenius_pullback(const SectionPoint& u, int p);
template <Kind K>
TatePoly<K> frobenius_pullback(const TatePoly<K>& h);

// Gauss point plus classical points of the sample with a unit coordinate, so
// each is a normalized point of P^n with unit-ball homogeneous coordinates.
std::vector<TiltPoint> projective_sample(const FieldConfig& cfg, int nvars, int count);

struct HypersurfaceTransfer {
  ApproxResult approx;
  Rational degree;  // of f and g
  int s = 0;        // h = g^(p^s)
  TiltTate h;
  Rational h_degree;
  ContractReport report;
};

HypersurfaceTransfer hypersurface_transfer(const Fan& fan, const UntiltTate& f, const Rational& c,
                                           const Rational& eps, int sample_size = 50);

struct CompleteIntersection {
  HypersurfaceTransfer first, second;
  Rational degree;  // product of the two degrees
};

CompleteIntersection complete_intersection(const Fan& fan, const UntiltTate& f1, const UntiltTate& f2,
                                           const Rational& c, const Rational& eps, int sample_size = 50);

}  // namespace perfectoid
