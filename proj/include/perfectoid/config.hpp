#pragma once

#include <cstdint>
#include <string>

namespace perfectoid {

// Finite-precision model shared by K° = Z_p[p^{1/p^inf}]^ and its tilt
// F_p[t^{1/p^inf}]^: elements are known modulo p^prec (resp. t^prec) and all
// exponents live on the grid (1/p^dencap)Z.
struct FieldConfig {
  int p = 2;
  int prec = 1;
  int dencap = 0;

  FieldConfig() = default;
  FieldConfig(int p_, int prec_, int dencap_);

  // p^dencap: number of grid points per unit exponent.
  std::int64_t grid() const noexcept { return grid_; }
  // prec * grid: exclusive upper bound for digit indices.
  std::int64_t limit() const noexcept { return grid_ * prec; }

  std::string describe() const;

  friend bool operator==(const FieldConfig& a, const FieldConfig& b) noexcept {
    return a.p == b.p && a.prec == b.prec && a.dencap == b.dencap;
  }

 private:
  std::int64_t grid_ = 1;
};

void require_same(const FieldConfig& a, const FieldConfig& b);

}  // namespace perfectoid
