#include "convolution.hpp"

#include <gmp.h>

#include <algorithm>

namespace perfectoid::detail {

namespace {

std::vector<std::int64_t> schoolbook(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                                     std::int64_t n, const std::vector<std::int64_t>& ia,
                                     const std::vector<std::int64_t>& ib) {
  std::vector<std::int64_t> c(n, 0);
  for (std::int64_t i : ia) {
    const std::int64_t di = a[i];
    for (std::int64_t j : ib) {
      if (i + j >= n) break;
      c[i + j] += di * b[j];
    }
  }
  return c;
}

// Packs each digit into its own 64-bit limb; products of digits below 256
// summed over fewer than 2^40 positions never overflow a limb.
std::vector<std::int64_t> kronecker(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                                    std::int64_t n) {
  const std::int64_t la = std::min<std::int64_t>(a.size(), n), lb = std::min<std::int64_t>(b.size(), n);
  std::vector<std::uint64_t> wa(a.begin(), a.begin() + la), wb(b.begin(), b.begin() + lb);
  mpz_t x, y;
  mpz_init(x);
  mpz_init(y);
  mpz_import(x, wa.size(), -1, sizeof(std::uint64_t), 0, 0, wa.data());
  mpz_import(y, wb.size(), -1, sizeof(std::uint64_t), 0, 0, wb.data());
  mpz_mul(x, x, y);
  std::size_t count = (mpz_sizeinbase(x, 2) + 63) / 64;
  std::vector<std::uint64_t> limbs(count + 1, 0);
  mpz_export(limbs.data(), &count, -1, sizeof(std::uint64_t), 0, 0, x);
  mpz_clear(x);
  mpz_clear(y);
  std::vector<std::int64_t> c(n, 0);
  for (std::int64_t k = 0; k < n && k < static_cast<std::int64_t>(count); ++k)
    c[k] = static_cast<std::int64_t>(limbs[k]);
  return c;
}

}  // namespace

std::vector<std::int64_t> convolve(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                                   std::int64_t n) {
  std::vector<std::int64_t> ia, ib;
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(a.size()) && i < n; ++i)
    if (a[i]) ia.push_back(i);
  for (std::int64_t j = 0; j < static_cast<std::int64_t>(b.size()) && j < n; ++j)
    if (b[j]) ib.push_back(j);
  if (ia.empty() || ib.empty()) return std::vector<std::int64_t>(n, 0);
  // Rough crossover measured on grids of a few thousand digits.
  if (static_cast<double>(ia.size()) * static_cast<double>(ib.size()) < 2.0e4) return schoolbook(a, b, n, ia, ib);
  return kronecker(a, b, n);
}

}  // namespace perfectoid::detail
