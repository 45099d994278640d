#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace perfectoid::detail {

// Truncated product of two digit vectors as raw integer coefficients:
// out[k] = sum_{i+j=k} a[i]*b[j] for k < n. Picks schoolbook or Kronecker
// substitution depending on the number of nonzero digits.
std::vector<std::int64_t> convolve(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                                   std::int64_t n);

}  // namespace perfectoid::detail
