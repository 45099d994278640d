#include "perfectoid/config.hpp"

#include "perfectoid/error.hpp"
#include "perfectoid/valexp.hpp"

namespace perfectoid {

FieldConfig::FieldConfig(int p_, int prec_, int dencap_) : p(p_), prec(prec_), dencap(dencap_) {
  if (!is_prime(p)) fail(ErrorKind::invalid_argument, "p = " + std::to_string(p) + " is not prime");
  if (prec < 1) fail(ErrorKind::invalid_argument, "prec must be >= 1");
  if (dencap < 0) fail(ErrorKind::invalid_argument, "dencap must be >= 0");
  grid_ = ipow(p, dencap);
  if (grid_ > (std::int64_t{1} << 40) / prec) fail(ErrorKind::budget_exhausted, "grid too large: " + describe());
}

std::string FieldConfig::describe() const {
  return "(p=" + std::to_string(p) + ", prec=" + std::to_string(prec) + ", dencap=" + std::to_string(dencap) + ")";
}

void require_same(const FieldConfig& a, const FieldConfig& b) {
  if (!(a == b)) fail(ErrorKind::config_mismatch, "config mismatch: " + a.describe() + " vs " + b.describe());
}

}  // namespace perfectoid
