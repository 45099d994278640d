#pragma once

#include <stdexcept>
#include <string>

namespace perfectoid {

enum class ErrorKind {
  invalid_argument,
  config_mismatch,
  dencap_overflow,
  insufficient_precision,
  indeterminate,
  not_found,
  budget_exhausted,
  precondition,
  parse,
};

const char* to_string(ErrorKind kind) noexcept;

// Every domain failure in the library is reported through this type; the CLI
// turns it into a machine-readable error object and exit code 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace perfectoid
