#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace perfectoid::acceptance {

struct Options {
  std::uint64_t seed = 20240601;
  std::string cli_path;     // binary used by criterion 9
  std::string fixture_dir;  // fixtures checked by criterion 9
  std::vector<int> only;    // empty means all criteria
};

struct Result {
  int id = 0;
  std::string name;
  bool checks_passed = false;
  double seconds = 0;
  double limit = 0;
  std::string detail;
  bool pass() const { return checks_passed && seconds <= limit; }
};

std::vector<Result> run(const Options& opts);
// "criterion 3: PASS theta homomorphism (1.20 s, limit 10 s) ..."; timings are
// left out when `timings` is false so that output is reproducible.
std::string format(const Result& r, bool timings);

}  // namespace perfectoid::acceptance
