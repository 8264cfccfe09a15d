#ifndef RATEFID_VERIFY_HPP
#define RATEFID_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace ratefid {

struct CheckResult {
  std::string invariant;
  bool pass = false;
  std::string detail;
};

/// The built-in invariant battery behind the `verify` command: exercises the
/// probability core, the information measures, the discrimination builders,
/// and the rate solver on fixed and seeded random instances. Deterministic
/// for a given seed.
std::vector<CheckResult> run_verification(std::uint64_t seed);

}  // namespace ratefid

#endif  // RATEFID_VERIFY_HPP
