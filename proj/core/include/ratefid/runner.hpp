#ifndef RATEFID_RUNNER_HPP
#define RATEFID_RUNNER_HPP

#include <iosfwd>

#include "ratefid/run_config.hpp"

namespace ratefid {

inline constexpr const char* kToolVersion = "1.0.0";

/// Executes a validated RunConfig: writes the command's CSV to
/// config.output_path plus a run summary to config.output_path + ".summary",
/// and reports progress on `out`. Returns 0 when every requested check
/// passed, 1 for check or convergence failures, 2 for execution errors.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace ratefid

#endif  // RATEFID_RUNNER_HPP
