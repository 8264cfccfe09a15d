#ifndef RATEFID_RUN_CONFIG_HPP
#define RATEFID_RUN_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ratefid {

enum class Command {
  kMeasure,
  kRateCurve,
  kRateDistortion,
  kLimitingErrors,
  kFig5,
  kFig6,
  kVerify,
};

const char* command_name(Command c);
std::optional<Command> command_from_name(const std::string& name);

/// Fully validated run description. Built by parse_config from a subcommand
/// name plus key/value pairs taken from an optional config file and from
/// command-line flags (flags override file values).
struct RunConfig {
  Command command = Command::kVerify;
  int k = 6;                                   // digitized bits, b = 2^k - 1
  double d = 4.0;                              // discrimination parameter
  std::vector<double> d_list = {2.0, 4.0, 8.0};
  std::vector<int> k_list = {1, 2, 3, 4, 5, 6, 7, 8};
  std::optional<std::vector<double>> s_grid;   // explicit slope grid
  std::optional<double> s_min, s_max, s_step;  // arithmetic grid spec
  std::string prior = "gray-normal";           // or "uniform"
  std::optional<std::vector<double>> prior_inline;
  std::string membership = "gaussian";
  std::optional<std::vector<std::vector<double>>> membership_inline;
  std::string channel = "identity";            // measure command
  std::optional<std::vector<std::vector<double>>> channel_inline;
  std::string source = "uniform";              // limiting-errors command
  std::optional<std::vector<double>> source_inline;
  std::string distortion = "hamming";          // rate-distortion command
  std::optional<std::vector<std::vector<double>>> distortion_inline;
  std::string output_path;                     // default "<command>.csv"
  std::uint64_t seed = 0;

  /// The slope grid this config resolves to (explicit list, min/max/step, or
  /// the 61-point default).
  std::vector<double> resolved_s_grid() const;
};

struct ParseResult {
  bool ok = false;
  RunConfig config;
  std::vector<std::string> errors;  // every problem found, not just the first
};

/// Parses `key = value` lines; '#' starts a comment. Lists are bracketed and
/// comma-separated; matrices separate rows with ';'. Returns the pairs in
/// file order so later assignments win.
ParseResult parse_config(const std::string& command,
                         const std::vector<std::pair<std::string, std::string>>& file_pairs,
                         const std::vector<std::pair<std::string, std::string>>& flag_pairs);

/// Splits config-file text into ordered key/value pairs; syntax errors are
/// collected into `errors`.
std::vector<std::pair<std::string, std::string>> parse_config_text(
    const std::string& text, std::vector<std::string>& errors);

}  // namespace ratefid

#endif  // RATEFID_RUN_CONFIG_HPP
