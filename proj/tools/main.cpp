// ratefid: subjective-information measures and rate-fidelity curves over
// discrete alphabets. See README.md for the config format and CSV schemas.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ratefid/run_config.hpp"
#include "ratefid/runner.hpp"

namespace {

constexpr const char* kUsage = R"(usage: ratefid <command> [--config FILE] [--<key> <value> ...]

commands:
  measure          information decomposition of one instance
  rate-curve       parametric R(G) curve over a slope grid
  rate-distortion  classical rate-distortion analog
  limiting-errors  rate-of-limiting-errors of a fuzzy error condition
  fig5             R(G) curve family over the discrimination parameter d
  fig6             matching information against the digitized bit count k
  verify           run the built-in invariant battery

keys (flags use dashes, config files use underscores):
  k, d, d-list, k-list, s-grid, s-min, s-max, s-step, prior, membership,
  channel, source, distortion, out, seed

examples:
  ratefid rate-curve --k 6 --d 4 --out curve.csv
  ratefid fig5 --k 6 --d-list 2,4,8
  ratefid measure --prior 0.5,0.5 --membership "1,0.2;0.2,1"
  ratefid verify
)";

std::string flag_to_key(const std::string& flag) {
  std::string key = flag.substr(2);
  for (char& c : key) {
    if (c == '-') c = '_';
  }
  return key;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
    std::cout << kUsage;
    return args.empty() ? 2 : 0;
  }
  const std::string command = args[0];

  std::vector<std::pair<std::string, std::string>> flag_pairs;
  std::string config_path;
  std::vector<std::string> errors;
  for (std::size_t idx = 1; idx < args.size(); ++idx) {
    const std::string& arg = args[idx];
    if (arg.rfind("--", 0) != 0) {
      errors.push_back("stray argument '" + arg + "'");
      continue;
    }
    if (idx + 1 >= args.size()) {
      errors.push_back("flag " + arg + " is missing a value");
      break;
    }
    const std::string value = args[++idx];
    if (arg == "--config") {
      config_path = value;
    } else {
      flag_pairs.emplace_back(flag_to_key(arg), value);
    }
  }

  std::vector<std::pair<std::string, std::string>> file_pairs;
  if (!config_path.empty()) {
    std::ifstream file(config_path);
    if (!file) {
      errors.push_back("cannot read config file '" + config_path + "'");
    } else {
      std::ostringstream text;
      text << file.rdbuf();
      file_pairs = ratefid::parse_config_text(text.str(), errors);
    }
  }

  ratefid::ParseResult parsed = ratefid::parse_config(command, file_pairs, flag_pairs);
  errors.insert(errors.end(), parsed.errors.begin(), parsed.errors.end());
  if (!errors.empty()) {
    for (const auto& e : errors) std::cerr << "error: " << e << '\n';
    std::cerr << "run 'ratefid --help' for usage\n";
    return 2;
  }
  return ratefid::run(parsed.config, std::cout, std::cerr);
}
