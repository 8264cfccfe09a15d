#include "ratefid/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <stdexcept>

#include "ratefid/rate_solver.hpp"

namespace ratefid {

namespace {

const std::map<std::string, Command>& command_table() {
  static const std::map<std::string, Command> table = {
      {"measure", Command::kMeasure},
      {"rate-curve", Command::kRateCurve},
      {"rate-distortion", Command::kRateDistortion},
      {"limiting-errors", Command::kLimitingErrors},
      {"fig5", Command::kFig5},
      {"fig6", Command::kFig6},
      {"verify", Command::kVerify},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

bool parse_int(const std::string& text, long long& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string strip_brackets(const std::string& text) {
  std::string t = trim(text);
  if (t.size() >= 2 && t.front() == '[' && t.back() == ']') {
    t = trim(t.substr(1, t.size() - 2));
  }
  return t;
}

bool parse_number_list(const std::string& text, std::vector<double>& out) {
  out.clear();
  for (const auto& piece : split(strip_brackets(text), ',')) {
    double v;
    if (!parse_double(piece, v)) return false;
    out.push_back(v);
  }
  return !out.empty();
}

bool parse_int_list(const std::string& text, std::vector<int>& out) {
  out.clear();
  for (const auto& piece : split(strip_brackets(text), ',')) {
    long long v;
    if (!parse_int(piece, v)) return false;
    out.push_back(static_cast<int>(v));
  }
  return !out.empty();
}

bool parse_matrix(const std::string& text, std::vector<std::vector<double>>& out) {
  out.clear();
  for (const auto& row_text : split(strip_brackets(text), ';')) {
    std::vector<double> row;
    if (!parse_number_list(row_text, row)) return false;
    out.push_back(std::move(row));
  }
  return !out.empty();
}

bool looks_inline(const std::string& value) {
  const std::string t = trim(value);
  if (t.empty()) return false;
  if (t.front() == '[') return true;
  double ignored;
  return t.find(',') != std::string::npos || t.find(';') != std::string::npos ||
         parse_double(t, ignored);
}

class ConfigBuilder {
 public:
  explicit ConfigBuilder(RunConfig& config, std::vector<std::string>& errors)
      : config_(config), errors_(errors) {}

  void apply(const std::string& key, const std::string& value, const char* origin) {
    if (key == "command") {
      auto cmd = command_from_name(trim(value));
      if (!cmd) {
        fail(key, origin, "unknown command '" + trim(value) + "'");
      } else {
        config_.command = *cmd;
      }
    } else if (key == "k") {
      long long v;
      if (!parse_int(value, v)) {
        fail(key, origin, "expected an integer");
      } else {
        config_.k = static_cast<int>(v);
      }
    } else if (key == "d") {
      if (!parse_double(value, config_.d)) fail(key, origin, "expected a number");
    } else if (key == "d_list") {
      if (!parse_number_list(value, config_.d_list)) fail(key, origin, "expected a number list");
    } else if (key == "k_list") {
      if (!parse_int_list(value, config_.k_list)) fail(key, origin, "expected an integer list");
    } else if (key == "s_grid") {
      std::vector<double> grid;
      if (!parse_number_list(value, grid)) {
        fail(key, origin, "expected a number list");
      } else {
        config_.s_grid = std::move(grid);
      }
    } else if (key == "s_min" || key == "s_max" || key == "s_step") {
      double v;
      if (!parse_double(value, v)) {
        fail(key, origin, "expected a number");
      } else if (key == "s_min") {
        config_.s_min = v;
      } else if (key == "s_max") {
        config_.s_max = v;
      } else {
        config_.s_step = v;
      }
    } else if (key == "prior") {
      apply_vector_or_name(key, value, origin, config_.prior, config_.prior_inline,
                           {"gray-normal", "uniform"});
    } else if (key == "source") {
      apply_vector_or_name(key, value, origin, config_.source, config_.source_inline,
                           {"uniform"});
    } else if (key == "membership") {
      apply_matrix_or_name(key, value, origin, config_.membership, config_.membership_inline,
                           {"gaussian"});
    } else if (key == "channel") {
      apply_matrix_or_name(key, value, origin, config_.channel, config_.channel_inline,
                           {"identity"});
    } else if (key == "distortion") {
      apply_matrix_or_name(key, value, origin, config_.distortion, config_.distortion_inline,
                           {"hamming"});
    } else if (key == "out") {
      config_.output_path = trim(value);
      if (config_.output_path.empty()) fail(key, origin, "expected a path");
    } else if (key == "seed") {
      long long v;
      if (!parse_int(value, v) || v < 0) {
        fail(key, origin, "expected a nonnegative integer");
      } else {
        config_.seed = static_cast<std::uint64_t>(v);
      }
    } else {
      fail(key, origin, "unknown key");
    }
  }

 private:
  void apply_vector_or_name(const std::string& key, const std::string& value, const char* origin,
                            std::string& name_slot, std::optional<std::vector<double>>& inline_slot,
                            const std::set<std::string>& names) {
    if (looks_inline(value)) {
      std::vector<double> vec;
      if (!parse_number_list(value, vec)) {
        fail(key, origin, "expected a number list");
        return;
      }
      inline_slot = std::move(vec);
      name_slot = "inline";
    } else if (names.count(trim(value))) {
      name_slot = trim(value);
      inline_slot.reset();
    } else {
      fail(key, origin, "expected an inline vector or one of the named kinds");
    }
  }

  void apply_matrix_or_name(const std::string& key, const std::string& value, const char* origin,
                            std::string& name_slot,
                            std::optional<std::vector<std::vector<double>>>& inline_slot,
                            const std::set<std::string>& names) {
    if (looks_inline(value)) {
      std::vector<std::vector<double>> mat;
      if (!parse_matrix(value, mat)) {
        fail(key, origin, "expected a matrix ([a, b; c, d])");
        return;
      }
      inline_slot = std::move(mat);
      name_slot = "inline";
    } else if (names.count(trim(value))) {
      name_slot = trim(value);
      inline_slot.reset();
    } else {
      fail(key, origin, "expected an inline matrix or one of the named kinds");
    }
  }

  void fail(const std::string& key, const char* origin, const std::string& why) {
    errors_.push_back(std::string(origin) + " " + key + ": " + why);
  }

  RunConfig& config_;
  std::vector<std::string>& errors_;
};

void validate(const RunConfig& config, std::vector<std::string>& errors) {
  auto fail = [&](const std::string& msg) { errors.push_back("config: " + msg); };

  if (config.k < 1 || config.k > 16) fail("k must be in [1, 16]");
  if (!(config.d > 0.0)) fail("d must be positive");
  if (config.d_list.empty()) fail("d_list must be nonempty");
  for (double d : config.d_list) {
    if (!(d > 0.0)) {
      fail("d_list entries must be positive");
      break;
    }
  }
  if (config.k_list.empty()) fail("k_list must be nonempty");
  for (std::size_t i = 0; i < config.k_list.size(); ++i) {
    if (config.k_list[i] < 1 || config.k_list[i] > 16) {
      fail("k_list entries must be in [1, 16]");
      break;
    }
    if (i > 0 && config.k_list[i] <= config.k_list[i - 1]) {
      fail("k_list must be strictly ascending");
      break;
    }
  }
  if (config.s_grid) {
    if (!std::is_sorted(config.s_grid->begin(), config.s_grid->end())) {
      fail("s_grid must be ascending");
    }
    for (double s : *config.s_grid) {
      if (std::abs(s) > kMaxSlope) {
        fail("s_grid entries must satisfy |s| <= 50");
        break;
      }
    }
  }
  const int given = int(config.s_min.has_value()) + int(config.s_max.has_value()) +
                    int(config.s_step.has_value());
  if (given != 0 && given != 3) {
    fail("s_min, s_max, s_step must be given together");
  } else if (given == 3) {
    if (!(*config.s_step > 0.0)) fail("s_step must be positive");
    if (*config.s_min > *config.s_max) fail("s_min must not exceed s_max");
    if (std::abs(*config.s_min) > kMaxSlope || std::abs(*config.s_max) > kMaxSlope) {
      fail("slope grid must satisfy |s| <= 50");
    }
    if (config.s_grid) fail("give either s_grid or s_min/s_max/s_step, not both");
  }
  if (config.prior_inline) {
    double sum = 0.0;
    for (double p : *config.prior_inline) {
      if (!(p >= 0.0)) {
        fail("prior entries must be nonnegative");
        break;
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) fail("prior entries must sum to 1 within 1e-9");
  }
  if (config.source_inline) {
    double sum = 0.0;
    for (double p : *config.source_inline) {
      if (!(p >= 0.0)) {
        fail("source entries must be nonnegative");
        break;
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) fail("source entries must sum to 1 within 1e-9");
  }
  if (config.membership_inline) {
    const auto& m = *config.membership_inline;
    const std::size_t cols = m.front().size();
    for (const auto& row : m) {
      if (row.size() != cols) {
        fail("membership rows must have equal length");
        break;
      }
      double row_max = 0.0;
      for (double v : row) {
        if (!(v >= 0.0) || v > 1.0) {
          fail("membership grades must lie in [0, 1]");
          break;
        }
        row_max = std::max(row_max, v);
      }
      if (row_max < 1e-12) {
        fail("every membership row needs a grade >= 1e-12");
        break;
      }
    }
  }
  if (config.channel_inline) {
    const auto& m = *config.channel_inline;
    const std::size_t cols = m.front().size();
    for (const auto& row : m) {
      if (row.size() != cols) {
        fail("channel rows must have equal length");
        break;
      }
      double sum = 0.0;
      for (double v : row) {
        if (!(v >= 0.0)) {
          fail("channel entries must be nonnegative");
          break;
        }
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        fail("channel rows must sum to 1 within 1e-9");
        break;
      }
    }
  }
  if (config.distortion_inline) {
    const auto& m = *config.distortion_inline;
    const std::size_t cols = m.front().size();
    for (const auto& row : m) {
      if (row.size() != cols) {
        fail("distortion rows must have equal length");
        break;
      }
      for (double v : row) {
        if (!std::isfinite(v) || v < 0.0) {
          fail("distortion entries must be finite and >= 0");
          break;
        }
      }
    }
  }
}

}  // namespace

const char* command_name(Command c) {
  switch (c) {
    case Command::kMeasure: return "measure";
    case Command::kRateCurve: return "rate-curve";
    case Command::kRateDistortion: return "rate-distortion";
    case Command::kLimitingErrors: return "limiting-errors";
    case Command::kFig5: return "fig5";
    case Command::kFig6: return "fig6";
    case Command::kVerify: return "verify";
  }
  return "unknown";
}

std::optional<Command> command_from_name(const std::string& name) {
  const auto& table = command_table();
  const auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

std::vector<double> RunConfig::resolved_s_grid() const {
  if (s_grid) return *s_grid;
  if (s_min) {
    std::vector<double> grid;
    const long long n =
        static_cast<long long>(std::floor((*s_max - *s_min) / *s_step + 1e-9)) + 1;
    grid.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
      grid.push_back(*s_min + static_cast<double>(i) * *s_step);
    }
    return grid;
  }
  return default_s_grid();
}

std::vector<std::pair<std::string, std::string>> parse_config_text(
    const std::string& text, std::vector<std::string>& errors) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::size_t line_no = 0;
  for (const auto& raw_line : split(text, '\n')) {
    ++line_no;
    std::string line = raw_line;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("config file line " + std::to_string(line_no) +
                       ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      errors.push_back("config file line " + std::to_string(line_no) + ": empty key or value");
      continue;
    }
    pairs.emplace_back(key, value);
  }
  return pairs;
}

ParseResult parse_config(const std::string& command,
                         const std::vector<std::pair<std::string, std::string>>& file_pairs,
                         const std::vector<std::pair<std::string, std::string>>& flag_pairs) {
  ParseResult result;
  auto cmd = command_from_name(command);
  if (!cmd) {
    result.errors.push_back("unknown command '" + command + "'");
  } else {
    result.config.command = *cmd;
  }

  ConfigBuilder builder(result.config, result.errors);
  for (const auto& [key, value] : file_pairs) {
    if (key == "command") continue;  // the subcommand decides
    builder.apply(key, value, "config file");
  }
  for (const auto& [key, value] : flag_pairs) {
    builder.apply(key, value, "flag");
  }
  if (result.config.output_path.empty() && cmd) {
    result.config.output_path = std::string(command_name(*cmd)) + ".csv";
  }
  validate(result.config, result.errors);
  result.ok = result.errors.empty();
  return result;
}

}  // namespace ratefid
