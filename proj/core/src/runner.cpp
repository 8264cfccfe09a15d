#include "ratefid/runner.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ratefid/csv.hpp"
#include "ratefid/discrimination.hpp"
#include "ratefid/experiments.hpp"
#include "ratefid/measures.hpp"
#include "ratefid/rate_solver.hpp"
#include "ratefid/verify.hpp"

namespace ratefid {

namespace {

ProbVector build_prior(const RunConfig& config) {
  if (config.prior_inline) return ProbVector(*config.prior_inline);
  if (config.prior == "uniform") {
    const std::size_t n = config.distortion_inline ? config.distortion_inline->size()
                                                   : std::size_t{1} << config.k;
    return ProbVector(std::vector<double>(n, 1.0 / static_cast<double>(n)), Normalize::kYes);
  }
  return gray_level_source(config.k);
}

MembershipMatrix build_membership(const RunConfig& config, std::size_t n_symbols) {
  if (config.membership_inline) {
    MembershipMatrix q(*config.membership_inline);
    if (q.num_symbols() != n_symbols) {
      throw std::invalid_argument("membership columns must match the prior length");
    }
    return q;
  }
  return gaussian_membership(
      {.max_level = static_cast<int>(n_symbols) - 1, .discrimination = config.d});
}

Channel build_channel(const RunConfig& config, std::size_t ni, std::size_t nj) {
  if (config.channel_inline) {
    Channel c(*config.channel_inline);
    if (c.num_inputs() != ni || c.num_outputs() != nj) {
      throw std::invalid_argument("channel dimensions must match prior and membership");
    }
    return c;
  }
  if (ni != nj) {
    throw std::invalid_argument("identity channel needs a square instance");
  }
  std::vector<std::vector<double>> rows(ni, std::vector<double>(nj, 0.0));
  for (std::size_t i = 0; i < ni; ++i) rows[i][i] = 1.0;
  return Channel(std::move(rows));
}

std::vector<std::vector<double>> build_distortion(const RunConfig& config, std::size_t n) {
  if (config.distortion_inline) return *config.distortion_inline;
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 1.0));
  for (std::size_t i = 0; i < n; ++i) rows[i][i] = 0.0;  // Hamming
  return rows;
}

std::string join_numbers(const std::vector<double>& values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out.push_back(sep);
    out += format_number(values[i]);
  }
  return out;
}

class Artifacts {
 public:
  explicit Artifacts(const RunConfig& config) : config_(config) {
    summary_ << "tool_version=" << kToolVersion << '\n';
    summary_ << "command=" << command_name(config.command) << '\n';
    summary_ << "k=" << config.k << '\n';
    summary_ << "d=" << format_number(config.d) << '\n';
    summary_ << "seed=" << config.seed << '\n';
    summary_ << "csv=" << config.output_path << '\n';
  }

  std::ostringstream& csv() { return csv_; }
  std::ostringstream& summary() { return summary_; }

  void provenance(const std::string& d_field) {
    csv_ << "# " << kToolVersion << ',' << command_name(config_.command) << ',' << config_.k
         << ',' << d_field << ',' << config_.seed << '\n';
  }

  void note_check(const std::string& name, bool pass, const std::string& detail) {
    summary_ << "check." << name << '=' << (pass ? "pass" : "fail");
    if (!detail.empty()) summary_ << " (" << detail << ')';
    summary_ << '\n';
    all_pass_ = all_pass_ && pass;
  }

  bool all_pass() const { return all_pass_; }

  // Writes both files; returns false on IO failure.
  bool write(std::ostream& err) {
    summary_ << "status=" << (all_pass_ ? "pass" : "fail") << '\n';
    if (!write_file(config_.output_path, csv_.str(), err)) return false;
    return write_file(config_.output_path + ".summary", summary_.str(), err);
  }

 private:
  static bool write_file(const std::string& path, const std::string& content, std::ostream& err) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
      err << "error: cannot open '" << path << "' for writing\n";
      return false;
    }
    file << content;
    return file.good();
  }

  const RunConfig& config_;
  std::ostringstream csv_;
  std::ostringstream summary_;
  bool all_pass_ = true;
};

// Central-difference slope diagnostic for curve CSVs: relative deviation of
// (r_{k+1}-r_{k-1})/(g_{k+1}-g_{k-1}) from s_k, or "na" where undefined.
std::string slope_check(const std::vector<RatePoint>& points, std::size_t idx) {
  if (idx == 0 || idx + 1 >= points.size()) return "na";
  const auto& lo = points[idx - 1];
  const auto& hi = points[idx + 1];
  if (!lo.converged || !hi.converged) return "na";
  const double dg = hi.g - lo.g;
  if (std::abs(dg) < 1e-9) return "na";
  const double slope = (hi.r - lo.r) / dg;
  const double s = points[idx].s;
  return format_number(std::abs(slope - s) / std::max(std::abs(s), 1.0));
}

void emit_curve_rows(Artifacts& artifacts, const std::vector<RatePoint>& points,
                     const char* g_column) {
  artifacts.csv() << "s," << g_column << ",R_bits,slope_check,converged\n";
  for (std::size_t idx = 0; idx < points.size(); ++idx) {
    const auto& p = points[idx];
    artifacts.csv() << format_number(p.s) << ',' << format_number(p.g) << ','
                    << format_number(p.r) << ',' << slope_check(points, idx) << ','
                    << (p.converged ? '1' : '0') << '\n';
  }
}

void note_convergence(Artifacts& artifacts, const std::vector<RatePoint>& points) {
  std::size_t converged = 0;
  for (const auto& p : points) converged += p.converged ? 1 : 0;
  artifacts.summary() << "points_total=" << points.size() << '\n';
  artifacts.summary() << "points_converged=" << converged << '\n';
  for (const auto& p : points) {
    if (!p.converged) {
      artifacts.summary() << "nonconverged_s=" << format_number(p.s)
                          << " iterations=" << p.iterations << '\n';
    }
  }
  artifacts.note_check("all-points-converged", converged == points.size(), "");
}

int run_measure(const RunConfig& config, Artifacts& artifacts) {
  const ProbVector prior = build_prior(config);
  const MembershipMatrix q = build_membership(config, prior.size());
  const Channel channel = build_channel(config, prior.size(), q.num_sets());
  const InfoDecomposition dec = info_decomposition(prior, channel, q);

  artifacts.provenance(format_number(config.d));
  artifacts.csv() << "GMI_bits,HX_bits,HXY_bits,HY_bits,HYX_bits,SMI_bits\n";
  artifacts.csv() << format_number(dec.generalized_mutual_info) << ','
                  << format_number(dec.forecasting_entropy) << ','
                  << format_number(dec.posterior_forecasting_entropy) << ','
                  << format_number(dec.generalized_entropy) << ','
                  << format_number(dec.fuzzy_entropy) << ','
                  << format_number(dec.shannon_mutual_info) << '\n';

  const double res_x = std::abs(dec.generalized_mutual_info -
                                (dec.forecasting_entropy - dec.posterior_forecasting_entropy));
  const double res_y = std::abs(dec.generalized_mutual_info -
                                (dec.generalized_entropy - dec.fuzzy_entropy));
  artifacts.note_check("decomposition-x-identity", res_x <= 1e-9, format_number(res_x));
  artifacts.note_check("decomposition-y-identity", res_y <= 1e-9, format_number(res_y));
  return 0;
}

int run_rate_curve(const RunConfig& config, Artifacts& artifacts) {
  const ProbVector prior = build_prior(config);
  const MembershipMatrix q = build_membership(config, prior.size());
  const RateCurve curve = rate_fidelity_curve(prior, q, config.resolved_s_grid());
  artifacts.provenance(format_number(config.d));
  emit_curve_rows(artifacts, curve.points, "G_bits");
  note_convergence(artifacts, curve.points);
  return 0;
}

int run_rate_distortion(const RunConfig& config, Artifacts& artifacts) {
  const ProbVector prior = build_prior(config);
  const auto distortion = build_distortion(config, prior.size());
  std::vector<RatePoint> points;
  for (double s : config.resolved_s_grid()) {
    points.push_back(rate_distortion_point(prior, distortion, s));
  }
  artifacts.provenance(format_number(config.d));
  emit_curve_rows(artifacts, points, "D");
  note_convergence(artifacts, points);
  return 0;
}

int run_limiting_errors(const RunConfig& config, Artifacts& artifacts) {
  const ProbVector prior_x = build_prior(config);
  const MembershipMatrix q = build_membership(config, prior_x.size());
  ProbVector source_y =
      config.source_inline
          ? ProbVector(*config.source_inline)
          : ProbVector(std::vector<double>(q.num_sets(), 1.0 / q.num_sets()), Normalize::kYes);
  if (source_y.size() != q.num_sets()) {
    throw std::invalid_argument("source length must match the membership row count");
  }

  const double rate = rate_of_limiting_errors(source_y, q, prior_x);
  double hy = 0.0;
  for (std::size_t j = 0; j < q.num_sets(); ++j) {
    hy -= source_y[j] * std::log2(logical_probability(prior_x, q, j));
  }
  artifacts.provenance(format_number(config.d));
  artifacts.csv() << "R_bits,H_Y_bits,residual_bits\n";
  artifacts.csv() << format_number(rate) << ',' << format_number(hy) << ','
                  << format_number(std::abs(rate - hy)) << '\n';
  artifacts.summary() << "rate_bits=" << format_number(rate) << '\n';
  return 0;
}

int run_fig5(const RunConfig& config, Artifacts& artifacts) {
  const Fig5Result result = fig5_experiment(config.k, config.d_list, config.resolved_s_grid());
  artifacts.provenance(join_numbers(config.d_list, ';'));
  artifacts.csv() << "d,s,G_bits,R_bits\n";
  for (const auto& row : result.rows) {
    artifacts.csv() << format_number(row.d) << ',' << format_number(row.s) << ','
                    << format_number(row.g) << ',' << format_number(row.r) << '\n';
  }

  for (const auto& fc : result.curves) {
    const std::string tag = "d" + format_number(fc.d);
    artifacts.summary() << "matching." << tag << ".s_star=" << format_number(fc.matching.s_star)
                        << '\n';
    artifacts.summary() << "matching." << tag << ".G_star=" << format_number(fc.matching.g_star)
                        << '\n';
    artifacts.summary() << "matching." << tag << ".gap=" << format_number(fc.matching.gap)
                        << '\n';
    for (const auto& p : fc.curve.points) {
      if (p.s == 0.0 && p.converged) {
        artifacts.note_check("zero-rate-negative-G-" + tag,
                             std::abs(p.r) <= 1e-9 && p.g < 0.0,
                             "R " + format_number(p.r) + " G " + format_number(p.g));
      }
    }
    artifacts.note_check("tangency-" + tag, fc.matching.gap >= -1e-9 && fc.matching.gap < 1e-3,
                         "gap " + format_number(fc.matching.gap));
  }
  // Sharper discrimination (smaller d) must buy more matching information.
  for (std::size_t a = 0; a + 1 < result.curves.size(); ++a) {
    for (std::size_t b = a + 1; b < result.curves.size(); ++b) {
      const auto& ca = result.curves[a];
      const auto& cb = result.curves[b];
      if (ca.d == cb.d) continue;
      const auto& smaller = ca.d < cb.d ? ca : cb;
      const auto& larger = ca.d < cb.d ? cb : ca;
      artifacts.note_check(
          "matching-monotone-d" + format_number(smaller.d) + "-d" + format_number(larger.d),
          smaller.matching.g_star > larger.matching.g_star,
          format_number(smaller.matching.g_star) + " vs " +
              format_number(larger.matching.g_star));
    }
  }
  std::size_t converged = 0;
  for (const auto& row : result.rows) converged += row.converged ? 1 : 0;
  artifacts.summary() << "points_total=" << result.rows.size() << '\n';
  artifacts.summary() << "points_converged=" << converged << '\n';
  artifacts.note_check("all-points-converged", converged == result.rows.size(), "");
  return 0;
}

int run_fig6(const RunConfig& config, Artifacts& artifacts) {
  const Fig6Result result = fig6_experiment(config.d, config.k_list);
  artifacts.provenance(format_number(config.d));
  artifacts.csv() << "k,matching_G_bits,s_star,gap_bits\n";
  for (const auto& row : result.rows) {
    artifacts.csv() << row.k << ',' << format_number(row.matching.g_star) << ','
                    << format_number(row.matching.s_star) << ','
                    << format_number(row.matching.gap) << '\n';
  }
  bool nondecreasing = true;
  for (std::size_t idx = 1; idx < result.rows.size(); ++idx) {
    if (result.rows[idx].matching.g_star < result.rows[idx - 1].matching.g_star - 1e-6) {
      nondecreasing = false;
    }
  }
  artifacts.note_check("matching-nondecreasing-in-k", nondecreasing, "");
  artifacts.note_check("plateau-detected", result.plateau_found,
                       result.plateau_found ? "k'=" + std::to_string(result.plateau_k) : "none");
  if (result.plateau_found) {
    artifacts.summary() << "plateau_k=" << result.plateau_k << '\n';
  }
  return 0;
}

int run_verify(const RunConfig& config, Artifacts& artifacts, std::ostream& out) {
  const std::vector<CheckResult> checks = run_verification(config.seed);
  artifacts.provenance(format_number(config.d));
  artifacts.csv() << "invariant,status,detail\n";
  for (const auto& c : checks) {
    artifacts.csv() << c.invariant << ',' << (c.pass ? "pass" : "fail") << ',' << c.detail
                    << '\n';
    artifacts.note_check(c.invariant, c.pass, c.detail);
    out << (c.pass ? "PASS " : "FAIL ") << c.invariant << " (" << c.detail << ")\n";
  }
  return 0;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Artifacts artifacts(config);
  try {
    switch (config.command) {
      case Command::kMeasure: run_measure(config, artifacts); break;
      case Command::kRateCurve: run_rate_curve(config, artifacts); break;
      case Command::kRateDistortion: run_rate_distortion(config, artifacts); break;
      case Command::kLimitingErrors: run_limiting_errors(config, artifacts); break;
      case Command::kFig5: run_fig5(config, artifacts); break;
      case Command::kFig6: run_fig6(config, artifacts); break;
      case Command::kVerify: run_verify(config, artifacts, out); break;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    artifacts.note_check("execution", false, e.what());
    artifacts.write(err);  // keep partial output for diagnosis
    return 2;
  }
  if (!artifacts.write(err)) return 2;
  out << "wrote " << config.output_path << " and " << config.output_path << ".summary\n";
  if (!artifacts.all_pass()) {
    err << "one or more checks failed; see " << config.output_path << ".summary\n";
    return 1;
  }
  return 0;
}

}  // namespace ratefid
