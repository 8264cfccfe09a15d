#include "ratefid/verify.hpp"

#include <cmath>
#include <random>

#include "ratefid/csv.hpp"
#include "ratefid/discrimination.hpp"
#include "ratefid/experiments.hpp"
#include "ratefid/measures.hpp"
#include "ratefid/prob.hpp"
#include "ratefid/rate_solver.hpp"

namespace ratefid {

namespace {

// Deterministic across standard libraries, unlike uniform_real_distribution.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

ProbVector random_prob(std::mt19937_64& rng, std::size_t n, double floor = 0.05) {
  std::vector<double> w(n);
  for (double& v : w) v = floor + uniform01(rng);
  return ProbVector(std::move(w), Normalize::kYes);
}

MembershipMatrix random_membership(std::mt19937_64& rng, std::size_t nj, std::size_t ni) {
  std::vector<std::vector<double>> rows(nj, std::vector<double>(ni));
  for (auto& row : rows) {
    for (double& v : row) v = 0.05 + 0.95 * uniform01(rng);
  }
  return MembershipMatrix(std::move(rows));
}

MembershipMatrix random_partition(std::mt19937_64& rng, std::size_t nj, std::size_t ni) {
  std::vector<std::vector<double>> rows(nj, std::vector<double>(ni, 0.0));
  for (std::size_t j = 0; j < nj; ++j) rows[j][j] = 1.0;  // every set nonempty
  for (std::size_t i = nj; i < ni; ++i) {
    rows[rng() % nj][i] = 1.0;
  }
  return MembershipMatrix(std::move(rows));
}

Channel random_channel(std::mt19937_64& rng, std::size_t ni, std::size_t nj) {
  std::vector<std::vector<double>> rows(ni, std::vector<double>(nj));
  for (auto& row : rows) {
    double sum = 0.0;
    for (double& v : row) {
      v = 0.02 + uniform01(rng);
      sum += v;
    }
    for (double& v : row) v /= sum;
  }
  return Channel(std::move(rows));
}

// Matched channel of a binary partition: P(y_j|x_i) = Q(A_j|x_i).
Channel matched_channel(const MembershipMatrix& q) {
  std::vector<std::vector<double>> rows(q.num_symbols(), std::vector<double>(q.num_sets()));
  for (std::size_t i = 0; i < q.num_symbols(); ++i) {
    for (std::size_t j = 0; j < q.num_sets(); ++j) rows[i][j] = q.at(j, i);
  }
  return Channel(std::move(rows));
}

class Battery {
 public:
  explicit Battery(std::uint64_t seed) : seed_(seed) {}

  void check(const std::string& name, bool pass, const std::string& detail) {
    results_.push_back({name, pass, detail});
  }

  // Runs `body` with a fresh seeded generator; failures by exception are
  // reported rather than propagated.
  template <typename F>
  void run(const std::string& name, F&& body) {
    std::mt19937_64 rng(seed_ ^ std::hash<std::string>{}(name));
    try {
      body(rng);
    } catch (const std::exception& e) {
      check(name, false, std::string("exception: ") + e.what());
    }
  }

  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  std::uint64_t seed_;
  std::vector<CheckResult> results_;
};

std::string worst(double value) { return "worst " + format_number(value); }

}  // namespace

std::vector<CheckResult> run_verification(std::uint64_t seed) {
  Battery battery(seed);

  battery.run("prob-posterior-normalization", [&](std::mt19937_64& rng) {
    double worst_err = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      const std::size_t ni = 2 + rng() % 5;
      const std::size_t nj = 2 + rng() % 4;
      const ProbVector prior = random_prob(rng, ni);
      const MembershipMatrix q = random_membership(rng, nj, ni);
      for (std::size_t j = 0; j < nj; ++j) {
        const ProbVector post = posterior_given_set(prior, q, j);
        double sum = 0.0;
        for (std::size_t i = 0; i < ni; ++i) sum += post[i];
        worst_err = std::max(worst_err, std::abs(sum - 1.0));
      }
    }
    battery.check("prob-posterior-normalization", worst_err <= 1e-9, worst(worst_err));
  });

  battery.run("prob-joint-marginal-roundtrip", [&](std::mt19937_64& rng) {
    double worst_err = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      const std::size_t ni = 2 + rng() % 5;
      const std::size_t nj = 2 + rng() % 4;
      const ProbVector prior = random_prob(rng, ni);
      const Channel channel = random_channel(rng, ni, nj);
      const JointDistribution joint = joint_from(prior, channel);
      for (std::size_t i = 0; i < ni; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < nj; ++j) row += joint.at(i, j);
        worst_err = std::max(worst_err, std::abs(row - prior[i]));
      }
    }
    battery.check("prob-joint-marginal-roundtrip", worst_err <= 1e-12, worst(worst_err));
  });

  battery.run("prob-logical-linearity", [&](std::mt19937_64& rng) {
    double worst_err = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      const std::size_t ni = 2 + rng() % 5;
      const ProbVector p1 = random_prob(rng, ni);
      const ProbVector p2 = random_prob(rng, ni);
      const MembershipMatrix q = random_membership(rng, 3, ni);
      const double alpha = uniform01(rng);
      std::vector<double> mix(ni);
      for (std::size_t i = 0; i < ni; ++i) mix[i] = alpha * p1[i] + (1 - alpha) * p2[i];
      const ProbVector pm(mix);
      for (std::size_t j = 0; j < 3; ++j) {
        const double direct = logical_probability(pm, q, j);
        const double mixed = alpha * logical_probability(p1, q, j) +
                             (1 - alpha) * logical_probability(p2, q, j);
        worst_err = std::max(worst_err, std::abs(direct - mixed));
      }
    }
    battery.check("prob-logical-linearity", worst_err <= 1e-12, worst(worst_err));
  });

  battery.run("measures-reduction-identity", [&](std::mt19937_64& rng) {
    double worst_err = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      const std::size_t nj = 2 + rng() % 3;
      const std::size_t ni = nj + rng() % 3;
      const ProbVector prior = random_prob(rng, ni);
      const MembershipMatrix q = random_partition(rng, nj, ni);
      const InfoDecomposition dec = info_decomposition(prior, matched_channel(q), q);
      worst_err = std::max(worst_err,
                           std::abs(dec.generalized_mutual_info - dec.shannon_mutual_info));
    }
    battery.check("measures-reduction-identity", worst_err <= 1e-9, worst(worst_err));
  });

  battery.run("measures-decomposition-identities", [&](std::mt19937_64& rng) {
    double worst_err = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      const std::size_t ni = 2 + rng() % 5;
      const std::size_t nj = 2 + rng() % 4;
      const ProbVector prior = random_prob(rng, ni);
      const MembershipMatrix q = random_membership(rng, nj, ni);
      const Channel channel = random_channel(rng, ni, nj);
      const InfoDecomposition dec = info_decomposition(prior, channel, q);
      worst_err = std::max(
          worst_err, std::abs(dec.generalized_mutual_info -
                              (dec.forecasting_entropy - dec.posterior_forecasting_entropy)));
      worst_err = std::max(worst_err,
                           std::abs(dec.generalized_mutual_info -
                                    (dec.generalized_entropy - dec.fuzzy_entropy)));
    }
    battery.check("measures-decomposition-identities", worst_err <= 1e-9, worst(worst_err));
  });

  battery.run("measures-gibbs-forecast-optimality", [&](std::mt19937_64& rng) {
    double worst_excess = -1.0;
    for (int rep = 0; rep < 20; ++rep) {
      const std::size_t ni = 2 + rng() % 5;
      const std::size_t nj = 2 + rng() % 4;
      const ProbVector prior = random_prob(rng, ni);
      const MembershipMatrix q = random_membership(rng, nj, ni);
      const std::size_t j = rng() % nj;
      const ProbVector matched = posterior_given_set(prior, q, j);
      const double best = generalized_kullback(matched, prior, q, j);
      for (int pert = 0; pert < 100; ++pert) {
        const double alpha = 0.02 + 0.9 * uniform01(rng);
        std::vector<double> f(ni);
        for (std::size_t i = 0; i < ni; ++i) {
          f[i] = (1 - alpha) * matched[i] + alpha * (0.05 + uniform01(rng));
        }
        Forecast forecast;
        forecast.posterior = ProbVector(std::move(f), Normalize::kYes);
        const double perturbed = generalized_kullback(matched, prior, q, j, forecast);
        worst_excess = std::max(worst_excess, perturbed - best);
      }
    }
    battery.check("measures-gibbs-forecast-optimality", worst_excess <= 1e-12,
                  worst(worst_excess));
  });

  battery.run("measures-cross-entropy-bound", [&](std::mt19937_64& rng) {
    bool ok = true;
    double worst_err = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      const std::size_t ni = 2 + rng() % 5;
      const ProbVector prior = random_prob(rng, ni);
      worst_err = std::max(worst_err,
                           std::abs(forecasting_entropy(prior, prior) - shannon_entropy(prior)));
      const ProbVector other = random_prob(rng, ni);
      double linf = 0.0;
      for (std::size_t i = 0; i < ni; ++i) linf = std::max(linf, std::abs(prior[i] - other[i]));
      if (linf > 1e-6 && forecasting_entropy(prior, other) <= shannon_entropy(prior)) {
        ok = false;
      }
    }
    battery.check("measures-cross-entropy-bound", ok && worst_err <= 1e-12, worst(worst_err));
  });

  battery.run("measures-tautology-row", [&](std::mt19937_64& rng) {
    double worst_err = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
      const std::size_t ni = 3 + rng() % 3;
      const std::size_t nj = 3;
      std::vector<std::vector<double>> rows(nj, std::vector<double>(ni));
      for (auto& row : rows) {
        for (double& v : row) v = 0.05 + 0.95 * uniform01(rng);
      }
      rows[1].assign(ni, 1.0);  // tautological message
      const MembershipMatrix q{std::move(rows)};
      const ProbVector prior = random_prob(rng, ni);
      const Channel channel = random_channel(rng, ni, nj);
      const InfoDecomposition dec = info_decomposition(prior, channel, q);
      // Independent accumulation skipping the tautology row.
      const JointDistribution joint = joint_from(prior, channel);
      double partial = 0.0;
      for (std::size_t j = 0; j < nj; ++j) {
        if (j == 1) continue;
        const double qa = logical_probability(prior, q, j);
        for (std::size_t i = 0; i < ni; ++i) {
          if (joint.at(i, j) > 0.0) {
            partial += joint.at(i, j) * (std::log2(q.at(j, i)) - std::log2(qa));
          }
        }
      }
      worst_err = std::max(worst_err, std::abs(dec.generalized_mutual_info - partial));
    }
    battery.check("measures-tautology-row", worst_err <= 1e-12, worst(worst_err));
  });

  battery.run("measures-negative-info-bound", [&](std::mt19937_64& rng) {
    bool ok = true;
    for (int rep = 0; rep < 20 && ok; ++rep) {
      const std::size_t ni = 2 + rng() % 5;
      const std::size_t nj = 2 + rng() % 4;
      const ProbVector prior = random_prob(rng, ni);
      std::vector<std::vector<double>> rows(nj, std::vector<double>(ni));
      for (auto& row : rows) {
        for (double& v : row) v = uniform01(rng) < 0.3 ? 0.0 : uniform01(rng);
        row[rng() % ni] = 1.0;
      }
      const MembershipMatrix q{std::move(rows)};
      double min_qa = 1.0;
      for (std::size_t j = 0; j < nj; ++j) {
        min_qa = std::min(min_qa, logical_probability(prior, q, j));
      }
      const double bound = std::log2(1.0 / kMembershipFloor) + std::log2(1.0 / min_qa) + 1e-9;
      for (std::size_t j = 0; j < nj && ok; ++j) {
        for (std::size_t i = 0; i < ni && ok; ++i) {
          if (std::abs(semantic_info(prior, q, i, j)) > bound) ok = false;
        }
      }
    }
    battery.check("measures-negative-info-bound", ok, ok ? "all within bound" : "bound exceeded");
  });

  battery.run("discrimination-gaussian-shape", [&](std::mt19937_64&) {
    const MembershipMatrix q = gaussian_membership({.max_level = 63, .discrimination = 4.0});
    bool ok = true;
    for (std::size_t j = 0; j < 64 && ok; ++j) {
      if (q.at(j, j) != 1.0) ok = false;
      for (std::size_t i = 0; i < 64; ++i) {
        if (q.at(j, i) != q.at(i, j)) ok = false;
        if (i > j && q.at(j, i) > q.at(j, i - 1) + 1e-15) ok = false;  // unimodal
      }
    }
    battery.check("discrimination-gaussian-shape", ok,
                  ok ? "symmetric, unit diagonal, unimodal" : "shape violated");
  });

  battery.run("discrimination-gray-symmetry", [&](std::mt19937_64&) {
    const ProbVector p = gray_level_source(6);
    double worst_err = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      worst_err = std::max(worst_err, std::abs(p[i] - p[p.size() - 1 - i]));
    }
    battery.check("discrimination-gray-symmetry", worst_err <= 1e-12, worst(worst_err));
  });

  battery.run("discrimination-empirical-lln", [&](std::mt19937_64& rng) {
    const std::vector<double> target = {0.9, 0.6, 0.3, 0.1};
    ClearSetSample sample;
    sample.indicators.resize(10000, std::vector<std::uint8_t>(target.size()));
    for (auto& row : sample.indicators) {
      for (std::size_t i = 0; i < target.size(); ++i) {
        row[i] = uniform01(rng) < target[i] ? 1 : 0;
      }
    }
    const std::vector<double> estimate = empirical_membership(sample);
    double worst_err = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
      worst_err = std::max(worst_err, std::abs(estimate[i] - target[i]));
    }
    battery.check("discrimination-empirical-lln", worst_err <= 0.02, worst(worst_err));
  });

  // Shared small gray-level instance for the solver checks.
  const ProbVector gray4 = gray_level_source(4);
  const MembershipMatrix gauss4 = gaussian_membership({.max_level = 15, .discrimination = 2.0});

  battery.run("solver-zero-slope", [&](std::mt19937_64&) {
    const RatePoint p = rate_fidelity_point(gray4, gauss4, 0.0);
    const bool ok = p.converged && std::abs(p.r) <= 1e-12 && p.g < 0.0;
    battery.check("solver-zero-slope", ok,
                  "r " + format_number(p.r) + " g " + format_number(p.g));
  });

  battery.run("solver-curve-invariants", [&](std::mt19937_64&) {
    const RateCurve curve = rate_fidelity_curve(gray4, gauss4, default_s_grid());
    bool all_converged = true;
    double worst_drop = 0.0;     // g must be nondecreasing
    double worst_below = 0.0;    // r >= g - 1e-9 on s >= 0
    double worst_slope = 0.0;    // consecutive slope between the endpoint s
    for (std::size_t idx = 0; idx < curve.points.size(); ++idx) {
      const auto& p = curve.points[idx];
      if (!p.converged) all_converged = false;
      if (p.s >= 0.0) worst_below = std::max(worst_below, p.g - p.r);
      if (idx > 0) {
        const auto& prev = curve.points[idx - 1];
        worst_drop = std::max(worst_drop, prev.g - p.g);
        const double dg = p.g - prev.g;
        if (std::abs(dg) > 1e-9) {
          const double slope = (p.r - prev.r) / dg;
          const double scale = std::max({std::abs(prev.s), std::abs(p.s), 1.0});
          worst_slope = std::max(worst_slope, std::max(prev.s - slope, slope - p.s) / scale);
        }
      }
    }
    const bool ok = all_converged && worst_drop <= 1e-9 && worst_below <= 1e-9 &&
                    worst_slope <= 1e-3;
    battery.check("solver-curve-invariants", ok,
                  "g drop " + format_number(worst_drop) + "; g-r " + format_number(worst_below) +
                      "; slope dev " + format_number(worst_slope));
  });

  battery.run("solver-mi-agreement", [&](std::mt19937_64&) {
    double worst_err = 0.0;
    for (double s : {0.5, 1.0, 2.0, 4.0}) {
      const RatePoint p = rate_fidelity_point(gray4, gauss4, s);
      const InfoDecomposition dec = info_decomposition(gray4, p.channel, gauss4);
      worst_err = std::max(worst_err, std::abs(dec.shannon_mutual_info - p.r));
      worst_err = std::max(worst_err, std::abs(dec.generalized_mutual_info - p.g));
    }
    battery.check("solver-mi-agreement", worst_err <= 1e-9, worst(worst_err));
  });

  battery.run("solver-lambda-form", [&](std::mt19937_64&) {
    const RatePoint p = rate_fidelity_point(gray4, gauss4, 1.5);
    double worst_err = 0.0;
    for (std::size_t i = 0; i < gray4.size(); ++i) {
      double inv = 0.0;
      for (std::size_t j = 0; j < gauss4.num_sets(); ++j) {
        inv += p.output_dist[j] *
               std::exp2(p.s * semantic_info(gray4, gauss4, i, j));
      }
      worst_err = std::max(worst_err, std::abs(p.lambda[i] * inv - 1.0));
      for (std::size_t j = 0; j < gauss4.num_sets(); ++j) {
        const double form = p.lambda[i] * p.output_dist[j] *
                            std::exp2(p.s * semantic_info(gray4, gauss4, i, j));
        worst_err = std::max(worst_err, std::abs(p.channel.at(i, j) - form));
      }
    }
    battery.check("solver-lambda-form", worst_err <= 1e-9, worst(worst_err));
  });

  battery.run("solver-eq21-residual", [&](std::mt19937_64&) {
    const RateCurve curve = rate_fidelity_curve(gray4, gauss4, default_s_grid());
    double worst_err = 0.0;
    for (const auto& p : curve.points) {
      if (p.converged) {
        worst_err = std::max(worst_err, verify_eq21_identity(p, gauss4, gray4));
      }
    }
    battery.check("solver-eq21-residual", worst_err <= 1e-8, worst(worst_err));
  });

  battery.run("solver-warm-cold-agreement", [&](std::mt19937_64&) {
    const std::vector<double> grid = {-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0};
    const RateCurve warm = rate_fidelity_curve(gray4, gauss4, grid, CurveMode::kWarmStart);
    const RateCurve cold = rate_fidelity_curve(gray4, gauss4, grid, CurveMode::kColdStart);
    double worst_err = 0.0;
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      worst_err = std::max(worst_err, std::abs(warm.points[idx].r - cold.points[idx].r));
      worst_err = std::max(worst_err, std::abs(warm.points[idx].g - cold.points[idx].g));
    }
    battery.check("solver-warm-cold-agreement", worst_err <= 1e-6, worst(worst_err));
  });

  battery.run("solver-oracle-2x2", [&](std::mt19937_64&) {
    const ProbVector prior({0.5, 0.5});
    const MembershipMatrix q{{{1.0, 0.2}, {0.2, 1.0}}};
    double worst_err = 0.0;
    for (double s : {0.5, 1.0, 2.0}) {
      const RatePoint p = rate_fidelity_point(prior, q, s);
      const double oracle = brute_force_min_rate(prior, q, p.g, 400);
      worst_err = std::max(worst_err, std::abs(p.r - oracle));
    }
    battery.check("solver-oracle-2x2", worst_err <= 0.01, worst(worst_err));
  });

  battery.run("solver-clear-set-rate", [&](std::mt19937_64& rng) {
    double worst_err = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
      const std::size_t nj = 2 + rng() % 3;
      const std::size_t ni = nj + rng() % 3;
      const MembershipMatrix q = random_partition(rng, nj, ni);
      const ProbVector prior_x = random_prob(rng, ni);
      const ProbVector source_y = random_prob(rng, nj);
      double hy = 0.0;
      for (std::size_t j = 0; j < nj; ++j) {
        hy -= source_y[j] * std::log2(logical_probability(prior_x, q, j));
      }
      const double rate = rate_of_limiting_errors(source_y, q, prior_x);
      worst_err = std::max(worst_err, std::abs(rate - hy));
    }
    battery.check("solver-clear-set-rate", worst_err <= 1e-9, worst(worst_err));
  });

  battery.run("solver-binary-rate-distortion", [&](std::mt19937_64&) {
    const ProbVector prior({0.5, 0.5});
    const std::vector<std::vector<double>> hamming = {{0.0, 1.0}, {1.0, 0.0}};
    double worst_err = 0.0;
    for (double target : {0.05, 0.11, 0.25}) {
      const double s = std::log2(target / (1.0 - target));
      const RatePoint p = rate_distortion_point(prior, hamming, s);
      const double hb = -target * std::log2(target) - (1 - target) * std::log2(1 - target);
      worst_err = std::max(worst_err, std::abs(p.r - (1.0 - hb)));
      worst_err = std::max(worst_err, std::abs(p.g - target));
    }
    battery.check("solver-binary-rate-distortion", worst_err <= 1e-4, worst(worst_err));
  });

  battery.run("matching-tangency", [&](std::mt19937_64&) {
    const RateCurve curve = rate_fidelity_curve(gray4, gauss4, default_s_grid());
    const MatchingPoint mp = find_matching_point(curve);
    const bool ok = mp.gap >= -1e-9 && mp.gap < 1e-3 && !mp.at_boundary;
    battery.check("matching-tangency",
                  ok, "gap " + format_number(mp.gap) + " at s* " + format_number(mp.s_star));
  });

  return battery.take();
}

}  // namespace ratefid
