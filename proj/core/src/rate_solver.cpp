#include "ratefid/rate_solver.hpp"

#ifdef RATEFID_SOLVER_TRACE
#include <cstdio>
#endif

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace ratefid {

namespace {

double floored(double membership) { return std::max(membership, kMembershipFloor); }

// I_ij = log2[Q(A_j|x_i)/Q(A_j)], row-major over (i, j): source symbol i,
// message/output j. Membership grades are floored before the log.
std::vector<double> info_matrix(const ProbVector& prior, const MembershipMatrix& q) {
  const std::size_t ni = q.num_symbols();
  const std::size_t nj = q.num_sets();
  std::vector<double> log_qa(nj);
  for (std::size_t j = 0; j < nj; ++j) {
    log_qa[j] = std::log2(logical_probability(prior, q, j));
  }
  std::vector<double> info(ni * nj);
  for (std::size_t i = 0; i < ni; ++i) {
    for (std::size_t j = 0; j < nj; ++j) {
      info[i * nj + j] = std::log2(floored(q.at(j, i))) - log_qa[j];
    }
  }
  return info;
}

// log2 of sum_j q_j 2^(e_j) with max subtraction; `e` indexed by j.
double log2_sum_exp2(std::span<const double> log2_q, std::span<const double> e) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < e.size(); ++j) {
    if (log2_q[j] > -std::numeric_limits<double>::infinity()) {
      m = std::max(m, log2_q[j] + e[j]);
    }
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < e.size(); ++j) {
    acc += std::exp2(log2_q[j] + e[j] - m);
  }
  return m + std::log2(acc);
}

// Alternating minimization for the parametric point of min Shannon MI with
// the linear functional sum_ij P_i c_ij value_ij pinned through the slope s.
// `value` is row-major (i, j).
RatePoint solve_parametric(const ProbVector& prior, const std::vector<double>& value,
                           std::size_t nj, double s, const SolverOptions& options,
                           const std::optional<ProbVector>& init) {
  const std::size_t ni = prior.size();
  if (!prior.full_support()) {
    throw std::invalid_argument("rate solver: prior must have full support");
  }
  if (std::abs(s) > kMaxSlope) {
    throw std::domain_error("rate solver: |s| exceeds guard of 50");
  }
  if (init && init->size() != nj) {
    throw std::invalid_argument("rate solver: warm-start distribution has wrong length");
  }

  // Scaled exponentials A_ij = 2^(s (value_ij - max_j value_ij')) so every
  // row peaks at exactly one; the subtracted row maxima fold into lambda.
  std::vector<double> scaled(ni * nj);
  std::vector<double> row_shift(ni);  // M_i = max_j s*value_ij
  for (std::size_t i = 0; i < ni; ++i) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nj; ++j) m = std::max(m, s * value[i * nj + j]);
    row_shift[i] = m;
    for (std::size_t j = 0; j < nj; ++j) {
      scaled[i * nj + j] = std::exp2(s * value[i * nj + j] - m);
    }
  }

  // At s = 0 every output distribution is a fixed point of the iteration, so
  // the solve is canonicalized to the uniform initialization in all modes.
  std::vector<double> out(nj, 1.0 / static_cast<double>(nj));
  if (init && s != 0.0) {
    out = init->values();
    double sum = 0.0;
    for (double& v : out) {
      v = std::max(v, 1e-300);  // keep warm starts strictly positive
      sum += v;
    }
    for (double& v : out) v /= sum;
  }

  std::vector<double> row_dot(ni);
  auto refresh_row_dots = [&](const std::vector<double>& dist) {
    for (std::size_t i = 0; i < ni; ++i) {
      double acc = 0.0;
      const double* a = scaled.data() + i * nj;
      for (std::size_t j = 0; j < nj; ++j) acc += dist[j] * a[j];
      row_dot[i] = acc;
    }
  };

  // One Blahut update: the output marginal of the channel that is optimal
  // against `dist`. Returns the sup-norm residual |F(dist) - dist|.
  auto apply_map = [&](const std::vector<double>& dist, std::vector<double>& next) {
    refresh_row_dots(dist);
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < ni; ++i) {
      const double* a = scaled.data() + i * nj;
      if (row_dot[i] <= 0.0) {
        // Total underflow of this row: push the mass to the peak exponent.
        std::size_t jmax = 0;
        for (std::size_t j = 1; j < nj; ++j) {
          if (a[j] > a[jmax]) jmax = j;
        }
        next[jmax] += prior[i];
        continue;
      }
      const double w = prior[i] / row_dot[i];
      for (std::size_t j = 0; j < nj; ++j) next[j] += w * dist[j] * a[j];
    }
    double total = 0.0;
    for (double v : next) total += v;
    double delta = 0.0;
    for (std::size_t j = 0; j < nj; ++j) {
      next[j] /= total;
      delta = std::max(delta, std::abs(next[j] - dist[j]));
    }
    return delta;
  };

  // The plain iteration q <- F(q) contracts too slowly on near-continuous
  // alphabets (spectral radius within 1e-6 of one on 64-level instances), and
  // its multiplicative updates can neither kill nor revive boundary
  // components in any practical number of steps. The fixed point is instead
  // pinned down in three stages sharing one evaluation budget:
  //   1. a short burst of plain (monotone) Blahut steps,
  //   2. an active-set solve of the equivalent convex program
  //      min_q -sum_i P_i ln(sum_j q_j E_ij) over the simplex, whose
  //      stationary points are exactly the fixed points of the map: Newton
  //      steps polish the support while line-searched moves toward a violated
  //      vertex re-activate components the multipliers want back,
  //   3. a final plain map application that must move the distribution by
  //      less than the tolerance, plus a multiplier check that no pinned
  //      component wants mass back.
  bool converged = false;
  long evals = 0;
  const long budget = options.max_iterations;

  // Scaled KKT factors: G_j = sum_i P_i E_ij / row_dot_i. At the optimum
  // G_j = 1 wherever q_j > 0 and G_j <= 1 elsewhere.
  std::vector<double> kkt(nj);
  auto compute_kkt = [&](const std::vector<double>& dist, std::vector<double>& into) {
    refresh_row_dots(dist);
    std::fill(into.begin(), into.end(), 0.0);
    for (std::size_t i = 0; i < ni; ++i) {
      if (row_dot[i] <= 0.0) continue;
      const double w = prior[i] / row_dot[i];
      const double* a = scaled.data() + i * nj;
      for (std::size_t j = 0; j < nj; ++j) into[j] += w * a[j];
    }
    ++evals;
  };
  auto refresh_kkt = [&](const std::vector<double>& dist) { compute_kkt(dist, kkt); };

  // Stage 1: squared-extrapolation Blahut warm-up (Varadhan-Roland). The
  // extrapolated cycles shrink dying components geometrically, which is what
  // identifies the support; the active-set stage then certifies it and can
  // repair any component crushed wrongly.
  if (s != 0.0) {
    std::vector<double> q1(nj), q2(nj), accel(nj);
    const long warmup_cap = std::min<long>(3000, budget / 4 + 60);
    while (evals + 2 < warmup_cap) {
      const double residual = apply_map(out, q1);
      ++evals;
      if (residual < 1e-6) {
        out.swap(q1);
        break;  // close enough for the active-set stage
      }
      apply_map(q1, q2);
      ++evals;
      double rr = 0.0, vv = 0.0;
      for (std::size_t j = 0; j < nj; ++j) {
        const double rj = q1[j] - out[j];
        const double vj = q2[j] - 2.0 * q1[j] + out[j];
        rr += rj * rj;
        vv += vj * vj;
      }
      if (vv <= 0.0) {
        out.swap(q2);
        continue;
      }
      double alpha = -std::sqrt(rr / vv);
      if (alpha > -1.0) alpha = -1.0;
      double total = 0.0;
      for (std::size_t j = 0; j < nj; ++j) {
        const double rj = q1[j] - out[j];
        const double vj = q2[j] - 2.0 * q1[j] + out[j];
        double e = out[j] - 2.0 * alpha * rj + alpha * alpha * vj;
        if (!(e > 0.0)) e = 1e-300;  // extrapolation may overshoot the simplex
        accel[j] = e;
        total += e;
      }
      for (std::size_t j = 0; j < nj; ++j) accel[j] /= total;
      // Stabilization step keeps the sequence inside the map's basin.
      apply_map(accel, out);
      ++evals;
    }
  }

  // Stage 2: primal-dual interior-point refinement. The optimality system is
  // the complementarity problem
  //   G_j(q) + c_j = 1,  q_j >= 0,  c_j >= 0,  q_j c_j = 0,
  // solved by Newton steps on the perturbed system q_j c_j = mu with
  // mu -> 0, keeping q and c strictly positive by a fraction-to-boundary
  // rule. Eliminating the dual step gives the reduced system
  //   [diag(c) + diag(q) H] dq = mu 1 + q o (G - 1),
  //   dc = (1 - G - c) + H dq,
  // with H_jk = sum_i P_i E_ij E_ik / row_dot_i^2. Everything runs in
  // extended precision: the kernel matrix is numerically rank deficient, and
  // in plain doubles the linear-solve noise floors the residual near 1e-8,
  // above the certification tolerance. No active set is needed; crushed
  // components re-grow through the mu-path and sum q_j = 1 is automatic at
  // the solution because sum_j q_j G_j(q) = 1 identically.
  bool kkt_ok = s == 0.0;
  if (s != 0.0) {
    using LD = long double;
    constexpr LD kGrowthDone = 1e-11L;   // multiplier excess at full success
    constexpr double kGrowthAccept = 1e-9;  // certification bar
    const std::size_t cells = ni * nj;
    std::vector<LD> e_ld(cells), prior_ld(ni), q_ld(nj), c_ld(nj), rd_ld(ni), g_ld(nj);
    for (std::size_t c = 0; c < cells; ++c) e_ld[c] = scaled[c];
    for (std::size_t i = 0; i < ni; ++i) prior_ld[i] = prior[i];
    for (std::size_t j = 0; j < nj; ++j) q_ld[j] = std::max(out[j], 1e-20);

    auto refresh_g = [&](const std::vector<LD>& dist) {
      for (std::size_t i = 0; i < ni; ++i) {
        LD acc = 0.0L;
        const LD* a = e_ld.data() + i * nj;
        for (std::size_t j = 0; j < nj; ++j) acc += dist[j] * a[j];
        rd_ld[i] = acc;
      }
      std::fill(g_ld.begin(), g_ld.end(), 0.0L);
      for (std::size_t i = 0; i < ni; ++i) {
        if (rd_ld[i] <= 0.0L) continue;
        const LD w = prior_ld[i] / rd_ld[i];
        const LD* a = e_ld.data() + i * nj;
        for (std::size_t j = 0; j < nj; ++j) g_ld[j] += w * a[j];
      }
      ++evals;
    };

    refresh_g(q_ld);
    for (std::size_t j = 0; j < nj; ++j) {
      c_ld[j] = std::max(1.0L - g_ld[j], 1e-8L);
    }

    std::vector<LD> reduced, rhs, dq(nj), dc(nj);
    for (int round = 0; round < 120 && evals + 8 < budget; ++round) {
      // Project back to the simplex so the stillness test below measures the
      // residual of exactly the distribution stage 3 will certify.
      LD q_total = 0.0L;
      for (LD v : q_ld) q_total += v;
      for (LD& v : q_ld) v /= q_total;
      refresh_g(q_ld);
      LD worst_still = 0.0L, worst_growth = 0.0L, gap = 0.0L;
      for (std::size_t j = 0; j < nj; ++j) {
        worst_still = std::max(worst_still, q_ld[j] * fabsl(g_ld[j] - 1.0L));
        worst_growth = std::max(worst_growth, g_ld[j] - 1.0L);
        gap += q_ld[j] * c_ld[j];
      }
      gap /= static_cast<LD>(nj);
#ifdef RATEFID_SOLVER_TRACE
      std::fprintf(stderr, "[stage2] round=%d still=%.3Le growth=%.3Le gap=%.3Le evals=%ld\n",
                   round, worst_still, worst_growth, gap, evals);
#endif
      if (worst_still < 0.25L * static_cast<LD>(options.tolerance) &&
          worst_growth < kGrowthDone) {
        kkt_ok = true;
        break;
      }

      // Reduced Newton system with the centering target sigma * gap.
      const LD mu = 0.15L * gap;
      reduced.assign(nj * nj, 0.0L);
      rhs.assign(nj, 0.0L);
      evals += static_cast<long>(nj);  // Hessian work ~ nj map passes
      for (std::size_t i = 0; i < ni; ++i) {
        if (rd_ld[i] <= 0.0L) continue;
        const LD w = prior_ld[i] / (rd_ld[i] * rd_ld[i]);
        const LD* a = e_ld.data() + i * nj;
        for (std::size_t j = 0; j < nj; ++j) {
          const LD waij = w * a[j];
          if (waij == 0.0L) continue;
          for (std::size_t k2 = j; k2 < nj; ++k2) {
            reduced[j * nj + k2] += waij * a[k2];
          }
        }
      }
      for (std::size_t j = 0; j < nj; ++j) {
        for (std::size_t k2 = 0; k2 < j; ++k2) reduced[j * nj + k2] = reduced[k2 * nj + j];
      }
      // dc = (1 - G - c) + H dq is substituted after the solve; keep H.
      std::vector<LD> h_matrix = reduced;
      LD ridge = 0.0L;
      for (std::size_t j = 0; j < nj; ++j) {
        const LD qj = q_ld[j];
        for (std::size_t k2 = 0; k2 < nj; ++k2) reduced[j * nj + k2] *= qj;
        reduced[j * nj + j] += c_ld[j];
        ridge = std::max(ridge, fabsl(reduced[j * nj + j]));
        rhs[j] = mu + qj * (g_ld[j] - 1.0L);
      }
      ridge *= 1e-17L;
      for (std::size_t j = 0; j < nj; ++j) reduced[j * nj + j] += ridge;

      // Gaussian elimination with partial pivoting.
      bool singular = false;
      {
        std::vector<LD> m = reduced;
        std::vector<LD> b = rhs;
        for (std::size_t col = 0; col < nj && !singular; ++col) {
          std::size_t piv = col;
          for (std::size_t row = col + 1; row < nj; ++row) {
            if (fabsl(m[row * nj + col]) > fabsl(m[piv * nj + col])) piv = row;
          }
          if (m[piv * nj + col] == 0.0L) {
            singular = true;
            break;
          }
          if (piv != col) {
            for (std::size_t c2 = col; c2 < nj; ++c2) std::swap(m[col * nj + c2], m[piv * nj + c2]);
            std::swap(b[col], b[piv]);
          }
          const LD inv_piv = 1.0L / m[col * nj + col];
          for (std::size_t row = col + 1; row < nj; ++row) {
            const LD f = m[row * nj + col] * inv_piv;
            if (f == 0.0L) continue;
            for (std::size_t c2 = col; c2 < nj; ++c2) m[row * nj + c2] -= f * m[col * nj + c2];
            b[row] -= f * b[col];
          }
        }
        if (!singular) {
          for (std::size_t row = nj; row-- > 0;) {
            LD acc = b[row];
            for (std::size_t c2 = row + 1; c2 < nj; ++c2) acc -= m[row * nj + c2] * dq[c2];
            dq[row] = acc / m[row * nj + row];
          }
        }
      }
      if (singular) break;  // the certification pass decides

      for (std::size_t j = 0; j < nj; ++j) {
        LD hdq = 0.0L;
        const LD* hrow = h_matrix.data() + j * nj;
        for (std::size_t k2 = 0; k2 < nj; ++k2) hdq += hrow[k2] * dq[k2];
        dc[j] = (1.0L - g_ld[j] - c_ld[j]) + hdq;
      }

      // Fraction-to-boundary step (tau = 0.9995) keeps both iterates
      // strictly positive.
      LD alpha = 1.0L;
      for (std::size_t j = 0; j < nj; ++j) {
        if (dq[j] < 0.0L) alpha = std::min(alpha, -0.9995L * q_ld[j] / dq[j]);
        if (dc[j] < 0.0L) alpha = std::min(alpha, -0.9995L * c_ld[j] / dc[j]);
      }
      for (std::size_t j = 0; j < nj; ++j) {
        q_ld[j] += alpha * dq[j];
        c_ld[j] += alpha * dc[j];
      }
    }
    if (!kkt_ok) {
      refresh_g(q_ld);
      LD worst_growth = 0.0L;
      for (std::size_t j = 0; j < nj; ++j) {
        worst_growth = std::max(worst_growth, g_ld[j] - 1.0L);
      }
      kkt_ok = worst_growth <= static_cast<LD>(kGrowthAccept);
    }
    double total = 0.0;
    for (std::size_t j = 0; j < nj; ++j) {
      out[j] = static_cast<double>(q_ld[j]);
      total += out[j];
    }
#ifdef RATEFID_SOLVER_TRACE
    std::fprintf(stderr, "[stage2exit] sum-1=%.3Le\n", (long double)total - 1.0L);
#endif
    for (double& v : out) v /= total;
  }

  // Stage 3: one plain map application certifies the reported distribution.
  // Both conditions are required: the map must hold the distribution still,
  // and no zeroed output may carry a multiplier that wants mass back (the
  // sup-norm alone is blind to those).
  if (s != 0.0) {
    std::vector<double> certified(nj);
    const double residual = apply_map(out, certified);
    ++evals;
    converged = kkt_ok && residual < options.tolerance;
#ifdef RATEFID_SOLVER_TRACE
    std::fprintf(stderr, "[stage3] residual=%.3e kkt_ok=%d\n", residual, kkt_ok ? 1 : 0);
    {
      std::size_t argr = 0;
      for (std::size_t j = 0; j < nj; ++j) {
        if (std::abs(certified[j] - out[j]) > std::abs(certified[argr] - out[argr])) argr = j;
      }
      std::fprintf(stderr, "[stage3] argmax j=%zu q=%.6e F(q)=%.6e\n", argr, out[argr],
                   certified[argr]);
    }
#endif
    out.swap(certified);
  } else {
    converged = true;
  }

  // Consistency pass: lambda and the channel are recomputed from the final
  // output distribution so the reported fields satisfy their mutual
  // identities exactly.
  refresh_row_dots(out);
  std::vector<double> log2_lambda(ni), lambda(ni);
  std::vector<std::vector<double>> channel_rows(ni);
  double g = 0.0;
  for (std::size_t i = 0; i < ni; ++i) {
    const double* a = scaled.data() + i * nj;
    channel_rows[i].resize(nj);
    if (row_dot[i] <= 0.0) {
      std::size_t jmax = 0;
      for (std::size_t j = 1; j < nj; ++j) {
        if (a[j] > a[jmax]) jmax = j;
      }
      channel_rows[i][jmax] = 1.0;
      log2_lambda[i] = -(row_shift[i] + s * 0.0);  // degenerate; lambda meaningless here
    } else {
      for (std::size_t j = 0; j < nj; ++j) channel_rows[i][j] = out[j] * a[j] / row_dot[i];
      log2_lambda[i] = -(row_shift[i] + std::log2(row_dot[i]));
    }
    lambda[i] = std::exp2(log2_lambda[i]);
    for (std::size_t j = 0; j < nj; ++j) {
      g += prior[i] * channel_rows[i][j] * value[i * nj + j];
    }
  }
  double r = s * g;
  for (std::size_t i = 0; i < ni; ++i) r += prior[i] * log2_lambda[i];

  RatePoint point{
      .s = s,
      .g = g,
      .r = r,
      .lambda = std::move(lambda),
      .output_dist = ProbVector(out, Normalize::kYes),
      .channel = Channel(std::move(channel_rows)),
      .converged = converged,
      .iterations = evals,
      .output_negligible = {},
  };
  point.output_negligible.resize(nj);
  for (std::size_t j = 0; j < nj; ++j) {
    point.output_negligible[j] = out[j] < kNegligibleOutput;
  }
  return point;
}

}  // namespace

std::vector<double> default_s_grid() {
  std::vector<double> grid;
  grid.reserve(61);
  for (int i = 0; i <= 10; ++i) grid.push_back(static_cast<double>(i - 10) * 0.2);
  for (int i = 1; i <= 50; ++i) grid.push_back(static_cast<double>(i) * 0.1);
  return grid;
}

RatePoint rate_fidelity_point(const ProbVector& prior, const MembershipMatrix& q, double s,
                              const SolverOptions& options, const std::optional<ProbVector>& init) {
  if (prior.size() != q.num_symbols()) {
    throw std::invalid_argument("rate_fidelity_point: prior length != membership columns");
  }
  return solve_parametric(prior, info_matrix(prior, q), q.num_sets(), s, options, init);
}

RateCurve rate_fidelity_curve(const ProbVector& prior, const MembershipMatrix& q,
                              std::vector<double> s_grid, CurveMode mode,
                              const SolverOptions& options) {
  if (s_grid.empty()) {
    throw std::invalid_argument("rate_fidelity_curve: empty slope grid");
  }
  if (!std::is_sorted(s_grid.begin(), s_grid.end())) {
    throw std::invalid_argument("rate_fidelity_curve: slope grid must be ascending");
  }
  RateCurve curve{prior, q, s_grid, {}};
  curve.points.reserve(s_grid.size());

  if (mode == CurveMode::kWarmStart) {
    std::optional<ProbVector> prev;
    for (double s : s_grid) {
      RatePoint p = rate_fidelity_point(prior, q, s, options, prev);
      prev = p.output_dist;
      curve.points.push_back(std::move(p));
    }
    return curve;
  }

  // Cold start: independent points, computed in parallel into fixed slots so
  // the result does not depend on scheduling.
  curve.points.resize(
      s_grid.size(),
      RatePoint{.s = 0,
                .g = 0,
                .r = 0,
                .lambda = {},
                .output_dist = ProbVector(std::vector<double>{1.0}),
                .channel = Channel(std::vector<std::vector<double>>{{1.0}}),
                .converged = false,
                .iterations = 0,
                .output_negligible = {}});
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (std::size_t idx = cursor.fetch_add(1); idx < s_grid.size(); idx = cursor.fetch_add(1)) {
      curve.points[idx] = rate_fidelity_point(prior, q, s_grid[idx], options, std::nullopt);
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_threads = std::min<std::size_t>(hw, s_grid.size());
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return curve;
}

double RateCurve::interpolate_rate_at(double g) const {
  const RatePoint* lo = nullptr;
  const RatePoint* hi = nullptr;
  for (const auto& p : points) {
    if (!p.converged) continue;
    if (p.g <= g && (!lo || p.g > lo->g)) lo = &p;
    if (p.g >= g && (!hi || p.g < hi->g)) hi = &p;
  }
  if (!lo || !hi) {
    throw std::domain_error("RateCurve: fidelity level outside the solved range");
  }
  if (lo == hi || hi->g == lo->g) return lo->r;
  const double t = (g - lo->g) / (hi->g - lo->g);
  return lo->r + t * (hi->r - lo->r);
}

MembershipMatrix b_set_membership(const RatePoint& point, const MembershipMatrix& q) {
  const std::size_t ni = point.channel.num_inputs();
  const std::size_t nj = point.channel.num_outputs();
  if (q.num_symbols() != ni || q.num_sets() != nj) {
    throw std::invalid_argument("b_set_membership: membership dimensions disagree with point");
  }
  if (!point.converged) {
    throw std::invalid_argument("b_set_membership: point did not converge");
  }
  // 2^(s I_ij) = c_ij / (lambda_i P(y_j)); recovered in log space. At s = 0
  // the exponent is identically zero.
  std::vector<std::vector<double>> exponents(ni, std::vector<double>(nj));
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ni; ++i) {
    for (std::size_t j = 0; j < nj; ++j) {
      double e = 0.0;
      if (point.s != 0.0) {
        const double py = point.output_dist[j];
        e = py > 0.0 ? std::log2(point.channel.at(i, j)) - std::log2(point.lambda[i]) -
                           std::log2(py)
                     : -std::numeric_limits<double>::infinity();
      }
      exponents[i][j] = e;
      top = std::max(top, e);
    }
  }
  std::vector<std::vector<double>> rows(ni, std::vector<double>(nj));
  for (std::size_t i = 0; i < ni; ++i) {
    for (std::size_t j = 0; j < nj; ++j) {
      rows[i][j] = std::exp2(exponents[i][j] - top);
    }
  }
  return MembershipMatrix(std::move(rows));
}

double verify_eq21_identity(const RatePoint& point, const MembershipMatrix& q,
                            const ProbVector& prior) {
  if (!point.converged) {
    throw std::invalid_argument("verify_eq21_identity: point did not converge");
  }
  const std::size_t ni = q.num_symbols();
  const std::size_t nj = q.num_sets();
  if (prior.size() != ni || point.output_dist.size() != nj) {
    throw std::invalid_argument("verify_eq21_identity: dimensions disagree");
  }
  const std::vector<double> info = info_matrix(prior, q);
  const double s = point.s;

  std::vector<double> log2_py(nj);
  for (std::size_t j = 0; j < nj; ++j) {
    log2_py[j] = point.output_dist[j] > 0.0 ? std::log2(point.output_dist[j])
                                            : -std::numeric_limits<double>::infinity();
  }
  // m = max_ij 2^(s I_ij)
  double log2_m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ni; ++i) {
    for (std::size_t j = 0; j < nj; ++j) log2_m = std::max(log2_m, s * info[i * nj + j]);
  }

  double rate = 0.0;
  std::vector<double> e(nj);
  for (std::size_t i = 0; i < ni; ++i) {
    for (std::size_t j = 0; j < nj; ++j) e[j] = s * info[i * nj + j];
    // log2 Q(B_i) = log2 sum_j P(y_j) 2^(s I_ij) - log2 m
    const double log2_qb = log2_sum_exp2(log2_py, e) - log2_m;
    for (std::size_t j = 0; j < nj; ++j) {
      // P(y_j|B_i) = Q(B_i|y_j) P(y_j) / Q(B_i), assembled in log space so
      // vanishing weights cannot poison the finite log ratio they multiply.
      const double log2_w = (e[j] - log2_m) + log2_py[j] - log2_qb;
      const double weight = std::exp2(log2_w);
      if (weight == 0.0) continue;
      rate += prior[i] * weight * ((e[j] - log2_m) - log2_qb);
    }
  }
  return std::abs(point.r - rate);
}

double rate_of_limiting_errors(const ProbVector& source_y, const MembershipMatrix& q,
                               const ProbVector& prior_x) {
  if (source_y.size() != q.num_sets()) {
    throw std::invalid_argument("rate_of_limiting_errors: source length != membership rows");
  }
  if (prior_x.size() != q.num_symbols()) {
    throw std::invalid_argument("rate_of_limiting_errors: prior length != membership columns");
  }
  double rate = 0.0;
  for (std::size_t j = 0; j < q.num_sets(); ++j) {
    const double qa = logical_probability(prior_x, q, j);
    const ProbVector post = posterior_given_set(prior_x, q, j);
    double inner = 0.0;
    for (std::size_t i = 0; i < q.num_symbols(); ++i) {
      if (post[i] == 0.0) continue;
      inner += post[i] * (std::log2(floored(q.at(j, i))) - std::log2(qa));
    }
    rate += source_y[j] * inner;
  }
  return rate;
}

RatePoint rate_distortion_point(const ProbVector& prior,
                                const std::vector<std::vector<double>>& distortion, double s,
                                const SolverOptions& options) {
  if (distortion.size() != prior.size() || distortion.empty() || distortion.front().empty()) {
    throw std::invalid_argument("rate_distortion_point: distortion rows != prior length");
  }
  const std::size_t nj = distortion.front().size();
  std::vector<double> value;
  value.reserve(prior.size() * nj);
  for (const auto& row : distortion) {
    if (row.size() != nj) {
      throw std::invalid_argument("rate_distortion_point: ragged distortion matrix");
    }
    for (double dij : row) {
      if (!std::isfinite(dij) || dij < 0.0) {
        throw std::invalid_argument("rate_distortion_point: distortion must be finite and >= 0");
      }
      value.push_back(dij);
    }
  }
  return solve_parametric(prior, value, nj, s, options, std::nullopt);
}

double brute_force_min_rate(const ProbVector& prior, const MembershipMatrix& q, double g_target,
                            int grid_steps) {
  const std::size_t ni = q.num_symbols();
  const std::size_t nj = q.num_sets();
  if (prior.size() != ni) {
    throw std::invalid_argument("brute_force_min_rate: prior length != membership columns");
  }
  if (ni > 3 || nj > 3) {
    throw std::invalid_argument("brute_force_min_rate: alphabet larger than 3x3 refused");
  }
  if (grid_steps < 1 || grid_steps > 400) {
    throw std::invalid_argument("brute_force_min_rate: grid_steps must be in [1, 400]");
  }

  // All compositions of grid_steps into nj parts, as channel rows.
  std::vector<std::vector<double>> simplex_rows;
  std::vector<int> parts(nj, 0);
  const double inv = 1.0 / static_cast<double>(grid_steps);
  auto emit = [&](auto&& self, std::size_t pos, int remaining) -> void {
    if (pos + 1 == nj) {
      parts[pos] = remaining;
      std::vector<double> row(nj);
      for (std::size_t j = 0; j < nj; ++j) row[j] = parts[j] * inv;
      simplex_rows.push_back(std::move(row));
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      parts[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  emit(emit, 0, grid_steps);

  double combos = 1.0;
  for (std::size_t i = 0; i < ni; ++i) combos *= static_cast<double>(simplex_rows.size());
  if (combos > 2e8) {
    throw std::invalid_argument("brute_force_min_rate: grid too large to enumerate");
  }

  const std::vector<double> info = info_matrix(prior, q);
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> pick(ni, 0);

  // Odometer over one simplex row per source symbol.
  while (true) {
    double g = 0.0;
    for (std::size_t i = 0; i < ni; ++i) {
      const auto& row = simplex_rows[pick[i]];
      for (std::size_t j = 0; j < nj; ++j) g += prior[i] * row[j] * info[i * nj + j];
    }
    if (g >= g_target - 1e-12) {
      double py[3] = {0, 0, 0};
      for (std::size_t i = 0; i < ni; ++i) {
        const auto& row = simplex_rows[pick[i]];
        for (std::size_t j = 0; j < nj; ++j) py[j] += prior[i] * row[j];
      }
      double mi = 0.0;
      for (std::size_t i = 0; i < ni; ++i) {
        const auto& row = simplex_rows[pick[i]];
        for (std::size_t j = 0; j < nj; ++j) {
          if (row[j] > 0.0 && py[j] > 0.0) {
            mi += prior[i] * row[j] * std::log2(row[j] / py[j]);
          }
        }
      }
      best = std::min(best, mi);
    }
    std::size_t pos = 0;
    while (pos < ni && ++pick[pos] == simplex_rows.size()) {
      pick[pos] = 0;
      ++pos;
    }
    if (pos == ni) break;
  }
  if (!std::isfinite(best)) {
    throw std::domain_error("brute_force_min_rate: no grid channel meets the fidelity target");
  }
  return best;
}

}  // namespace ratefid
