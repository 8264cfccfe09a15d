#ifndef RATEFID_RATE_SOLVER_HPP
#define RATEFID_RATE_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "ratefid/prob.hpp"

namespace ratefid {

/// Fixed-point iteration controls for the alternating-minimization solver.
struct SolverOptions {
  double tolerance = 1e-10;     // sup-norm change in the output distribution
  long max_iterations = 100000;
};

/// Guard on the slope parameter; exponents 2^(s*I_ij) are evaluated in log
/// space, but |s| beyond this is rejected as a precondition violation.
inline constexpr double kMaxSlope = 50.0;

/// Output probabilities below this are kept but flagged as negligible.
inline constexpr double kNegligibleOutput = 1e-15;

/// One solved point of the parametric rate-fidelity (or rate-distortion)
/// function: slope s, fidelity/distortion g, rate r, multipliers lambda_i,
/// converged output distribution and optimizing channel.
struct RatePoint {
  double s = 0.0;
  double g = 0.0;                    // generalized mutual information (bits)
  double r = 0.0;                    // Shannon mutual information (bits)
  std::vector<double> lambda;        // 1 / sum_j P(y_j) 2^(s I_ij)
  ProbVector output_dist;            // converged P(y_j)
  Channel channel;                   // optimizing P(y_j|x_i)
  bool converged = false;
  long iterations = 0;
  std::vector<bool> output_negligible;  // P(y_j) < kNegligibleOutput
};

enum class CurveMode {
  kWarmStart,  // serial, each point initialized from the previous one
  kColdStart,  // points independent (parallelizable), uniform initialization
};

/// Solved R(G) curve of one instance, ordered by increasing s. Keeps the
/// instance so the matching point can be refined between grid points.
struct RateCurve {
  ProbVector prior;
  MembershipMatrix membership;
  std::vector<double> s_grid;
  std::vector<RatePoint> points;

  /// Linear interpolation of the rate at fidelity level g between the two
  /// bracketing converged points. Throws std::domain_error when g is outside
  /// the solved range.
  double interpolate_rate_at(double g) const;
};

/// The 61-point default slope grid: -2.0..0.0 step 0.2, then 0.1..5.0
/// step 0.1.
std::vector<double> default_s_grid();

/// One point of the rate-fidelity function R(G) for the instance (prior, q):
/// minimum Shannon mutual information subject to generalized mutual
/// information fixed by the slope parameter s. Solved by Blahut-style
/// alternating minimization over the output distribution; `init` overrides
/// the uniform starting distribution (warm start).
RatePoint rate_fidelity_point(const ProbVector& prior, const MembershipMatrix& q, double s,
                              const SolverOptions& options = {},
                              const std::optional<ProbVector>& init = std::nullopt);

/// Full curve over an ascending slope grid.
RateCurve rate_fidelity_curve(const ProbVector& prior, const MembershipMatrix& q,
                              std::vector<double> s_grid, CurveMode mode = CurveMode::kWarmStart,
                              const SolverOptions& options = {});

/// Fuzzy B-sets over the output alphabet realizing the solved point:
/// Q(B_i|y_j) = 2^(s I_ij) / m with m the maximum of 2^(s I_ij). Rows are
/// indexed by source symbol x_i, columns by output y_j; the maximum entry is
/// exactly one.
MembershipMatrix b_set_membership(const RatePoint& point, const MembershipMatrix& q);

/// Residual |R_parametric - R_eq| between the parametric rate and the
/// rate-of-limiting-errors expression evaluated on the B-sets of the solved
/// point. Small residuals (< 1e-8 bits) confirm the identity.
double verify_eq21_identity(const RatePoint& point, const MembershipMatrix& q,
                            const ProbVector& prior);

/// Rate-of-limiting-errors of source P(Y) encoded into X under the
/// error-limiting sets A_j with membership q (rows j over sets, columns i
/// over X) and prior Q(X) = prior_x:
///   R(A) = sum_j sum_i P(y_j) Q(x_i|A_j) log2[Q(A_j|x_i)/Q(A_j)].
/// For clear sets this equals the generalized entropy
/// -sum_j P(y_j) log2 Q(A_j).
double rate_of_limiting_errors(const ProbVector& source_y, const MembershipMatrix& q,
                               const ProbVector& prior_x);

/// Classical rate-distortion point: the same parametric machinery with the
/// information matrix replaced by a distortion matrix d(x_i, y_j) >= 0. The
/// standard branch uses s <= 0; the g slot of the result holds the average
/// distortion.
RatePoint rate_distortion_point(const ProbVector& prior,
                                const std::vector<std::vector<double>>& distortion, double s,
                                const SolverOptions& options = {});

/// Exhaustive-grid oracle for small instances: minimum Shannon mutual
/// information over all channels on a simplex grid whose generalized mutual
/// information is at least g_target. Refuses alphabets larger than 3x3 or
/// grids above 400 steps per simplex dimension.
double brute_force_min_rate(const ProbVector& prior, const MembershipMatrix& q, double g_target,
                            int grid_steps);

}  // namespace ratefid

#endif  // RATEFID_RATE_SOLVER_HPP
