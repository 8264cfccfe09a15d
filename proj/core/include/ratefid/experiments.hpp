#ifndef RATEFID_EXPERIMENTS_HPP
#define RATEFID_EXPERIMENTS_HPP

#include <vector>

#include "ratefid/rate_solver.hpp"

namespace ratefid {

/// Point where the R(G) curve touches the line R = G: objective information
/// equals subjective information. `gap` is the minimum of r - g over the
/// curve; `at_boundary` warns that the minimizer sat on an end of the grid.
struct MatchingPoint {
  double s_star = 0.0;
  double g_star = 0.0;
  double r_star = 0.0;
  double gap = 0.0;
  bool at_boundary = false;
};

/// One solved curve point in an experiment sweep.
struct ExperimentRow {
  double d = 0.0;
  int k = 0;
  double s = 0.0;
  double g = 0.0;
  double r = 0.0;
  bool converged = false;
};

struct Fig5Curve {
  double d = 0.0;
  RateCurve curve;
  MatchingPoint matching;
};

struct Fig5Result {
  int k = 0;
  std::vector<ExperimentRow> rows;
  std::vector<Fig5Curve> curves;  // one per d, in d_list order
};

struct Fig6Row {
  int k = 0;
  MatchingPoint matching;
};

struct Fig6Result {
  double d = 0.0;
  std::vector<Fig6Row> rows;     // in k_list order
  int plateau_k = 0;             // smallest k' after which g* gains < threshold
  bool plateau_found = false;
};

/// Threshold below which the matching information is considered to have
/// stopped increasing with the digitized bit count.
inline constexpr double kPlateauThreshold = 0.02;

/// Minimizes r - g over the curve, then refines by golden-section search on
/// s between the grid points bracketing the discrete minimizer. Throws when
/// no point of the curve converged.
MatchingPoint find_matching_point(const RateCurve& curve);

/// Gray-level experiment for b = 2^k - 1: one R(G) curve per discrimination
/// parameter in d_list, each with its matching point.
Fig5Result fig5_experiment(int k, const std::vector<double>& d_list,
                           const std::vector<double>& s_grid);

/// Matching information as a function of the digitized bit count k at fixed
/// discrimination d, with plateau detection.
Fig6Result fig6_experiment(double d, const std::vector<int>& k_list);

}  // namespace ratefid

#endif  // RATEFID_EXPERIMENTS_HPP
