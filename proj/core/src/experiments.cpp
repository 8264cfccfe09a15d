#include "ratefid/experiments.hpp"

#include <cmath>
#include <stdexcept>

#include "ratefid/discrimination.hpp"

namespace ratefid {

namespace {

struct GapSample {
  RatePoint point;
  double gap = 0.0;
};

GapSample solve_gap(const RateCurve& curve, double s, const ProbVector& init) {
  RatePoint p = rate_fidelity_point(curve.prior, curve.membership, s, {}, init);
  const double gap = p.r - p.g;
  return {std::move(p), gap};
}

}  // namespace

MatchingPoint find_matching_point(const RateCurve& curve) {
  const auto& pts = curve.points;
  std::size_t best = pts.size();
  for (std::size_t idx = 0; idx < pts.size(); ++idx) {
    if (!pts[idx].converged) continue;
    if (best == pts.size() || pts[idx].r - pts[idx].g < pts[best].r - pts[best].g) {
      best = idx;
    }
  }
  if (best == pts.size()) {
    throw std::domain_error("find_matching_point: no converged point on the curve");
  }

  MatchingPoint mp{.s_star = pts[best].s,
                   .g_star = pts[best].g,
                   .r_star = pts[best].r,
                   .gap = pts[best].r - pts[best].g,
                   .at_boundary = best == 0 || best + 1 == pts.size()};
  if (mp.at_boundary) {
    return mp;  // no interior bracket to refine
  }

  // Golden-section refinement of min (r - g) on [s_{best-1}, s_{best+1}],
  // warm-starting every solve from the discrete minimizer's distribution.
  const ProbVector& warm = pts[best].output_dist;
  double lo = pts[best - 1].s;
  double hi = pts[best + 1].s;
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  GapSample s1 = solve_gap(curve, x1, warm);
  GapSample s2 = solve_gap(curve, x2, warm);
  while (hi - lo > 1e-7) {
    if (s1.gap <= s2.gap) {
      hi = x2;
      x2 = x1;
      s2 = std::move(s1);
      x1 = hi - kInvPhi * (hi - lo);
      s1 = solve_gap(curve, x1, warm);
    } else {
      lo = x1;
      x1 = x2;
      s1 = std::move(s2);
      x2 = lo + kInvPhi * (hi - lo);
      s2 = solve_gap(curve, x2, warm);
    }
  }
  const GapSample& win = s1.gap <= s2.gap ? s1 : s2;
  if (win.gap <= mp.gap) {
    mp.s_star = win.point.s;
    mp.g_star = win.point.g;
    mp.r_star = win.point.r;
    mp.gap = win.gap;
  }
  return mp;
}

Fig5Result fig5_experiment(int k, const std::vector<double>& d_list,
                           const std::vector<double>& s_grid) {
  if (d_list.empty()) {
    throw std::invalid_argument("fig5_experiment: empty d list");
  }
  for (double d : d_list) {
    if (!(d > 0.0)) throw std::invalid_argument("fig5_experiment: d must be positive");
  }
  const int b = (1 << k) - 1;
  const ProbVector prior = gray_level_source(k);

  Fig5Result result;
  result.k = k;
  for (double d : d_list) {
    const MembershipMatrix q = gaussian_membership({.max_level = b, .discrimination = d});
    RateCurve curve = rate_fidelity_curve(prior, q, s_grid);
    for (const auto& p : curve.points) {
      result.rows.push_back({d, k, p.s, p.g, p.r, p.converged});
    }
    MatchingPoint mp = find_matching_point(curve);
    result.curves.push_back({d, std::move(curve), mp});
  }
  return result;
}

Fig6Result fig6_experiment(double d, const std::vector<int>& k_list) {
  if (!(d > 0.0)) {
    throw std::invalid_argument("fig6_experiment: d must be positive");
  }
  if (k_list.empty()) {
    throw std::invalid_argument("fig6_experiment: empty k list");
  }
  for (std::size_t idx = 1; idx < k_list.size(); ++idx) {
    if (k_list[idx] <= k_list[idx - 1]) {
      throw std::invalid_argument("fig6_experiment: k list must be ascending");
    }
  }

  Fig6Result result;
  result.d = d;
  const std::vector<double> grid = default_s_grid();
  for (int k : k_list) {
    const int b = (1 << k) - 1;
    const ProbVector prior = gray_level_source(k);
    const MembershipMatrix q = gaussian_membership({.max_level = b, .discrimination = d});
    RateCurve curve = rate_fidelity_curve(prior, q, grid);
    result.rows.push_back({k, find_matching_point(curve)});
  }

  // Plateau: smallest k' in the list such that no later k gains
  // kPlateauThreshold bits of matching information over it.
  for (std::size_t idx = 0; idx < result.rows.size(); ++idx) {
    bool flat = true;
    for (std::size_t later = idx + 1; later < result.rows.size(); ++later) {
      if (result.rows[later].matching.g_star - result.rows[idx].matching.g_star >=
          kPlateauThreshold) {
        flat = false;
        break;
      }
    }
    if (flat) {
      result.plateau_k = result.rows[idx].k;
      result.plateau_found = true;
      break;
    }
  }
  return result;
}

}  // namespace ratefid
