#ifndef RATEFID_DISCRIMINATION_HPP
#define RATEFID_DISCRIMINATION_HPP

#include <cstdint>
#include <vector>

#include "ratefid/prob.hpp"

namespace ratefid {

/// Parameters of the Gaussian visual-discrimination model over gray levels
/// 0..max_level. Smaller discrimination means sharper perception.
struct GaussianDiscriminationSpec {
  int max_level = 0;        // b = 2^k - 1
  double discrimination = 0.0;  // d, in gray-level units
};

/// Confusing-probability matrix Q(A_j|x_i) = exp(-(i-j)^2 / (2 d^2)) over the
/// square alphabet {0..b}, floored at kMembershipFloor. Diagonal entries are
/// exactly one.
MembershipMatrix gaussian_membership(const GaussianDiscriminationSpec& spec);

/// n repeated clear-set observations of one fuzzy set: row k is the indicator
/// vector of clear set s_jk over the I source symbols.
struct ClearSetSample {
  std::vector<std::vector<std::uint8_t>> indicators;
};

/// Empirical membership row Q(A_j|x_i) = (1/n) sum_k Q(s_jk|x_i): the column
/// means of the indicator matrix.
std::vector<double> empirical_membership(const ClearSetSample& samples);

/// Gray-level source for k-bit pixels: P(x_i) proportional to the normal
/// density kernel with mean b/2 and standard deviation b/8 evaluated at the
/// integers i = 0..b = 2^k - 1, then normalized. Valid for 1 <= k <= 16.
ProbVector gray_level_source(int k);

}  // namespace ratefid

#endif  // RATEFID_DISCRIMINATION_HPP
