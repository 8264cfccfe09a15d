#ifndef RATEFID_MEASURES_HPP
#define RATEFID_MEASURES_HPP

#include <cstdint>
#include <optional>

#include "ratefid/prob.hpp"

namespace ratefid {

// All information quantities in this library are measured in bits (log base 2).

/// Average-information summary of one (prior, channel, membership) instance.
/// The forecast distributions inside the logarithms are the matched ones:
/// Q(x_i) = P(x_i) and Q(x_i|A_j) the Bayes posterior of the fuzzy set.
struct InfoDecomposition {
  double generalized_mutual_info = 0.0;       // I(X;Y), subjective
  double forecasting_entropy = 0.0;           // H(X)
  double posterior_forecasting_entropy = 0.0; // H(X|Y)
  double generalized_entropy = 0.0;           // H(Y)
  double fuzzy_entropy = 0.0;                 // H(Y|X)
  double shannon_mutual_info = 0.0;           // I_s(X;Y), objective
};

/// Optional forecast override for the distributions inside the log ratio of
/// the generalized Kullback formula. Defaults (empty optionals) reproduce the
/// matched case: prior for Q(x_i) and the Bayes posterior for Q(x_i|A_j).
struct Forecast {
  std::optional<ProbVector> posterior;  // Q(x_i|A_j)
  std::optional<ProbVector> prior;      // Q(x_i)
};

/// log2(n) for n equally likely events. n = 0 is a domain error.
double hartley_info(std::uint64_t n);

/// log2(n1/n2): information gained when the uncertain extension shrinks from
/// n1 to n2. Also applies to probabilities via relative_info(p2, p1).
double relative_info(double n1, double n2);

/// Generalized information log2[Q(A_j|x_i) / Q(A_j)] of message y_j about
/// symbol x_i. Membership grades are floored at kMembershipFloor before the
/// log, so misleading messages carry finite negative information.
double semantic_info(const ProbVector& prior, const MembershipMatrix& q,
                     std::size_t i, std::size_t j);

/// Generalized Kullback information of message y_j:
///   I(X;y_j) = sum_i P(x_i|y_j) log2[Q(x_i|A_j) / Q(x_i)].
/// `sampling_posterior` is P(x|y_j); the log ratio uses the matched forecasts
/// unless an explicit Forecast override is supplied.
double generalized_kullback(const ProbVector& sampling_posterior, const ProbVector& prior,
                            const MembershipMatrix& q, std::size_t j);
double generalized_kullback(const ProbVector& sampling_posterior, const ProbVector& prior,
                            const MembershipMatrix& q, std::size_t j, const Forecast& forecast);

/// All six average measures of one instance. Requires matching dimensions:
/// prior over I symbols, channel I x J, membership J x I.
InfoDecomposition info_decomposition(const ProbVector& prior, const Channel& channel,
                                     const MembershipMatrix& q);

/// Shannon entropy -sum_i p_i log2 p_i.
double shannon_entropy(const ProbVector& p);

/// Cross entropy -sum_i p_i log2 f_i of source p against forecast f.
/// Minimal (and equal to shannon_entropy) when f = p.
double forecasting_entropy(const ProbVector& p, const ProbVector& forecast);

/// Shannon mutual information of the joint prior * channel, in bits.
double shannon_mutual_information(const ProbVector& prior, const Channel& channel);

}  // namespace ratefid

#endif  // RATEFID_MEASURES_HPP
