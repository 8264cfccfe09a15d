#include "ratefid/measures.hpp"

#include <cmath>
#include <stdexcept>

namespace ratefid {

namespace {

double floored(double membership) { return std::max(membership, kMembershipFloor); }

void check_instance_dims(const ProbVector& prior, const MembershipMatrix& q) {
  if (prior.size() != q.num_symbols()) {
    throw std::invalid_argument("measures: prior length != membership columns");
  }
}

}  // namespace

double hartley_info(std::uint64_t n) {
  if (n == 0) {
    throw std::domain_error("hartley_info: n must be positive");
  }
  return std::log2(static_cast<double>(n));
}

double relative_info(double n1, double n2) {
  if (!(n1 > 0.0) || !(n2 > 0.0)) {
    throw std::domain_error("relative_info: arguments must be positive");
  }
  return std::log2(n1 / n2);
}

double semantic_info(const ProbVector& prior, const MembershipMatrix& q,
                     std::size_t i, std::size_t j) {
  check_instance_dims(prior, q);
  if (i >= q.num_symbols() || j >= q.num_sets()) {
    throw std::invalid_argument("semantic_info: index out of range");
  }
  const double qa = logical_probability(prior, q, j);
  return std::log2(floored(q.at(j, i))) - std::log2(qa);
}

double generalized_kullback(const ProbVector& sampling_posterior, const ProbVector& prior,
                            const MembershipMatrix& q, std::size_t j) {
  return generalized_kullback(sampling_posterior, prior, q, j, Forecast{});
}

double generalized_kullback(const ProbVector& sampling_posterior, const ProbVector& prior,
                            const MembershipMatrix& q, std::size_t j, const Forecast& forecast) {
  check_instance_dims(prior, q);
  if (sampling_posterior.size() != prior.size()) {
    throw std::invalid_argument("generalized_kullback: posterior length != prior length");
  }
  if (j >= q.num_sets()) {
    throw std::invalid_argument("generalized_kullback: set index out of range");
  }
  const double qa = logical_probability(prior, q, j);
  const ProbVector* fpost = forecast.posterior ? &*forecast.posterior : nullptr;
  const ProbVector* fprior = forecast.prior ? &*forecast.prior : nullptr;
  if ((fpost && fpost->size() != prior.size()) || (fprior && fprior->size() != prior.size())) {
    throw std::invalid_argument("generalized_kullback: forecast length != prior length");
  }

  double info = 0.0;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    const double w = sampling_posterior[i];
    if (w == 0.0) continue;  // 0 * log(.) := 0
    // Matched case: Q(x_i|A_j)/Q(x_i) = Q(A_j|x_i)/Q(A_j) by Bayes.
    const double num = fpost ? (*fpost)[i] : floored(q.at(j, i)) * prior[i] / qa;
    const double den = fprior ? (*fprior)[i] : prior[i];
    info += w * (std::log2(num) - std::log2(den));
  }
  return info;
}

InfoDecomposition info_decomposition(const ProbVector& prior, const Channel& channel,
                                     const MembershipMatrix& q) {
  check_instance_dims(prior, q);
  if (channel.num_inputs() != prior.size() || channel.num_outputs() != q.num_sets()) {
    throw std::invalid_argument("info_decomposition: channel dimensions disagree");
  }
  const std::size_t ni = prior.size();
  const std::size_t nj = q.num_sets();

  const JointDistribution joint = joint_from(prior, channel);
  const ProbVector py = output_marginal(joint);

  std::vector<double> log_qa(nj);
  for (std::size_t j = 0; j < nj; ++j) {
    log_qa[j] = std::log2(logical_probability(prior, q, j));
  }

  InfoDecomposition out;
  out.forecasting_entropy = shannon_entropy(prior);  // matched forecast Q(X) = P(X)
  for (std::size_t j = 0; j < nj; ++j) {
    out.generalized_entropy -= py[j] * log_qa[j];
  }
  for (std::size_t i = 0; i < ni; ++i) {
    const double log_prior = prior[i] > 0.0 ? std::log2(prior[i]) : 0.0;
    for (std::size_t j = 0; j < nj; ++j) {
      const double w = joint.at(i, j);
      if (w == 0.0) continue;
      const double log_memb = std::log2(floored(q.at(j, i)));
      out.fuzzy_entropy -= w * log_memb;
      // Matched posterior forecast Q(x_i|A_j) = Q(A_j|x_i) P(x_i) / Q(A_j).
      out.posterior_forecasting_entropy -= w * (log_memb + log_prior - log_qa[j]);
      out.generalized_mutual_info += w * (log_memb - log_qa[j]);
      if (py[j] > 0.0) {
        out.shannon_mutual_info += w * std::log2(channel.at(i, j) / py[j]);
      }
    }
  }
  return out;
}

double shannon_entropy(const ProbVector& p) {
  double h = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) h -= p[i] * std::log2(p[i]);
  }
  return h;
}

double forecasting_entropy(const ProbVector& p, const ProbVector& forecast) {
  if (p.size() != forecast.size()) {
    throw std::invalid_argument("forecasting_entropy: length mismatch");
  }
  double h = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) h -= p[i] * std::log2(forecast[i]);
  }
  return h;
}

double shannon_mutual_information(const ProbVector& prior, const Channel& channel) {
  const JointDistribution joint = joint_from(prior, channel);
  const ProbVector py = output_marginal(joint);
  double mi = 0.0;
  for (std::size_t i = 0; i < joint.num_x(); ++i) {
    for (std::size_t j = 0; j < joint.num_y(); ++j) {
      const double w = joint.at(i, j);
      if (w > 0.0 && py[j] > 0.0) {
        mi += w * std::log2(channel.at(i, j) / py[j]);
      }
    }
  }
  return mi;
}

}  // namespace ratefid
