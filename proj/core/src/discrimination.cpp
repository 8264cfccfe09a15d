#include "ratefid/discrimination.hpp"

#include <cmath>
#include <stdexcept>

namespace ratefid {

MembershipMatrix gaussian_membership(const GaussianDiscriminationSpec& spec) {
  if (spec.max_level < 1) {
    throw std::domain_error("gaussian_membership: max_level must be >= 1");
  }
  if (!(spec.discrimination > 0.0)) {
    throw std::domain_error("gaussian_membership: discrimination must be positive");
  }
  const std::size_t n = static_cast<std::size_t>(spec.max_level) + 1;
  const double two_d2 = 2.0 * spec.discrimination * spec.discrimination;
  std::vector<std::vector<double>> rows(n);
  for (std::size_t j = 0; j < n; ++j) {
    rows[j].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double diff = static_cast<double>(i) - static_cast<double>(j);
      rows[j][i] = std::max(std::exp(-diff * diff / two_d2), kMembershipFloor);
    }
  }
  return MembershipMatrix(std::move(rows));
}

std::vector<double> empirical_membership(const ClearSetSample& samples) {
  if (samples.indicators.empty() || samples.indicators.front().empty()) {
    throw std::domain_error("empirical_membership: empty sample");
  }
  const std::size_t n = samples.indicators.size();
  const std::size_t width = samples.indicators.front().size();
  std::vector<double> row(width, 0.0);
  for (const auto& clear_set : samples.indicators) {
    if (clear_set.size() != width) {
      throw std::invalid_argument("empirical_membership: ragged indicator rows");
    }
    for (std::size_t i = 0; i < width; ++i) {
      if (clear_set[i] > 1) {
        throw std::invalid_argument("empirical_membership: indicators must be 0 or 1");
      }
      row[i] += clear_set[i];
    }
  }
  for (double& v : row) v /= static_cast<double>(n);
  return row;
}

ProbVector gray_level_source(int k) {
  if (k < 1 || k > 16) {
    throw std::domain_error("gray_level_source: k must be in [1, 16]");
  }
  const std::size_t n = std::size_t{1} << k;
  const double b = static_cast<double>(n - 1);
  const double mean = b / 2.0;
  const double sigma = b / 8.0;
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = (static_cast<double>(i) - mean) / sigma;
    weights[i] = std::exp(-0.5 * z * z);
  }
  return ProbVector(std::move(weights), Normalize::kYes);
}

}  // namespace ratefid
