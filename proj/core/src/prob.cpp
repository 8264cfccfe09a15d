#include "ratefid/prob.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ratefid {

namespace {

// Flattens a vector-of-rows into row-major storage, enforcing a rectangular
// shape with at least one row and one column.
std::vector<double> flatten(const std::vector<std::vector<double>>& rows,
                            std::size_t& out_rows, std::size_t& out_cols,
                            const char* what) {
  if (rows.empty() || rows.front().empty()) {
    throw std::invalid_argument(std::string(what) + ": empty matrix");
  }
  out_rows = rows.size();
  out_cols = rows.front().size();
  std::vector<double> data;
  data.reserve(out_rows * out_cols);
  for (const auto& r : rows) {
    if (r.size() != out_cols) {
      throw std::invalid_argument(std::string(what) + ": ragged rows");
    }
    data.insert(data.end(), r.begin(), r.end());
  }
  return data;
}

}  // namespace

ProbVector::ProbVector(std::vector<double> probs, Normalize normalize)
    : probs_(std::move(probs)) {
  if (probs_.empty()) {
    throw std::invalid_argument("ProbVector: empty");
  }
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) {
      throw std::invalid_argument("ProbVector: negative or NaN entry");
    }
    sum += p;
  }
  if (normalize == Normalize::kYes) {
    if (sum <= 0.0) {
      throw std::invalid_argument("ProbVector: cannot normalize zero weights");
    }
    for (double& p : probs_) p /= sum;
  } else if (std::abs(sum - 1.0) > kSumTolerance) {
    throw std::invalid_argument("ProbVector: entries sum to " + std::to_string(sum) +
                                ", expected 1 within 1e-9");
  }
}

bool ProbVector::full_support() const {
  for (double p : probs_) {
    if (p <= 0.0) return false;
  }
  return true;
}

MembershipMatrix::MembershipMatrix(std::vector<std::vector<double>> rows) {
  data_ = flatten(rows, rows_, cols_, "MembershipMatrix");
  for (std::size_t j = 0; j < rows_; ++j) {
    double row_max = 0.0;
    for (std::size_t i = 0; i < cols_; ++i) {
      const double v = at(j, i);
      if (!(v >= 0.0) || v > 1.0) {
        throw std::invalid_argument("MembershipMatrix: grade outside [0,1]");
      }
      row_max = std::max(row_max, v);
    }
    if (row_max < kMembershipFloor) {
      throw std::invalid_argument("MembershipMatrix: row " + std::to_string(j) +
                                  " is everywhere below 1e-12");
    }
  }
}

Channel::Channel(std::vector<std::vector<double>> rows) {
  data_ = flatten(rows, rows_, cols_, "Channel");
  for (std::size_t i = 0; i < rows_; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
      const double v = at(i, j);
      if (!(v >= 0.0)) {
        throw std::invalid_argument("Channel: negative or NaN entry");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
      throw std::invalid_argument("Channel: row " + std::to_string(i) + " sums to " +
                                  std::to_string(sum) + ", expected 1 within 1e-9");
    }
  }
}

JointDistribution::JointDistribution(std::vector<std::vector<double>> rows) {
  data_ = flatten(rows, rows_, cols_, "JointDistribution");
  double total = 0.0;
  for (double v : data_) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument("JointDistribution: negative or NaN entry");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw std::invalid_argument("JointDistribution: total is " + std::to_string(total) +
                                ", expected 1 within 1e-9");
  }
}

double logical_probability(const ProbVector& prior, const MembershipMatrix& q, std::size_t j) {
  if (prior.size() != q.num_symbols()) {
    throw std::invalid_argument("logical_probability: prior length != membership columns");
  }
  if (j >= q.num_sets()) {
    throw std::invalid_argument("logical_probability: set index out of range");
  }
  double qa = 0.0;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    qa += prior[i] * q.at(j, i);
  }
  if (qa < 1e-300) {
    throw std::domain_error("logical_probability: degenerate set, Q(A_j) < 1e-300");
  }
  return qa;
}

ProbVector posterior_given_set(const ProbVector& prior, const MembershipMatrix& q, std::size_t j) {
  const double qa = logical_probability(prior, q, j);
  std::vector<double> post(prior.size());
  for (std::size_t i = 0; i < prior.size(); ++i) {
    post[i] = prior[i] * q.at(j, i) / qa;
  }
  return ProbVector(std::move(post), Normalize::kYes);
}

JointDistribution joint_from(const ProbVector& prior, const Channel& channel) {
  if (prior.size() != channel.num_inputs()) {
    throw std::invalid_argument("joint_from: prior length != channel rows");
  }
  std::vector<std::vector<double>> rows(prior.size());
  for (std::size_t i = 0; i < prior.size(); ++i) {
    rows[i].resize(channel.num_outputs());
    for (std::size_t j = 0; j < channel.num_outputs(); ++j) {
      rows[i][j] = prior[i] * channel.at(i, j);
    }
  }
  return JointDistribution(std::move(rows));
}

ProbVector output_marginal(const JointDistribution& joint) {
  std::vector<double> marginal(joint.num_y(), 0.0);
  for (std::size_t i = 0; i < joint.num_x(); ++i) {
    for (std::size_t j = 0; j < joint.num_y(); ++j) {
      marginal[j] += joint.at(i, j);
    }
  }
  return ProbVector(std::move(marginal), Normalize::kYes);
}

}  // namespace ratefid
