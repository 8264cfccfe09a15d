#ifndef RATEFID_PROB_HPP
#define RATEFID_PROB_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace ratefid {

// Tolerance for "sums to one" checks on construction.
inline constexpr double kSumTolerance = 1e-9;

// Smallest membership grade a fuzzy-set row must reach somewhere, and the
// floor applied to membership grades before taking logarithms.
inline constexpr double kMembershipFloor = 1e-12;

enum class Normalize { kNo, kYes };

/// A discrete probability distribution over an indexed alphabet 0..n-1.
/// Entries are validated (nonnegative, summing to one within kSumTolerance)
/// on construction; pass Normalize::kYes to rescale raw nonnegative weights.
class ProbVector {
 public:
  explicit ProbVector(std::vector<double> probs, Normalize normalize = Normalize::kNo);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& values() const { return probs_; }

  bool full_support() const;

 private:
  std::vector<double> probs_;
};

/// Membership grades Q(A_j|x_i) in [0,1]; row j holds the grades of every
/// source symbol x_i in fuzzy set A_j. Clear sets are the binary special
/// case. Every row must contain at least one grade >= kMembershipFloor.
class MembershipMatrix {
 public:
  explicit MembershipMatrix(std::vector<std::vector<double>> rows);

  std::size_t num_sets() const { return rows_; }      // J
  std::size_t num_symbols() const { return cols_; }   // I
  double at(std::size_t j, std::size_t i) const { return data_[j * cols_ + i]; }
  std::span<const double> row(std::size_t j) const {
    return {data_.data() + j * cols_, cols_};
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

/// Conditional distribution P(y_j|x_i); row i is a probability vector over
/// the output alphabet.
class Channel {
 public:
  explicit Channel(std::vector<std::vector<double>> rows);

  std::size_t num_inputs() const { return rows_; }    // I
  std::size_t num_outputs() const { return cols_; }   // J
  double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

/// Joint distribution P(x_i, y_j); all entries nonnegative, total one.
class JointDistribution {
 public:
  explicit JointDistribution(std::vector<std::vector<double>> rows);

  std::size_t num_x() const { return rows_; }
  std::size_t num_y() const { return cols_; }
  double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

/// Logical probability Q(A_j) = sum_i P(x_i) Q(A_j|x_i).
/// Throws std::invalid_argument on dimension mismatch and std::domain_error
/// when the set is degenerate (Q(A_j) < 1e-300).
double logical_probability(const ProbVector& prior, const MembershipMatrix& q, std::size_t j);

/// Bayes posterior P(x_i|A_j) = Q(A_j|x_i) P(x_i) / Q(A_j).
ProbVector posterior_given_set(const ProbVector& prior, const MembershipMatrix& q, std::size_t j);

/// Joint P(x_i, y_j) = P(x_i) P(y_j|x_i).
JointDistribution joint_from(const ProbVector& prior, const Channel& channel);

/// Output marginal P(y_j) = sum_i P(x_i, y_j).
ProbVector output_marginal(const JointDistribution& joint);

}  // namespace ratefid

#endif  // RATEFID_PROB_HPP
