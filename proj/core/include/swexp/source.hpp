#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "swexp/matrix.hpp"

namespace swexp {

/// Finite joint pmf over X x Y. Immutable after construction; rows index X.
///
/// Construction normalizes the matrix and rejects negative, non-finite, or
/// all-zero input. Marginals, conditionals and the support of X are
/// precomputed so the exponent evaluators never divide by stale sums.
class JointSource {
 public:
  static JointSource from_pmf(const Matrix& pmf);

  std::size_t x_size() const { return pmf_.rows(); }
  std::size_t y_size() const { return pmf_.cols(); }

  double p(std::size_t x, std::size_t y) const { return pmf_(x, y); }
  double log_p(std::size_t x, std::size_t y) const { return log_pmf_(x, y); }
  double px(std::size_t x) const { return px_[x]; }
  double py(std::size_t y) const { return py_[y]; }

  /// P_{X|Y}(x|y); zero-probability columns yield 0.
  double x_given_y(std::size_t x, std::size_t y) const {
    return py_[y] > 0.0 ? pmf_(x, y) / py_[y] : 0.0;
  }
  /// P_{Y|X}(y|x); zero-probability rows yield 0.
  double y_given_x(std::size_t y, std::size_t x) const {
    return px_[x] > 0.0 ? pmf_(x, y) / px_[x] : 0.0;
  }

  /// S(X) = {x : P_X(x) > 0}; nonempty by construction.
  const std::vector<std::size_t>& support_x() const { return support_x_; }

  const Matrix& pmf() const { return pmf_; }
  std::span<const double> px() const { return px_; }
  std::span<const double> py() const { return py_; }

 private:
  friend JointSource validate_source(const Matrix& pmf);
  explicit JointSource(Matrix pmf);

  Matrix pmf_;
  Matrix log_pmf_;
  std::vector<double> px_;
  std::vector<double> py_;
  std::vector<std::size_t> support_x_;
};

/// Validating constructor for a JointSource.
/// Throws NonFiniteError, NegativeProbabilityError or ZeroMassError.
JointSource validate_source(const Matrix& pmf);

/// H(X|Y) in nats, summing over the support only.
double conditional_entropy(const JointSource& source);

/// H(p) in nats with 0 log 0 = 0.
double entropy(std::span<const double> p);

/// sum_i p_i log(p_i / q_i); +inf when p puts mass where q has none.
/// Throws DimensionMismatchError when the supports have different sizes.
double kl_divergence(std::span<const double> p, std::span<const double> q);

}  // namespace swexp
