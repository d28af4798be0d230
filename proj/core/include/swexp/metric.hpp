#pragma once

#include <cstddef>

#include "swexp/matrix.hpp"
#include "swexp/source.hpp"

namespace swexp {

/// Nonnegative decoding metric q(x, y). Not required to be normalized; the
/// maximum-metric decoder only ever compares ratios.
class DecodingMetric {
 public:
  static DecodingMetric from_matrix(const Matrix& q);

  double q(std::size_t x, std::size_t y) const { return q_(x, y); }
  double log_q(std::size_t x, std::size_t y) const { return log_q_(x, y); }

  std::size_t x_size() const { return q_.rows(); }
  std::size_t y_size() const { return q_.cols(); }

  const Matrix& values() const { return q_; }
  const Matrix& log_values() const { return log_q_; }

  /// Elementwise lambda * q^tau; exponents are invariant to this map.
  DecodingMetric scaled_power(double lambda, double tau) const;

 private:
  explicit DecodingMetric(Matrix q);

  Matrix q_;
  Matrix log_q_;  // -inf where q is 0
};

/// q(x,y) = P_{X|Y}(x|y); columns with P_Y(y) = 0 are filled with 1/|X|
/// (such y never occurs, the value only keeps the metric well formed).
DecodingMetric matched_metric(const JointSource& source);

/// q(x,y) = 1 - (size-1)*delta on the diagonal, delta elsewhere.
/// Throws DeltaOutOfRangeError unless 0 < delta < 1/size.
DecodingMetric hamming_metric(std::size_t size, double delta);

/// Throws IncompatibleMetricError unless q(x,y) > 0 wherever P_XY(x,y) > 0
/// (and dimensions agree).
void require_compatible(const JointSource& source, const DecodingMetric& metric);

}  // namespace swexp
