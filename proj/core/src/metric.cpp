#include "swexp/metric.hpp"

#include <cmath>
#include <string>

#include "swexp/errors.hpp"
#include "swexp/numerics.hpp"

namespace swexp {

DecodingMetric DecodingMetric::from_matrix(const Matrix& q) {
  if (q.empty()) throw DimensionMismatchError("metric matrix is empty");
  for (double v : q.data()) {
    if (!std::isfinite(v)) throw NonFiniteError("metric entry is not finite");
    if (v < 0.0) throw NegativeProbabilityError("metric entry is negative");
  }
  return DecodingMetric(q);
}

DecodingMetric::DecodingMetric(Matrix q) : q_(std::move(q)) {
  log_q_ = Matrix(q_.rows(), q_.cols(), kNegInf);
  for (std::size_t x = 0; x < q_.rows(); ++x) {
    for (std::size_t y = 0; y < q_.cols(); ++y) {
      if (q_(x, y) > 0.0) log_q_(x, y) = std::log(q_(x, y));
    }
  }
}

DecodingMetric DecodingMetric::scaled_power(double lambda, double tau) const {
  Matrix m(q_.rows(), q_.cols());
  for (std::size_t x = 0; x < q_.rows(); ++x) {
    for (std::size_t y = 0; y < q_.cols(); ++y) {
      m(x, y) = lambda * std::pow(q_(x, y), tau);
    }
  }
  return from_matrix(m);
}

DecodingMetric matched_metric(const JointSource& source) {
  const std::size_t X = source.x_size();
  const std::size_t Y = source.y_size();
  Matrix m(X, Y);
  for (std::size_t y = 0; y < Y; ++y) {
    if (source.py(y) > 0.0) {
      for (std::size_t x = 0; x < X; ++x) m(x, y) = source.x_given_y(x, y);
    } else {
      for (std::size_t x = 0; x < X; ++x) m(x, y) = 1.0 / static_cast<double>(X);
    }
  }
  return DecodingMetric::from_matrix(m);
}

DecodingMetric hamming_metric(std::size_t size, double delta) {
  if (size == 0) throw DimensionMismatchError("hamming_metric: size must be positive");
  if (!(delta > 0.0) || !(delta < 1.0 / static_cast<double>(size))) {
    throw DeltaOutOfRangeError("hamming_metric: delta must lie in (0, 1/" +
                               std::to_string(size) + ")");
  }
  Matrix m(size, size, delta);
  const double diag = 1.0 - static_cast<double>(size - 1) * delta;
  for (std::size_t i = 0; i < size; ++i) m(i, i) = diag;
  return DecodingMetric::from_matrix(m);
}

void require_compatible(const JointSource& source, const DecodingMetric& metric) {
  if (metric.x_size() != source.x_size() || metric.y_size() != source.y_size()) {
    throw DimensionMismatchError("metric dimensions do not match the source");
  }
  for (std::size_t x = 0; x < source.x_size(); ++x) {
    for (std::size_t y = 0; y < source.y_size(); ++y) {
      if (source.p(x, y) > 0.0 && !(metric.q(x, y) > 0.0)) {
        throw IncompatibleMetricError("metric is zero at supported pair (" +
                                      std::to_string(x) + "," + std::to_string(y) + ")");
      }
    }
  }
}

}  // namespace swexp
