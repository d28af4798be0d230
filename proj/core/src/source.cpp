#include "swexp/source.hpp"

#include <cmath>

#include "swexp/errors.hpp"
#include "swexp/numerics.hpp"

namespace swexp {

JointSource JointSource::from_pmf(const Matrix& pmf) { return validate_source(pmf); }

JointSource::JointSource(Matrix pmf) : pmf_(std::move(pmf)) {
  const std::size_t X = pmf_.rows();
  const std::size_t Y = pmf_.cols();
  log_pmf_ = Matrix(X, Y, kNegInf);
  px_.assign(X, 0.0);
  py_.assign(Y, 0.0);
  for (std::size_t x = 0; x < X; ++x) {
    for (std::size_t y = 0; y < Y; ++y) {
      const double v = pmf_(x, y);
      px_[x] += v;
      py_[y] += v;
      if (v > 0.0) log_pmf_(x, y) = std::log(v);
    }
  }
  for (std::size_t x = 0; x < X; ++x) {
    if (px_[x] > 0.0) support_x_.push_back(x);
  }
}

JointSource validate_source(const Matrix& pmf) {
  if (pmf.empty()) throw DimensionMismatchError("pmf matrix is empty");
  KahanSum total;
  for (double v : pmf.data()) {
    if (!std::isfinite(v)) throw NonFiniteError("pmf entry is not finite");
    if (v < 0.0) throw NegativeProbabilityError("pmf entry is negative");
    total.add(v);
  }
  const double mass = total.value();
  if (mass <= 0.0) throw ZeroMassError("pmf has zero total mass");
  Matrix normalized = pmf;
  for (double& v : normalized.data()) v /= mass;
  return JointSource(std::move(normalized));
}

double conditional_entropy(const JointSource& source) {
  KahanSum h;
  for (std::size_t x = 0; x < source.x_size(); ++x) {
    for (std::size_t y = 0; y < source.y_size(); ++y) {
      const double pxy = source.p(x, y);
      if (pxy > 0.0) h.add(-pxy * std::log(source.x_given_y(x, y)));
    }
  }
  return h.value();
}

double entropy(std::span<const double> p) {
  KahanSum h;
  for (double v : p) {
    if (v > 0.0) h.add(-v * std::log(v));
  }
  return h.value();
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw DimensionMismatchError("kl_divergence: distributions of different size");
  }
  KahanSum d;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      if (q[i] <= 0.0) return kPosInf;
      d.add(p[i] * std::log(p[i] / q[i]));
    }
  }
  return d.value();
}

}  // namespace swexp
