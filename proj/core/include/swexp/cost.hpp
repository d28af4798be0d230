#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace swexp {

/// Log-domain cost weights a(x), stored gauge-fixed to sum to zero. The
/// type-by-type objectives depend only on differences a(x') - a(x), so the
/// gauge makes optimizer output deterministic.
class CostFunction {
 public:
  CostFunction() = default;
  explicit CostFunction(std::vector<double> a) : a_(std::move(a)) { gauge_fix(); }

  static CostFunction zero(std::size_t n) { return CostFunction(std::vector<double>(n, 0.0)); }

  double operator[](std::size_t i) const { return a_[i]; }
  std::size_t size() const { return a_.size(); }
  bool empty() const { return a_.empty(); }
  std::span<const double> values() const { return a_; }

 private:
  void gauge_fix() {
    if (a_.empty()) return;
    double mean = 0.0;
    for (double v : a_) mean += v;
    mean /= static_cast<double>(a_.size());
    for (double& v : a_) v -= mean;
  }

  std::vector<double> a_;
};

/// Dual optimization variables (rho, s, a). `a` is absent for the
/// standard-ensemble exponents.
struct DualParams {
  double rho = 0.0;
  double s = 0.0;
  std::optional<CostFunction> a;
};

}  // namespace swexp
