#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace swexp {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

/// Neumaier-compensated accumulator.
class KahanSum {
 public:
  void add(double term) {
    double t = sum_ + term;
    if (std::abs(sum_) >= std::abs(term)) {
      comp_ += (sum_ - t) + term;
    } else {
      comp_ += (term - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// log(sum_i exp(v_i)) with max subtraction and compensated summation.
/// -inf entries are skipped; an all -inf input yields -inf.
double log_sum_exp(std::span<const double> v);

/// s * log_q with the 0^0 = 1 convention: returns 0 when s == 0 even if
/// log_q is -inf, and -inf when log_q is -inf and s > 0.
inline double s_times_log(double s, double log_q) {
  if (s == 0.0) return 0.0;
  return s * log_q;
}

std::vector<double> linspace(double lo, double hi, int n);
/// n geometrically spaced points between lo > 0 and hi.
std::vector<double> logspace(double lo, double hi, int n);

struct ScalarMinResult {
  double x = 0.0;
  double f = 0.0;
  bool at_lower = false;
  bool at_upper = false;
};

/// Minimize f over the grid, then golden-section refine inside the bracket
/// formed by the best grid point's neighbours. Robust for unimodal f and
/// tolerant of mild non-unimodality through the grid seeding.
ScalarMinResult minimize_grid_golden(const std::function<double(double)>& f,
                                     std::span<const double> grid, double x_tol = 1e-10,
                                     int max_iter = 200);

struct LineMinOptions {
  int max_iter = 60;
  double g_tol = 1e-12;
};

struct BfgsOptions {
  int max_iter = 300;
  double g_tol = 1e-10;
  double f_tol = 1e-13;
};

struct BfgsResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Dense BFGS with Armijo backtracking; fg returns the value and fills grad.
BfgsResult minimize_bfgs(
    const std::function<double(std::span<const double>, std::span<double>)>& fg,
    std::span<const double> x0, const BfgsOptions& opts = {});

}  // namespace swexp
