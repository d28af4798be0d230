#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "swexp/numerics.hpp"

namespace swexp::detail {

// Safeguarded 1-D Newton on coordinate z of a convex smooth objective.
// derivs(a, z, g, h) fills first and second derivative at the current a.
template <typename DerivFn>
void newton_coordinate(DerivFn&& derivs, std::vector<double>& a, std::size_t z) {
  double lo = kNegInf, hi = kPosInf;
  for (int it = 0; it < 30; ++it) {
    double g = 0.0, h = 0.0;
    derivs(a, z, g, h);
    if (std::abs(g) < 1e-13) break;
    if (g < 0.0) {
      lo = std::max(lo, a[z]);
    } else {
      hi = std::min(hi, a[z]);
    }
    double step = -g / std::max(h, 1e-12);
    step = std::clamp(step, -4.0, 4.0);
    double t = a[z] + step;
    if (t <= lo || t >= hi) {
      if (lo != kNegInf && hi != kPosInf) {
        t = 0.5 * (lo + hi);
      } else if (lo == kNegInf) {
        t = a[z] - std::max(1.0, std::abs(step));
      } else {
        t = a[z] + std::max(1.0, std::abs(step));
      }
    }
    if (std::abs(t - a[z]) < 1e-13) break;
    a[z] = t;
  }
}

inline void gauge_project(std::vector<double>& a) {
  if (a.empty()) return;
  double mean = 0.0;
  for (double v : a) mean += v;
  mean /= static_cast<double>(a.size());
  for (double& v : a) v -= mean;
}

// Cyclic coordinate descent with gauge re-projection after each sweep.
// Returns the best objective seen; `a` holds the minimizer.
template <typename ValueFn, typename DerivFn>
double coordinate_minimize(ValueFn&& value, DerivFn&& derivs, std::vector<double>& a,
                           double tol, int max_sweeps) {
  double f_prev = value(a);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (std::size_t z = 0; z < a.size(); ++z) newton_coordinate(derivs, a, z);
    gauge_project(a);
    const double f = value(a);
    const double gain = f_prev - f;
    f_prev = std::min(f_prev, f);
    if (gain < tol) break;
  }
  return f_prev;
}

}  // namespace swexp::detail
