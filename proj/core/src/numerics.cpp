#include "swexp/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace swexp {

double log_sum_exp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  if (std::isinf(m)) return m;
  KahanSum acc;
  for (double x : v) {
    if (x == kNegInf) continue;
    acc.add(std::exp(x - m));
  }
  return m + std::log(acc.value());
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  if (n <= 1) {
    v.push_back(lo);
    return v;
  }
  v.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    v.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  v.back() = hi;
  return v;
}

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v = linspace(std::log(lo), std::log(hi), n);
  for (double& x : v) x = std::exp(x);
  if (!v.empty()) {
    v.front() = lo;
    v.back() = hi;
  }
  return v;
}

ScalarMinResult minimize_grid_golden(const std::function<double(double)>& f,
                                     std::span<const double> grid, double x_tol,
                                     int max_iter) {
  ScalarMinResult best;
  best.f = kPosInf;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double fi = f(grid[i]);
    if (fi < best.f) {
      best.f = fi;
      best.x = grid[i];
      best_i = i;
    }
  }
  if (grid.size() < 2) return best;

  double lo = grid[best_i == 0 ? 0 : best_i - 1];
  double hi = grid[best_i + 1 < grid.size() ? best_i + 1 : grid.size() - 1];
  if (hi - lo < x_tol) {
    best.at_lower = best_i == 0;
    best.at_upper = best_i + 1 == grid.size();
    return best;
  }

  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > x_tol; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  double xm = f1 <= f2 ? x1 : x2;
  double fm = std::min(f1, f2);
  if (fm < best.f) {
    best.f = fm;
    best.x = xm;
  }
  best.at_lower = best.x <= grid.front() + x_tol && best_i == 0;
  best.at_upper = best.x >= grid.back() - x_tol && best_i + 1 == grid.size();
  return best;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

BfgsResult minimize_bfgs(
    const std::function<double(std::span<const double>, std::span<double>)>& fg,
    std::span<const double> x0, const BfgsOptions& opts) {
  const std::size_t n = x0.size();
  BfgsResult res;
  res.x.assign(x0.begin(), x0.end());

  std::vector<double> g(n), g_new(n), p(n), x_new(n), s(n), y(n);
  std::vector<double> H(n * n, 0.0);  // inverse Hessian approximation
  for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;

  double fx = fg(res.x, g);
  for (int it = 0; it < opts.max_iter; ++it) {
    res.iterations = it;
    double gn = 0.0;
    for (double v : g) gn = std::max(gn, std::abs(v));
    if (gn < opts.g_tol) {
      res.converged = true;
      break;
    }
    // p = -H g
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += H[i * n + j] * g[j];
      p[i] = -acc;
    }
    double slope = dot(p, g);
    if (slope >= 0.0) {  // reset to steepest descent if curvature went bad
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) H[i * n + j] = (i == j) ? 1.0 : 0.0;
        p[i] = -g[i];
      }
      slope = dot(p, g);
      if (slope == 0.0) {
        res.converged = true;
        break;
      }
    }
    double step = 1.0;
    double f_new = kPosInf;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = res.x[i] + step * p[i];
      f_new = fg(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.converged = true;  // no descent possible at this scale
      break;
    }
    double improvement = fx - f_new;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - res.x[i];
      y[i] = g_new[i] - g[i];
    }
    double sy = dot(s, y);
    if (sy > 1e-14) {
      // BFGS inverse update: H <- (I - s y^T / sy) H (I - y s^T / sy) + s s^T / sy
      std::vector<double> Hy(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += H[i * n + j] * y[j];
        Hy[i] = acc;
      }
      double yHy = dot(y, Hy);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          H[i * n + j] += ((sy + yHy) * s[i] * s[j]) / (sy * sy) -
                          (Hy[i] * s[j] + s[i] * Hy[j]) / sy;
        }
      }
    }
    res.x = x_new;
    fx = f_new;
    g = g_new;
    if (improvement < opts.f_tol) {
      res.converged = true;
      break;
    }
  }
  res.f = fx;
  return res;
}

}  // namespace swexp
