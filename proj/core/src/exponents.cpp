#include "swexp/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "detail/coordinate_descent.hpp"
#include "swexp/errors.hpp"
#include "swexp/numerics.hpp"
#include "swexp/rng.hpp"

namespace swexp {

std::string to_string(ExponentFamily family) {
  switch (family) {
    case ExponentFamily::std_rc: return "std_rc";
    case ExponentFamily::std_ex: return "std_ex";
    case ExponentFamily::std_combined: return "std";
    case ExponentFamily::tt_rc: return "tt_rc";
    case ExponentFamily::tt_ex: return "tt_ex";
    case ExponentFamily::tt_combined: return "tt";
    case ExponentFamily::gallager_r: return "gallager_r";
    case ExponentFamily::sphere_packing: return "sphere_packing";
    case ExponentFamily::matched_ex_std: return "matched_ex_std";
    case ExponentFamily::matched_ex_tt: return "matched_ex_tt";
    case ExponentFamily::no_si: return "no_si";
  }
  return "unknown";
}

namespace {

// ---------------------------------------------------------------------------
// Random-coding form
//
//   E(rho, s, a) = log sum_{x,y} P(x,y) exp(rho (log Z(y) - a(x) - s log q(x,y)))
//   Z(y)         = sum_x' exp(a(x') + s log q(x',y))
//
// Everything is kept in the log domain; the inner sums use compensated
// accumulation through log_sum_exp. Terms with P(x,y) = 0 are skipped and
// s log q follows the 0^0 = 1 convention.
// ---------------------------------------------------------------------------
class RcForm {
 public:
  RcForm(const JointSource& source, const DecodingMetric& metric)
      : X_(source.x_size()), Y_(source.y_size()), src_(&source), met_(&metric),
        slogq_(X_ * Y_, 0.0), logz_(Y_, 0.0), scratch_(X_), terms_(X_ * Y_) {
    set_s(0.0);
  }

  std::size_t x_size() const { return X_; }

  void set_s(double s) {
    s_ = s;
    for (std::size_t x = 0; x < X_; ++x) {
      for (std::size_t y = 0; y < Y_; ++y) {
        slogq_[x * Y_ + y] = s_times_log(s, met_->log_q(x, y));
      }
    }
  }

  double s() const { return s_; }

  double value(double rho, std::span<const double> a) {
    refresh_z(a);
    std::size_t k = 0;
    for (std::size_t x = 0; x < X_; ++x) {
      for (std::size_t y = 0; y < Y_; ++y) {
        const double lp = src_->log_p(x, y);
        if (lp == kNegInf) continue;
        terms_[k++] = lp + rho * (logz_[y] - a[x] - slogq_[x * Y_ + y]);
      }
    }
    return log_sum_exp(std::span<const double>(terms_.data(), k));
  }

  // dF/da_z and d2F/da_z^2 at the current a.
  void coord_derivatives(double rho, std::span<const double> a, std::size_t z, double& grad,
                         double& hess) {
    refresh_z(a);
    const double f = value_with_current_z(rho, a);
    double g = 0.0, quad = 0.0, lin = 0.0;
    for (std::size_t y = 0; y < Y_; ++y) {
      const double wzy = std::exp(a[z] + slogq_[z * Y_ + y] - logz_[y]);
      double ty = 0.0;
      for (std::size_t x = 0; x < X_; ++x) {
        const double lp = src_->log_p(x, y);
        if (lp == kNegInf) continue;
        const double t = std::exp(lp + rho * (logz_[y] - a[x] - slogq_[x * Y_ + y]) - f);
        ty += t;
        const double d = wzy - (x == z ? 1.0 : 0.0);
        g += t * d;
        quad += t * d * d;
      }
      lin += ty * wzy * (1.0 - wzy);
    }
    grad = rho * g;
    hess = rho * rho * quad + rho * lin - grad * grad;
  }

 private:
  void refresh_z(std::span<const double> a) {
    for (std::size_t y = 0; y < Y_; ++y) {
      for (std::size_t x = 0; x < X_; ++x) scratch_[x] = a[x] + slogq_[x * Y_ + y];
      logz_[y] = log_sum_exp(scratch_);
    }
  }

  double value_with_current_z(double rho, std::span<const double> a) {
    std::size_t k = 0;
    for (std::size_t x = 0; x < X_; ++x) {
      for (std::size_t y = 0; y < Y_; ++y) {
        const double lp = src_->log_p(x, y);
        if (lp == kNegInf) continue;
        terms_[k++] = lp + rho * (logz_[y] - a[x] - slogq_[x * Y_ + y]);
      }
    }
    return log_sum_exp(std::span<const double>(terms_.data(), k));
  }

  std::size_t X_, Y_;
  const JointSource* src_;
  const DecodingMetric* met_;
  double s_ = 0.0;
  std::vector<double> slogq_;
  std::vector<double> logz_;
  std::vector<double> scratch_;
  std::vector<double> terms_;
};

// ---------------------------------------------------------------------------
// Expurgated form
//
//   E(rho, s, a) = log sum_x exp(-a(x) + rho log G(x))
//   G(x)         = sum_x' exp((a(x') + log W(x,x')) / rho)
//   W(x,x')      = sum_y P(x,y) (q(x',y)/q(x,y))^s
//
// The cost ratio does not depend on y, so W is built once per s. The matched
// type-by-type exponent reuses the same machinery with W(x,x') =
// sqrt(P_X(x) P_X(x')) * sum_y sqrt(P_{Y|X}(y|x) P_{Y|X}(y|x')).
// ---------------------------------------------------------------------------
class ExForm {
 public:
  ExForm(const JointSource& source, const DecodingMetric& metric)
      : X_(source.x_size()), Y_(source.y_size()), src_(&source), met_(&metric),
        logw_(X_ * X_, kNegInf), scratch_(std::max(X_, Y_)), terms_(X_) {
    set_s(0.0);
  }

  // Fixed weight table; set_s must not be called on instances built this way.
  explicit ExForm(std::vector<double> logw)
      : X_(static_cast<std::size_t>(std::llround(std::sqrt(double(logw.size()))))), Y_(0),
        src_(nullptr), met_(nullptr), logw_(std::move(logw)), scratch_(X_), terms_(X_) {}

  std::size_t x_size() const { return X_; }

  void set_s(double s) {
    s_ = s;
    for (std::size_t x = 0; x < X_; ++x) {
      for (std::size_t xb = 0; xb < X_; ++xb) {
        std::size_t k = 0;
        for (std::size_t y = 0; y < Y_; ++y) {
          const double lp = src_->log_p(x, y);
          if (lp == kNegInf) continue;
          scratch_[k++] =
              lp + s_times_log(s, met_->log_q(xb, y)) - s_times_log(s, met_->log_q(x, y));
        }
        logw_[x * X_ + xb] = log_sum_exp(std::span<const double>(scratch_.data(), k));
      }
    }
  }

  double s() const { return s_; }

  double value(double rho, std::span<const double> a) {
    for (std::size_t x = 0; x < X_; ++x) terms_[x] = term(rho, a, x);
    return log_sum_exp(terms_);
  }

  void coord_derivatives(double rho, std::span<const double> a, std::size_t z, double& grad,
                         double& hess) {
    for (std::size_t x = 0; x < X_; ++x) terms_[x] = term(rho, a, x);
    const double f = log_sum_exp(terms_);
    grad = 0.0;
    hess = 0.0;
    for (std::size_t x = 0; x < X_; ++x) {
      if (terms_[x] == kNegInf) continue;
      const double u = std::exp(terms_[x] - f);
      const double lw = logw_[x * X_ + z];
      double m = 0.0;
      if (lw != kNegInf) {
        // softmax weight of x' = z inside G(x)
        double logg = log_g(rho, a, x);
        m = std::exp((a[z] + lw) / rho - logg);
      }
      const double d = m - (x == z ? 1.0 : 0.0);
      grad += u * d;
      hess += u * (d * d + m * (1.0 - m) / rho);
    }
    hess -= grad * grad;
  }

 private:
  double log_g(double rho, std::span<const double> a, std::size_t x) {
    std::size_t k = 0;
    for (std::size_t xb = 0; xb < X_; ++xb) {
      const double lw = logw_[x * X_ + xb];
      if (lw == kNegInf) continue;
      scratch_[k++] = (a[xb] + lw) / rho;
    }
    return log_sum_exp(std::span<const double>(scratch_.data(), k));
  }

  double term(double rho, std::span<const double> a, std::size_t x) {
    const double lg = log_g(rho, a, x);
    if (lg == kNegInf) return kNegInf;
    return -a[x] + rho * lg;
  }

  std::size_t X_, Y_;
  const JointSource* src_;
  const DecodingMetric* met_;
  double s_ = 0.0;
  std::vector<double> logw_;
  std::vector<double> scratch_;
  std::vector<double> terms_;
};

// Coordinate descent over the cost function a(.). Both forms are convex in a
// (log-sum-exp of affine maps), so safeguarded Newton per coordinate with
// gauge re-projection after each sweep converges to the global minimum.
template <typename Form>
double minimize_over_a(Form& form, double rho, std::vector<double>& a,
                       const ExponentOptions& opts) {
  auto value = [&](const std::vector<double>& v) { return form.value(rho, v); };
  auto derivs = [&](const std::vector<double>& v, std::size_t z, double& g, double& h) {
    form.coord_derivatives(rho, v, z, g, h);
  };
  return detail::coordinate_minimize(value, derivs, a, opts.coord_tol, opts.max_sweeps);
}

template <typename Form>
double minimize_over_a_restarts(Form& form, double rho, std::vector<double>& a,
                                const ExponentOptions& opts, const CounterRng& rng) {
  std::vector<double> best_a = a;
  double best_f = minimize_over_a(form, rho, best_a, opts);
  for (int r = 1; r < opts.a_restarts; ++r) {
    std::vector<double> trial(a.size());
    for (std::size_t i = 0; i < trial.size(); ++i) {
      trial[i] = 2.0 * rng.uniform01(static_cast<std::uint64_t>(r) * trial.size() + i) - 1.0;
    }
    const double f = minimize_over_a(form, rho, trial, opts);
    if (f < best_f) {
      best_f = f;
      best_a = trial;
    }
  }
  a = best_a;
  return best_f;
}

struct InnerSolution {
  double objective = 0.0;  // minimized E(rho, ., .)
  double s = 0.0;
  std::vector<double> a;
};

// Minimize E(rho, s, a) over s >= 0 (and a when with_cost). The objective is
// jointly convex in (s, a); the s profile after minimizing out a stays
// convex, hence unimodal in log s.
template <typename Form>
InnerSolution minimize_over_s(Form& form, double rho, bool with_cost,
                              const ExponentOptions& opts, const CounterRng& rng,
                              std::vector<double>& warm_a) {
  InnerSolution sol;
  sol.a.assign(form.x_size(), 0.0);

  auto eval = [&](double s) {
    form.set_s(s);
    if (with_cost) return minimize_over_a_restarts(form, rho, warm_a, opts, rng);
    std::vector<double> zeros(form.x_size(), 0.0);
    return form.value(rho, zeros);
  };

  const std::vector<double> sgrid = logspace(opts.s_lo, opts.s_hi, opts.s_grid);
  std::vector<double> ugrid(sgrid.size());
  for (std::size_t i = 0; i < sgrid.size(); ++i) ugrid[i] = std::log(sgrid[i]);
  auto eval_u = [&](double u) { return eval(std::exp(u)); };
  ScalarMinResult um = minimize_grid_golden(eval_u, ugrid, opts.golden_tol);
  // boundary extension: optima sitting on the nominal range edge are pushed
  // outward so rescaled metrics (q -> lambda q^tau) stay value-invariant
  if (um.at_lower) {
    const std::vector<double> lower = linspace(std::log(opts.s_lo * 1e-4), ugrid.front(), 9);
    const ScalarMinResult m2 = minimize_grid_golden(eval_u, lower, opts.golden_tol);
    if (m2.f < um.f) um = m2;
  } else if (um.at_upper) {
    const std::vector<double> upper = linspace(ugrid.back(), std::log(opts.s_hi * 1e3), 9);
    const ScalarMinResult m2 = minimize_grid_golden(eval_u, upper, opts.golden_tol);
    if (m2.f < um.f) um = m2;
  }
  sol.s = std::exp(um.x);
  sol.objective = eval(sol.s);  // leaves warm_a at the optimum for this s
  if (with_cost) sol.a = warm_a;

  // s = 0 is part of the domain (0^0 = 1); check it explicitly.
  const double f0 = eval(0.0);
  if (f0 < sol.objective) {
    sol.objective = f0;
    sol.s = 0.0;
    if (with_cost) sol.a = warm_a;
  } else if (with_cost) {
    warm_a = sol.a;
  }
  return sol;
}

std::vector<double> rc_rho_grid(int n) { return linspace(0.0, 1.0, n); }

std::vector<double> ex_rho_grid(double cap, int n) { return logspace(1.0, cap, n); }

// [0,1] linear then log up to the cap; used by the suprema over all rho >= 0.
std::vector<double> full_rho_grid(double cap, int n) {
  std::vector<double> grid = linspace(0.0, 1.0, std::max(2, n / 2 + 1));
  if (cap > 1.0) {
    std::vector<double> tail = logspace(1.0, cap, std::max(2, n / 2 + 1));
    grid.insert(grid.end(), tail.begin() + 1, tail.end());
  }
  return grid;
}

struct FamilySolve {
  double raw = 0.0;  // unclamped supremum
  double rho = 0.0;
  double s = 0.0;
  std::vector<double> a;
  bool saturated = false;
};

// Generic outer search: maximize rho * rate - min_{s,a} E(rho, s, a).
template <typename Form>
FamilySolve optimize_family(Form& form, double rate, std::span<const double> rho_grid,
                            bool with_s, bool with_cost, const ExponentOptions& opts) {
  CounterRng rng(opts.seed);
  std::vector<double> warm_a(form.x_size(), 0.0);
  InnerSolution last_inner;

  auto neg_gain = [&](double rho) {
    if (with_s) {
      last_inner = minimize_over_s(form, rho, with_cost, opts, rng, warm_a);
    } else {
      last_inner.s = form.s();
      if (with_cost) {
        last_inner.objective = minimize_over_a_restarts(form, rho, warm_a, opts, rng);
        last_inner.a = warm_a;
      } else {
        std::vector<double> zeros(form.x_size(), 0.0);
        last_inner.objective = form.value(rho, zeros);
        last_inner.a = zeros;
      }
    }
    return -(rho * rate - last_inner.objective);
  };

  ScalarMinResult m = minimize_grid_golden(neg_gain, rho_grid, opts.golden_tol);
  FamilySolve out;
  out.rho = m.x;
  out.raw = -neg_gain(m.x);  // re-evaluate so last_inner matches the argmax
  out.s = last_inner.s;
  out.a = last_inner.a;
  out.saturated = m.x >= rho_grid.back() * (1.0 - 1e-9) && rho_grid.back() > 1.0;
  return out;
}

ExponentPoint make_point(double rate, const FamilySolve& fs, bool with_cost) {
  ExponentPoint p;
  p.rate = rate;
  p.value = std::max(0.0, fs.raw);
  p.argmax.rho = fs.rho;
  p.argmax.s = fs.s;
  if (with_cost) p.argmax.a = CostFunction(fs.a);
  p.saturated_rho = fs.saturated;
  return p;
}

std::vector<double> bhattacharyya_logw(const JointSource& src) {
  const std::size_t X = src.x_size();
  const std::size_t Y = src.y_size();
  std::vector<double> logw(X * X, kNegInf);
  std::vector<double> terms(Y);
  for (std::size_t x : src.support_x()) {
    for (std::size_t xb : src.support_x()) {
      std::size_t k = 0;
      for (std::size_t y = 0; y < Y; ++y) {
        const double pyx = src.y_given_x(y, x);
        const double pyxb = src.y_given_x(y, xb);
        if (pyx > 0.0 && pyxb > 0.0) {
          terms[k++] = 0.5 * (std::log(pyx) + std::log(pyxb));
        }
      }
      const double logb = log_sum_exp(std::span<const double>(terms.data(), k));
      if (logb != kNegInf) {
        logw[x * X + xb] = 0.5 * (std::log(src.px(x)) + std::log(src.px(xb))) + logb;
      }
    }
  }
  return logw;
}

}  // namespace

// --- objectives -------------------------------------------------------------

double gallager_e0(const JointSource& source, double rho) {
  const std::size_t X = source.x_size();
  const std::size_t Y = source.y_size();
  std::vector<double> inner(X), outer(Y, kNegInf);
  for (std::size_t y = 0; y < Y; ++y) {
    if (source.py(y) <= 0.0) continue;
    std::size_t k = 0;
    for (std::size_t x = 0; x < X; ++x) {
      const double c = source.x_given_y(x, y);
      if (c > 0.0) inner[k++] = std::log(c) / (1.0 + rho);
    }
    outer[y] = std::log(source.py(y)) +
               (1.0 + rho) * log_sum_exp(std::span<const double>(inner.data(), k));
  }
  return log_sum_exp(outer);
}

double std_rc_objective(const JointSource& source, const DecodingMetric& metric, double rho,
                        double s) {
  require_compatible(source, metric);
  RcForm form(source, metric);
  form.set_s(s);
  std::vector<double> zeros(source.x_size(), 0.0);
  return form.value(rho, zeros);
}

double std_ex_objective(const JointSource& source, const DecodingMetric& metric, double rho,
                        double s) {
  require_compatible(source, metric);
  if (!(rho > 0.0)) throw Error("std_ex_objective: rho must be positive");
  ExForm form(source, metric);
  form.set_s(s);
  std::vector<double> zeros(source.x_size(), 0.0);
  return form.value(rho, zeros);
}

double tt_rc_objective(const JointSource& source, const DecodingMetric& metric, double rho,
                       double s, std::span<const double> a) {
  require_compatible(source, metric);
  if (a.size() != source.x_size()) {
    throw DimensionMismatchError("tt_rc_objective: cost function has wrong length");
  }
  RcForm form(source, metric);
  form.set_s(s);
  return form.value(rho, a);
}

double tt_ex_objective(const JointSource& source, const DecodingMetric& metric, double rho,
                       double s, std::span<const double> a) {
  require_compatible(source, metric);
  if (!(rho > 0.0)) throw Error("tt_ex_objective: rho must be positive");
  if (a.size() != source.x_size()) {
    throw DimensionMismatchError("tt_ex_objective: cost function has wrong length");
  }
  ExForm form(source, metric);
  form.set_s(s);
  return form.value(rho, a);
}

double tt_rc_objective(const JointSource& source, const DecodingMetric& metric, double rho,
                       double s, const CostFunction& a) {
  return tt_rc_objective(source, metric, rho, s, a.values());
}

double tt_ex_objective(const JointSource& source, const DecodingMetric& metric, double rho,
                       double s, const CostFunction& a) {
  return tt_ex_objective(source, metric, rho, s, a.values());
}

// --- matched exponents ------------------------------------------------------

ExponentPoint exponent_r_gallager(const JointSource& source, double rate) {
  auto neg = [&](double rho) { return -(rho * rate - gallager_e0(source, rho)); };
  const std::vector<double> grid = rc_rho_grid(33);
  ScalarMinResult m = minimize_grid_golden(neg, grid, 1e-10);
  ExponentPoint p;
  p.rate = rate;
  p.value = std::max(0.0, -m.f);
  p.argmax.rho = m.x;
  return p;
}

ExponentPoint exponent_sp(const JointSource& source, double rate, double rho_cap) {
  if (!(rho_cap > 1.0)) throw Error("exponent_sp: rho_cap must exceed 1");
  auto neg = [&](double rho) { return -(rho * rate - gallager_e0(source, rho)); };
  const std::vector<double> grid = full_rho_grid(rho_cap, 33);
  ScalarMinResult m = minimize_grid_golden(neg, grid, 1e-10);
  ExponentPoint p;
  p.rate = rate;
  p.value = std::max(0.0, -m.f);
  p.argmax.rho = m.x;
  p.saturated_rho = m.x >= rho_cap * (1.0 - 1e-9);
  return p;
}

ExponentPoint exponent_std_rc(const JointSource& source, const DecodingMetric& metric,
                              double rate, const ExponentOptions& opts) {
  require_compatible(source, metric);
  RcForm form(source, metric);
  const std::vector<double> grid = rc_rho_grid(opts.rho_grid);
  FamilySolve fs = optimize_family(form, rate, grid, true, false, opts);
  return make_point(rate, fs, false);
}

ExponentPoint exponent_std_ex(const JointSource& source, const DecodingMetric& metric,
                              double rate, const ExponentOptions& opts) {
  require_compatible(source, metric);
  if (!(opts.rho_cap >= 1.0)) throw Error("exponent_std_ex: rho_cap must be >= 1");
  ExForm form(source, metric);
  const std::vector<double> grid = ex_rho_grid(opts.rho_cap, opts.rho_grid);
  FamilySolve fs = optimize_family(form, rate, grid, true, false, opts);
  return make_point(rate, fs, false);
}

ExponentPoint exponent_tt_rc(const JointSource& source, const DecodingMetric& metric,
                             double rate, const ExponentOptions& opts) {
  require_compatible(source, metric);
  RcForm form(source, metric);
  const std::vector<double> grid = rc_rho_grid(opts.rho_grid);
  FamilySolve fs = optimize_family(form, rate, grid, true, true, opts);
  return make_point(rate, fs, true);
}

ExponentPoint exponent_tt_ex(const JointSource& source, const DecodingMetric& metric,
                             double rate, const ExponentOptions& opts) {
  require_compatible(source, metric);
  if (!(opts.rho_cap >= 1.0)) throw Error("exponent_tt_ex: rho_cap must be >= 1");
  ExForm form(source, metric);
  const std::vector<double> grid = ex_rho_grid(opts.rho_cap, opts.rho_grid);
  FamilySolve fs = optimize_family(form, rate, grid, true, true, opts);
  return make_point(rate, fs, true);
}

ExponentPoint matched_ex_std(const JointSource& source, double rate,
                             const ExponentOptions& opts) {
  const DecodingMetric q = matched_metric(source);
  return exponent_std_ex(source, q, rate, opts);
}

ExponentPoint matched_ex_tt(const JointSource& source, double rate,
                            const ExponentOptions& opts) {
  if (!(opts.rho_cap >= 1.0)) throw Error("matched_ex_tt: rho_cap must be >= 1");
  ExForm form(bhattacharyya_logw(source));
  const std::vector<double> grid = ex_rho_grid(opts.rho_cap, opts.rho_grid);
  FamilySolve fs = optimize_family(form, rate, grid, false, true, opts);
  ExponentPoint p = make_point(rate, fs, true);
  p.argmax.s = 0.5;  // the optimal metric exponent for the Bhattacharyya form
  return p;
}

ExponentPoint exponent_no_si(std::span<const double> px, std::span<const double> q, double rate,
                             const ExponentOptions& opts) {
  if (px.size() != q.size()) {
    throw DimensionMismatchError("exponent_no_si: metric vector has wrong length");
  }
  Matrix pm(px.size(), 1);
  Matrix qm(q.size(), 1);
  for (std::size_t x = 0; x < px.size(); ++x) {
    pm(x, 0) = px[x];
    qm(x, 0) = q[x];
  }
  const JointSource src = validate_source(pm);
  const DecodingMetric metric = DecodingMetric::from_matrix(qm);
  require_compatible(src, metric);
  RcForm form(src, metric);
  const std::vector<double> grid = full_rho_grid(opts.rho_cap, opts.rho_grid);
  FamilySolve fs = optimize_family(form, rate, grid, true, false, opts);
  return make_point(rate, fs, false);
}

double no_si_optimal_exponent(std::span<const double> px, double rate, double rho_cap) {
  std::vector<double> logp;
  logp.reserve(px.size());
  double mass = 0.0;
  for (double v : px) mass += v;
  for (double v : px) {
    if (v > 0.0) logp.push_back(std::log(v / mass));
  }
  auto neg = [&](double rho) {
    std::vector<double> scaled(logp.size());
    for (std::size_t i = 0; i < logp.size(); ++i) scaled[i] = logp[i] / (1.0 + rho);
    const double e0 = (1.0 + rho) * log_sum_exp(scaled);
    return -(rho * rate - e0);
  };
  const std::vector<double> grid = full_rho_grid(rho_cap, 33);
  ScalarMinResult m = minimize_grid_golden(neg, grid, 1e-10);
  return std::max(0.0, -m.f);
}

ExponentPoint combined_exponent(const JointSource& source, const DecodingMetric& metric,
                                double rate, Ensemble ensemble, const ExponentOptions& opts) {
  ExponentPoint rc = ensemble == Ensemble::standard ? exponent_std_rc(source, metric, rate, opts)
                                                    : exponent_tt_rc(source, metric, rate, opts);
  ExponentPoint ex = ensemble == Ensemble::standard ? exponent_std_ex(source, metric, rate, opts)
                                                    : exponent_tt_ex(source, metric, rate, opts);
  if (ex.value > rc.value) {
    ex.branch = ExponentBranch::ex;
    return ex;
  }
  rc.branch = ExponentBranch::rc;
  return rc;
}

TiltedDistributions tilted_distributions(const JointSource& source,
                                         const DecodingMetric& metric, double rate,
                                         const ExponentOptions& opts) {
  require_compatible(source, metric);
  const ExponentPoint rc = exponent_tt_rc(source, metric, rate, opts);
  const ExponentPoint ex = exponent_tt_ex(source, metric, rate, opts);
  if (!rc.converged || !ex.converged) {
    throw NotConvergedError("tilted_distributions: exponent optimization did not converge");
  }

  const std::size_t X = source.x_size();
  const std::size_t Y = source.y_size();
  TiltedDistributions out;
  out.rc_params = rc.argmax;
  out.ex_params = ex.argmax;

  {
    // Q(x) ~ P_X(x) sum_y P_{Y|X}(y|x) (sum_x' e^{a(x')-a(x)} (q(x',y)/q(x,y))^s)^rho,
    // i.e. the per-x mass of the rc integrand at the argmax.
    const double rho = rc.argmax.rho;
    const double s = rc.argmax.s;
    std::span<const double> a = rc.argmax.a->values();
    std::vector<double> logz(Y, kNegInf), buf(X), logmass(X, kNegInf), terms(Y);
    for (std::size_t y = 0; y < Y; ++y) {
      for (std::size_t x = 0; x < X; ++x) buf[x] = a[x] + s_times_log(s, metric.log_q(x, y));
      logz[y] = log_sum_exp(buf);
    }
    for (std::size_t x = 0; x < X; ++x) {
      std::size_t k = 0;
      for (std::size_t y = 0; y < Y; ++y) {
        const double lp = source.log_p(x, y);
        if (lp == kNegInf) continue;
        terms[k++] = lp + rho * (logz[y] - a[x] - s_times_log(s, metric.log_q(x, y)));
      }
      logmass[x] = log_sum_exp(std::span<const double>(terms.data(), k));
    }
    const double logc = log_sum_exp(logmass);
    out.rc.assign(X, 0.0);
    for (std::size_t x = 0; x < X; ++x) {
      if (logmass[x] != kNegInf) out.rc[x] = std::exp(logmass[x] - logc);
    }
  }
  {
    const double rho = ex.argmax.rho;
    const double s = ex.argmax.s;
    std::span<const double> a = ex.argmax.a->values();
    std::vector<double> logmass(X, kNegInf), inner(X), yterms(Y);
    for (std::size_t x = 0; x < X; ++x) {
      std::size_t kx = 0;
      for (std::size_t xb = 0; xb < X; ++xb) {
        std::size_t k = 0;
        for (std::size_t y = 0; y < Y; ++y) {
          const double lp = source.log_p(x, y);
          if (lp == kNegInf) continue;
          yterms[k++] = lp + (a[xb] - a[x]) + s_times_log(s, metric.log_q(xb, y)) -
                        s_times_log(s, metric.log_q(x, y));
        }
        const double lw = log_sum_exp(std::span<const double>(yterms.data(), k));
        if (lw != kNegInf) inner[kx++] = lw / rho;
      }
      if (kx > 0) {
        logmass[x] = rho * log_sum_exp(std::span<const double>(inner.data(), kx));
      }
    }
    const double logc = log_sum_exp(logmass);
    out.ex.assign(X, 0.0);
    for (std::size_t x = 0; x < X; ++x) {
      if (logmass[x] != kNegInf) out.ex[x] = std::exp(logmass[x] - logc);
    }
  }
  return out;
}

ExponentCurve evaluate_curve(ExponentFamily family, const JointSource& source,
                             const DecodingMetric& metric, std::span<const double> rates,
                             const ExponentOptions& opts) {
  ExponentCurve curve;
  curve.family = family;
  curve.points.reserve(rates.size());
  for (double r : rates) {
    switch (family) {
      case ExponentFamily::std_rc:
        curve.points.push_back(exponent_std_rc(source, metric, r, opts));
        break;
      case ExponentFamily::std_ex:
        curve.points.push_back(exponent_std_ex(source, metric, r, opts));
        break;
      case ExponentFamily::std_combined:
        curve.points.push_back(combined_exponent(source, metric, r, Ensemble::standard, opts));
        break;
      case ExponentFamily::tt_rc:
        curve.points.push_back(exponent_tt_rc(source, metric, r, opts));
        break;
      case ExponentFamily::tt_ex:
        curve.points.push_back(exponent_tt_ex(source, metric, r, opts));
        break;
      case ExponentFamily::tt_combined:
        curve.points.push_back(combined_exponent(source, metric, r, Ensemble::type_by_type, opts));
        break;
      case ExponentFamily::gallager_r:
        curve.points.push_back(exponent_r_gallager(source, r));
        break;
      case ExponentFamily::sphere_packing:
        curve.points.push_back(exponent_sp(source, r, opts.rho_cap));
        break;
      case ExponentFamily::matched_ex_std:
        curve.points.push_back(matched_ex_std(source, r, opts));
        break;
      case ExponentFamily::matched_ex_tt:
        curve.points.push_back(matched_ex_tt(source, r, opts));
        break;
      case ExponentFamily::no_si:
        throw Error("evaluate_curve: no_si family needs the vector overloads");
    }
  }
  return curve;
}

bool curve_nondecreasing(const ExponentCurve& curve, double tol) {
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    if (curve.points[i].value < curve.points[i - 1].value - tol) return false;
  }
  return true;
}

bool curve_convex(const ExponentCurve& curve, double tol) {
  const auto& p = curve.points;
  for (std::size_t i = 2; i < p.size(); ++i) {
    const double dl = (p[i - 1].value - p[i - 2].value) / (p[i - 1].rate - p[i - 2].rate);
    const double dr = (p[i].value - p[i - 1].value) / (p[i].rate - p[i - 1].rate);
    if (dr < dl - tol) return false;
  }
  return true;
}

}  // namespace swexp
