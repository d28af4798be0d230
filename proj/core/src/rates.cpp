#include "swexp/rates.hpp"

#include <cmath>
#include <vector>

#include "detail/coordinate_descent.hpp"
#include "swexp/errors.hpp"
#include "swexp/numerics.hpp"
#include "swexp/rng.hpp"

namespace swexp {

namespace {

// Tilted conditional cross-entropy
//   f(s, a) = -sum_{x,y} P(x,y) [s log q(x,y) + a(x) - log Z_s(y)],
//   Z_s(y)  = sum_x' exp(a(x') + s log q(x',y)),
// optionally with weights P_X(x') inside Z (the channel-facing GMI/LM form,
// where the objective is maximized over s instead). Works from a log-metric
// table so rescaled metrics never need to exist in the linear domain.
class TiltedCrossEntropy {
 public:
  TiltedCrossEntropy(const JointSource& source, const Matrix& log_q, bool weight_by_px)
      : src_(&source), log_q_(&log_q), weight_by_px_(weight_by_px), X_(source.x_size()),
        Y_(source.y_size()), buf_(X_), logz_(Y_) {}

  double value(double s, std::span<const double> a) {
    refresh(s, a);
    KahanSum acc;
    for (std::size_t x = 0; x < X_; ++x) {
      for (std::size_t y = 0; y < Y_; ++y) {
        const double p = src_->p(x, y);
        if (p <= 0.0) continue;
        acc.add(-p * (s_times_log(s, (*log_q_)(x, y)) + a[x] - logz_[y]));
      }
    }
    return acc.value();
  }

  void coord_derivatives(double s, std::span<const double> a, std::size_t z, double& g,
                         double& h) {
    refresh(s, a);
    g = -src_->px(z);
    h = 0.0;
    for (std::size_t y = 0; y < Y_; ++y) {
      if (src_->py(y) <= 0.0) continue;
      const double lw =
          a[z] + s_times_log(s, (*log_q_)(z, y)) + (weight_by_px_ ? log_px(z) : 0.0);
      if (lw == kNegInf) continue;
      const double w = std::exp(lw - logz_[y]);
      g += src_->py(y) * w;
      h += src_->py(y) * w * (1.0 - w);
    }
  }

 private:
  double log_px(std::size_t x) const {
    const double p = src_->px(x);
    return p > 0.0 ? std::log(p) : kNegInf;
  }

  void refresh(double s, std::span<const double> a) {
    for (std::size_t y = 0; y < Y_; ++y) {
      for (std::size_t x = 0; x < X_; ++x) {
        buf_[x] =
            a[x] + s_times_log(s, (*log_q_)(x, y)) + (weight_by_px_ ? log_px(x) : 0.0);
      }
      logz_[y] = log_sum_exp(buf_);
    }
  }

  const JointSource* src_;
  const Matrix* log_q_;
  bool weight_by_px_;
  std::size_t X_, Y_;
  std::vector<double> buf_;
  std::vector<double> logz_;
};

struct SAsolve {
  double value = 0.0;
  double s = 0.0;
  bool boundary = false;
  std::vector<double> a;
};

// inf over s >= 0 (log-grid + golden, with boundary extension and an explicit
// s = 0 probe) of f(s, a), minimizing over a per s when with_cost. Jointly
// convex in (s, a), so the profile in s is unimodal.
SAsolve minimize_tilted(TiltedCrossEntropy& form, bool with_cost, const RateOptions& opts,
                        std::size_t x_size, const CounterRng& rng) {
  SAsolve best;
  best.value = kPosInf;

  const int restarts = with_cost ? std::max(1, opts.restarts) : 1;
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> warm(x_size, 0.0);
    if (r > 0) {
      for (std::size_t i = 0; i < x_size; ++i) {
        warm[i] = 2.0 * rng.uniform01(static_cast<std::uint64_t>(r) * x_size + i) - 1.0;
      }
    }
    auto eval = [&](double s) {
      if (!with_cost) {
        std::vector<double> zeros(x_size, 0.0);
        return form.value(s, zeros);
      }
      auto value = [&](const std::vector<double>& v) { return form.value(s, v); };
      auto derivs = [&](const std::vector<double>& v, std::size_t z, double& g, double& h) {
        form.coord_derivatives(s, v, z, g, h);
      };
      return detail::coordinate_minimize(value, derivs, warm, opts.coord_tol, opts.max_sweeps);
    };
    auto eval_u = [&](double u) { return eval(std::exp(u)); };

    std::vector<double> ugrid;
    for (double s : logspace(opts.s_lo, opts.s_hi, opts.s_grid)) ugrid.push_back(std::log(s));
    ScalarMinResult m = minimize_grid_golden(eval_u, ugrid, opts.golden_tol);
    bool boundary = false;
    // extend past the nominal range when the infimum sits on its edge
    if (m.at_lower) {
      const std::vector<double> lower = linspace(std::log(opts.s_lo * 1e-4), ugrid.front(), 9);
      const ScalarMinResult m2 = minimize_grid_golden(eval_u, lower, opts.golden_tol);
      if (m2.f < m.f) m = m2;
      boundary = true;
    } else if (m.at_upper) {
      const std::vector<double> upper = linspace(ugrid.back(), std::log(opts.s_hi * 1e3), 9);
      const ScalarMinResult m2 = minimize_grid_golden(eval_u, upper, opts.golden_tol);
      if (m2.f < m.f) m = m2;
      boundary = true;
    }

    double s_star = std::exp(m.x);
    double f_star = eval(s_star);
    std::vector<double> a_star = warm;

    // s = 0 belongs to the domain (0^0 = 1)
    const double f0 = eval(0.0);
    if (f0 < f_star) {
      f_star = f0;
      s_star = 0.0;
      a_star = warm;
      boundary = true;
    }

    if (f_star < best.value) {
      best.value = f_star;
      best.s = s_star;
      best.boundary = boundary;
      best.a = a_star;
    }
  }
  return best;
}

JointSource channel_to_joint(std::span<const double> px, const Matrix& channel) {
  if (channel.rows() != px.size()) {
    throw DimensionMismatchError("channel rows must match the input distribution");
  }
  Matrix joint(channel.rows(), channel.cols());
  for (std::size_t x = 0; x < channel.rows(); ++x) {
    for (std::size_t y = 0; y < channel.cols(); ++y) {
      joint(x, y) = px[x] * channel(x, y);
    }
  }
  return validate_source(joint);
}

}  // namespace

RateThreshold rate_std(const JointSource& source, const DecodingMetric& metric,
                       const RateOptions& opts) {
  require_compatible(source, metric);
  TiltedCrossEntropy form(source, metric.log_values(), false);
  CounterRng rng(opts.seed);
  SAsolve sol = minimize_tilted(form, false, opts, source.x_size(), rng);
  RateThreshold out;
  out.value = sol.value;
  out.s_star = sol.s;
  out.s_at_boundary = sol.boundary;
  return out;
}

RateThreshold rate_tt(const JointSource& source, const DecodingMetric& metric,
                      const RateOptions& opts) {
  require_compatible(source, metric);
  TiltedCrossEntropy form(source, metric.log_values(), false);
  CounterRng rng(opts.seed);
  SAsolve sol = minimize_tilted(form, true, opts, source.x_size(), rng);
  RateThreshold out;
  out.value = sol.value;
  out.s_star = sol.s;
  out.s_at_boundary = sol.boundary;
  out.a_star = CostFunction(sol.a);
  return out;
}

double gmi(std::span<const double> px, const Matrix& channel, const DecodingMetric& metric,
           const RateOptions& opts) {
  const JointSource joint = channel_to_joint(px, channel);
  require_compatible(joint, metric);
  TiltedCrossEntropy form(joint, metric.log_values(), true);
  CounterRng rng(opts.seed);
  // sup_s of the mutual-information objective = -(inf_s of the cross-entropy
  // form with the P_X weights folded into Z)
  SAsolve sol = minimize_tilted(form, false, opts, joint.x_size(), rng);
  return -sol.value;
}

double lm_rate(std::span<const double> px, const Matrix& channel, const DecodingMetric& metric,
               const RateOptions& opts) {
  const JointSource joint = channel_to_joint(px, channel);
  require_compatible(joint, metric);
  TiltedCrossEntropy form(joint, metric.log_values(), true);
  CounterRng rng(opts.seed);
  SAsolve sol = minimize_tilted(form, true, opts, joint.x_size(), rng);
  return -sol.value;
}

RateReport rate_report(const JointSource& source, const DecodingMetric& metric,
                       const RateOptions& opts) {
  require_compatible(source, metric);
  RateReport rep;
  rep.h_xy = conditional_entropy(source);
  rep.h_x = entropy(source.px());
  rep.std = rate_std(source, metric, opts);
  rep.tt = rate_tt(source, metric, opts);

  const std::size_t X = source.x_size();
  const std::size_t Y = source.y_size();
  Matrix channel(X, Y);
  for (std::size_t x = 0; x < X; ++x) {
    for (std::size_t y = 0; y < Y; ++y) channel(x, y) = source.y_given_x(y, x);
  }
  for (std::size_t x = 0; x < X; ++x) {
    if (source.px(x) <= 0.0) {
      for (std::size_t y = 0; y < Y; ++y) channel(x, y) = 1.0 / static_cast<double>(Y);
    }
  }
  const JointSource joint = channel_to_joint(source.px(), channel);

  // GMI correspondence: with qbar = q P_X^{-1/s*} (held in logs; the linear
  // matrix can overflow for boundary s*), H_q = H(X) - I_{qbar, s*} exactly at
  // the optimizing s*. The sup over s of the fixed-qbar GMI can exceed
  // I_{qbar, s*} for mismatched metrics, so the identity is pinned at s*.
  if (rep.std.s_star > 0.0) {
    const double s_star = rep.std.s_star;
    Matrix log_qbar(X, Y, kNegInf);
    for (std::size_t x = 0; x < X; ++x) {
      const double lp = source.px(x) > 0.0 ? std::log(source.px(x)) : kNegInf;
      for (std::size_t y = 0; y < Y; ++y) {
        if (metric.q(x, y) > 0.0 && lp != kNegInf) {
          log_qbar(x, y) = metric.log_q(x, y) - lp / s_star;
        }
      }
    }
    TiltedCrossEntropy gmi_form(joint, log_qbar, true);
    std::vector<double> zeros(X, 0.0);
    const double i_at_s_star = -gmi_form.value(s_star, zeros);
    rep.gmi_crosscheck = std::abs(rep.std.value - (rep.h_x - i_at_s_star));

    CounterRng rng(opts.seed);
    SAsolve gmi_sup = minimize_tilted(gmi_form, false, opts, X, rng);
    rep.gmi_value = -gmi_sup.value;
  } else {
    // s* = 0: the metric is uninformative and H_q = log|X|; the induced qbar
    // metric degenerates, so report the GMI of the raw metric instead.
    rep.gmi_value = gmi(source.px(), channel, metric, opts);
    rep.gmi_crosscheck = std::abs(rep.std.value - std::log(static_cast<double>(X)));
  }

  rep.lm_value = lm_rate(source.px(), channel, metric, opts);
  rep.lm_crosscheck = std::abs(rep.tt.value - (rep.h_x - rep.lm_value));
  return rep;
}

}  // namespace swexp
