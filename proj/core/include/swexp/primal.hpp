#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "swexp/exponents.hpp"
#include "swexp/metric.hpp"
#include "swexp/source.hpp"

namespace swexp {

struct PrimalOptions {
  int restarts = 40;       // random softmax starts (deterministic + nested by seed)
  int stage_iters = 400;   // quasi-Newton iterations per penalty stage
  double mu_lo = 1e2;      // penalty schedule: mu_lo, 10*mu_lo, ..., mu_hi
  double mu_hi = 1e8;
  std::uint64_t seed = 0x0ACE5ULL;
};

/// Result of a primal-domain minimization. The minimizer is a flattened joint
/// distribution whose axis sizes are given by `shape` (unused axes are 1).
struct PrimalSolution {
  double value = 0.0;
  bool feasible = true;
  std::vector<double> minimizer;
  std::array<std::size_t, 3> shape{1, 1, 1};
  double resolution = 0.0;                // solver tolerance: final penalty residual scale
  double max_constraint_violation = 0.0;  // infinity-norm over all hard constraints
  bool metric_constraint_active = false;  // metric-expectation inequality tight at optimum
};

/// min over joint P' of D(P'||P) + |R - H(X'|Y')|^+   (random-coding form)
PrimalSolution exponent_r_primal(const JointSource& source, double rate,
                                 const PrimalOptions& opts = {.restarts = 22});

/// min D(P'||P) s.t. H(X'|Y') >= R; infeasible when R exceeds the largest
/// achievable conditional entropy on the support.
PrimalSolution exponent_sp_primal(const JointSource& source, double rate,
                                  const PrimalOptions& opts = {.restarts = 22});

/// Expurgated form over couplings P(x^, x~) with equal marginals and
/// H(X^|X~) >= R, using the Bhattacharyya distance between rows of P_{Y|X}.
PrimalSolution exponent_ex_primal(const JointSource& source, double rate,
                                  const PrimalOptions& opts = {.restarts = 22});

/// min over P(x^, x~, y~) in T of D(P_{x~ y~}||P_XY) + |R - H(X^|Y~)|^+ where
/// T enforces equal x^/x~ marginals and E[log q(X^,Y~)] >= E[log q(X~,Y~)].
PrimalSolution ck_rc_primal(const JointSource& source, const DecodingMetric& metric, double rate,
                            const PrimalOptions& opts = {});

/// Same feasible set with H(X^|X~) >= R, objective D + R - H(X^|X~,Y~).
PrimalSolution ck_ex_primal(const JointSource& source, const DecodingMetric& metric, double rate,
                            const PrimalOptions& opts = {});

struct DualityRow {
  double rate = 0.0;
  double primal_rc = 0.0;
  double primal_ex = 0.0;
  double primal = 0.0;  // max of the two primal minima
  double dual = 0.0;    // combined type-by-type dual exponent
  double gap = 0.0;
};

struct DualityReport {
  std::vector<DualityRow> rows;
  double max_gap = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Per-rate comparison of the Csiszar-Korner primal pair against the
/// type-by-type dual exponent.
DualityReport verify_duality(const JointSource& source, const DecodingMetric& metric,
                             std::span<const double> rates, double tolerance,
                             const PrimalOptions& primal_opts = {},
                             const ExponentOptions& dual_opts = {});

}  // namespace swexp
