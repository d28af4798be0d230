#pragma once

#include <cstdint>
#include <span>

#include "swexp/cost.hpp"
#include "swexp/matrix.hpp"
#include "swexp/metric.hpp"
#include "swexp/source.hpp"

namespace swexp {

struct RateOptions {
  double s_lo = 1e-4;
  double s_hi = 1e3;
  int s_grid = 33;
  double golden_tol = 1e-11;
  double coord_tol = 1e-12;
  int max_sweeps = 200;
  int restarts = 8;
  std::uint64_t seed = 0x7A7EULL;
};

struct RateThreshold {
  double value = 0.0;   // nats
  double s_star = 0.0;
  bool s_at_boundary = false;  // infimum hit the edge of the s search range
  CostFunction a_star;         // empty for the standard ensemble
};

/// H_q(X|Y): inf_{s>=0} -sum_{x,y} P(x,y) log(q(x,y)^s / sum_x' q(x',y)^s)
RateThreshold rate_std(const JointSource& source, const DecodingMetric& metric,
                       const RateOptions& opts = {});

/// H^tt_q(X|Y): the same infimum extended over cost functions a(.).
RateThreshold rate_tt(const JointSource& source, const DecodingMetric& metric,
                      const RateOptions& opts = {});

/// Generalized mutual information of the channel W(y|x) with input px and
/// decoding metric q: sup_{s>0} sum P(x)W(y|x) log(q^s / sum_x' P(x') q(x',y)^s).
double gmi(std::span<const double> px, const Matrix& channel, const DecodingMetric& metric,
           const RateOptions& opts = {});

/// LM rate: the GMI objective with an extra cost b(.) inside both q powers.
double lm_rate(std::span<const double> px, const Matrix& channel, const DecodingMetric& metric,
               const RateOptions& opts = {});

struct RateReport {
  double h_xy = 0.0;       // H(X|Y)
  double h_x = 0.0;        // H(X)
  RateThreshold std;       // H_q(X|Y)
  RateThreshold tt;        // H^tt_q(X|Y)
  double gmi_value = 0.0;  // GMI of the induced channel with metric q P_X^{-1/s*}
  double lm_value = 0.0;   // LM rate of the induced channel with metric q
  // |H_q - (H(X) - I_{q̄,s*})| evaluated at the optimizing s*; the identity the
  // GMI correspondence rests on. See the README note on the GMI relation.
  double gmi_crosscheck = 0.0;
  double lm_crosscheck = 0.0;  // |H^tt_q - (H(X) - I^LM_q)|
};

RateReport rate_report(const JointSource& source, const DecodingMetric& metric,
                       const RateOptions& opts = {});

}  // namespace swexp
