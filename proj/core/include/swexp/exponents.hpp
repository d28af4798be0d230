#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "swexp/cost.hpp"
#include "swexp/metric.hpp"
#include "swexp/source.hpp"

namespace swexp {

enum class Ensemble { standard, type_by_type };

enum class ExponentFamily {
  std_rc,
  std_ex,
  std_combined,
  tt_rc,
  tt_ex,
  tt_combined,
  gallager_r,
  sphere_packing,
  matched_ex_std,
  matched_ex_tt,
  no_si,
};

std::string to_string(ExponentFamily family);

enum class ExponentBranch { none, rc, ex };

/// One evaluated point (R, E(R)) with the parameters attaining it.
struct ExponentPoint {
  double rate = 0.0;
  double value = 0.0;  // clamped at 0; raw suprema of the ex families can be negative
  DualParams argmax;
  bool saturated_rho = false;  // optimizer hit the rho cap
  ExponentBranch branch = ExponentBranch::none;
  bool converged = true;
};

struct ExponentCurve {
  ExponentFamily family = ExponentFamily::std_rc;
  std::vector<ExponentPoint> points;  // strictly increasing rates
};

/// Knobs for the nested (rho, s, a) search. Defaults follow the grid sizes
/// and tolerances the rest of the toolkit is tested at.
struct ExponentOptions {
  double rho_cap = 64.0;    // cap for the unbounded-rho suprema
  int rho_grid = 33;        // seed grid for the outer rho search
  int s_grid = 25;          // seed grid for the inner s search (log-spaced)
  double s_lo = 1e-4;
  double s_hi = 1e3;
  double golden_tol = 1e-9;    // parameter-space tolerance of golden refinement
  double coord_tol = 1e-10;    // stop a(.) sweeps when improvement drops below this
  int max_sweeps = 200;
  int a_restarts = 1;  // objective is convex in a; extra random restarts are a
                       // belt-and-braces check, not a requirement
  std::uint64_t seed = 0x5EEDULL;
};

// --- objectives (log domain inputs handled internally; nats throughout) ---

/// E_0(rho) = log sum_y P_Y(y) (sum_x P_{X|Y}(x|y)^{1/(1+rho)})^{1+rho}
double gallager_e0(const JointSource& source, double rho);

/// log sum_{x,y} P(x,y) (sum_x' (q(x',y)/q(x,y))^s)^rho
double std_rc_objective(const JointSource& source, const DecodingMetric& metric, double rho,
                        double s);

/// log sum_x (sum_x' (sum_y P(x,y) (q(x',y)/q(x,y))^s)^{1/rho})^rho
double std_ex_objective(const JointSource& source, const DecodingMetric& metric, double rho,
                        double s);

/// Cost-weighted variants; `a` is taken raw (not gauge-projected) so the
/// gauge-invariance property can be checked on the objective itself.
double tt_rc_objective(const JointSource& source, const DecodingMetric& metric, double rho,
                       double s, std::span<const double> a);
double tt_ex_objective(const JointSource& source, const DecodingMetric& metric, double rho,
                       double s, std::span<const double> a);

double tt_rc_objective(const JointSource& source, const DecodingMetric& metric, double rho,
                       double s, const CostFunction& a);
double tt_ex_objective(const JointSource& source, const DecodingMetric& metric, double rho,
                       double s, const CostFunction& a);

// --- exponent optimizations ---

/// max_{rho in [0,1]} rho R - E_0(rho)
ExponentPoint exponent_r_gallager(const JointSource& source, double rate);

/// sup_{rho in (0, rho_cap]} rho R - E_0(rho); flags saturation at the cap.
ExponentPoint exponent_sp(const JointSource& source, double rate, double rho_cap = 64.0);

ExponentPoint exponent_std_rc(const JointSource& source, const DecodingMetric& metric,
                              double rate, const ExponentOptions& opts = {});
ExponentPoint exponent_std_ex(const JointSource& source, const DecodingMetric& metric,
                              double rate, const ExponentOptions& opts = {});
ExponentPoint exponent_tt_rc(const JointSource& source, const DecodingMetric& metric,
                             double rate, const ExponentOptions& opts = {});
ExponentPoint exponent_tt_ex(const JointSource& source, const DecodingMetric& metric,
                             double rate, const ExponentOptions& opts = {});

/// Matched expurgated exponents (standard / type-by-type ensembles).
ExponentPoint matched_ex_std(const JointSource& source, double rate,
                             const ExponentOptions& opts = {});
/// sup_{rho >= 1, a} rho R - log sum_x P(x) (sum_x' (e^{a(x')-a(x)} B(x,x'))^{1/rho})^rho
/// with B the Bhattacharyya coefficient between the rows of P_{Y|X}.
ExponentPoint matched_ex_tt(const JointSource& source, double rate,
                            const ExponentOptions& opts = {});

/// No-side-information exponent with metric q(x):
/// sup_{rho in [0, rho_cap], s >= 0} rho R - log sum_x P(x) (sum_x' (q(x')/q(x))^s)^rho
ExponentPoint exponent_no_si(std::span<const double> px, std::span<const double> q, double rate,
                             const ExponentOptions& opts = {});

/// Exponent of the optimal code without side information:
/// sup_{rho in [0, rho_cap]} rho R - (1+rho) log sum_x P(x)^{1/(1+rho)}
double no_si_optimal_exponent(std::span<const double> px, double rate, double rho_cap = 64.0);

/// max of the rc and ex points for the chosen ensemble; ties go to rc.
ExponentPoint combined_exponent(const JointSource& source, const DecodingMetric& metric,
                                double rate, Ensemble ensemble,
                                const ExponentOptions& opts = {});

/// Tilted distributions identifying the dominant type at the dual optimum,
/// computed from the argmax parameters of the type-by-type rc/ex exponents.
struct TiltedDistributions {
  std::vector<double> rc;  // from the random-coding argmax
  std::vector<double> ex;  // from the expurgated argmax
  DualParams rc_params;
  DualParams ex_params;
};
TiltedDistributions tilted_distributions(const JointSource& source,
                                         const DecodingMetric& metric, double rate,
                                         const ExponentOptions& opts = {});

// --- curve helpers ---

ExponentCurve evaluate_curve(ExponentFamily family, const JointSource& source,
                             const DecodingMetric& metric, std::span<const double> rates,
                             const ExponentOptions& opts = {});

bool curve_nondecreasing(const ExponentCurve& curve, double tol = 1e-6);
bool curve_convex(const ExponentCurve& curve, double tol = 1e-6);

}  // namespace swexp
