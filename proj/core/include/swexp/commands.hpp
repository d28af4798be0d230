#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "swexp/exponents.hpp"
#include "swexp/primal.hpp"
#include "swexp/rates.hpp"
#include "swexp/sim.hpp"

namespace swexp {

enum class OutputFormat { csv, json };

struct RateGridSpec {
  double lo = 0.0;
  double hi = 1.0;
  int count = 2;
  std::vector<double> values() const;  // validates: strictly increasing, count >= 2
};

/// Parsed command-line configuration shared by all subcommands.
struct RunConfig {
  std::string source_path;
  std::string metric_spec = "matched";  // matched | hamming:DELTA | FILE
  RateGridSpec rates;
  Ensemble ensemble = Ensemble::standard;
  double rho_cap = 64.0;
  double tolerance = 5e-3;
  std::uint64_t seed = 1;
  std::string out_path;  // empty: stdout
  OutputFormat format = OutputFormat::csv;
  bool bits = false;  // display-only unit conversion
  int n = 4;
  std::uint64_t m = 8;
  double rho = 1.0;
  double s = 1.0;
  std::size_t trials = 256;
  int oracle_restarts = 40;
};

struct ExponentsRow {
  double rate = 0.0;
  ExponentPoint std_rc, std_ex, tt_rc, tt_ex, gallager, sp;
  double std_combined = 0.0;
  double tt_combined = 0.0;
};

struct ExponentsResult {
  std::vector<ExponentsRow> rows;
};

ExponentsResult cmd_exponents(const RunConfig& config);
void write_exponents_csv(const ExponentsResult& result, bool bits, std::ostream& os);
void write_exponents_json(const ExponentsResult& result, bool bits, std::ostream& os);

struct RatesOutcome {
  RateReport report;
};

RatesOutcome cmd_rates(const RunConfig& config);
void write_rates_pretty(const RatesOutcome& outcome, bool bits, std::ostream& os);
void write_rates_json(const RatesOutcome& outcome, bool bits, std::ostream& os);

DualityReport cmd_verify_duality(const RunConfig& config);
void write_duality_json(const DualityReport& report, std::ostream& os);
void write_duality_pretty(const DualityReport& report, std::ostream& os);

struct SimulationOutcome {
  RunConfig config;
  BinningCode sampled_code;
  std::vector<double> sampled_errors;  // exact per-sequence error of the sampled code
  double sampled_code_average = 0.0;
  AverageError ensemble_average;
  struct BoundCell {
    double rho = 0.0;
    double s = 0.0;
    double rc_bound = 0.0;
    bool satisfied = false;  // ensemble average <= bound
  };
  std::vector<BoundCell> bound_grid;  // 5x5 (rho, s) grid
  SequenceErrorReport expurgated;
  bool all_bounds_satisfied = false;
};

SimulationOutcome cmd_simulate(const RunConfig& config);
void write_simulation_json(const SimulationOutcome& outcome, std::ostream& os);
void write_simulation_summary(const SimulationOutcome& outcome, std::ostream& os);

}  // namespace swexp
