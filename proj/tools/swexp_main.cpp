// swexp: error exponents, achievable rates, duality verification, and
// random-binning simulation for source coding with decoder side information.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "swexp/commands.hpp"
#include "swexp/errors.hpp"

namespace {

using swexp::RunConfig;

void add_common(CLI::App* cmd, RunConfig& config, std::string& rates_spec,
                std::string& ensemble, std::string& format) {
  cmd->add_option("--source", config.source_path, "source pmf JSON file")->required();
  cmd->add_option("--metric", config.metric_spec, "matched | hamming:DELTA | FILE");
  cmd->add_option("--rates", rates_spec, "rate grid MIN:MAX:COUNT (nats)");
  cmd->add_option("--ensemble", ensemble, "standard | tt");
  cmd->add_option("--rho-cap", config.rho_cap, "cap for unbounded-rho suprema");
  cmd->add_option("--tol", config.tolerance, "verification tolerance");
  cmd->add_option("--seed", config.seed, "rng seed");
  cmd->add_option("--out", config.out_path, "output file (default stdout)");
  cmd->add_option("--format", format, "csv | json");
  cmd->add_flag("--bits", config.bits, "display rates/exponents in bits (math stays in nats)");
}

void parse_rates(const std::string& spec, RunConfig& config) {
  if (spec.empty()) return;
  const auto c1 = spec.find(':');
  const auto c2 = spec.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    throw swexp::Error("bad --rates '" + spec + "'; expected MIN:MAX:COUNT");
  }
  try {
    config.rates.lo = std::stod(spec.substr(0, c1));
    config.rates.hi = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    config.rates.count = std::stoi(spec.substr(c2 + 1));
  } catch (const std::exception&) {
    throw swexp::Error("bad --rates '" + spec + "'; expected MIN:MAX:COUNT");
  }
}

void parse_enums(const std::string& ensemble, const std::string& format, RunConfig& config) {
  if (ensemble == "standard") {
    config.ensemble = swexp::Ensemble::standard;
  } else if (ensemble == "tt") {
    config.ensemble = swexp::Ensemble::type_by_type;
  } else if (!ensemble.empty()) {
    throw swexp::Error("bad --ensemble '" + ensemble + "'; expected standard or tt");
  }
  if (format == "csv") {
    config.format = swexp::OutputFormat::csv;
  } else if (format == "json") {
    config.format = swexp::OutputFormat::json;
  } else if (!format.empty()) {
    throw swexp::Error("bad --format '" + format + "'; expected csv or json");
  }
}

// Writes to --out when given, stdout otherwise.
template <typename WriteFn>
void emit(const RunConfig& config, WriteFn&& write) {
  if (config.out_path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(config.out_path);
  if (!out) throw swexp::Error("cannot write " + config.out_path);
  write(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"error exponents and rates for source coding with side information"};
  app.require_subcommand(1);

  RunConfig config;
  std::string rates_spec, ensemble, format;

  CLI::App* exponents = app.add_subcommand("exponents", "exponent curves over a rate grid");
  add_common(exponents, config, rates_spec, ensemble, format);

  CLI::App* rates = app.add_subcommand("rates", "achievable-rate thresholds");
  add_common(rates, config, rates_spec, ensemble, format);

  CLI::App* verify = app.add_subcommand("verify-duality",
                                        "compare the primal oracle with the dual exponents");
  add_common(verify, config, rates_spec, ensemble, format);
  verify->add_option("--restarts", config.oracle_restarts, "primal oracle restarts");

  CLI::App* simulate = app.add_subcommand("simulate", "random-binning simulation at finite n");
  add_common(simulate, config, rates_spec, ensemble, format);
  simulate->add_option("--n", config.n, "blocklength");
  simulate->add_option("--M", config.m, "number of codewords (bins)");
  simulate->add_option("--rho", config.rho, "expurgation rho (>= 1)");
  simulate->add_option("--trials", config.trials, "monte-carlo code draws");

  try {
    app.parse(argc, argv);
    parse_rates(rates_spec, config);
    parse_enums(ensemble, format, config);

    if (exponents->parsed()) {
      const swexp::ExponentsResult result = swexp::cmd_exponents(config);
      emit(config, [&](std::ostream& os) {
        if (config.format == swexp::OutputFormat::csv) {
          swexp::write_exponents_csv(result, config.bits, os);
        } else {
          swexp::write_exponents_json(result, config.bits, os);
        }
      });
    } else if (rates->parsed()) {
      const swexp::RatesOutcome outcome = swexp::cmd_rates(config);
      emit(config, [&](std::ostream& os) {
        if (config.format == swexp::OutputFormat::json) {
          swexp::write_rates_json(outcome, config.bits, os);
        } else {
          swexp::write_rates_pretty(outcome, config.bits, os);
        }
      });
    } else if (verify->parsed()) {
      const swexp::DualityReport report = swexp::cmd_verify_duality(config);
      emit(config, [&](std::ostream& os) {
        if (config.format == swexp::OutputFormat::json) {
          swexp::write_duality_json(report, os);
        } else {
          swexp::write_duality_pretty(report, os);
        }
      });
      if (!report.pass) return 2;
    } else if (simulate->parsed()) {
      const swexp::SimulationOutcome outcome = swexp::cmd_simulate(config);
      emit(config, [&](std::ostream& os) { swexp::write_simulation_json(outcome, os); });
      if (!config.out_path.empty()) swexp::write_simulation_summary(outcome, std::cout);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const swexp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
