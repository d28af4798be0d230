#include "swexp/commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <future>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "swexp/errors.hpp"
#include "swexp/io.hpp"
#include "swexp/numerics.hpp"

namespace swexp {

namespace {

constexpr double kLog2 = 0.6931471805599453;

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double display(double nats, bool bits) { return bits ? nats / kLog2 : nats; }

struct Instance {
  JointSource source;
  DecodingMetric metric;
};

Instance load_instance(const RunConfig& config) {
  if (config.source_path.empty()) throw Error("no --source given");
  JointSource src = load_source_json(config.source_path);
  DecodingMetric metric = resolve_metric(config.metric_spec, src);
  require_compatible(src, metric);
  return {std::move(src), std::move(metric)};
}

ExponentOptions exponent_options(const RunConfig& config) {
  ExponentOptions opts;
  opts.rho_cap = config.rho_cap;
  opts.seed = config.seed;
  return opts;
}

}  // namespace

std::vector<double> RateGridSpec::values() const {
  if (count < 2) throw Error("rate grid needs at least 2 points");
  if (!(hi > lo)) throw Error("rate grid must be strictly increasing (MIN < MAX)");
  return linspace(lo, hi, count);
}

ExponentsResult cmd_exponents(const RunConfig& config) {
  const Instance inst = load_instance(config);
  const std::vector<double> rates = config.rates.values();
  const ExponentOptions opts = exponent_options(config);

  auto eval_row = [&](double rate) {
    ExponentsRow row;
    row.rate = rate;
    row.std_rc = exponent_std_rc(inst.source, inst.metric, rate, opts);
    row.std_ex = exponent_std_ex(inst.source, inst.metric, rate, opts);
    row.tt_rc = exponent_tt_rc(inst.source, inst.metric, rate, opts);
    row.tt_ex = exponent_tt_ex(inst.source, inst.metric, rate, opts);
    row.gallager = exponent_r_gallager(inst.source, rate);
    row.sp = exponent_sp(inst.source, rate, config.rho_cap);
    row.std_combined = std::max(row.std_rc.value, row.std_ex.value);
    row.tt_combined = std::max(row.tt_rc.value, row.tt_ex.value);
    return row;
  };

  // Grid points are independent; evaluate them concurrently and assemble in
  // rate order so output is deterministic.
  ExponentsResult result;
  result.rows.resize(rates.size());
  const std::size_t workers =
      std::min<std::size_t>(rates.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::future<void>> futures;
  std::atomic<std::size_t> next{0};
  for (std::size_t w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&]() {
      for (std::size_t i = next.fetch_add(1); i < rates.size(); i = next.fetch_add(1)) {
        result.rows[i] = eval_row(rates[i]);
      }
    }));
  }
  for (auto& f : futures) f.get();
  return result;
}

void write_exponents_csv(const ExponentsResult& result, bool bits, std::ostream& os) {
  os << "rate,E_std_rc,E_std_ex,E_std,E_tt_rc,E_tt_ex,E_tt,E_r_gallager,E_sp,"
        "rho_std_rc,s_std_rc,rho_std_ex,s_std_ex,rho_tt_rc,s_tt_rc,rho_tt_ex,s_tt_ex,"
        "rho_r,rho_sp\n";
  for (const auto& r : result.rows) {
    os << fmt12(display(r.rate, bits)) << ',' << fmt12(display(r.std_rc.value, bits)) << ','
       << fmt12(display(r.std_ex.value, bits)) << ',' << fmt12(display(r.std_combined, bits))
       << ',' << fmt12(display(r.tt_rc.value, bits)) << ','
       << fmt12(display(r.tt_ex.value, bits)) << ',' << fmt12(display(r.tt_combined, bits))
       << ',' << fmt12(display(r.gallager.value, bits)) << ','
       << fmt12(display(r.sp.value, bits)) << ',' << fmt12(r.std_rc.argmax.rho) << ','
       << fmt12(r.std_rc.argmax.s) << ',' << fmt12(r.std_ex.argmax.rho) << ','
       << fmt12(r.std_ex.argmax.s) << ',' << fmt12(r.tt_rc.argmax.rho) << ','
       << fmt12(r.tt_rc.argmax.s) << ',' << fmt12(r.tt_ex.argmax.rho) << ','
       << fmt12(r.tt_ex.argmax.s) << ',' << fmt12(r.gallager.argmax.rho) << ','
       << fmt12(r.sp.argmax.rho) << '\n';
  }
}

void write_exponents_json(const ExponentsResult& result, bool bits, std::ostream& os) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : result.rows) {
    nlohmann::json row;
    row["rate"] = display(r.rate, bits);
    row["E_std_rc"] = display(r.std_rc.value, bits);
    row["E_std_ex"] = display(r.std_ex.value, bits);
    row["E_std"] = display(r.std_combined, bits);
    row["E_tt_rc"] = display(r.tt_rc.value, bits);
    row["E_tt_ex"] = display(r.tt_ex.value, bits);
    row["E_tt"] = display(r.tt_combined, bits);
    row["E_r_gallager"] = display(r.gallager.value, bits);
    row["E_sp"] = display(r.sp.value, bits);
    row["argmax"] = {
        {"rho_std_rc", r.std_rc.argmax.rho}, {"s_std_rc", r.std_rc.argmax.s},
        {"rho_std_ex", r.std_ex.argmax.rho}, {"s_std_ex", r.std_ex.argmax.s},
        {"rho_tt_rc", r.tt_rc.argmax.rho},   {"s_tt_rc", r.tt_rc.argmax.s},
        {"rho_tt_ex", r.tt_ex.argmax.rho},   {"s_tt_ex", r.tt_ex.argmax.s},
        {"rho_r", r.gallager.argmax.rho},    {"rho_sp", r.sp.argmax.rho},
    };
    row["saturated_rho"] = r.sp.saturated_rho || r.std_ex.saturated_rho ||
                           r.tt_ex.saturated_rho;
    rows.push_back(row);
  }
  nlohmann::json doc;
  doc["units"] = bits ? "bits" : "nats";
  doc["rows"] = rows;
  os << doc.dump(2) << '\n';
}

RatesOutcome cmd_rates(const RunConfig& config) {
  const Instance inst = load_instance(config);
  RateOptions opts;
  opts.seed = config.seed;
  RatesOutcome outcome;
  outcome.report = rate_report(inst.source, inst.metric, opts);
  return outcome;
}

void write_rates_pretty(const RatesOutcome& outcome, bool bits, std::ostream& os) {
  const RateReport& r = outcome.report;
  const char* unit = bits ? "bits" : "nats";
  os << "H(X|Y)      = " << fmt12(display(r.h_xy, bits)) << ' ' << unit << '\n';
  os << "H_q(X|Y)    = " << fmt12(display(r.std.value, bits)) << ' ' << unit
     << "  (s* = " << fmt12(r.std.s_star) << (r.std.s_at_boundary ? ", boundary" : "")
     << ")\n";
  os << "H_q^tt(X|Y) = " << fmt12(display(r.tt.value, bits)) << ' ' << unit
     << "  (s* = " << fmt12(r.tt.s_star) << (r.tt.s_at_boundary ? ", boundary" : "") << ")\n";
  os << "GMI cross-check residual = " << fmt12(r.gmi_crosscheck) << '\n';
  os << "LM  cross-check residual = " << fmt12(r.lm_crosscheck) << '\n';
}

void write_rates_json(const RatesOutcome& outcome, bool bits, std::ostream& os) {
  const RateReport& r = outcome.report;
  nlohmann::json doc;
  doc["units"] = bits ? "bits" : "nats";
  doc["h_xy"] = display(r.h_xy, bits);
  doc["h_x"] = display(r.h_x, bits);
  doc["h_q_std"] = display(r.std.value, bits);
  doc["h_q_tt"] = display(r.tt.value, bits);
  doc["s_star_std"] = r.std.s_star;
  doc["s_star_tt"] = r.tt.s_star;
  doc["s_boundary_std"] = r.std.s_at_boundary;
  doc["s_boundary_tt"] = r.tt.s_at_boundary;
  std::vector<double> a(r.tt.a_star.values().begin(), r.tt.a_star.values().end());
  doc["a_star_tt"] = a;
  doc["gmi"] = display(r.gmi_value, bits);
  doc["lm_rate"] = display(r.lm_value, bits);
  doc["gmi_crosscheck"] = r.gmi_crosscheck;
  doc["lm_crosscheck"] = r.lm_crosscheck;
  os << doc.dump(2) << '\n';
}

DualityReport cmd_verify_duality(const RunConfig& config) {
  const Instance inst = load_instance(config);
  PrimalOptions popts;
  popts.restarts = config.oracle_restarts;
  popts.seed = config.seed;
  const std::vector<double> rates = config.rates.values();
  return verify_duality(inst.source, inst.metric, rates, config.tolerance, popts,
                        exponent_options(config));
}

void write_duality_json(const DualityReport& report, std::ostream& os) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"rate", r.rate},
                    {"primal_rc", r.primal_rc},
                    {"primal_ex", r.primal_ex},
                    {"primal", r.primal},
                    {"dual_tt", r.dual},
                    {"gap", r.gap}});
  }
  nlohmann::json doc;
  doc["rows"] = rows;
  doc["max_gap"] = report.max_gap;
  doc["tolerance"] = report.tolerance;
  doc["pass"] = report.pass;
  os << doc.dump(2) << '\n';
}

void write_duality_pretty(const DualityReport& report, std::ostream& os) {
  for (const auto& r : report.rows) {
    os << "R = " << fmt12(r.rate) << "  primal = " << fmt12(r.primal)
       << "  dual = " << fmt12(r.dual) << "  gap = " << fmt12(r.gap) << '\n';
  }
  os << "max gap = " << fmt12(report.max_gap) << " (tolerance " << fmt12(report.tolerance)
     << "): " << (report.pass ? "PASS" : "FAIL") << '\n';
}

SimulationOutcome cmd_simulate(const RunConfig& config) {
  const Instance inst = load_instance(config);
  SimulationOutcome out;
  out.config = config;

  out.sampled_code =
      sample_code(inst.source.x_size(), config.n, config.m, config.ensemble, config.seed);
  const std::uint64_t count = out.sampled_code.bins.size();
  out.sampled_errors.resize(count);
  KahanSum avg;
  for (std::uint64_t i = 0; i < count; ++i) {
    out.sampled_errors[i] = exact_error_probability(out.sampled_code, inst.source, inst.metric, i);
    double px = 1.0;
    for (std::uint8_t d : sequence_digits(i, inst.source.x_size(), config.n)) {
      px *= inst.source.px(d);
    }
    avg.add(px * out.sampled_errors[i]);
  }
  out.sampled_code_average = avg.value();

  out.ensemble_average = ensemble_average_error(inst.source, inst.metric, config.n, config.m,
                                                config.ensemble, config.trials, config.seed);

  out.all_bounds_satisfied = true;
  for (double rho : linspace(0.2, 1.0, 5)) {
    for (double s : logspace(0.25, 4.0, 5)) {
      SimulationOutcome::BoundCell cell;
      cell.rho = rho;
      cell.s = s;
      cell.rc_bound = nletter_rc_bound(inst.source, inst.metric, config.n, config.m, rho, s,
                                       config.ensemble);
      cell.satisfied = out.ensemble_average.mean <= cell.rc_bound + 1e-12;
      out.all_bounds_satisfied = out.all_bounds_satisfied && cell.satisfied;
      out.bound_grid.push_back(cell);
    }
  }

  auto [code, report] = expurgate(inst.source, inst.metric, config.n, config.m, config.ensemble,
                                  std::max(1.0, config.rho), config.seed);
  out.expurgated = std::move(report);
  out.all_bounds_satisfied = out.all_bounds_satisfied && out.expurgated.all_satisfied;
  return out;
}

void write_simulation_json(const SimulationOutcome& outcome, std::ostream& os) {
  nlohmann::json doc;
  doc["params"] = {{"n", outcome.config.n},
                   {"M", outcome.config.m},
                   {"M_actual", outcome.sampled_code.m},
                   {"ensemble", outcome.config.ensemble == Ensemble::standard ? "standard" : "tt"},
                   {"rho", outcome.config.rho},
                   {"trials", outcome.config.trials},
                   {"metric", outcome.config.metric_spec}};
  doc["seed"] = outcome.config.seed;

  nlohmann::json seqs = nlohmann::json::array();
  for (std::size_t i = 0; i < outcome.sampled_errors.size(); ++i) {
    seqs.push_back({{"sequence", i},
                    {"bin", outcome.sampled_code.bins[i]},
                    {"p_error", outcome.sampled_errors[i]}});
  }
  doc["sampled_code"] = {{"per_sequence", seqs},
                         {"code_average", outcome.sampled_code_average}};

  doc["averages"] = {{"ensemble_average", outcome.ensemble_average.mean},
                     {"std_error", outcome.ensemble_average.std_error},
                     {"exact", outcome.ensemble_average.exact},
                     {"trials", outcome.ensemble_average.trials}};

  nlohmann::json grid = nlohmann::json::array();
  for (const auto& c : outcome.bound_grid) {
    grid.push_back(
        {{"rho", c.rho}, {"s", c.s}, {"rc_bound", c.rc_bound}, {"satisfied", c.satisfied}});
  }
  doc["bounds"] = grid;

  nlohmann::json ex = nlohmann::json::array();
  for (const auto& e : outcome.expurgated.entries) {
    ex.push_back({{"sequence", e.sequence},
                  {"bin", e.bin},
                  {"round", e.round},
                  {"p_error", e.p_error},
                  {"lemma_bound", e.lemma_bound},
                  {"chained_bound", e.chained_bound},
                  {"ok_lemma", e.ok_lemma},
                  {"ok_chained", e.ok_chained}});
  }
  doc["per_sequence"] = ex;  // the report's core content, also nested below
  doc["expurgated"] = {{"per_sequence", ex},
                       {"code_average", outcome.expurgated.code_average},
                       {"rho", outcome.expurgated.rho},
                       {"rounds_used", outcome.expurgated.rounds_used},
                       {"codewords_per_round", outcome.expurgated.codewords_per_round},
                       {"expectation_exact", outcome.expurgated.expectation_exact},
                       {"expectation_std_error", outcome.expurgated.expectation_std_error},
                       {"expectation_samples", outcome.expurgated.expectation_samples},
                       {"all_satisfied", outcome.expurgated.all_satisfied}};
  doc["flags"] = {{"all_bounds_satisfied", outcome.all_bounds_satisfied}};
  os << doc.dump(2) << '\n';
}

void write_simulation_summary(const SimulationOutcome& outcome, std::ostream& os) {
  os << "sampled code average error   = " << fmt12(outcome.sampled_code_average) << '\n';
  os << "ensemble average error       = " << fmt12(outcome.ensemble_average.mean)
     << (outcome.ensemble_average.exact ? " (exact)" : " (monte-carlo)") << '\n';
  std::size_t ok = 0;
  for (const auto& c : outcome.bound_grid) ok += c.satisfied ? 1 : 0;
  os << "rc bound grid                = " << ok << '/' << outcome.bound_grid.size()
     << " satisfied\n";
  std::size_t exok = 0;
  for (const auto& e : outcome.expurgated.entries) exok += (e.ok_lemma && e.ok_chained) ? 1 : 0;
  os << "expurgated per-sequence      = " << exok << '/' << outcome.expurgated.entries.size()
     << " within bounds (" << outcome.expurgated.rounds_used << " rounds, "
     << (outcome.expurgated.expectation_exact ? "exact" : "estimated") << " expectations)\n";
  os << "all bounds satisfied         = " << (outcome.all_bounds_satisfied ? "yes" : "no")
     << '\n';
}

}  // namespace swexp
