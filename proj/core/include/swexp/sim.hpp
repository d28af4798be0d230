#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "swexp/cost.hpp"
#include "swexp/exponents.hpp"
#include "swexp/metric.hpp"
#include "swexp/source.hpp"

namespace swexp {

struct TypeClassInfo {
  std::vector<std::uint16_t> counts;  // histogram over the alphabet
  std::uint64_t size = 0;             // sequences of this type
  std::uint32_t bin_offset = 0;       // first global bin id (type-by-type)
  std::uint32_t bins = 0;             // bins reserved for this type
};

/// Explicit map from length-n source sequences to bin indices. Sequences are
/// indexed base-|X|, most significant letter first.
struct BinningCode {
  std::size_t alphabet = 0;
  int n = 0;
  Ensemble ensemble = Ensemble::standard;
  std::uint64_t m_requested = 0;
  std::uint64_t m = 0;  // actual codeword count; padded upward for type-by-type
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> bins;     // sequence index -> global bin id
  std::vector<std::uint32_t> type_of;  // type-by-type only
  std::vector<TypeClassInfo> types;    // type-by-type only
};

std::uint64_t sequence_count(std::size_t alphabet, int n);  // BlocklengthTooLarge past 2^20
std::vector<std::uint8_t> sequence_digits(std::uint64_t index, std::size_t alphabet, int n);
std::vector<TypeClassInfo> enumerate_types(std::size_t alphabet, int n);

/// Uniform independent bin assignment per the chosen ensemble; reproducible
/// from the seed. Type-by-type pads M up to a multiple of the type count.
BinningCode sample_code(std::size_t alphabet, int n, std::uint64_t M, Ensemble ensemble,
                        std::uint64_t seed);

/// Exact probability that the maximum-metric decoder errs on sequence x:
/// sum over y^n of P(y^n|x^n) 1[some same-bin competitor scores >= x].
/// Ties count as errors. Requires |Y|^n <= 2^20.
double exact_error_probability(const BinningCode& code, const JointSource& source,
                               const DecodingMetric& metric, std::uint64_t x_index);

struct AverageError {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  bool exact = false;
  std::uint64_t m_used = 0;
};

/// Ensemble-average error; computed exactly through per-pair collision
/// probabilities when |X|^n <= 2^12, otherwise by Monte Carlo over codes.
AverageError ensemble_average_error(const JointSource& source, const DecodingMetric& metric,
                                    int n, std::uint64_t M, Ensemble ensemble,
                                    std::size_t trials, std::uint64_t seed);

/// Analytic n-letter bound on the ensemble-average error of the random-coding
/// construction, (k/M)^rho * (single-letter sum)^n with k = n log2|X| (times
/// the type count for the type-by-type ensemble).
double nletter_rc_bound(const JointSource& source, const DecodingMetric& metric, int n,
                        std::uint64_t M, double rho, double s, Ensemble ensemble,
                        const CostFunction* a = nullptr);

/// Expurgated n-letter bound, (2k/M)^rho * (single-letter sum)^n.
double nletter_ex_bound(const JointSource& source, const DecodingMetric& metric, int n,
                        std::uint64_t M, double rho, double s, Ensemble ensemble,
                        const CostFunction* a = nullptr);

struct SequenceErrorEntry {
  std::uint64_t sequence = 0;
  std::uint32_t bin = 0;
  int round = 0;            // expurgation round that retained the sequence
  double p_error = 0.0;     // exact error in the final combined code
  double lemma_bound = 0.0;    // (2 E[p_e^{1/rho}])^rho, full-population ensemble
  double chained_bound = 0.0;  // union-bound relaxation of the same quantity
  bool ok_lemma = false;
  bool ok_chained = false;
};

struct SequenceErrorReport {
  std::vector<SequenceErrorEntry> entries;
  double code_average = 0.0;  // sum_x P(x) p_e(x) for the final code
  double rho = 1.0;
  std::uint64_t seed = 0;
  bool expectation_exact = true;   // thresholds from exact ensemble expectations
  double expectation_std_error = 0.0;  // worst-case stderr when estimated
  std::size_t expectation_samples = 0;
  int rounds_used = 0;
  std::uint64_t codewords_per_round = 0;
  bool all_satisfied = false;
};

/// Iterative halving construction: sample a code over the remaining
/// population, keep the sequences with p_e^{1/rho} <= 2 E[p_e^{1/rho}], and
/// repeat on the rest (at most ~n log2|X| rounds, eta = 2). A round that
/// keeps fewer than half retries with a fresh draw; persistent failure raises
/// IterationBudgetExceededError.
std::pair<BinningCode, SequenceErrorReport> expurgate(const JointSource& source,
                                                      const DecodingMetric& metric, int n,
                                                      std::uint64_t M, Ensemble ensemble,
                                                      double rho, std::uint64_t seed);

struct EmpiricalPoint {
  int n = 0;
  std::uint64_t M = 0;
  double p_error = 0.0;
  double exponent = 0.0;  // -log(p_e)/n; +inf when p_e == 0
  bool exact = false;
};

/// Measured -log(p_e)/n at M = round(e^{nR}) for each n; no convergence
/// claim, just the finite-n slope data.
std::vector<EmpiricalPoint> empirical_exponent(const JointSource& source,
                                               const DecodingMetric& metric, double rate,
                                               Ensemble ensemble, std::span<const int> n_list,
                                               std::uint64_t seed, std::size_t trials = 1024);

}  // namespace swexp
