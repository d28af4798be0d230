#include "swexp/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>

#include "swexp/errors.hpp"
#include "swexp/numerics.hpp"
#include "swexp/rng.hpp"

namespace swexp {

namespace {

constexpr std::uint64_t kMaxSequences = 1ULL << 20;
constexpr std::uint64_t kMaxPairWork = 1ULL << 24;   // |X|^n * |Y|^n cap for averages
constexpr std::uint64_t kMaxExpurgateWork = 1ULL << 26;  // (|X|^n)^2 * |Y|^n cap

std::uint64_t pow_u64(std::size_t base, int n) {
  std::uint64_t v = 1;
  for (int i = 0; i < n; ++i) v *= base;
  return v;
}

// Canonical metric score: per-letter log q summed in sorted order, so equal
// multisets of factors produce bit-identical doubles and metric ties are
// detected exactly.
double sequence_score(const DecodingMetric& metric, std::span<const std::uint8_t> xd,
                      std::span<const std::uint8_t> yd, std::vector<double>& buf) {
  buf.clear();
  for (std::size_t i = 0; i < xd.size(); ++i) {
    const double v = metric.log_q(xd[i], yd[i]);
    if (v == kNegInf) return kNegInf;
    buf.push_back(v);
  }
  std::sort(buf.begin(), buf.end());
  KahanSum acc;
  for (double v : buf) acc.add(v);
  return acc.value();
}

double conditional_seq_prob(const JointSource& src, std::span<const std::uint8_t> xd,
                            std::span<const std::uint8_t> yd) {
  double p = 1.0;
  for (std::size_t i = 0; i < xd.size(); ++i) {
    p *= src.y_given_x(yd[i], xd[i]);
    if (p == 0.0) return 0.0;
  }
  return p;
}

double joint_seq_prob_x(const JointSource& src, std::span<const std::uint8_t> xd) {
  double p = 1.0;
  for (std::uint8_t d : xd) {
    p *= src.px(d);
    if (p == 0.0) return 0.0;
  }
  return p;
}

void next_digits(std::vector<std::uint8_t>& d, std::size_t base) {
  for (std::size_t i = d.size(); i-- > 0;) {
    if (++d[i] < base) return;
    d[i] = 0;
  }
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

}  // namespace

std::uint64_t sequence_count(std::size_t alphabet, int n) {
  if (alphabet == 0 || n <= 0) throw DimensionMismatchError("need alphabet >= 1 and n >= 1");
  const std::uint64_t v = pow_u64(alphabet, n);
  if (v > kMaxSequences) {
    throw BlocklengthTooLargeError("blocklength " + std::to_string(n) +
                                   " exceeds the |X|^n <= 2^20 guard");
  }
  return v;
}

namespace {

std::uint64_t y_count_checked(std::size_t y_size, int n, const char* what) {
  const std::uint64_t v = pow_u64(y_size, n);
  if (v > kMaxSequences) {
    throw EnumerationTooLargeError(std::string(what) + ": |Y|^n exceeds 2^20 at n = " +
                                   std::to_string(n));
  }
  return v;
}

}  // namespace

std::vector<std::uint8_t> sequence_digits(std::uint64_t index, std::size_t alphabet, int n) {
  std::vector<std::uint8_t> d(static_cast<std::size_t>(n));
  for (int i = n; i-- > 0;) {
    d[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(index % alphabet);
    index /= alphabet;
  }
  return d;
}

std::vector<TypeClassInfo> enumerate_types(std::size_t alphabet, int n) {
  // Compositions of n into |X| parts, lexicographic.
  std::vector<TypeClassInfo> out;
  std::vector<std::uint16_t> cur(alphabet, 0);
  const auto rec = [&](auto&& self, std::size_t pos, int remaining) -> void {
    if (pos + 1 == alphabet) {
      cur[pos] = static_cast<std::uint16_t>(remaining);
      TypeClassInfo t;
      t.counts = cur;
      out.push_back(std::move(t));
      return;
    }
    for (int c = remaining; c >= 0; --c) {
      cur[pos] = static_cast<std::uint16_t>(c);
      self(self, pos + 1, remaining - c);
    }
  };
  rec(rec, 0, n);
  return out;
}

BinningCode sample_code(std::size_t alphabet, int n, std::uint64_t M, Ensemble ensemble,
                        std::uint64_t seed) {
  if (M < 1 || M > 0xFFFFFFFFULL) {
    throw DimensionMismatchError("sample_code: M must be in [1, 2^32)");
  }
  const std::uint64_t count = sequence_count(alphabet, n);
  BinningCode code;
  code.alphabet = alphabet;
  code.n = n;
  code.ensemble = ensemble;
  code.m_requested = M;
  code.seed = seed;
  code.bins.resize(count);
  CounterRng rng(seed);

  if (ensemble == Ensemble::standard) {
    code.m = M;
    for (std::uint64_t i = 0; i < count; ++i) {
      code.bins[i] = rng.below(i, static_cast<std::uint32_t>(M));
    }
    return code;
  }

  code.types = enumerate_types(alphabet, n);
  const std::uint64_t T = code.types.size();
  const std::uint64_t per_type = (M + T - 1) / T;  // pad M upward to a multiple of T
  code.m = per_type * T;
  std::map<std::vector<std::uint16_t>, std::uint32_t> type_index;
  for (std::uint64_t t = 0; t < T; ++t) {
    code.types[t].bin_offset = static_cast<std::uint32_t>(t * per_type);
    code.types[t].bins = static_cast<std::uint32_t>(per_type);
    type_index[code.types[t].counts] = static_cast<std::uint32_t>(t);
  }
  code.type_of.resize(count);
  std::vector<std::uint8_t> digits(static_cast<std::size_t>(n), 0);
  std::vector<std::uint16_t> hist(alphabet);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::fill(hist.begin(), hist.end(), 0);
    for (std::uint8_t d : digits) ++hist[d];
    const std::uint32_t t = type_index.at(hist);
    code.type_of[i] = t;
    ++code.types[t].size;
    code.bins[i] =
        code.types[t].bin_offset + rng.below(i, static_cast<std::uint32_t>(per_type));
    next_digits(digits, alphabet);
  }
  return code;
}

double exact_error_probability(const BinningCode& code, const JointSource& source,
                               const DecodingMetric& metric, std::uint64_t x_index) {
  if (code.alphabet != source.x_size()) {
    throw DimensionMismatchError("code alphabet does not match the source");
  }
  require_compatible(source, metric);
  const std::uint64_t ycount = y_count_checked(source.y_size(), code.n,
                                               "exact_error_probability");

  const std::vector<std::uint8_t> xd = sequence_digits(x_index, code.alphabet, code.n);
  if (joint_seq_prob_x(source, xd) == 0.0) return 0.0;

  std::vector<std::vector<std::uint8_t>> competitors;
  for (std::uint64_t i = 0; i < code.bins.size(); ++i) {
    if (i != x_index && code.bins[i] == code.bins[x_index]) {
      if (code.ensemble == Ensemble::type_by_type &&
          code.type_of[i] != code.type_of[x_index]) {
        continue;
      }
      competitors.push_back(sequence_digits(i, code.alphabet, code.n));
    }
  }
  if (competitors.empty()) return 0.0;

  std::vector<double> buf;
  std::vector<std::uint8_t> yd(static_cast<std::size_t>(code.n), 0);
  KahanSum err;
  for (std::uint64_t yi = 0; yi < ycount; ++yi, next_digits(yd, source.y_size())) {
    const double py = conditional_seq_prob(source, xd, yd);
    if (py == 0.0) continue;
    const double sx = sequence_score(metric, xd, yd, buf);
    for (const auto& c : competitors) {
      if (sequence_score(metric, c, yd, buf) >= sx) {
        err.add(py);
        break;
      }
    }
  }
  return std::min(1.0, err.value());
}

AverageError ensemble_average_error(const JointSource& source, const DecodingMetric& metric,
                                    int n, std::uint64_t M, Ensemble ensemble,
                                    std::size_t trials, std::uint64_t seed) {
  require_compatible(source, metric);
  const std::uint64_t count = sequence_count(source.x_size(), n);
  const std::uint64_t ycount = y_count_checked(source.y_size(), n, "ensemble_average_error");
  if (count * ycount > kMaxPairWork) {
    throw EnumerationTooLargeError("ensemble_average_error: |X|^n * |Y|^n exceeds 2^24");
  }

  std::vector<std::vector<std::uint8_t>> xds(count);
  for (std::uint64_t i = 0; i < count; ++i) xds[i] = sequence_digits(i, source.x_size(), n);

  std::vector<std::uint32_t> type_of;
  std::uint64_t m_used = M;
  std::uint64_t per_type = 0;
  if (ensemble == Ensemble::type_by_type) {
    BinningCode probe = sample_code(source.x_size(), n, M, ensemble, seed);
    type_of = probe.type_of;
    m_used = probe.m;
    per_type = m_used / probe.types.size();
  }

  AverageError out;
  out.m_used = m_used;

  if (count <= (1ULL << 12)) {
    // Exact by linearity: for each (x, y) the union over independently placed
    // competitors has probability 1 - (1 - 1/M)^B, with B the number of
    // competitors scoring at least x (same type only for type-by-type).
    const double miss = ensemble == Ensemble::standard
                            ? 1.0 - 1.0 / static_cast<double>(M)
                            : 1.0 - 1.0 / static_cast<double>(per_type);
    std::vector<double> buf;
    std::vector<std::uint8_t> yd(static_cast<std::size_t>(n), 0);
    std::vector<double> scores(count);
    KahanSum total;
    for (std::uint64_t yi = 0; yi < ycount; ++yi, next_digits(yd, source.y_size())) {
      for (std::uint64_t i = 0; i < count; ++i) {
        scores[i] = sequence_score(metric, xds[i], yd, buf);
      }
      for (std::uint64_t i = 0; i < count; ++i) {
        double pj = 1.0;
        for (int k = 0; k < n; ++k) {
          pj *= source.p(xds[i][static_cast<std::size_t>(k)], yd[static_cast<std::size_t>(k)]);
        }
        if (pj == 0.0) continue;
        std::uint64_t b = 0;
        for (std::uint64_t j = 0; j < count; ++j) {
          if (j == i) continue;
          if (ensemble == Ensemble::type_by_type && type_of[j] != type_of[i]) continue;
          if (scores[j] >= scores[i]) ++b;
        }
        total.add(pj * (1.0 - std::pow(miss, static_cast<double>(b))));
      }
    }
    out.mean = total.value();
    out.exact = true;
    return out;
  }

  if (trials < 1) throw DimensionMismatchError("ensemble_average_error: trials must be >= 1");
  CounterRng rng(seed);
  std::vector<double> buf;
  KahanSum acc, acc2;
  for (std::size_t t = 0; t < trials; ++t) {
    const BinningCode code = sample_code(source.x_size(), n, M, ensemble, rng.split(t).bits(0));
    // per y: sorted member scores per bin, so the same-bin comparison is a
    // rank query instead of a pairwise scan
    std::vector<std::vector<std::uint64_t>> members(code.m);
    for (std::uint64_t i = 0; i < count; ++i) members[code.bins[i]].push_back(i);
    KahanSum code_err;
    std::vector<std::uint8_t> yd(static_cast<std::size_t>(n), 0);
    std::vector<double> scores(count);
    std::vector<std::vector<double>> bin_scores(code.m);
    for (std::uint64_t yi = 0; yi < ycount; ++yi, next_digits(yd, source.y_size())) {
      for (std::uint64_t i = 0; i < count; ++i) {
        scores[i] = sequence_score(metric, xds[i], yd, buf);
      }
      for (std::uint64_t b = 0; b < code.m; ++b) {
        bin_scores[b].clear();
        for (std::uint64_t i : members[b]) bin_scores[b].push_back(scores[i]);
        std::sort(bin_scores[b].begin(), bin_scores[b].end());
      }
      for (std::uint64_t i = 0; i < count; ++i) {
        double pj = 1.0;
        for (int k = 0; k < n; ++k) {
          pj *= source.p(xds[i][static_cast<std::size_t>(k)], yd[static_cast<std::size_t>(k)]);
        }
        if (pj == 0.0) continue;
        const auto& bs = bin_scores[code.bins[i]];
        const auto at_least =
            bs.end() - std::lower_bound(bs.begin(), bs.end(), scores[i]);
        if (at_least >= 2) code_err.add(pj);  // someone besides x ties or beats it
      }
    }
    const double v = code_err.value();
    acc.add(v);
    acc2.add(v * v);
  }
  const double mean = acc.value() / static_cast<double>(trials);
  const double var = std::max(0.0, acc2.value() / static_cast<double>(trials) - mean * mean);
  out.mean = mean;
  out.std_error = trials > 1 ? std::sqrt(var / static_cast<double>(trials - 1)) : 0.0;
  out.trials = trials;
  out.exact = false;
  return out;
}

namespace {

double bound_log_factor(const JointSource& source, int n, std::uint64_t M, Ensemble ensemble,
                        bool expurgated) {
  const double k = static_cast<double>(n) * std::log2(static_cast<double>(source.x_size()));
  double lf = std::log(std::max(1.0, k)) - std::log(static_cast<double>(M));
  if (expurgated) lf += std::log(2.0);
  if (ensemble == Ensemble::type_by_type) {
    const std::uint64_t a = source.x_size();
    const std::uint64_t types = binomial(static_cast<std::uint64_t>(n) + a - 1, a - 1);
    lf += std::log(static_cast<double>(types));
  }
  return lf;
}

}  // namespace

double nletter_rc_bound(const JointSource& source, const DecodingMetric& metric, int n,
                        std::uint64_t M, double rho, double s, Ensemble ensemble,
                        const CostFunction* a) {
  require_compatible(source, metric);
  const double single = a == nullptr ? std_rc_objective(source, metric, rho, s)
                                     : tt_rc_objective(source, metric, rho, s, a->values());
  return std::exp(rho * bound_log_factor(source, n, M, ensemble, false) +
                  static_cast<double>(n) * single);
}

double nletter_ex_bound(const JointSource& source, const DecodingMetric& metric, int n,
                        std::uint64_t M, double rho, double s, Ensemble ensemble,
                        const CostFunction* a) {
  require_compatible(source, metric);
  const double single = a == nullptr ? std_ex_objective(source, metric, rho, s)
                                     : tt_ex_objective(source, metric, rho, s, a->values());
  return std::exp(rho * bound_log_factor(source, n, M, ensemble, true) +
                  static_cast<double>(n) * single);
}

// --- expurgation -------------------------------------------------------------

namespace {

using Mask = std::vector<std::uint64_t>;

// Per-sequence error geometry: the y sequences x can emit with their
// probabilities, and for each competitor the bitmask of those y where the
// competitor's metric is at least as large (a decoding error if it shares
// the bin). Masks are draw-independent; only bin assignments change.
class ErrorGeometry {
 public:
  ErrorGeometry(const JointSource& src, const DecodingMetric& met, int n,
                std::span<const std::uint8_t> xd)
      : words_(0) {
    const std::uint64_t ycount = pow_u64(src.y_size(), n);
    std::vector<std::uint8_t> yd(static_cast<std::size_t>(n), 0);
    std::vector<double> buf;
    for (std::uint64_t yi = 0; yi < ycount; ++yi, next_digits(yd, src.y_size())) {
      const double w = conditional_seq_prob(src, xd, yd);
      if (w == 0.0) continue;
      weights_.push_back(w);
      y_digits_.push_back(yd);
      x_scores_.push_back(sequence_score(met, xd, yd, buf));
    }
    words_ = (weights_.size() + 63) / 64;
  }

  std::size_t active_y() const { return weights_.size(); }
  std::size_t words() const { return words_; }

  Mask competitor_mask(const DecodingMetric& met, std::span<const std::uint8_t> cd) const {
    Mask mask(words_, 0);
    std::vector<double> buf;
    for (std::size_t j = 0; j < weights_.size(); ++j) {
      if (sequence_score(met, cd, y_digits_[j], buf) >= x_scores_[j]) {
        mask[j / 64] |= 1ULL << (j % 64);
      }
    }
    return mask;
  }

  double weight_of_union(std::span<const std::uint64_t> mask) const {
    KahanSum acc;
    for (std::size_t j = 0; j < weights_.size(); ++j) {
      if (mask[j / 64] & (1ULL << (j % 64))) acc.add(weights_[j]);
    }
    return acc.value();
  }

 private:
  std::size_t words_;
  std::vector<double> weights_;
  std::vector<std::vector<std::uint8_t>> y_digits_;
  std::vector<double> x_scores_;
};

struct ExpectationResult {
  double value = 0.0;
  bool exact = true;
  double std_error = 0.0;
  std::size_t samples = 0;
};

// E[p_e(x, C)^{1/rho}] over uniform independent binning into m_bins bins,
// given the competitor masks. Identical masks form classes whose presence in
// x's bin is independent across classes, so the expectation is an exact sum
// over class subsets when the class count permits; otherwise it is estimated
// from 256 sampled assignments.
ExpectationResult pe_power_expectation(const ErrorGeometry& geo,
                                       const std::vector<const Mask*>& masks,
                                       std::uint64_t m_bins, double rho,
                                       const CounterRng& est_rng) {
  ExpectationResult out;
  if (geo.active_y() == 0) return out;

  std::map<Mask, std::uint64_t> classes;
  for (const Mask* m : masks) {
    bool any = false;
    for (std::uint64_t w : *m) any = any || w != 0;
    if (any) ++classes[*m];
  }
  if (classes.empty()) return out;

  const std::size_t g = classes.size();
  const double miss = 1.0 - 1.0 / static_cast<double>(m_bins);
  if (g <= 20 && (std::uint64_t(1) << g) * geo.words() <= (1ULL << 24)) {
    std::vector<Mask> cmask;
    std::vector<double> present;
    for (const auto& [mask, cnt] : classes) {
      cmask.push_back(mask);
      present.push_back(1.0 - std::pow(miss, static_cast<double>(cnt)));
    }
    KahanSum expect;
    Mask uni(geo.words(), 0);
    const auto rec = [&](auto&& self, std::size_t i, double prob, Mask& u) -> void {
      if (prob == 0.0) return;
      if (i == g) {
        const double f = geo.weight_of_union(u);
        if (f > 0.0) expect.add(prob * std::pow(f, 1.0 / rho));
        return;
      }
      self(self, i + 1, prob * (1.0 - present[i]), u);
      Mask u2 = u;
      for (std::size_t w = 0; w < u2.size(); ++w) u2[w] |= cmask[i][w];
      self(self, i + 1, prob * present[i], u2);
    };
    rec(rec, 0, 1.0, uni);
    out.value = expect.value();
    out.exact = true;
    return out;
  }

  constexpr std::size_t kSamples = 256;
  KahanSum acc, acc2;
  for (std::size_t t = 0; t < kSamples; ++t) {
    CounterRng rng = est_rng.split(t);
    const std::uint32_t x_bin = rng.below(masks.size(), static_cast<std::uint32_t>(m_bins));
    Mask uni(geo.words(), 0);
    for (std::size_t i = 0; i < masks.size(); ++i) {
      if (rng.below(i, static_cast<std::uint32_t>(m_bins)) != x_bin) continue;
      for (std::size_t w = 0; w < uni.size(); ++w) uni[w] |= (*masks[i])[w];
    }
    const double pe = geo.weight_of_union(uni);
    const double v = pe > 0.0 ? std::pow(pe, 1.0 / rho) : 0.0;
    acc.add(v);
    acc2.add(v * v);
  }
  const double mean = acc.value() / kSamples;
  const double var = std::max(0.0, acc2.value() / kSamples - mean * mean);
  out.value = mean;
  out.exact = false;
  out.samples = kSamples;
  out.std_error = std::sqrt(var / (kSamples - 1));
  return out;
}

struct Population {
  std::vector<std::uint64_t> members;
  std::uint32_t bin_offset = 0;
  std::uint64_t budget = 0;
  int k_rounds = 1;
  std::uint64_t round_bins = 0;
};

}  // namespace

std::pair<BinningCode, SequenceErrorReport> expurgate(const JointSource& source,
                                                      const DecodingMetric& metric, int n,
                                                      std::uint64_t M, Ensemble ensemble,
                                                      double rho, std::uint64_t seed) {
  require_compatible(source, metric);
  if (!(rho >= 1.0)) throw Error("expurgate: rho must be >= 1");
  const std::uint64_t count = sequence_count(source.x_size(), n);
  const std::uint64_t ycount = y_count_checked(source.y_size(), n, "expurgate");
  if (count * count * ycount > kMaxExpurgateWork) {
    throw EnumerationTooLargeError(
        "expurgate: exact enumeration infeasible ((|X|^n)^2 |Y|^n > 2^26)");
  }

  BinningCode code;
  code.alphabet = source.x_size();
  code.n = n;
  code.ensemble = ensemble;
  code.m_requested = M;
  code.seed = seed;
  code.bins.assign(count, 0);

  SequenceErrorReport report;
  report.rho = rho;
  report.seed = seed;
  report.expectation_exact = true;

  std::vector<Population> pops;
  if (ensemble == Ensemble::standard) {
    Population p;
    p.members.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) p.members[i] = i;
    p.budget = M;
    p.k_rounds = std::max(
        1, static_cast<int>(std::ceil(static_cast<double>(n) *
                                      std::log2(static_cast<double>(source.x_size())))));
    pops.push_back(std::move(p));
    code.m = M;
  } else {
    BinningCode probe = sample_code(source.x_size(), n, M, ensemble, seed);
    code.types = probe.types;
    code.type_of = probe.type_of;
    code.m = probe.m;
    const std::uint64_t per_type = probe.m / probe.types.size();
    for (std::size_t t = 0; t < probe.types.size(); ++t) {
      Population p;
      for (std::uint64_t i = 0; i < count; ++i) {
        if (probe.type_of[i] == t) p.members.push_back(i);
      }
      p.bin_offset = probe.types[t].bin_offset;
      p.budget = per_type;
      p.k_rounds = std::max(1, static_cast<int>(std::ceil(std::log2(
                                   std::max(1.0, static_cast<double>(p.members.size()))))));
      pops.push_back(std::move(p));
    }
  }

  CounterRng root(seed);
  std::map<std::uint64_t, double> lemma_bound;
  std::map<std::uint64_t, int> round_of;

  const auto note_estimate = [&](const ExpectationResult& e) {
    if (!e.exact) {
      report.expectation_exact = false;
      report.expectation_std_error = std::max(report.expectation_std_error, e.std_error);
      report.expectation_samples = std::max(report.expectation_samples, e.samples);
    }
  };

  for (std::size_t pi = 0; pi < pops.size(); ++pi) {
    Population& pop = pops[pi];
    pop.round_bins = std::max<std::uint64_t>(1, pop.budget / pop.k_rounds);

    // Draw-independent geometry and pairwise masks for the full population.
    std::map<std::uint64_t, ErrorGeometry> geos;
    std::map<std::uint64_t, std::map<std::uint64_t, Mask>> masks;
    for (std::uint64_t x : pop.members) {
      geos.emplace(x, ErrorGeometry(source, metric, n,
                                    sequence_digits(x, source.x_size(), n)));
      auto& row = masks[x];
      for (std::uint64_t c : pop.members) {
        if (c == x) continue;
        row.emplace(c, geos.at(x).competitor_mask(
                           metric, sequence_digits(c, source.x_size(), n)));
      }
    }

    // Lemma bound: expectation over the full-population ensemble.
    for (std::uint64_t x : pop.members) {
      std::vector<const Mask*> mlist;
      for (std::uint64_t c : pop.members) {
        if (c != x) mlist.push_back(&masks.at(x).at(c));
      }
      const ExpectationResult e = pe_power_expectation(
          geos.at(x), mlist, pop.round_bins, rho, root.split(0xE5 + pi).split(x));
      note_estimate(e);
      lemma_bound[x] = std::pow(2.0 * e.value, rho);
    }

    std::vector<std::uint64_t> remaining = pop.members;
    const int max_rounds = pop.k_rounds + 8;  // integer-halving slack
    for (int round = 1; !remaining.empty() && round <= max_rounds; ++round) {
      // Round thresholds: expectations over the current population.
      std::map<std::uint64_t, double> threshold;
      for (std::uint64_t x : remaining) {
        std::vector<const Mask*> mlist;
        for (std::uint64_t c : remaining) {
          if (c != x) mlist.push_back(&masks.at(x).at(c));
        }
        const ExpectationResult e = pe_power_expectation(
            geos.at(x), mlist, pop.round_bins, rho,
            root.split(0xEE7 + pi).split(static_cast<std::uint64_t>(round)).split(x));
        note_estimate(e);
        threshold[x] = 2.0 * e.value;
      }

      bool accepted = false;
      for (int attempt = 0; attempt < 64 && !accepted; ++attempt) {
        CounterRng draw = root.split(0xC0DE + pi)
                              .split(static_cast<std::uint64_t>(round) * 100 +
                                     static_cast<std::uint64_t>(attempt));
        std::vector<std::uint32_t> bins(remaining.size());
        for (std::size_t i = 0; i < remaining.size(); ++i) {
          bins[i] = draw.below(i, static_cast<std::uint32_t>(pop.round_bins));
        }
        std::vector<std::uint64_t> survivors, rest;
        std::vector<std::uint32_t> survivor_bins;
        for (std::size_t i = 0; i < remaining.size(); ++i) {
          const std::uint64_t x = remaining[i];
          const ErrorGeometry& geo = geos.at(x);
          Mask uni(geo.words(), 0);
          for (std::size_t j = 0; j < remaining.size(); ++j) {
            if (j == i || bins[j] != bins[i]) continue;
            const Mask& m = masks.at(x).at(remaining[j]);
            for (std::size_t w = 0; w < uni.size(); ++w) uni[w] |= m[w];
          }
          const double pe = geo.weight_of_union(uni);
          const double lhs = pe > 0.0 ? std::pow(pe, 1.0 / rho) : 0.0;
          if (lhs <= threshold[x] + 1e-15) {
            survivors.push_back(x);
            survivor_bins.push_back(bins[i]);
          } else {
            rest.push_back(x);
          }
        }
        if (2 * survivors.size() >= remaining.size()) {
          accepted = true;
          for (std::size_t i = 0; i < survivors.size(); ++i) {
            code.bins[survivors[i]] =
                pop.bin_offset +
                static_cast<std::uint32_t>((round - 1) * pop.round_bins) + survivor_bins[i];
            round_of[survivors[i]] = round;
          }
          remaining = rest;
        }
      }
      if (!accepted) {
        throw IterationBudgetExceededError(
            "expurgate: a round failed to retain half its population after 64 draws; "
            "this contradicts the expected-survivor guarantee");
      }
    }
    if (!remaining.empty()) {
      throw IterationBudgetExceededError("expurgate: population not exhausted within budget");
    }
  }

  // Final per-sequence verification against the combined code.
  KahanSum avg;
  report.rounds_used = 0;
  for (const auto& [x, r] : round_of) report.rounds_used = std::max(report.rounds_used, r);
  report.codewords_per_round = pops.front().round_bins;
  report.all_satisfied = true;

  const std::vector<double> s_grid = {0.25, 0.5, 1.0, 2.0};
  for (std::uint64_t x = 0; x < count; ++x) {
    SequenceErrorEntry e;
    e.sequence = x;
    e.bin = code.bins[x];
    e.round = round_of.count(x) ? round_of.at(x) : 0;
    e.p_error = exact_error_probability(code, source, metric, x);
    e.lemma_bound = lemma_bound.count(x) ? lemma_bound.at(x) : 0.0;

    const Population& pop =
        ensemble == Ensemble::standard ? pops.front() : pops[code.type_of[x]];
    const double cf = 1.0 / static_cast<double>(pop.round_bins);
    const std::vector<std::uint8_t> xd = sequence_digits(x, source.x_size(), n);
    double chained = 0.0;
    if (joint_seq_prob_x(source, xd) > 0.0) {
      chained = kPosInf;
      for (double s : s_grid) {
        // per-letter g_s(a, b) = sum_y P(y|a) (q(b,y)/q(a,y))^s
        Matrix g(source.x_size(), source.x_size(), 0.0);
        for (std::size_t aa = 0; aa < source.x_size(); ++aa) {
          for (std::size_t bb = 0; bb < source.x_size(); ++bb) {
            double acc = 0.0;
            for (std::size_t y = 0; y < source.y_size(); ++y) {
              const double pyx = source.y_given_x(y, aa);
              if (pyx <= 0.0) continue;
              acc += pyx * std::exp(s_times_log(s, metric.log_q(bb, y)) -
                                    s_times_log(s, metric.log_q(aa, y)));
            }
            g(aa, bb) = acc;
          }
        }
        KahanSum sum;
        for (std::uint64_t c : pop.members) {
          const std::vector<std::uint8_t> cd = sequence_digits(c, source.x_size(), n);
          double w = 1.0;
          for (int i = 0; i < n; ++i) {
            w *= g(xd[static_cast<std::size_t>(i)], cd[static_cast<std::size_t>(i)]);
          }
          sum.add(std::pow(w, 1.0 / rho));
        }
        chained = std::min(chained, std::pow(2.0 * cf * sum.value(), rho));
      }
    } else {
      e.lemma_bound = 0.0;
    }
    e.chained_bound = chained;
    e.ok_lemma = e.p_error <= e.lemma_bound + 1e-12;
    e.ok_chained = e.p_error <= e.chained_bound + 1e-12;
    report.all_satisfied = report.all_satisfied && e.ok_lemma && e.ok_chained;
    avg.add(joint_seq_prob_x(source, xd) * e.p_error);
    report.entries.push_back(e);
  }
  report.code_average = avg.value();
  return {std::move(code), std::move(report)};
}

std::vector<EmpiricalPoint> empirical_exponent(const JointSource& source,
                                               const DecodingMetric& metric, double rate,
                                               Ensemble ensemble, std::span<const int> n_list,
                                               std::uint64_t seed, std::size_t trials) {
  if (trials < 1) throw DimensionMismatchError("empirical_exponent: trials must be >= 1");
  std::vector<EmpiricalPoint> out;
  for (int n : n_list) {
    EmpiricalPoint pt;
    pt.n = n;
    pt.M = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(std::llround(std::exp(rate * static_cast<double>(n)))));
    // average of exact per-code errors over sampled codes; a draw without
    // collisions gives exactly zero, reported as a +inf exponent sample
    const std::uint64_t count = sequence_count(source.x_size(), n);
    CounterRng rng(seed + static_cast<std::uint64_t>(n));
    KahanSum acc;
    for (std::size_t t = 0; t < trials; ++t) {
      const BinningCode code =
          sample_code(source.x_size(), n, pt.M, ensemble, rng.split(t).bits(0));
      KahanSum code_err;
      for (std::uint64_t x = 0; x < count; ++x) {
        double px = 1.0;
        for (std::uint8_t d : sequence_digits(x, source.x_size(), n)) px *= source.px(d);
        if (px == 0.0) continue;
        code_err.add(px * exact_error_probability(code, source, metric, x));
      }
      acc.add(code_err.value());
    }
    pt.p_error = acc.value() / static_cast<double>(trials);
    pt.exact = true;  // per-code errors are exact enumerations
    pt.exponent =
        pt.p_error > 0.0 ? -std::log(pt.p_error) / static_cast<double>(n) : kPosInf;
    out.push_back(pt);
  }
  return out;
}

}  // namespace swexp
