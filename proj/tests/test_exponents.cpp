#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "swexp/cost.hpp"
#include "swexp/exponents.hpp"
#include "swexp/numerics.hpp"
#include "swexp/rates.hpp"
#include "test_util.hpp"

using namespace swexp;

namespace {

// Independent long-double oracles: direct transcription of the objective
// sums, no log-domain tricks, no shared code with the library.

long double oracle_e0(const JointSource& src, long double rho) {
  long double total = 0.0L;
  for (std::size_t y = 0; y < src.y_size(); ++y) {
    if (src.py(y) <= 0.0) continue;
    long double inner = 0.0L;
    for (std::size_t x = 0; x < src.x_size(); ++x) {
      const long double c = src.x_given_y(x, y);
      if (c > 0.0L) inner += powl(c, 1.0L / (1.0L + rho));
    }
    total += static_cast<long double>(src.py(y)) * powl(inner, 1.0L + rho);
  }
  return logl(total);
}

long double oracle_std_rc(const JointSource& src, const DecodingMetric& q, long double rho,
                          long double s) {
  long double total = 0.0L;
  for (std::size_t x = 0; x < src.x_size(); ++x) {
    for (std::size_t y = 0; y < src.y_size(); ++y) {
      if (src.p(x, y) <= 0.0) continue;
      long double inner = 0.0L;
      for (std::size_t xb = 0; xb < src.x_size(); ++xb) {
        inner += powl(static_cast<long double>(q.q(xb, y)) / q.q(x, y), s);
      }
      total += static_cast<long double>(src.p(x, y)) * powl(inner, rho);
    }
  }
  return logl(total);
}

long double oracle_tt_rc(const JointSource& src, const DecodingMetric& q, long double rho,
                         long double s, const std::vector<long double>& a) {
  long double total = 0.0L;
  for (std::size_t x = 0; x < src.x_size(); ++x) {
    for (std::size_t y = 0; y < src.y_size(); ++y) {
      if (src.p(x, y) <= 0.0) continue;
      long double inner = 0.0L;
      for (std::size_t xb = 0; xb < src.x_size(); ++xb) {
        inner += expl(a[xb] - a[x]) * powl(static_cast<long double>(q.q(xb, y)) / q.q(x, y), s);
      }
      total += static_cast<long double>(src.p(x, y)) * powl(inner, rho);
    }
  }
  return logl(total);
}

long double oracle_tt_ex(const JointSource& src, const DecodingMetric& q, long double rho,
                         long double s, const std::vector<long double>& a) {
  long double total = 0.0L;
  for (std::size_t x = 0; x < src.x_size(); ++x) {
    long double mid = 0.0L;
    for (std::size_t xb = 0; xb < src.x_size(); ++xb) {
      long double inner = 0.0L;
      for (std::size_t y = 0; y < src.y_size(); ++y) {
        if (src.p(x, y) <= 0.0) continue;
        inner += static_cast<long double>(src.p(x, y)) * expl(a[xb] - a[x]) *
                 powl(static_cast<long double>(q.q(xb, y)) / q.q(x, y), s);
      }
      if (inner > 0.0L) mid += powl(inner, 1.0L / rho);
    }
    if (mid > 0.0L) total += powl(mid, rho);
  }
  return logl(total);
}

JointSource point_mass_1x1() { return validate_source(Matrix::from_rows({{1.0}})); }

// q(x,y) = e^{b(x)+c(y)} P_{X|Y}(x|y)^tau: the family that attains the
// matched exponents under the type-by-type ensemble.
DecodingMetric tilted_matched_family(const JointSource& src, std::span<const double> b,
                                     std::span<const double> c, double tau) {
  Matrix m(src.x_size(), src.y_size());
  for (std::size_t x = 0; x < src.x_size(); ++x) {
    for (std::size_t y = 0; y < src.y_size(); ++y) {
      m(x, y) = std::exp(b[x] + c[y]) * std::pow(src.x_given_y(x, y), tau);
    }
  }
  return DecodingMetric::from_matrix(m);
}

}  // namespace

TEST_CASE("gallager E0 basics") {
  const JointSource src = testutil::paper_source();
  CHECK(std::abs(gallager_e0(src, 0.0)) <= 1e-12);

  Matrix m(3, 3, 0.0);
  m(2, 1) = 1.0;
  const JointSource pm = validate_source(m);
  for (double rho : {0.3, 1.0, 7.0}) CHECK(std::abs(gallager_e0(pm, rho)) <= 1e-12);

  const double hi = static_cast<double>(oracle_e0(src, 1.0L));
  CHECK(gallager_e0(src, 1.0) == doctest::Approx(hi).epsilon(1e-13));
}

TEST_CASE("random-coding exponent of the matched decoder") {
  const JointSource src = testutil::paper_source();
  const double h = conditional_entropy(src);

  const ExponentPoint low = exponent_r_gallager(src, h - 0.05);
  CHECK(low.value == 0.0);
  CHECK(low.argmax.rho <= 1e-4);

  const ExponentPoint pm = exponent_r_gallager(point_mass_1x1(), 0.37);
  CHECK(pm.value == doctest::Approx(0.37).epsilon(1e-10));
  CHECK(pm.argmax.rho == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("sphere packing exponent") {
  const JointSource src = testutil::paper_source();
  const double h = conditional_entropy(src);

  CHECK(exponent_sp(src, h - 0.02).value == 0.0);

  // below the critical rate the two exponents coincide
  for (double r : {0.55, 0.65, 0.75}) {
    CHECK(std::abs(exponent_sp(src, r).value - exponent_r_gallager(src, r).value) <= 1e-9);
  }
  CHECK(exponent_sp(src, 1.0).value > exponent_r_gallager(src, 1.0).value);

  // past log|S(X)| the supremum runs away with the cap
  const ExponentPoint sat64 = exponent_sp(src, 1.2, 64.0);
  const ExponentPoint sat128 = exponent_sp(src, 1.2, 128.0);
  CHECK(sat64.saturated_rho);
  CHECK(sat128.value > sat64.value);
}

TEST_CASE("standard rc objective") {
  const JointSource src = testutil::paper_source();
  const DecodingMetric q = hamming_metric(3, 0.1);

  CHECK(std_rc_objective(src, q, 0.7, 0.0) ==
        doctest::Approx(0.7 * std::log(3.0)).epsilon(1e-12));
  CHECK(std::abs(std_rc_objective(src, q, 0.0, 0.8)) <= 1e-12);

  const double hi = static_cast<double>(oracle_std_rc(src, q, 0.5L, 0.5L));
  CHECK(std_rc_objective(src, q, 0.5, 0.5) == doctest::Approx(hi).epsilon(1e-13));
}

TEST_CASE("standard ex objective") {
  const JointSource src = testutil::paper_source();
  const DecodingMetric q = hamming_metric(3, 0.1);

  CHECK(std_ex_objective(src, q, 2.0, 0.0) ==
        doctest::Approx(2.0 * std::log(3.0)).epsilon(1e-12));

  const JointSource pm = point_mass_1x1();
  const DecodingMetric qpm = DecodingMetric::from_matrix(Matrix::from_rows({{0.6}}));
  for (double rho : {1.0, 2.0, 8.0}) {
    for (double s : {0.0, 0.5, 2.0}) {
      CHECK(std::abs(std_ex_objective(pm, qpm, rho, s)) <= 1e-12);
    }
  }

  // at rho = 1 the ex and rc objectives agree
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const JointSource rnd = testutil::random_source(3, 3, seed);
    const DecodingMetric rq = testutil::random_metric(3, 3, seed + 100);
    for (double s : {0.2, 1.0, 3.0}) {
      CHECK(std::abs(std_ex_objective(rnd, rq, 1.0, s) - std_rc_objective(rnd, rq, 1.0, s)) <=
            1e-12);
    }
  }
}

TEST_CASE("tt objectives reduce, stay gauge invariant, and match the oracle") {
  const JointSource src = testutil::paper_source();
  const DecodingMetric q = hamming_metric(3, 0.1);
  const std::vector<double> zeros(3, 0.0);
  const std::vector<double> a{0.1, -0.1, 0.0};

  for (double rho : {0.4, 1.0}) {
    for (double s : {0.3, 1.2}) {
      CHECK(std::abs(tt_rc_objective(src, q, rho, s, zeros) -
                     std_rc_objective(src, q, rho, s)) <= 1e-13);
    }
  }
  for (double rho : {1.0, 3.0}) {
    CHECK(std::abs(tt_ex_objective(src, q, rho, 0.7, zeros) -
                   std_ex_objective(src, q, rho, 0.7)) <= 1e-13);
  }

  // gauge invariance: a -> a + c leaves both objectives unchanged
  std::vector<double> shifted{0.1 + 3.7, -0.1 + 3.7, 0.0 + 3.7};
  CHECK(std::abs(tt_rc_objective(src, q, 0.8, 0.9, a) -
                 tt_rc_objective(src, q, 0.8, 0.9, shifted)) <= 1e-12);
  CHECK(std::abs(tt_ex_objective(src, q, 2.0, 0.9, a) -
                 tt_ex_objective(src, q, 2.0, 0.9, shifted)) <= 1e-12);

  const std::vector<long double> al{0.1L, -0.1L, 0.0L};
  CHECK(tt_rc_objective(src, q, 1.0, 1.0, a) ==
        doctest::Approx(static_cast<double>(oracle_tt_rc(src, q, 1.0L, 1.0L, al)))
            .epsilon(1e-13));
  CHECK(tt_ex_objective(src, q, 1.0, 1.0, a) ==
        doctest::Approx(static_cast<double>(oracle_tt_ex(src, q, 1.0L, 1.0L, al)))
            .epsilon(1e-13));

  // rho = 1 identity for the tt pair on random instances
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const JointSource rnd = testutil::random_source(3, 3, seed);
    const DecodingMetric rq = testutil::random_metric(3, 3, seed + 9);
    CHECK(std::abs(tt_ex_objective(rnd, rq, 1.0, 0.8, a) -
                   tt_rc_objective(rnd, rq, 1.0, 0.8, a)) <= 1e-12);
  }
}

TEST_CASE("matched decoding recovers the Gallager exponent") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const JointSource src = testutil::random_source(3, 3, seed);
    const DecodingMetric q = matched_metric(src);
    const double h = conditional_entropy(src);
    for (double r : {h + 0.1, h + 0.3}) {
      const double er = exponent_r_gallager(src, r).value;
      CHECK(std::abs(exponent_std_rc(src, q, r).value - er) <= 1e-6);
      CHECK(std::abs(exponent_tt_rc(src, q, r).value - er) <= 1e-5);
    }
  }
}

TEST_CASE("std rc exponent thresholds and power invariance") {
  const JointSource src = testutil::paper_source();
  const DecodingMetric q = hamming_metric(3, 0.1);
  const double hq = rate_std(src, q).value;

  CHECK(exponent_std_rc(src, q, hq - 1e-3).value == 0.0);
  CHECK(exponent_std_rc(src, q, hq + 0.02).value > 0.0);

  const DecodingMetric q_squared = q.scaled_power(1.0, 2.0);
  for (double r : {0.7, 0.9}) {
    CHECK(std::abs(exponent_std_rc(src, q, r).value -
                   exponent_std_rc(src, q_squared, r).value) <= 1e-6);
  }
}

TEST_CASE("std ex exponent dominates the rc objective at rho = 1") {
  const JointSource src = testutil::paper_source();
  const DecodingMetric q = hamming_metric(3, 0.1);
  for (double r : {0.8, 0.95, 1.05}) {
    double best_rho1 = -1e9;
    for (double s = 1e-3; s < 50.0; s *= 1.15) {
      best_rho1 = std::max(best_rho1, r - std_rc_objective(src, q, 1.0, s));
    }
    CHECK(exponent_std_ex(src, q, r).value >= best_rho1 - 1e-7);
  }

  // point mass: objective vanishes identically, so the cap decides
  const JointSource pm = point_mass_1x1();
  const DecodingMetric qpm = DecodingMetric::from_matrix(Matrix::from_rows({{1.0}}));
  ExponentOptions opts;
  const ExponentPoint p = exponent_std_ex(pm, qpm, 0.25, opts);
  CHECK(p.value == doctest::Approx(opts.rho_cap * 0.25).epsilon(1e-9));
  CHECK(p.saturated_rho);
}

TEST_CASE("tt rc exponent attains the matched optimum for the tilted family") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const JointSource src = testutil::random_source(3, 3, seed + 40);
    const std::vector<double> b{0.3, -0.2, 0.1};
    const std::vector<double> c{-0.4, 0.2, 0.0};
    const DecodingMetric q = tilted_matched_family(src, b, c, 1.7);
    const double h = conditional_entropy(src);
    for (double r : {h + 0.12, h + 0.3}) {
      const double er = exponent_r_gallager(src, r).value;
      CHECK(std::abs(exponent_tt_rc(src, q, r).value - er) <= 1e-5);
      // sandwich: std <= tt <= matched
      const double estd = exponent_std_rc(src, q, r).value;
      const double ett = exponent_tt_rc(src, q, r).value;
      CHECK(estd <= ett + 1e-6);
      CHECK(ett <= er + 1e-6);
    }
  }
}

TEST_CASE("tt thresholds come from the rates module") {
  const JointSource src = testutil::paper_source();
  const DecodingMetric q = hamming_metric(3, 0.1);
  const double htt = rate_tt(src, q).value;
  CHECK(exponent_tt_rc(src, q, htt - 1e-3).value == 0.0);
  CHECK(exponent_tt_rc(src, q, htt + 0.02).value > 0.0);
}

TEST_CASE("tt ex exponent: family reduction and ordering") {
  const JointSource src = testutil::paper_source();
  const std::vector<double> b{0.2, -0.1, -0.1};
  const std::vector<double> c{0.1, -0.3, 0.2};
  const DecodingMetric q28 = tilted_matched_family(src, b, c, 1.4);
  for (double r : {0.7, 0.9, 1.05}) {
    CHECK(std::abs(exponent_tt_ex(src, q28, r).value - matched_ex_tt(src, r).value) <= 1e-4);
  }

  const DecodingMetric qh = hamming_metric(3, 0.1);
  for (double r : {0.8, 1.0}) {
    CHECK(exponent_std_ex(src, qh, r).value <= exponent_tt_ex(src, qh, r).value + 1e-5);
    CHECK(exponent_tt_ex(src, qh, r).value <= matched_ex_tt(src, r).value + 1e-5);
  }
}

TEST_CASE("matched expurgated exponents") {
  const JointSource src = testutil::paper_source();
  const DecodingMetric qm = matched_metric(src);

  // the standard-ensemble specialization is the std ex exponent at matched q
  for (double r : {0.8, 1.0}) {
    CHECK(matched_ex_std(src, r).value == exponent_std_ex(src, qm, r).value);
    CHECK(matched_ex_std(src, r).value <= matched_ex_tt(src, r).value + 1e-6);
  }

  // the tt specialization equals the full tt optimization at the matched metric
  for (double r : {0.75, 0.9, 1.05}) {
    CHECK(std::abs(matched_ex_tt(src, r).value - exponent_tt_ex(src, qm, r).value) <= 1e-5);
  }

  // 1x1 point mass: zero threshold at rate zero
  const JointSource pm = point_mass_1x1();
  CHECK(matched_ex_std(pm, 0.0).value == 0.0);
  CHECK(matched_ex_std(pm, 0.05).value > 0.0);
}

TEST_CASE("no-side-information exponent") {
  const std::vector<double> px{0.6, 0.25, 0.15};

  // matched metric recovers the optimal-code exponent
  for (double r : {0.95, 1.05}) {
    const double opt = no_si_optimal_exponent(px, r);
    CHECK(std::abs(exponent_no_si(px, px, r).value - opt) <= 1e-6);
  }

  // uniform metric: value is rho_cap (R - log|X|)^+ whatever the source
  ExponentOptions opts;
  const std::vector<double> qu{1.0, 1.0, 1.0};
  CHECK(exponent_no_si(px, qu, std::log(3.0) - 0.1, opts).value == 0.0);
  CHECK(exponent_no_si(px, qu, std::log(3.0), opts).value <= 1e-9);
  CHECK(exponent_no_si(px, qu, std::log(3.0) + 0.1, opts).value ==
        doctest::Approx(opts.rho_cap * 0.1).epsilon(1e-6));

  // uniform source at rate log|X|: zero
  const std::vector<double> pu{1.0 / 3, 1.0 / 3, 1.0 / 3};
  CHECK(exponent_no_si(pu, px, std::log(3.0)).value <= 1e-9);
}

TEST_CASE("no-side-information cost substitution collapses both tt objectives") {
  // With |Y| = 1, s = 0 and a tilted by log P_X the tt objectives reduce to
  // (1+rho) log sum_x P(x)^{1/(1+rho)}: a(x) = log P(x)/(1+rho) on the rc
  // branch and a(x) = rho log P(x)/(1+rho) on the ex branch.
  const std::vector<double> px{0.55, 0.3, 0.15};
  Matrix pm(3, 1);
  for (std::size_t i = 0; i < 3; ++i) pm(i, 0) = px[i];
  const JointSource src = validate_source(pm);
  const DecodingMetric q = testutil::random_metric(3, 1, 91);

  auto renyi_like = [&](double rho) {
    double s = 0.0;
    for (double p : px) s += std::pow(p, 1.0 / (1.0 + rho));
    return (1.0 + rho) * std::log(s);
  };
  for (double rho : {0.3, 0.8, 1.0}) {
    std::vector<double> a(3);
    for (std::size_t i = 0; i < 3; ++i) a[i] = std::log(px[i]) / (1.0 + rho);
    CHECK(std::abs(tt_rc_objective(src, q, rho, 0.0, a) - renyi_like(rho)) <= 1e-12);
  }
  for (double rho : {1.0, 2.5, 6.0}) {
    std::vector<double> a(3);
    for (std::size_t i = 0; i < 3; ++i) a[i] = rho * std::log(px[i]) / (1.0 + rho);
    CHECK(std::abs(tt_ex_objective(src, q, rho, 0.0, a) - renyi_like(rho)) <= 1e-12);
  }
}

TEST_CASE("type-by-type exponent is metric independent without side information") {
  const std::vector<double> px{0.5, 0.3, 0.2};
  Matrix pm(3, 1);
  for (std::size_t i = 0; i < 3; ++i) pm(i, 0) = px[i];
  const JointSource src = validate_source(pm);

  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const DecodingMetric q = testutil::random_metric(3, 1, seed + 5);
    for (double r : {1.0, 1.05}) {
      const ExponentPoint tt = combined_exponent(src, q, r, Ensemble::type_by_type);
      CHECK(std::abs(tt.value - no_si_optimal_exponent(px, r)) <= 1e-6);
    }
  }
}

TEST_CASE("combined exponent branch bookkeeping") {
  const JointSource src = testutil::paper_source();
  const DecodingMetric q = hamming_metric(3, 0.1);

  const ExponentPoint low = combined_exponent(src, q, 0.6, Ensemble::standard);
  CHECK(low.branch == ExponentBranch::rc);

  const ExponentPoint high = combined_exponent(src, q, 1.05, Ensemble::standard);
  CHECK(high.branch == ExponentBranch::ex);
  CHECK(high.value > exponent_std_rc(src, q, 1.05).value);

  const JointSource pm = point_mass_1x1();
  const DecodingMetric qpm = DecodingMetric::from_matrix(Matrix::from_rows({{1.0}}));
  ExponentOptions opts;
  const ExponentPoint p = combined_exponent(pm, qpm, 0.3, Ensemble::standard, opts);
  CHECK(p.value == doctest::Approx(opts.rho_cap * 0.3).epsilon(1e-9));
}

TEST_CASE("tilted distributions") {
  const JointSource src = testutil::paper_source();
  const DecodingMetric q = hamming_metric(3, 0.1);

  const TiltedDistributions t = tilted_distributions(src, q, 0.8);
  double s_rc = 0.0, s_ex = 0.0;
  for (std::size_t x = 0; x < 3; ++x) {
    s_rc += t.rc[x];
    s_ex += t.ex[x];
  }
  CHECK(std::abs(s_rc - 1.0) <= 1e-12);
  CHECK(std::abs(s_ex - 1.0) <= 1e-12);

  // matched metric at the conditional entropy: rho* = 0 collapses the tilt
  const DecodingMetric qm = matched_metric(src);
  const TiltedDistributions tm = tilted_distributions(src, qm, conditional_entropy(src));
  for (std::size_t x = 0; x < 3; ++x) {
    CHECK(std::abs(tm.rc[x] - src.px(x)) <= 1e-6);
  }

  // constant-composition decomposition at the ex argmax reproduces the
  // exponent: D(Q~||P_X) + [cc value at the mapped parameters] - rho (H(Q~)-R)
  const ExponentPoint ex = exponent_tt_ex(src, q, 0.8);
  const double rho = ex.argmax.rho;
  const double s = ex.argmax.s;
  std::span<const double> a = ex.argmax.a->values();
  const std::vector<double>& qt = t.ex;

  std::vector<double> b(3);
  for (std::size_t x = 0; x < 3; ++x) b[x] = a[x] - rho * std::log(qt[x]);
  double cc = 0.0;  // E_x^cc evaluated at (s, b)
  for (std::size_t x = 0; x < 3; ++x) {
    double mid = 0.0;
    for (std::size_t xb = 0; xb < 3; ++xb) {
      double inner = 0.0;
      for (std::size_t y = 0; y < 3; ++y) {
        inner += src.y_given_x(y, x) * std::exp(b[xb] - b[x]) *
                 std::pow(q.q(xb, y) / q.q(x, y), s);
      }
      mid += qt[xb] * std::pow(inner, 1.0 / rho);
    }
    cc += qt[x] * std::log(mid);
  }
  cc *= -rho;
  const double hq = entropy(qt);
  const double d = kl_divergence(qt, src.px());
  CHECK(std::abs(d + cc - rho * (hq - 0.8) - ex.value) <= 1e-3);
}

TEST_CASE("ordering chains on random instances") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const JointSource src = testutil::random_source(3, 3, seed + 60);
    const DecodingMetric q = testutil::random_metric(3, 3, seed + 80);
    const double h = conditional_entropy(src);
    for (double r : {h + 0.15, h + 0.4}) {
      const double e_q_rc = exponent_std_rc(src, q, r).value;
      const double e_tt_rc = exponent_tt_rc(src, q, r).value;
      const double e_r = exponent_r_gallager(src, r).value;
      CHECK(e_q_rc <= e_tt_rc + 1e-6);
      CHECK(e_tt_rc <= e_r + 1e-6);

      const double e_q_ex = exponent_std_ex(src, q, r).value;
      const double e_tt_ex = exponent_tt_ex(src, q, r).value;
      const double e_m_tt = matched_ex_tt(src, r).value;
      const double e_m_std = matched_ex_std(src, r).value;
      CHECK(e_q_ex <= e_tt_ex + 1e-6);
      CHECK(e_tt_ex <= e_m_tt + 1e-6);
      CHECK(e_m_std <= e_m_tt + 1e-6);
    }
  }
}

TEST_CASE("curves are nondecreasing and convex") {
  const JointSource src = testutil::paper_source();
  const DecodingMetric q = hamming_metric(3, 0.1);
  const std::vector<double> rates = linspace(0.45, 1.05, 13);
  for (ExponentFamily fam : {ExponentFamily::std_rc, ExponentFamily::tt_combined,
                             ExponentFamily::gallager_r, ExponentFamily::sphere_packing}) {
    const ExponentCurve curve = evaluate_curve(fam, src, q, rates);
    CHECK(curve_nondecreasing(curve, 1e-6));
    CHECK(curve_convex(curve, 1e-6));
  }
}

TEST_CASE("rc and ex agree at the rho = 1 seam") {
  const JointSource src = testutil::paper_source();
  const DecodingMetric q = hamming_metric(3, 0.1);
  // identical (s, a) at rho = 1 give identical objectives, so the combined
  // exponent cannot jump across the branch switch
  const std::vector<double> a{0.2, -0.3, 0.1};
  for (double s : {0.4, 1.3}) {
    CHECK(std::abs(tt_rc_objective(src, q, 1.0, s, a) - tt_ex_objective(src, q, 1.0, s, a)) <=
          1e-12);
  }
}

TEST_CASE("sparse-support sources exercise the zero-metric paths") {
  const JointSource src =
      validate_source(Matrix::from_rows({{0.5, 0.0}, {0.0, 0.3}, {0.1, 0.1}}));
  const DecodingMetric qm = matched_metric(src);  // zeros on unsupported pairs
  const double h = conditional_entropy(src);
  const double r = h + 0.2;

  const double e_rc = exponent_std_rc(src, qm, r).value;
  const double e_tt = exponent_tt_rc(src, qm, r).value;
  const double e_r = exponent_r_gallager(src, r).value;
  CHECK(std::isfinite(e_rc));
  CHECK(e_rc <= e_tt + 1e-6);
  CHECK(e_tt <= e_r + 1e-6);
  CHECK(std::abs(e_rc - e_r) <= 1e-6);  // matched metric

  const double ex_tt = matched_ex_tt(src, r).value;
  CHECK(std::isfinite(ex_tt));
  CHECK(exponent_tt_ex(src, qm, r).value <= ex_tt + 1e-5);

  const RateThreshold t = rate_tt(src, qm);
  CHECK(std::abs(t.value - h) <= 1e-8);
}

TEST_CASE("exponent evaluation is deterministic") {
  const JointSource src = testutil::paper_source();
  const DecodingMetric q = hamming_metric(3, 0.1);
  const ExponentPoint a = exponent_tt_ex(src, q, 0.9);
  const ExponentPoint b = exponent_tt_ex(src, q, 0.9);
  CHECK(a.value == b.value);
  CHECK(a.argmax.rho == b.argmax.rho);
  CHECK(a.argmax.s == b.argmax.s);
}
