#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "swexp/exponents.hpp"
#include "swexp/rates.hpp"
#include "test_util.hpp"

using namespace swexp;

namespace {

double mutual_information(const JointSource& src) {
  double mi = 0.0;
  for (std::size_t x = 0; x < src.x_size(); ++x) {
    for (std::size_t y = 0; y < src.y_size(); ++y) {
      if (src.p(x, y) > 0.0) {
        mi += src.p(x, y) * std::log(src.p(x, y) / (src.px(x) * src.py(y)));
      }
    }
  }
  return mi;
}

Matrix channel_of(const JointSource& src) {
  Matrix w(src.x_size(), src.y_size());
  for (std::size_t x = 0; x < src.x_size(); ++x) {
    for (std::size_t y = 0; y < src.y_size(); ++y) w(x, y) = src.y_given_x(y, x);
  }
  return w;
}

}  // namespace

TEST_CASE("rate thresholds of the example instance match the published triple") {
  const JointSource src = testutil::paper_source();
  // the Hamming metrics with different delta are powers of one another, so
  // every delta must reproduce the same thresholds
  for (double delta : {0.05, 0.1, 0.2}) {
    const DecodingMetric q = hamming_metric(3, delta);
    CHECK(std::abs(conditional_entropy(src) - 0.4654) <= 1e-3);
    CHECK(std::abs(rate_std(src, q).value - 0.5020) <= 1e-3);
    CHECK(std::abs(rate_tt(src, q).value - 0.4904) <= 1e-3);
  }
}

TEST_CASE("matched metric collapses the thresholds to H(X|Y)") {
  const JointSource src = testutil::paper_source();
  const DecodingMetric qm = matched_metric(src);
  const double h = conditional_entropy(src);
  const RateThreshold s = rate_std(src, qm);
  const RateThreshold t = rate_tt(src, qm);
  CHECK(std::abs(s.value - h) <= 1e-9);
  CHECK(std::abs(t.value - h) <= 1e-9);
  CHECK(s.s_star == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("uniform metric columns force log|X| for the standard ensemble") {
  const JointSource src = testutil::paper_source();
  Matrix q(3, 3);
  for (std::size_t x = 0; x < 3; ++x) {
    q(x, 0) = 0.2;
    q(x, 1) = 0.7;
    q(x, 2) = 1.3;
  }
  CHECK(std::abs(rate_std(src, DecodingMetric::from_matrix(q)).value - std::log(3.0)) <= 1e-9);
}

TEST_CASE("threshold ordering and power invariance on random instances") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const JointSource src = testutil::random_source(3, 3, seed);
    const DecodingMetric q = testutil::random_metric(3, 3, seed + 1000);
    const double h = conditional_entropy(src);
    const double std_rate = rate_std(src, q).value;
    const double tt_rate = rate_tt(src, q).value;
    CHECK(h <= tt_rate + 1e-8);
    CHECK(tt_rate <= std_rate + 1e-8);
  }

  const JointSource src = testutil::paper_source();
  const DecodingMetric q = testutil::random_metric(3, 3, 4242);
  CounterRng rng(77);
  for (int t = 0; t < 5; ++t) {
    const double lambda = 0.2 + 2.0 * rng.uniform01(2 * t);
    const double tau = 0.3 + 2.0 * rng.uniform01(2 * t + 1);
    const DecodingMetric q2 = q.scaled_power(lambda, tau);
    CHECK(std::abs(rate_std(src, q).value - rate_std(src, q2).value) <= 1e-6);
    CHECK(std::abs(rate_tt(src, q).value - rate_tt(src, q2).value) <= 1e-6);
  }
}

TEST_CASE("exponent positivity starts at the thresholds") {
  const JointSource src = testutil::paper_source();
  const DecodingMetric q = hamming_metric(3, 0.1);
  const double std_rate = rate_std(src, q).value;
  const double tt_rate = rate_tt(src, q).value;

  CHECK(exponent_std_rc(src, q, std_rate - 1e-3).value == 0.0);
  CHECK(exponent_std_rc(src, q, std_rate + 0.02).value > 0.0);
  CHECK(exponent_tt_rc(src, q, tt_rate - 1e-3).value == 0.0);
  CHECK(exponent_tt_rc(src, q, tt_rate + 0.02).value > 0.0);
}

TEST_CASE("gmi basics") {
  const JointSource src = testutil::paper_source();
  const Matrix w = channel_of(src);
  std::vector<double> px(src.px().begin(), src.px().end());

  // matched metric: gmi is the mutual information, attained at s = 1
  Matrix qw(3, 3);
  for (std::size_t x = 0; x < 3; ++x) {
    for (std::size_t y = 0; y < 3; ++y) qw(x, y) = w(x, y);
  }
  CHECK(std::abs(gmi(px, w, DecodingMetric::from_matrix(qw)) - mutual_information(src)) <=
        1e-9);

  // independence kills the gmi for any metric
  const JointSource ind = validate_source(Matrix::from_rows(
      {{0.3 * 0.5, 0.3 * 0.5}, {0.7 * 0.5, 0.7 * 0.5}}));
  const Matrix wi = channel_of(ind);
  std::vector<double> pxi(ind.px().begin(), ind.px().end());
  const DecodingMetric qi = testutil::random_metric(2, 2, 5);
  CHECK(std::abs(gmi(pxi, wi, qi)) <= 1e-6);
}

TEST_CASE("lm rate dominates gmi and the report identities hold") {
  const JointSource src = testutil::paper_source();
  const Matrix w = channel_of(src);
  std::vector<double> px(src.px().begin(), src.px().end());

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const DecodingMetric q = testutil::random_metric(3, 3, seed + 300);
    CHECK(lm_rate(px, w, q) >= gmi(px, w, q) - 1e-8);
  }

  const RateReport rep = rate_report(src, hamming_metric(3, 0.1));
  CHECK(rep.gmi_crosscheck <= 1e-6);
  CHECK(rep.lm_crosscheck <= 1e-6);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const JointSource rnd = testutil::random_source(3, 3, seed + 7);
    const RateReport r = rate_report(rnd, testutil::random_metric(3, 3, seed + 70));
    CHECK(r.gmi_crosscheck <= 1e-6);
    CHECK(r.lm_crosscheck <= 1e-6);
    CHECK(r.h_xy <= r.tt.value + 1e-8);
    CHECK(r.tt.value <= r.std.value + 1e-8);
  }

  // matched-metric lm rate is the mutual information
  Matrix qw(3, 3);
  for (std::size_t x = 0; x < 3; ++x) {
    for (std::size_t y = 0; y < 3; ++y) qw(x, y) = w(x, y);
  }
  CHECK(std::abs(lm_rate(px, w, DecodingMetric::from_matrix(qw)) - mutual_information(src)) <=
        1e-8);
}

TEST_CASE("boundary hits in the s search are reported") {
  const JointSource src = testutil::paper_source();
  // a tiny metric power pushes s* = 1/tau past the top of the search range
  const DecodingMetric q = matched_metric(src).scaled_power(1.0, 1e-5);
  const RateThreshold t = rate_std(src, q);
  CHECK(t.s_at_boundary);
}
