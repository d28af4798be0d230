#include <benchmark/benchmark.h>

#include "swexp/exponents.hpp"
#include "swexp/matrix.hpp"
#include "swexp/rates.hpp"

namespace {

swexp::JointSource example_source() {
  return swexp::validate_source(swexp::Matrix::from_rows({{0.49, 0.005, 0.005},
                                                          {0.015, 0.27, 0.015},
                                                          {0.05, 0.05, 0.1}}));
}

void BM_GallagerE0(benchmark::State& state) {
  const swexp::JointSource src = example_source();
  double rho = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(swexp::gallager_e0(src, rho));
    rho = rho < 1.0 ? rho + 1e-6 : 0.3;
  }
}
BENCHMARK(BM_GallagerE0);

void BM_StdRcExponent(benchmark::State& state) {
  const swexp::JointSource src = example_source();
  const swexp::DecodingMetric q = swexp::hamming_metric(3, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(swexp::exponent_std_rc(src, q, 0.8));
  }
}
BENCHMARK(BM_StdRcExponent);

void BM_TtRcExponent(benchmark::State& state) {
  const swexp::JointSource src = example_source();
  const swexp::DecodingMetric q = swexp::hamming_metric(3, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(swexp::exponent_tt_rc(src, q, 0.8));
  }
}
BENCHMARK(BM_TtRcExponent);

void BM_TtExExponent(benchmark::State& state) {
  const swexp::JointSource src = example_source();
  const swexp::DecodingMetric q = swexp::hamming_metric(3, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(swexp::exponent_tt_ex(src, q, 1.0));
  }
}
BENCHMARK(BM_TtExExponent);

void BM_RateThresholdTt(benchmark::State& state) {
  const swexp::JointSource src = example_source();
  const swexp::DecodingMetric q = swexp::hamming_metric(3, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(swexp::rate_tt(src, q));
  }
}
BENCHMARK(BM_RateThresholdTt);

}  // namespace
