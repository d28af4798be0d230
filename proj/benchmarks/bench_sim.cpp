#include <benchmark/benchmark.h>

#include "swexp/matrix.hpp"
#include "swexp/sim.hpp"

namespace {

swexp::JointSource binary_source() {
  return swexp::validate_source(swexp::Matrix::from_rows({{0.4, 0.1}, {0.05, 0.45}}));
}

void BM_SampleCode(benchmark::State& state) {
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        swexp::sample_code(2, static_cast<int>(state.range(0)), 16,
                           swexp::Ensemble::standard, seed++));
  }
}
BENCHMARK(BM_SampleCode)->Arg(8)->Arg(12);

void BM_ExactErrorProbability(benchmark::State& state) {
  const swexp::JointSource src = binary_source();
  const swexp::DecodingMetric q = swexp::matched_metric(src);
  const swexp::BinningCode code =
      swexp::sample_code(2, static_cast<int>(state.range(0)), 8, swexp::Ensemble::standard, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(swexp::exact_error_probability(code, src, q, 3));
  }
}
BENCHMARK(BM_ExactErrorProbability)->Arg(6)->Arg(8);

void BM_EnsembleAverageExact(benchmark::State& state) {
  const swexp::JointSource src = binary_source();
  const swexp::DecodingMetric q = swexp::matched_metric(src);
  for (auto _ : state) {
    benchmark::DoNotOptimize(swexp::ensemble_average_error(
        src, q, static_cast<int>(state.range(0)), 8, swexp::Ensemble::standard, 1, 3));
  }
}
BENCHMARK(BM_EnsembleAverageExact)->Arg(4)->Arg(6);

void BM_Expurgate(benchmark::State& state) {
  const swexp::JointSource src = binary_source();
  const swexp::DecodingMetric q = swexp::matched_metric(src);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        swexp::expurgate(src, q, 4, 8, swexp::Ensemble::standard, 1.0, seed++));
  }
}
BENCHMARK(BM_Expurgate);

}  // namespace

BENCHMARK_MAIN();
