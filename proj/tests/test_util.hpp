#pragma once

#include <string>
#include <vector>

#include "swexp/matrix.hpp"
#include "swexp/metric.hpp"
#include "swexp/rng.hpp"
#include "swexp/source.hpp"

namespace testutil {

inline swexp::Matrix paper_pmf() {
  return swexp::Matrix::from_rows({{0.49, 0.005, 0.005},
                                   {0.015, 0.27, 0.015},
                                   {0.05, 0.05, 0.1}});
}

inline swexp::JointSource paper_source() { return swexp::validate_source(paper_pmf()); }

inline std::string data_path(const std::string& name) {
  return std::string(SWEXP_TEST_DATA_DIR) + "/" + name;
}

/// Random joint source with full support, Dirichlet-ish via normalized draws.
inline swexp::JointSource random_source(std::size_t x, std::size_t y, std::uint64_t seed) {
  swexp::CounterRng rng(seed, 17);
  swexp::Matrix m(x, y);
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < x; ++i) {
    for (std::size_t j = 0; j < y; ++j) {
      m(i, j) = 0.05 + rng.uniform01(c++);
    }
  }
  return swexp::validate_source(m);
}

/// Random strictly positive metric.
inline swexp::DecodingMetric random_metric(std::size_t x, std::size_t y, std::uint64_t seed) {
  swexp::CounterRng rng(seed, 23);
  swexp::Matrix m(x, y);
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < x; ++i) {
    for (std::size_t j = 0; j < y; ++j) {
      m(i, j) = 0.05 + rng.uniform01(c++);
    }
  }
  return swexp::DecodingMetric::from_matrix(m);
}

}  // namespace testutil
