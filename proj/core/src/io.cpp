#include "swexp/io.hpp"

#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "swexp/errors.hpp"

namespace swexp {

namespace {

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("parse error in " + path + ": " + e.what());
  }
  return j;
}

Matrix parse_matrix(const nlohmann::json& rows, const std::string& what) {
  if (!rows.is_array() || rows.empty()) {
    throw DimensionMismatchError(what + " must be a nonempty array of rows");
  }
  std::vector<std::vector<double>> data;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (!row.is_array()) {
      throw DimensionMismatchError(what + " row " + std::to_string(r) + " is not an array");
    }
    std::vector<double> vals;
    for (const auto& v : row) {
      if (!v.is_number()) {
        throw NonFiniteError(what + " row " + std::to_string(r) + " holds a non-number");
      }
      vals.push_back(v.get<double>());
    }
    data.push_back(std::move(vals));
  }
  return Matrix::from_rows(data);
}

}  // namespace

JointSource load_source_json(const std::string& path) {
  const nlohmann::json j = load_json(path);
  if (!j.contains("pmf")) throw Error(path + ": missing \"pmf\" field");
  return validate_source(parse_matrix(j["pmf"], "pmf"));
}

DecodingMetric load_metric_json(const std::string& path) {
  const nlohmann::json j = load_json(path);
  if (!j.contains("q")) throw Error(path + ": missing \"q\" field");
  return DecodingMetric::from_matrix(parse_matrix(j["q"], "q"));
}

DecodingMetric resolve_metric(const std::string& spec, const JointSource& source) {
  if (spec == "matched") return matched_metric(source);
  if (spec.rfind("hamming:", 0) == 0) {
    if (source.x_size() != source.y_size()) {
      throw DimensionMismatchError("hamming metric needs |X| == |Y|");
    }
    double delta = 0.0;
    try {
      delta = std::stod(spec.substr(8));
    } catch (const std::exception&) {
      throw Error("bad hamming spec '" + spec + "'; expected hamming:DELTA");
    }
    return hamming_metric(source.x_size(), delta);
  }
  DecodingMetric m = load_metric_json(spec);
  require_compatible(source, m);
  return m;
}

}  // namespace swexp
