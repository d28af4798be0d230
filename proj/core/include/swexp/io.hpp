#pragma once

#include <string>

#include "swexp/metric.hpp"
#include "swexp/source.hpp"

namespace swexp {

/// Load {"pmf": [[...]], "labels_x": [...], "labels_y": [...]} (labels
/// optional). Ragged rows, negative entries and parse failures raise Error
/// subclasses with the offending row in the message.
JointSource load_source_json(const std::string& path);

/// Load {"q": [[...]]}.
DecodingMetric load_metric_json(const std::string& path);

/// Resolve a metric spec: "matched", "hamming:DELTA", or a JSON file path.
DecodingMetric resolve_metric(const std::string& spec, const JointSource& source);

}  // namespace swexp
