#pragma once

#include <string>

#include "json.hpp"

#include "dspectra/measure.hpp"

namespace dspectra {

/// Builds a measure from its JSON description. Accepted shapes:
///   {"type":"dirac",   "position":"num/den", "resolution":K}
///   {"type":"uniform", "resolution":K}
///   {"type":"sparse",  "cells":[...], "resolution":K, "weights":["num/den",...]?}
///   {"type":"cantor",  "pattern":[1|2|3,...]}            (length = depth)
///   {"type":"riesz",   "kmax":k, "resolution":K}
///   {"type":"liouville", "levels":[[M,exp],...], "resolution":K}
///   {"type":"convolve_power", "base":{...}, "power":m}   (re-coarsened each step)
DyadicMeasure measure_from_json(const nlohmann::json& j);

/// Parses `arg` as inline JSON when it starts with '{', otherwise as a path.
DyadicMeasure measure_from_arg(const std::string& arg);

nlohmann::json measure_to_json(const DyadicMeasure& mu);
std::string measure_to_csv(const DyadicMeasure& mu);  // index,numerator,denominator

/// Deterministic generator for property suites: a positive probability measure
/// on at most max_cells level-K cells, with rational weights.
DyadicMeasure random_sparse_measure(std::uint64_t seed, int K, std::uint64_t max_cells);

void write_atomic(const std::string& path, const std::string& contents);

}  // namespace dspectra
