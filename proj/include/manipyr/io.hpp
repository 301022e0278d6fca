#pragma once

#include <string>

#include <json.hpp>

#include "manipyr/apps.hpp"
#include "manipyr/linear_pyramid.hpp"
#include "manipyr/manifold_pyramid.hpp"
#include "manipyr/symbol.hpp"

namespace manipyr::io {

using json = nlohmann::json;

/// Shortest decimal text that parses back to the same double; "inf"/"-inf"/"nan" otherwise.
std::string format_double(double v);
/// Finite values as numbers, non-finite ones as the strings of format_double.
json number(double v);
double to_double(const json& j, const std::string& where);

/// Writes to a sibling temporary file, then renames it over path.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);
json read_json_file(const std::string& path);

json to_json(const LaurentPoly& p, json meta = json::object());
LaurentPoly laurent_from_json(const json& j);

json to_json(const DecimationKernel& k);
DecimationKernel kernel_from_json(const json& j);

json to_json(const ExperimentConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const json& j);

json to_json(const RealSequence& c);
RealSequence sequence_from_json(const json& j);
/// Header "index,value".
std::string sequence_to_csv(const RealSequence& c);
RealSequence sequence_from_csv(const std::string& text, int scale, double origin = 0.0);

json to_json(const LinearPyramid& p, const ExperimentConfig& cfg);
LinearPyramid linear_pyramid_from_json(const json& j);

/// {"manifold", "points": [[row-major]...], "grid": {"scale", "origin"}}
json to_json(const ManifoldSequence& c);
ManifoldSequence curve_from_json(const json& j);

json to_json(const ManifoldPyramid& p, const ExperimentConfig& cfg);
ManifoldPyramid manifold_pyramid_from_json(const json& j);

json to_json(const CompressionReport& r);

}  // namespace manipyr::io
