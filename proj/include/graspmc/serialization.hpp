#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "graspmc/experiment.hpp"
#include "graspmc/grasp/grasp.hpp"
#include "graspmc/learning.hpp"

namespace graspmc {

using Json = nlohmann::json;

inline constexpr const char* kModelSchema = "graspmc.learned_model/1";
inline constexpr const char* kCatalogSchema = "graspmc.catalog/1";
inline constexpr const char* kSketchSchema = "graspmc.sketch/1";
inline constexpr const char* kDemonstrationsSchema = "graspmc.demonstrations/1";
inline constexpr const char* kConfigSchema = "graspmc.experiment_config/1";
inline constexpr const char* kResultSchema = "graspmc.result/1";
inline constexpr const char* kSamplesSchema = "graspmc.samples/1";

/// Reads `doc["schema"]` and throws ParseError unless it equals `expected`.
void requireSchema(const Json& doc, const char* expected);

Json vectorToJson(const Vector& v);
Vector vectorFromJson(const Json& j);
/// Row-major nested arrays.
Json matrixToJson(const Matrix& m);
Matrix matrixFromJson(const Json& j);

Json toJson(const ChainHistory& h);
ChainHistory chainFromJson(const Json& j);

Json toJson(const JumpRegion& r);
JumpRegion regionFromJson(const Json& j);

Json toJson(const LearningParams& p);
LearningParams learningParamsFromJson(const Json& j);

Json toJson(const LearnedModel& m);
LearnedModel modelFromJson(const Json& j);

Json toJson(const RoughSketch& s);
RoughSketch sketchFromJson(const Json& j);

Json toJson(const std::vector<grasp::Demonstration>& demos, const std::string& object);
std::vector<grasp::Demonstration> demonstrationsFromJson(const Json& j);

Json toJson(const grasp::SdfNode& node);
grasp::SdfNode sdfFromJson(const Json& j);
Json catalogToJson(const std::vector<grasp::ObjectModel>& catalog);
std::vector<grasp::ObjectModel> catalogFromJson(const Json& j);

/// Every field, defaults included, so the effective configuration is explicit.
Json toJson(const ExperimentConfig& c);
/// Missing fields keep their defaults; unknown fields are rejected.
ExperimentConfig configFromJson(const Json& j);

Json toJson(const ResultRecord& r, bool includeTrace = true);
ResultRecord resultFromJson(const Json& j);

Json samplesToJson(const std::vector<SampleRecord>& samples);

}  // namespace graspmc
