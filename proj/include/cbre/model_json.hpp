#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbre/logistic.hpp"
#include "cbre/mechanisms.hpp"
#include "cbre/simulate.hpp"

namespace cbre::io {

using json = nlohmann::ordered_json;

// Raised on malformed configuration documents; carries the offending key.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct AnalyticsRequest {
  std::vector<double> lambdas;
  std::vector<double> levels;
  std::vector<double> x0s;
};

struct OutputSpec {
  std::string dir = ".";
  std::vector<std::string> formats = {"json"};
};

struct ExperimentConfig {
  int schema_version = 1;
  ModelSpec model;
  sim::SimConfig simulation;
  AnalyticsRequest analytics;
  OutputSpec output;
  std::vector<std::string> validate_rows;  // empty = all
};

LevyMeasure measure_from_json(const json& j);
json measure_to_json(const LevyMeasure& m);

ModelSpec model_from_json(const json& j);
json model_to_json(const ModelSpec& m);

ExperimentConfig config_from_json(const json& j);
ExperimentConfig load_config(const std::string& path);

json to_json(const ConditionReport& rep);
json to_json(const EnvironmentReport& rep);
json to_json(const ExtinctionReport& rep);
json to_json(const BoundConstants& bc);
json to_json(const logistic::ClassificationReport& rep);
json to_json(const sim::HittingTimeEstimate& est);

// 17-significant-digit CSV/number formatting used everywhere bytes matter.
std::string format_full(double v);

}  // namespace cbre::io
