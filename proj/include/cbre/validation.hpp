#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cbre/mechanisms.hpp"

namespace cbre::validation {

enum class RowStatus { pass, fail, skipped };

std::string to_string(RowStatus s);

struct RowResult {
  std::string name;
  RowStatus status = RowStatus::skipped;
  std::string measured;   // what came out
  std::string tolerance;  // what was required
  std::string message;
  double seconds = 0.0;
};

// The analytics-vs-simulator validation matrix. Every row pins its own model
// and tolerances; `config_model` feeds only the config_laplace_routes row.
std::vector<std::string> row_names();

RowResult run_row(const std::string& name, int threads,
                  const std::optional<ModelSpec>& config_model = {});

std::vector<RowResult> run_rows(const std::vector<std::string>& selected,
                                int threads,
                                const std::optional<ModelSpec>& config_model,
                                std::ostream& log);

}  // namespace cbre::validation
