#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cbre/model_json.hpp"

namespace cbre::cli {

// Exit codes shared by all commands: 0 decided/ok, 1 malformed input,
// 2 inconclusive or unknown verdicts (and validate failures).
constexpr int kExitOk = 0;
constexpr int kExitBadConfig = 1;
constexpr int kExitInconclusive = 2;

struct CommonOptions {
  std::string model_path;
  std::string out_dir = ".";
  std::optional<uint64_t> seed;
  int threads = 1;
  std::string format = "json";  // or "csv" where applicable
  bool write_paths = false;
  std::vector<std::string> rows;
};

int cmd_classify(const CommonOptions& opts, std::ostream& out, std::ostream& err);
int cmd_simulate(const CommonOptions& opts, std::ostream& out, std::ostream& err);
int cmd_analytics(const CommonOptions& opts, std::ostream& out, std::ostream& err);
int cmd_validate(const CommonOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace cbre::cli
