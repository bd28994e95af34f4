#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cbre/cli_commands.hpp"
#include "cbre/model_json.hpp"
#include "cbre/validation.hpp"

using namespace cbre;
namespace fs = std::filesystem;

namespace {

io::json parse_file(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  io::json j;
  in >> j;
  return j;
}

void collect_paths(const io::json& j, const std::string& prefix,
                   std::set<std::string>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) collect_paths(v, prefix + "/" + k, out);
  } else if (j.is_array()) {
    if (!j.empty()) collect_paths(j.front(), prefix + "[]", out);
    out.insert(prefix + "[]");
  } else {
    out.insert(prefix);
  }
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(CBRE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

const char* kSourceDir = CBRE_SOURCE_DIR;

}  // namespace

TEST_CASE("model JSON round trip") {
  io::ExperimentConfig cfg =
      io::load_config(std::string(kSourceDir) + "/models/jumpy_subordinator.json");
  CHECK(cfg.model.branching.b == 1.1);
  CHECK(cfg.model.branching.mu.family() == MeasureFamily::compound_poisson);
  CHECK(cfg.model.competition.kind == CompetitionSpec::Kind::logistic);
  CHECK(cfg.simulation.n_paths == 2000);
  io::json back = io::model_to_json(cfg.model);
  ModelSpec again = io::model_from_json(back);
  CHECK(again.branching.b == cfg.model.branching.b);
  CHECK(again.branching.mu.cp_rate_ == cfg.model.branching.mu.cp_rate_);
  CHECK(again.competition.c == cfg.model.competition.c);
}

TEST_CASE("malformed documents raise ConfigError") {
  io::json j;
  j["environment"] = {{"d", 0.0}, {"sigma", 1.0}};
  j["competition"] = {{"kind", "none"}};
  CHECK_THROWS_AS(io::model_from_json(j), io::ConfigError);  // missing branching
  j["branching"] = {{"b", 0.0}, {"gamma", 1.0},
                    {"mu", {{"family", "mystery"}}}};
  CHECK_THROWS_AS(io::model_from_json(j), io::ConfigError);
}

TEST_CASE("verdict strings are exactly holds/fails/inconclusive") {
  CHECK(quad::to_string(quad::Verdict::holds) == "holds");
  CHECK(quad::to_string(quad::Verdict::fails) == "fails");
  CHECK(quad::to_string(quad::Verdict::inconclusive) == "inconclusive");
  ModelSpec m;
  m.branching = {0.0, 1.0, LevyMeasure::empty()};
  m.environment = {0.0, 1.0, LevyMeasure::empty()};
  m.competition = CompetitionSpec::logistic(1.0);
  io::json j = io::to_json(condition_report(m));
  CHECK(j["grey"]["verdict"] == "holds");
}

TEST_CASE("classify command: golden report shape and exit codes") {
  fs::path tmp = fs::temp_directory_path() / "cbre_cli_test";
  fs::create_directories(tmp);
  std::string model = std::string(kSourceDir) + "/models/feller_logistic.json";
  SUBCASE("decided model exits 0 with the expected JSON shape") {
    int rc = run_cli("classify --model " + model + " --out " + tmp.string());
    CHECK(rc == 0);
    io::json rep = parse_file(tmp / "classify.json");
    CHECK(rep["extinction"]["extinct_as"] == "true");
    CHECK(rep["extinction"]["comes_down_from_infinity"] == "true");
    std::set<std::string> paths;
    collect_paths(rep, "", paths);
    for (const char* expect :
         {"/conditions/grey/verdict", "/conditions/h2_competition/verdict",
          "/environment/beta", "/environment/drift_class",
          "/extinction/extinct_positive_prob", "/extinction/extinct_as",
          "/diffusion/extinct_as", "/model/branching/b"})
      CHECK(paths.count(expect) == 1);
  }
  SUBCASE("undecidable model exits 2") {
    // no competition, no Grey: extinction unknown
    io::json j;
    j["branching"] = {{"b", -1.0}, {"gamma", 0.0}, {"mu", {{"family", "empty"}}}};
    j["environment"] = {{"d", 0.0}, {"sigma", 1.0}, {"pi", {{"family", "empty"}}}};
    j["competition"] = {{"kind", "none"}};
    fs::path p = tmp / "undecided.json";
    std::ofstream(p) << j.dump();
    int rc = run_cli("classify --model " + p.string() + " --out " + tmp.string());
    CHECK(rc == 2);
  }
  SUBCASE("missing branching key exits 1") {
    fs::path p = tmp / "broken.json";
    std::ofstream(p) << "{\"environment\": {}, \"competition\": {\"kind\": \"none\"}}";
    int rc = run_cli("classify --model " + p.string());
    CHECK(rc == 1);
  }
}

TEST_CASE("simulate command is deterministic byte for byte") {
  fs::path tmp = fs::temp_directory_path() / "cbre_cli_sim";
  fs::create_directories(tmp / "a");
  fs::create_directories(tmp / "b");
  io::json j = parse_file(std::string(kSourceDir) + "/models/feller_logistic.json");
  j["simulation"]["n_paths"] = 500;
  j["simulation"]["t_max"] = 5.0;
  fs::path p = tmp / "model.json";
  std::ofstream(p) << j.dump();
  int rc1 = run_cli("simulate --model " + p.string() + " --out " + (tmp / "a").string() +
                    " --threads 1");
  int rc2 = run_cli("simulate --model " + p.string() + " --out " + (tmp / "b").string() +
                    " --threads 4");
  CHECK(rc1 == 0);
  CHECK(rc2 == 0);
  std::ifstream fa(tmp / "a" / "summary.json"), fb(tmp / "b" / "summary.json");
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().find("p_hit") != std::string::npos);
}

TEST_CASE("simulate degenerate config: no paths requested") {
  fs::path tmp = fs::temp_directory_path() / "cbre_cli_empty";
  fs::create_directories(tmp);
  io::json j = parse_file(std::string(kSourceDir) + "/models/feller_logistic.json");
  j["simulation"]["n_paths"] = 1;
  j["simulation"]["t_max"] = 0.0;
  fs::path p = tmp / "model.json";
  std::ofstream(p) << j.dump();
  int rc = run_cli("simulate --model " + p.string() + " --out " + tmp.string());
  CHECK(rc == 0);
  io::json rep = parse_file(tmp / "summary.json");
  CHECK(rep["estimates"].empty());
}

TEST_CASE("validate: config row skips when preconditions fail") {
  // sigma = 0 with gamma = 0: the dual-route row must report skipped
  ModelSpec m;
  m.branching = {1.0, 0.0, LevyMeasure::empty()};
  m.environment = {0.0, 0.0, LevyMeasure::empty()};
  m.competition = CompetitionSpec::logistic(1.0);
  validation::RowResult r = validation::run_row("config_laplace_routes", 1, m);
  CHECK(r.status == validation::RowStatus::skipped);
  CHECK(r.message.find("precondition") != std::string::npos);
}

TEST_CASE("validate: quick rows run through the CLI surface") {
  fs::path tmp = fs::temp_directory_path() / "cbre_cli_val";
  fs::create_directories(tmp);
  cbre::cli::CommonOptions opts;
  opts.threads = 2;
  opts.out_dir = tmp.string();
  opts.rows = {"closed_form_m", "riccati_defect"};
  std::ostringstream out, err;
  int rc = cbre::cli::cmd_validate(opts, out, err);
  CHECK(rc == 0);
  CHECK(out.str().find("[pass] closed_form_m") != std::string::npos);
  io::json rep = parse_file(tmp / "validate.json");
  CHECK(rep["rows"].size() == 2);
  CHECK(rep["rows"][0]["status"] == "pass");
}
