// Command-line front end: classify a model, run the Monte Carlo engine,
// evaluate the analytic formulas, or execute the validation matrix.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cbre/cli_commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"cbre - branching processes with competition in random environments"};
  app.require_subcommand(1);

  cbre::cli::CommonOptions opts;
  if (const char* env = std::getenv("CBRE_THREADS")) {
    opts.threads = std::max(1, std::atoi(env));
  }

  auto add_common = [&](CLI::App* cmd, bool model_required) {
    auto* m = cmd->add_option("--model", opts.model_path, "model/config JSON file");
    if (model_required) m->required();
    cmd->add_option("--out", opts.out_dir, "output directory");
    uint64_t seed = 0;
    cmd->add_option("--seed", seed, "override the simulation seed")
        ->each([&opts](const std::string& s) { opts.seed = std::stoull(s); });
    cmd->add_option("--threads", opts.threads, "simulation worker count");
    cmd->add_option("--format", opts.format, "csv|json");
  };

  CLI::App* classify = app.add_subcommand("classify", "condition checks and extinction classification");
  add_common(classify, true);

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo paths and hitting-time estimates");
  add_common(simulate, true);
  simulate->add_flag("--paths", opts.write_paths, "also write per-path CSV files");

  CLI::App* analytics = app.add_subcommand("analytics", "Laplace transforms, means, invariant laws");
  add_common(analytics, true);

  CLI::App* validate = app.add_subcommand("validate", "run the analytics-vs-simulator validation matrix");
  add_common(validate, false);
  validate->add_option("--rows", opts.rows, "subset of validation rows to run");

  CLI11_PARSE(app, argc, argv);

  try {
    if (classify->parsed()) return cbre::cli::cmd_classify(opts, std::cout, std::cerr);
    if (simulate->parsed()) return cbre::cli::cmd_simulate(opts, std::cout, std::cerr);
    if (analytics->parsed()) return cbre::cli::cmd_analytics(opts, std::cout, std::cerr);
    if (validate->parsed()) return cbre::cli::cmd_validate(opts, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
