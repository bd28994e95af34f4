#include "cbre/cli_commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "cbre/diffusion_scale.hpp"
#include "cbre/logistic.hpp"
#include "cbre/simulate.hpp"
#include "cbre/validation.hpp"

namespace cbre::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

io::ExperimentConfig load_or_throw(const CommonOptions& opts) {
  if (opts.model_path.empty()) throw io::ConfigError("no --model file given");
  io::ExperimentConfig cfg = io::load_config(opts.model_path);
  if (opts.seed) cfg.simulation.seed = *opts.seed;
  cfg.simulation.threads = opts.threads;
  if (!opts.out_dir.empty()) cfg.output.dir = opts.out_dir;
  return cfg;
}

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path().empty() ? "." : p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

bool logistic_applicable(const ModelSpec& m) {
  return m.competition.kind == CompetitionSpec::Kind::logistic &&
         m.environment.pi.is_empty() && m.environment.d == 0.0;
}

logistic::LogisticModel to_logistic(const ModelSpec& m) {
  return logistic::LogisticModel{m.branching, m.competition.c, m.environment.sigma};
}

}  // namespace

int cmd_classify(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  io::ExperimentConfig cfg;
  try {
    cfg = load_or_throw(opts);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadConfig;
  }
  const ModelSpec& model = cfg.model;
  json rep;
  rep["schema_version"] = 1;
  rep["model"] = io::model_to_json(model);

  bool inconclusive = false;
  ConditionReport cond = condition_report(model);
  rep["conditions"] = io::to_json(cond);
  for (const auto* e : {&cond.grey, &cond.log_moment, &cond.first_moment,
                        &cond.h2_competition})
    inconclusive = inconclusive || e->verdict == quad::Verdict::inconclusive;

  EnvironmentReport env = environment_report(model.environment);
  rep["environment"] = io::to_json(env);
  inconclusive = inconclusive || env.drift_class == DriftClass::unknown;

  ExtinctionReport ext = extinction_classifier(model);
  rep["extinction"] = io::to_json(ext);
  inconclusive = inconclusive || ext.extinct_positive_prob == TriBool::unknown ||
                 ext.extinct_as == TriBool::unknown;

  // section-specific classifiers where their hypotheses apply
  if (model.branching.mu.is_empty() && model.environment.pi.is_empty() &&
      model.branching.gamma > 0.0) {
    scale::DiffusionModel dm{model.branching.b, model.branching.gamma,
                             model.environment.sigma, model.competition};
    scale::DiffusionClassification dc = scale::classify_diffusion(dm);
    json dj;
    dj["scale_divergence"] = quad::to_string(dc.scale_divergence);
    dj["extinct_as"] = to_string(dc.extinct_as);
    rep["diffusion"] = dj;
    inconclusive = inconclusive || dc.extinct_as == TriBool::unknown;
  }
  if (logistic_applicable(model) && model.branching.is_subordinator() &&
      model.environment.sigma > 0.0) {
    logistic::LogisticAnalytics an(to_logistic(model));
    logistic::ClassificationReport sub = an.classify_subordinator();
    rep["subordinator"] = io::to_json(sub);
    inconclusive = inconclusive ||
                   sub.regime == logistic::SubordinatorRegime::undecided;
  }

  std::string text = rep.dump(2) + "\n";
  out << text;
  write_text(fs::path(cfg.output.dir) / "classify.json", text);
  return inconclusive ? kExitInconclusive : kExitOk;
}

int cmd_simulate(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  io::ExperimentConfig cfg;
  try {
    cfg = load_or_throw(opts);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadConfig;
  }
  json summary;
  summary["schema_version"] = 1;
  summary["seed"] = cfg.simulation.seed;
  summary["n_paths"] = cfg.simulation.n_paths;
  summary["dt"] = cfg.simulation.dt;
  summary["t_max"] = cfg.simulation.t_max;
  json runs = json::array();
  for (double x0 : cfg.analytics.x0s) {
    for (double level : cfg.analytics.levels) {
      if (level > x0) continue;
      if (cfg.simulation.t_max <= 0.0 || cfg.simulation.n_paths < 1) continue;
      auto est = sim::estimate_hitting(cfg.model, x0, level,
                                       cfg.analytics.lambdas, cfg.simulation);
      json run = io::to_json(est);
      run["x0"] = x0;
      runs.push_back(run);
    }
  }
  summary["estimates"] = runs;

  fs::path dir(cfg.output.dir);
  if (opts.write_paths) {
    long n_csv = std::min<long>(cfg.simulation.n_paths, 16);
    for (long i = 0; i < n_csv; ++i) {
      double x0 = cfg.analytics.x0s.empty() ? 1.0 : cfg.analytics.x0s.front();
      sim::PathSample p = sim::simulate_path(cfg.model, x0, cfg.simulation,
                                             static_cast<uint64_t>(i));
      fs::create_directories(dir);
      std::ofstream csv(dir / ("path_" + std::to_string(i) + ".csv"),
                        std::ios::binary | std::ios::trunc);
      sim::write_path_csv(p, csv,
                          {{"seed", std::to_string(cfg.simulation.seed)},
                           {"path", std::to_string(i)},
                           {"x0", io::format_full(x0)}});
    }
  }
  std::string text = summary.dump(2) + "\n";
  out << text;
  write_text(dir / "summary.json", text);
  return kExitOk;
}

int cmd_analytics(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  io::ExperimentConfig cfg;
  try {
    cfg = load_or_throw(opts);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadConfig;
  }
  const ModelSpec& model = cfg.model;
  json rep;
  rep["schema_version"] = 1;
  rep["conditions"] = io::to_json(condition_report(model));

  if (logistic_applicable(model)) {
    logistic::LogisticAnalytics an(to_logistic(model));
    json sec;
    json ms = json::array();
    for (double lam : cfg.analytics.lambdas) {
      json e;
      e["lambda"] = lam;
      try {
        e["m"] = an.m_of(lam);
      } catch (const std::exception& ex) {
        e["m_error"] = ex.what();
      }
      ms.push_back(e);
    }
    sec["m"] = ms;

    if (an.general_mechanism()) {
      json laps = json::array();
      for (double x0 : cfg.analytics.x0s) {
        for (double level : cfg.analytics.levels) {
          if (level > x0) continue;
          for (double lam : cfg.analytics.lambdas) {
            json e;
            e["x0"] = x0;
            e["a"] = level;
            e["lambda"] = lam;
            try {
              e["laplace"] = an.laplace_Ta(x0, level, lam);
            } catch (const std::exception& ex) {
              e["error"] = ex.what();
            }
            laps.push_back(e);
          }
        }
      }
      sec["laplace_Ta"] = laps;
      json means = json::array();
      for (double x0 : cfg.analytics.x0s) {
        json e;
        e["x0"] = x0;
        try {
          e["mean_T0"] = an.mean_T0(x0);
        } catch (const std::exception& ex) {
          e["error"] = ex.what();
        }
        means.push_back(e);
      }
      sec["mean_T0"] = means;
    }
    if (model.branching.is_subordinator() && model.environment.sigma > 0.0) {
      try {
        logistic::InvariantLaw law = an.invariant_law();
        json lj;
        lj["normalizer_finite"] = law.normalizer_finite;
        if (law.normalizer_finite) {
          lj["normalizer"] = law.normalizer;
          lj["rho_mean"] = law.rho_mean;
        }
        lj["nu_mean"] = law.nu_mean_finite ? json(law.nu_mean) : json(nullptr);
        sec["invariant_law"] = lj;
      } catch (const std::exception& ex) {
        sec["invariant_law_error"] = ex.what();
      }
      sec["classification"] = io::to_json(an.classify_subordinator());
    }
    rep["mechanism_route"] = sec;
  }

  if (model.branching.mu.is_empty() && model.environment.pi.is_empty() &&
      model.branching.gamma > 0.0) {
    scale::DiffusionModel dm{model.branching.b, model.branching.gamma,
                             model.environment.sigma, model.competition};
    scale::DiffusionScale sc(dm);
    json sec;
    json svals = json::array();
    for (double x0 : cfg.analytics.x0s) {
      svals.push_back({{"x", x0}, {"S", sc.S(x0)}});
    }
    sec["scale"] = svals;
    json laps = json::array();
    for (double x0 : cfg.analytics.x0s) {
      for (double level : cfg.analytics.levels) {
        if (level > x0) continue;
        for (double lam : cfg.analytics.lambdas) {
          json e;
          e["x0"] = x0;
          e["a"] = level;
          e["lambda"] = lam;
          try {
            e["laplace"] = sc.laplace_Ta(x0, level, lam);
          } catch (const std::exception& ex) {
            e["error"] = ex.what();
          }
          laps.push_back(e);
        }
      }
    }
    sec["laplace_Ta"] = laps;
    rep["scale_route"] = sec;
  }

  std::string text = rep.dump(2) + "\n";
  out << text;
  write_text(fs::path(cfg.output.dir) / "analytics.json", text);
  return kExitOk;
}

int cmd_validate(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  std::optional<ModelSpec> config_model;
  std::vector<std::string> rows = opts.rows;
  std::string out_dir = opts.out_dir;
  if (!opts.model_path.empty()) {
    io::ExperimentConfig cfg;
    try {
      cfg = load_or_throw(opts);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitBadConfig;
    }
    config_model = cfg.model;
    if (rows.empty()) rows = cfg.validate_rows;
    out_dir = cfg.output.dir;
  }
  std::vector<validation::RowResult> results =
      validation::run_rows(rows, opts.threads, config_model, out);
  json rep;
  rep["schema_version"] = 1;
  json rj = json::array();
  bool any_fail = false;
  for (const auto& r : results) {
    rj.push_back({{"name", r.name},
                  {"status", validation::to_string(r.status)},
                  {"measured", r.measured},
                  {"tolerance", r.tolerance},
                  {"message", r.message},
                  {"seconds", r.seconds}});
    any_fail = any_fail || r.status == validation::RowStatus::fail;
  }
  rep["rows"] = rj;
  write_text(fs::path(out_dir) / "validate.json", rep.dump(2) + "\n");
  return any_fail ? kExitInconclusive : kExitOk;
}

}  // namespace cbre::cli
