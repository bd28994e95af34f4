#include "cbre/model_json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace cbre::io {

namespace {

double get_num(const json& j, const char* key, std::optional<double> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(std::string("missing key `") + key + "`");
  }
  if (!j[key].is_number())
    throw ConfigError(std::string("key `") + key + "` must be a number");
  return j[key].get<double>();
}

MeasureSide side_from(const json& j) {
  std::string s = j.value("side", "positive");
  if (s == "positive") return MeasureSide::positive;
  if (s == "two-sided") return MeasureSide::two_sided;
  throw ConfigError("measure side must be `positive` or `two-sided`");
}

}  // namespace

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

LevyMeasure measure_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family"))
    throw ConfigError("measure needs a `family` string");
  std::string family = j["family"].get<std::string>();
  if (family == "empty") return LevyMeasure::empty();
  if (family == "compound-poisson") {
    double rate = get_num(j, "rate");
    if (!j.contains("law")) throw ConfigError("compound-poisson needs `law`");
    const json& law = j["law"];
    std::string type = law.value("type", "atoms");
    if (type == "exponential")
      return LevyMeasure::compound_poisson_exponential(rate, get_num(law, "mean"));
    if (type != "atoms") throw ConfigError("unknown jump law type");
    std::vector<Atom> atoms;
    for (const auto& a : law.at("atoms"))
      atoms.push_back({get_num(a, "z"), get_num(a, "p", 1.0)});
    return LevyMeasure::compound_poisson(rate, std::move(atoms));
  }
  if (family == "power-law") {
    double zmax = j.contains("z_max") && !j["z_max"].is_null()
                      ? get_num(j, "z_max")
                      : std::numeric_limits<double>::infinity();
    return LevyMeasure::power_law(get_num(j, "amplitude"), get_num(j, "alpha"),
                                  get_num(j, "z_min", 0.0), zmax, side_from(j));
  }
  if (family == "tabulated") {
    std::vector<double> z = j.at("z").get<std::vector<double>>();
    std::vector<double> f = j.at("density").get<std::vector<double>>();
    return LevyMeasure::tabulated(std::move(z), std::move(f), side_from(j));
  }
  throw ConfigError("unknown measure family `" + family + "`");
}

json measure_to_json(const LevyMeasure& m) {
  json j;
  switch (m.family()) {
    case MeasureFamily::empty:
      j["family"] = "empty";
      break;
    case MeasureFamily::compound_poisson: {
      j["family"] = "compound-poisson";
      j["rate"] = m.cp_rate_;
      if (m.cp_exponential_) {
        j["law"] = {{"type", "exponential"}, {"mean", m.cp_exp_mean_}};
      } else {
        json atoms = json::array();
        for (const auto& a : m.atoms_) atoms.push_back({{"z", a.z}, {"p", a.p}});
        j["law"] = {{"type", "atoms"}, {"atoms", atoms}};
      }
      break;
    }
    case MeasureFamily::power_law:
      j["family"] = "power-law";
      j["amplitude"] = m.pl_amplitude_;
      j["alpha"] = m.pl_alpha_;
      j["z_min"] = m.pl_zmin_;
      if (std::isfinite(m.pl_zmax_)) j["z_max"] = m.pl_zmax_; else j["z_max"] = nullptr;
      j["side"] = m.side() == MeasureSide::two_sided ? "two-sided" : "positive";
      break;
    case MeasureFamily::tabulated:
      j["family"] = "tabulated";
      j["z"] = m.tab_z_;
      j["density"] = m.tab_f_;
      j["side"] = m.side() == MeasureSide::two_sided ? "two-sided" : "positive";
      break;
  }
  return j;
}

ModelSpec model_from_json(const json& j) {
  ModelSpec m;
  if (!j.contains("branching")) throw ConfigError("missing key `branching`");
  if (!j.contains("environment")) throw ConfigError("missing key `environment`");
  if (!j.contains("competition")) throw ConfigError("missing key `competition`");
  const json& br = j["branching"];
  m.branching.b = get_num(br, "b", 0.0);
  m.branching.gamma = get_num(br, "gamma", 0.0);
  if (br.contains("mu")) m.branching.mu = measure_from_json(br["mu"]);
  const json& env = j["environment"];
  m.environment.d = get_num(env, "d", 0.0);
  m.environment.sigma = get_num(env, "sigma", 0.0);
  if (env.contains("pi")) m.environment.pi = measure_from_json(env["pi"]);
  const json& comp = j["competition"];
  std::string kind = comp.value("kind", "none");
  if (kind == "none") {
    m.competition = CompetitionSpec::none();
  } else if (kind == "logistic") {
    m.competition = CompetitionSpec::logistic(get_num(comp, "c"));
  } else if (kind == "power") {
    double coeff = get_num(comp, "coeff");
    double expo = get_num(comp, "exponent");
    m.competition = CompetitionSpec::general(
        [coeff, expo](double z) { return coeff * std::pow(z, expo); }, "power");
  } else if (kind == "linear") {
    double slope = get_num(comp, "slope");
    m.competition = CompetitionSpec::general(
        [slope](double z) { return slope * z; }, "linear");
  } else {
    throw ConfigError("unknown competition kind `" + kind + "`");
  }
  if (comp.contains("z0")) m.competition.z0 = get_num(comp, "z0");
  try {
    m.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return m;
}

json model_to_json(const ModelSpec& m) {
  json j;
  j["branching"] = {{"b", m.branching.b},
                    {"gamma", m.branching.gamma},
                    {"mu", measure_to_json(m.branching.mu)}};
  j["environment"] = {{"d", m.environment.d},
                      {"sigma", m.environment.sigma},
                      {"pi", measure_to_json(m.environment.pi)}};
  json comp;
  switch (m.competition.kind) {
    case CompetitionSpec::Kind::none: comp["kind"] = "none"; break;
    case CompetitionSpec::Kind::logistic:
      comp["kind"] = "logistic";
      comp["c"] = m.competition.c;
      break;
    default:
      comp["kind"] = m.competition.label;
      break;
  }
  if (m.competition.z0) comp["z0"] = *m.competition.z0;
  j["competition"] = comp;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  cfg.schema_version = j.value("schema_version", 1);
  if (cfg.schema_version != 1)
    throw ConfigError("unsupported schema_version");
  cfg.model = model_from_json(j);
  if (j.contains("simulation")) {
    const json& s = j["simulation"];
    cfg.simulation.dt = get_num(s, "dt", cfg.simulation.dt);
    cfg.simulation.jump_cutoff_eps = get_num(s, "jump_cutoff_eps", cfg.simulation.jump_cutoff_eps);
    cfg.simulation.absorption_floor = s.contains("absorption_floor") && !s["absorption_floor"].is_null()
        ? get_num(s, "absorption_floor") : -1.0;
    cfg.simulation.t_max = get_num(s, "t_max", cfg.simulation.t_max);
    cfg.simulation.n_paths = static_cast<long>(get_num(s, "n_paths", 1.0));
    cfg.simulation.seed = static_cast<uint64_t>(get_num(s, "seed", 0.0));
    cfg.simulation.explosion_ceiling = get_num(s, "explosion_ceiling", cfg.simulation.explosion_ceiling);
    try {
      cfg.simulation.validate();
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  if (j.contains("analytics")) {
    const json& a = j["analytics"];
    if (a.contains("lambdas")) cfg.analytics.lambdas = a["lambdas"].get<std::vector<double>>();
    if (a.contains("levels")) cfg.analytics.levels = a["levels"].get<std::vector<double>>();
    if (a.contains("x0s")) cfg.analytics.x0s = a["x0s"].get<std::vector<double>>();
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    cfg.output.dir = o.value("dir", ".");
    if (o.contains("formats")) cfg.output.formats = o["formats"].get<std::vector<std::string>>();
  }
  if (j.contains("validate") && j["validate"].contains("rows"))
    cfg.validate_rows = j["validate"]["rows"].get<std::vector<std::string>>();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

namespace {
json entry_json(const ConditionEntry& e) {
  json j;
  j["verdict"] = quad::to_string(e.verdict);
  if (std::isfinite(e.value)) j["value"] = e.value; else j["value"] = nullptr;
  if (!e.witness.empty()) j["witness"] = e.witness;
  return j;
}
}  // namespace

json to_json(const ConditionReport& rep) {
  json j;
  j["grey"] = entry_json(rep.grey);
  j["log_moment"] = entry_json(rep.log_moment);
  j["first_moment"] = entry_json(rep.first_moment);
  j["h2_competition"] = entry_json(rep.h2_competition);
  j["h2_z0"] = rep.h2_z0;
  return j;
}

json to_json(const EnvironmentReport& rep) {
  json j;
  j["beta"] = rep.beta;
  if (rep.meanK1_defined) j["meanK1"] = rep.meanK1; else j["meanK1"] = nullptr;
  j["drift_class"] = to_string(rep.drift_class);
  return j;
}

json to_json(const ExtinctionReport& rep) {
  json j;
  j["regime_ok"] = rep.regime_ok;
  j["extinct_positive_prob"] = to_string(rep.extinct_positive_prob);
  j["extinct_as"] = to_string(rep.extinct_as);
  j["comes_down_from_infinity"] = to_string(rep.comes_down_from_infinity);
  j["uniform_mean_finite"] = to_string(rep.uniform_mean_finite);
  j["rationale"] = rep.rationale;
  return j;
}

json to_json(const BoundConstants& bc) {
  json j;
  j["theta"] = bc.theta;
  j["A"] = bc.A;
  j["M"] = bc.M;
  j["C_of_A"] = bc.C_of_A;
  j["sup_mean_T0_bound"] = bc.sup_mean_T0_bound;
  return j;
}

json to_json(const logistic::ClassificationReport& rep) {
  json j;
  j["zero_polar"] = to_string(rep.zero_polar);
  j["regime"] = logistic::to_string(rep.regime);
  j["recurrence_integral"] = quad::to_string(rep.recurrence_integral);
  if (rep.adh) {
    j["adh"] = {{"verdict", logistic::to_string(rep.adh->verdict)},
                {"inf_estimate", rep.adh->inf_estimate},
                {"sup_estimate", rep.adh->sup_estimate},
                {"decided_at", rep.adh->decided_at}};
  }
  j["rule"] = rep.rule;
  return j;
}

json to_json(const sim::HittingTimeEstimate& est) {
  json j;
  j["level"] = est.level;
  j["n_paths"] = est.n_paths;
  j["n_hit"] = est.n_hit;
  j["p_hit"] = est.p_hit;
  j["p_hit_se"] = est.p_hit_se;
  j["mean_T"] = est.mean_T;
  j["mean_T_se"] = est.mean_T_se;
  j["censored_fraction"] = est.censored_fraction;
  j["all_censored"] = est.all_censored;
  json laps = json::array();
  for (const auto& l : est.laplace) {
    laps.push_back({{"lambda", l.lambda},
                    {"lower", l.lower},
                    {"lower_se", l.lower_se},
                    {"upper", l.upper},
                    {"upper_se", l.upper_se}});
  }
  j["laplace"] = laps;
  return j;
}

}  // namespace cbre::io
