#include "cbre/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <atomic>
#include <thread>

namespace cbre::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void append_csv_double(std::string& line, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  line += buf;
}

// Per-model constants of the thresholded Euler scheme.
struct StepContext {
  const ModelSpec* model = nullptr;
  double eps = 1e-3;
  double b = 0.0, gamma = 0.0, sigma = 0.0, d = 0.0;
  double bj_rate = 0.0;  // branching jump rate per unit of state
  double b_comp = 0.0;   // int_{(eps,1)} z mu(dz)
  double ej_pos = 0.0, ej_neg = 0.0;  // environment jump rates
  double e_comp = 0.0;   // int_{eps<|z|<1} (e^z - 1) pi(dz)

  double g(double z) const { return model->competition.g(z); }
};

StepContext make_context(const ModelSpec& model, const SimConfig& cfg) {
  StepContext ctx;
  ctx.model = &model;
  ctx.eps = cfg.jump_cutoff_eps;
  ctx.b = model.branching.b;
  ctx.gamma = model.branching.gamma;
  ctx.sigma = model.environment.sigma;
  ctx.d = model.environment.d;
  const LevyMeasure& mu = model.branching.mu;
  const LevyMeasure& pi = model.environment.pi;
  ctx.bj_rate = mu.rate_above(ctx.eps);
  if (ctx.eps < 1.0) {
    auto id = [](double z) { return z; };
    ctx.b_comp = mu.integrate(id, ctx.eps, 1.0);
  }
  ctx.ej_pos = pi.rate_above(ctx.eps);
  ctx.ej_neg = pi.rate_below_neg(ctx.eps);
  if (ctx.eps < 1.0) {
    auto em1 = [](double z) { return std::expm1(z); };
    ctx.e_comp = pi.integrate(em1, ctx.eps, 1.0) + pi.integrate(em1, -1.0, -ctx.eps);
  }
  return ctx;
}

struct PathStats {
  bool hit = false;
  double T = 0.0;
  double censor_time = 0.0;
  bool exploded = false;
  double occupation = 0.0;  // int_0^{T ^ t_max} Z ds (left Riemann)
  std::optional<double> absorbed_at;
};

// One Euler path. `level` < 0 disables first-passage tracking. Draw order is
// fixed per step: two normals, branching jump count and sizes, environment
// jump counts and sizes.
PathStats run_path(const StepContext& ctx, double x0, double level,
                   const SimConfig& cfg, uint64_t path_index,
                   PathSample* record) {
  PathRng rng(cfg.seed, path_index);
  const double dt = cfg.dt;
  const double sdt = std::sqrt(dt);
  const double floor = cfg.floor_for(x0);
  const LevyMeasure& mu = ctx.model->branching.mu;
  const LevyMeasure& pi = ctx.model->environment.pi;
  const long n_steps = static_cast<long>(std::ceil(cfg.t_max / dt - 1e-9));

  PathStats st;
  double z = x0;
  double t = 0.0;
  if (record) {
    record->times.push_back(0.0);
    record->values.push_back(z);
  }
  if (level >= 0.0 && z <= level) {
    st.hit = true;
    st.T = 0.0;
    return st;
  }
  bool absorbed = (z <= 0.0);
  if (absorbed) st.absorbed_at = 0.0;

  for (long k = 0; k < n_steps; ++k) {
    if (!absorbed) {
      double n1 = rng.next_normal();
      double n2 = rng.next_normal();
      st.occupation += z * dt;
      double drift = ctx.b * z - ctx.g(z) + ctx.d * z - z * ctx.b_comp -
                     z * ctx.e_comp;
      double zn = z + drift * dt + std::sqrt(2.0 * ctx.gamma * ctx.gamma * z) * sdt * n1 +
                  ctx.sigma * z * sdt * n2;
      if (ctx.bj_rate > 0.0) {
        long nb = rng.next_poisson(z * ctx.bj_rate * dt);
        for (long j = 0; j < nb; ++j)
          zn += mu.sample_positive(ctx.eps, rng.next_uniform());
      }
      double logmult = 0.0;
      bool any_env = false;
      if (ctx.ej_pos > 0.0) {
        long np = rng.next_poisson(ctx.ej_pos * dt);
        for (long j = 0; j < np; ++j) {
          logmult += pi.sample_positive(ctx.eps, rng.next_uniform());
          any_env = true;
        }
      }
      if (ctx.ej_neg > 0.0) {
        long nn = rng.next_poisson(ctx.ej_neg * dt);
        for (long j = 0; j < nn; ++j) {
          logmult += pi.sample_negative(ctx.eps, rng.next_uniform());
          any_env = true;
        }
      }
      if (any_env) zn += z * std::expm1(logmult);
      if (zn < floor) {
        zn = 0.0;
        absorbed = true;
        st.absorbed_at = t + dt;
      }
      z = zn;
      if (z > cfg.explosion_ceiling) {
        st.exploded = true;
        st.censor_time = t + dt;
        if (record) {
          record->times.push_back(t + dt);
          record->values.push_back(z);
          record->exploded = true;
        }
        return st;
      }
    }
    t += dt;
    if (record && (k + 1) % cfg.record_stride == 0) {
      record->times.push_back(t);
      record->values.push_back(z);
    }
    if (level >= 0.0 && z <= level && !st.hit) {
      st.hit = true;
      st.T = t;
      if (record) record->absorbed_at = st.absorbed_at;
      if (!record) return st;  // estimators do not need the remainder
    }
  }
  st.censor_time = cfg.t_max;
  if (record) record->absorbed_at = st.absorbed_at;
  return st;
}

std::vector<PathStats> run_all(const StepContext& ctx, double x0, double level,
                               const SimConfig& cfg) {
  std::vector<PathStats> stats(cfg.n_paths);
  int nthreads = std::max(1, cfg.threads);
  if (nthreads == 1 || cfg.n_paths < 2) {
    for (long i = 0; i < cfg.n_paths; ++i)
      stats[i] = run_path(ctx, x0, level, cfg, static_cast<uint64_t>(i), nullptr);
    return stats;
  }
  std::vector<std::thread> pool;
  std::atomic<long> next{0};
  for (int w = 0; w < nthreads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        long i = next.fetch_add(64);
        if (i >= cfg.n_paths) return;
        long end = std::min<long>(i + 64, cfg.n_paths);
        for (long j = i; j < end; ++j)
          stats[j] = run_path(ctx, x0, level, cfg, static_cast<uint64_t>(j), nullptr);
      }
    });
  }
  for (auto& th : pool) th.join();
  return stats;
}

struct MeanSe {
  double mean = 0.0, se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe out;
  if (xs.empty()) return out;
  double s = 0.0;
  for (double x : xs) s += x;
  out.mean = s / xs.size();
  if (xs.size() > 1) {
    double v = 0.0;
    for (double x : xs) v += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(v / (xs.size() - 1.0) / xs.size());
  }
  return out;
}

}  // namespace

void SimConfig::validate() const {
  if (dt <= 0.0) throw std::invalid_argument("simulation: dt must be > 0");
  if (jump_cutoff_eps <= 0.0)
    throw std::invalid_argument("simulation: jump cutoff must be > 0");
  if (n_paths < 1) throw std::invalid_argument("simulation: n_paths must be >= 1");
  if (t_max < 0.0) throw std::invalid_argument("simulation: t_max must be >= 0");
  if (record_stride < 1)
    throw std::invalid_argument("simulation: record_stride must be >= 1");
}

PathSample simulate_path(const ModelSpec& model, double x0, const SimConfig& cfg,
                         uint64_t path_index) {
  cfg.validate();
  if (x0 < 0.0) throw std::invalid_argument("simulate_path: x0 must be >= 0");
  StepContext ctx = make_context(model, cfg);
  PathSample out;
  run_path(ctx, x0, -1.0, cfg, path_index, &out);
  return out;
}

HittingTimeEstimate estimate_hitting(const ModelSpec& model, double x0, double a,
                                     const std::vector<double>& lambdas,
                                     const SimConfig& cfg) {
  cfg.validate();
  if (a < 0.0 || a > x0)
    throw std::invalid_argument("estimate_hitting: need 0 <= a <= x0");
  StepContext ctx = make_context(model, cfg);
  std::vector<PathStats> stats = run_all(ctx, x0, a, cfg);

  HittingTimeEstimate est;
  est.level = a;
  est.n_paths = cfg.n_paths;
  std::vector<double> hit_ind, hit_T;
  hit_ind.reserve(stats.size());
  for (const auto& s : stats) {
    hit_ind.push_back(s.hit ? 1.0 : 0.0);
    if (s.hit) {
      ++est.n_hit;
      hit_T.push_back(s.T);
    }
  }
  MeanSe p = mean_se(hit_ind);
  est.p_hit = p.mean;
  est.p_hit_se = p.se;
  MeanSe mt = mean_se(hit_T);
  est.mean_T = mt.mean;
  est.mean_T_se = mt.se;
  est.censored_fraction = 1.0 - est.p_hit;
  est.all_censored = (est.n_hit == 0);

  for (double lam : lambdas) {
    std::vector<double> lo, hi;
    lo.reserve(stats.size());
    hi.reserve(stats.size());
    for (const auto& s : stats) {
      if (s.hit) {
        double v = std::exp(-lam * s.T);
        lo.push_back(v);
        hi.push_back(v);
      } else {
        lo.push_back(0.0);
        hi.push_back(std::exp(-lam * s.censor_time));
      }
    }
    LaplaceBounds b;
    b.lambda = lam;
    MeanSe l = mean_se(lo), h = mean_se(hi);
    b.lower = l.mean;
    b.lower_se = l.se;
    b.upper = h.mean;
    b.upper_se = h.se;
    est.laplace.push_back(b);
  }
  return est;
}

OccupationLaplace estimate_occupation_laplace(const ModelSpec& model, double x0,
                                              double a, double lambda,
                                              const SimConfig& cfg) {
  cfg.validate();
  StepContext ctx = make_context(model, cfg);
  std::vector<PathStats> stats = run_all(ctx, x0, a, cfg);
  std::vector<double> lo, hi;
  long censored = 0;
  for (const auto& s : stats) {
    double v = std::exp(-lambda * s.occupation);
    if (s.hit) {
      lo.push_back(v);
      hi.push_back(v);
    } else {
      ++censored;
      lo.push_back(0.0);
      hi.push_back(v);  // occupation only grows after censoring
    }
  }
  OccupationLaplace out;
  out.lambda = lambda;
  MeanSe l = mean_se(lo), h = mean_se(hi);
  out.lower = l.mean;
  out.lower_se = l.se;
  out.upper = h.mean;
  out.upper_se = h.se;
  out.censored_fraction = static_cast<double>(censored) / stats.size();
  return out;
}

std::vector<double> occupation_samples(const ModelSpec& model, double x0,
                                       const SimConfig& cfg, double burn_in,
                                       int stride) {
  SimConfig rec = cfg;
  rec.record_stride = stride;
  PathSample path = simulate_path(model, x0, rec, 0);
  std::vector<double> out;
  for (size_t i = 0; i < path.times.size(); ++i)
    if (path.times[i] > burn_in) out.push_back(path.values[i]);
  return out;
}

TwoSidedExit estimate_two_sided_exit(const ModelSpec& model, double x0,
                                     double lower, double upper,
                                     const SimConfig& cfg) {
  cfg.validate();
  if (!(lower <= x0 && x0 <= upper))
    throw std::invalid_argument("two_sided_exit: need lower <= x0 <= upper");
  StepContext ctx = make_context(model, cfg);
  TwoSidedExit out;
  out.n_paths = cfg.n_paths;
  std::vector<int> res(cfg.n_paths, -1);  // 0 lower, 1 upper, -1 censored
  int nthreads = std::max(1, cfg.threads);
  auto work = [&](long i) {
    PathRng rng(cfg.seed, static_cast<uint64_t>(i));
    const double dt = cfg.dt, sdt = std::sqrt(dt);
    const double floor = cfg.floor_for(x0);
    const LevyMeasure& mu = ctx.model->branching.mu;
    const LevyMeasure& pi = ctx.model->environment.pi;
    const long n_steps = static_cast<long>(std::ceil(cfg.t_max / dt - 1e-9));
    double z = x0;
    for (long k = 0; k < n_steps; ++k) {
      double n1 = rng.next_normal();
      double n2 = rng.next_normal();
      double drift = ctx.b * z - ctx.g(z) + ctx.d * z - z * ctx.b_comp -
                     z * ctx.e_comp;
      double zn = z + drift * dt +
                  std::sqrt(2.0 * ctx.gamma * ctx.gamma * z) * sdt * n1 +
                  ctx.sigma * z * sdt * n2;
      if (ctx.bj_rate > 0.0) {
        long nb = rng.next_poisson(z * ctx.bj_rate * dt);
        for (long j = 0; j < nb; ++j)
          zn += mu.sample_positive(ctx.eps, rng.next_uniform());
      }
      double logmult = 0.0;
      bool any_env = false;
      if (ctx.ej_pos > 0.0) {
        long np = rng.next_poisson(ctx.ej_pos * dt);
        for (long j = 0; j < np; ++j) {
          logmult += pi.sample_positive(ctx.eps, rng.next_uniform());
          any_env = true;
        }
      }
      if (ctx.ej_neg > 0.0) {
        long nn = rng.next_poisson(ctx.ej_neg * dt);
        for (long j = 0; j < nn; ++j) {
          logmult += pi.sample_negative(ctx.eps, rng.next_uniform());
          any_env = true;
        }
      }
      if (any_env) zn += z * std::expm1(logmult);
      if (zn < floor) zn = 0.0;
      z = zn;
      if (z <= lower) {
        res[i] = 0;
        return;
      }
      if (z >= upper) {
        res[i] = 1;
        return;
      }
    }
  };
  if (nthreads == 1) {
    for (long i = 0; i < cfg.n_paths; ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<long> next{0};
    for (int w = 0; w < nthreads; ++w)
      pool.emplace_back([&] {
        for (;;) {
          long i = next.fetch_add(32);
          if (i >= cfg.n_paths) return;
          long end = std::min<long>(i + 32, cfg.n_paths);
          for (long j = i; j < end; ++j) work(j);
        }
      });
    for (auto& th : pool) th.join();
  }
  for (int r : res) {
    if (r == 0) ++out.n_lower;
    else if (r == 1) ++out.n_upper;
    else ++out.n_censored;
  }
  long decided = out.n_lower + out.n_upper;
  if (decided > 0) {
    out.p_lower_first = static_cast<double>(out.n_lower) / decided;
    out.se = std::sqrt(out.p_lower_first * (1.0 - out.p_lower_first) /
                       std::max<long>(decided, 1));
  }
  return out;
}

CoupledPair coupled_pair(const ModelSpec& model, double x0, double y0,
                         const SimConfig& cfg, uint64_t path_index) {
  cfg.validate();
  if (y0 < x0) throw std::invalid_argument("coupled_pair: need y0 >= x0");
  StepContext ctx = make_context(model, cfg);
  PathRng rng(cfg.seed, path_index);
  const double dt = cfg.dt, sdt = std::sqrt(dt);
  const LevyMeasure& mu = model.branching.mu;
  const LevyMeasure& pi = model.environment.pi;
  const double floor_lo = cfg.floor_for(x0);
  const double floor_hi = cfg.floor_for(y0);
  const long n_steps = static_cast<long>(std::ceil(cfg.t_max / dt - 1e-9));
  const double order_tol = std::sqrt(dt);

  CoupledPair out;
  double zl = x0, zh = y0, t = 0.0;
  out.low.times.push_back(0.0);
  out.low.values.push_back(zl);
  out.high.times.push_back(0.0);
  out.high.values.push_back(zh);

  for (long k = 0; k < n_steps; ++k) {
    double n1 = rng.next_normal();
    double n2 = rng.next_normal();
    auto drift = [&](double z) {
      return ctx.b * z - ctx.g(z) + ctx.d * z - z * ctx.b_comp - z * ctx.e_comp;
    };
    double nl = zl + drift(zl) * dt +
                std::sqrt(2.0 * ctx.gamma * ctx.gamma * zl) * sdt * n1 +
                ctx.sigma * zl * sdt * n2;
    double nh = zh + drift(zh) * dt +
                std::sqrt(2.0 * ctx.gamma * ctx.gamma * zh) * sdt * n1 +
                ctx.sigma * zh * sdt * n2;
    // Nested thinning: propose at the dominating rate, accept per path.
    if (ctx.bj_rate > 0.0) {
      double zmax = std::max(zl, zh);
      long nb = rng.next_poisson(zmax * ctx.bj_rate * dt);
      for (long j = 0; j < nb; ++j) {
        double w = mu.sample_positive(ctx.eps, rng.next_uniform());
        double u = rng.next_uniform() * zmax;
        if (u <= zl) nl += w;
        if (u <= zh) nh += w;
      }
    }
    double logmult = 0.0;
    bool any_env = false;
    if (ctx.ej_pos > 0.0) {
      long np = rng.next_poisson(ctx.ej_pos * dt);
      for (long j = 0; j < np; ++j) {
        logmult += pi.sample_positive(ctx.eps, rng.next_uniform());
        any_env = true;
      }
    }
    if (ctx.ej_neg > 0.0) {
      long nn = rng.next_poisson(ctx.ej_neg * dt);
      for (long j = 0; j < nn; ++j) {
        logmult += pi.sample_negative(ctx.eps, rng.next_uniform());
        any_env = true;
      }
    }
    if (any_env) {
      nl += zl * std::expm1(logmult);
      nh += zh * std::expm1(logmult);
    }
    if (nl < floor_lo) nl = 0.0;
    if (nh < floor_hi) nh = 0.0;
    zl = nl;
    zh = nh;
    t += dt;
    out.low.times.push_back(t);
    out.low.values.push_back(zl);
    out.high.times.push_back(t);
    out.high.values.push_back(zh);
    double gap = zl - zh;
    if (gap > out.max_violation) out.max_violation = gap;
    if (gap > order_tol) ++out.violation_count;
    if (zl > cfg.explosion_ceiling || zh > cfg.explosion_ceiling) {
      out.low.exploded = zl > cfg.explosion_ceiling;
      out.high.exploded = zh > cfg.explosion_ceiling;
      break;
    }
  }
  return out;
}

PathSample simulate_autonomous(const BranchingMechanism& mech, double sigma,
                               const CompetitionSpec& comp, double r0,
                               const SimConfig& cfg, uint64_t path_index) {
  cfg.validate();
  PathRng rng(cfg.seed, path_index);
  const double dt = cfg.dt, sdt = std::sqrt(dt);
  const double eps = cfg.jump_cutoff_eps;
  const double floor = cfg.floor_for(r0);
  const LevyMeasure& mu = mech.mu;
  const double jump_rate = mu.rate_above(eps);
  auto id = [](double z) { return z; };
  const double b_comp = (eps < 1.0) ? mu.integrate(id, eps, 1.0) : 0.0;
  // drift of the driving process at state 0+; decides whether the scheme can
  // leave 0 again (immigration-type drivers) or 0 is absorbing
  double g_slope0 = comp.g(1e-8) / 1e-8;
  const bool can_lift = jump_rate > 0.0 ||
                        (mech.gamma == 0.0 && mech.b - b_comp - g_slope0 > 0.0);
  const long n_steps = static_cast<long>(std::ceil(cfg.t_max / dt - 1e-9));

  PathSample out;
  out.times.reserve(n_steps / cfg.record_stride + 2);
  out.values.reserve(n_steps / cfg.record_stride + 2);
  out.times.push_back(0.0);
  out.values.push_back(r0);
  double r = r0, t = 0.0;
  bool absorbed = (r <= 0.0) && !can_lift;
  if (absorbed) out.absorbed_at = 0.0;

  for (long k = 0; k < n_steps; ++k) {
    if (!absorbed) {
      double n1 = rng.next_normal();
      double n2 = rng.next_normal();
      double gr_over_r = (r > 0.0) ? comp.g(r) / r : g_slope0;
      double drift = mech.b - b_comp - gr_over_r;
      double rn = r + drift * dt + std::sqrt(2.0) * mech.gamma * sdt * n1 +
                  sigma * std::sqrt(std::max(r, 0.0)) * sdt * n2;
      if (jump_rate > 0.0) {
        long nb = rng.next_poisson(jump_rate * dt);
        for (long j = 0; j < nb; ++j)
          rn += mu.sample_positive(eps, rng.next_uniform());
      }
      if (rn < floor) {
        if (can_lift) {
          rn = std::max(rn, 0.0);  // full truncation; immigration lifts it
        } else {
          rn = 0.0;
          absorbed = true;
          out.absorbed_at = t + dt;
        }
      }
      r = rn;
      if (r > cfg.explosion_ceiling) {
        out.exploded = true;
        out.times.push_back(t + dt);
        out.values.push_back(r);
        return out;
      }
    }
    t += dt;
    if ((k + 1) % cfg.record_stride == 0) {
      out.times.push_back(t);
      out.values.push_back(r);
    }
  }
  return out;
}

namespace {

// Piecewise-linear sample path helpers: evaluation and inversion of a
// non-decreasing sampled function. Inverting within the cell (instead of
// snapping to grid times) keeps the round trip consistent to O(dt).
double interp_at(const std::vector<double>& x, const std::vector<double>& y,
                 double q) {
  if (q <= x.front()) return y.front();
  if (q >= x.back()) return y.back();
  auto it = std::upper_bound(x.begin(), x.end(), q);
  size_t i = static_cast<size_t>(it - x.begin()) - 1;
  double w = (q - x[i]) / (x[i + 1] - x[i]);
  return y[i] + w * (y[i + 1] - y[i]);
}

double inverse_at(const std::vector<double>& x, const std::vector<double>& y,
                  double target) {
  // first time the non-decreasing y exceeds target, linear within the cell
  auto it = std::upper_bound(y.begin(), y.end(), target);
  if (it == y.begin()) return x.front();
  if (it == y.end()) return x.back();
  size_t i = static_cast<size_t>(it - y.begin()) - 1;
  if (y[i + 1] <= y[i]) return x[i + 1];
  double w = (target - y[i]) / (y[i + 1] - y[i]);
  return x[i] + w * (x[i + 1] - x[i]);
}

}  // namespace

LampertiRoundTrip lamperti_round_trip(const PathSample& path_r, double dt_out) {
  if (path_r.times.size() < 2)
    throw std::invalid_argument("lamperti_round_trip: degenerate path");
  const size_t n = path_r.times.size();
  LampertiRoundTrip out;
  out.clock.times = path_r.times;
  out.clock.eta.assign(n, 0.0);

  // eta_t = int_0^{t ^ T0} ds / R_s, accumulated cell by cell with the
  // mean-state rule dt / ((R_k + R_{k+1})/2). Against a trapezoid reciprocal
  // of the piecewise-linear image this inverts each cell to exactly dt,
  // where the plain 1/R trapezoid would drift by O(dt) on rough paths.
  size_t last_pos = 0;
  for (size_t k = 0; k + 1 < n; ++k) {
    double dt = path_r.times[k + 1] - path_r.times[k];
    double rk = path_r.values[k], rk1 = path_r.values[k + 1];
    double inc = 0.0;
    if (rk > 0.0 && rk1 > 0.0) {
      inc = 2.0 * dt / (rk + rk1);
      last_pos = k + 1;
    } else if (rk > 0.0) {
      inc = dt / rk;
    }
    out.clock.eta[k + 1] = out.clock.eta[k] + inc;
  }
  out.clock.eta_end = out.clock.eta.back();
  const bool absorbed = path_r.absorbed_at.has_value();

  // strictly increasing part of the clock, for interpolated inversion
  std::vector<double> inc_t(path_r.times.begin(), path_r.times.begin() + last_pos + 1);
  std::vector<double> inc_eta(out.clock.eta.begin(), out.clock.eta.begin() + last_pos + 1);

  double tau_hi = absorbed ? out.clock.eta_end : inc_eta.back();
  double extra = absorbed ? 5.0 * dt_out : 0.0;
  for (double tau = 0.0; tau <= tau_hi + extra; tau += dt_out) {
    double z;
    if (tau < inc_eta.back()) {
      double c = inverse_at(inc_t, inc_eta, tau);
      z = interp_at(path_r.times, path_r.values, c);
    } else if (absorbed) {
      z = 0.0;
      if (!out.z_path.absorbed_at) out.z_path.absorbed_at = tau;
    } else {
      break;
    }
    out.z_path.times.push_back(tau);
    out.z_path.values.push_back(z);
  }
  if (out.z_path.times.size() < 2) {
    out.sup_error = 0.0;
    return out;  // degenerate window: R absorbed essentially immediately
  }

  // Reciprocal change: C'_t = int_0^t Z ds (trapezoid), then R_rec = Z at
  // the inverse of C'.
  const size_t m = out.z_path.times.size();
  std::vector<double> cprime(m, 0.0);
  for (size_t k = 0; k + 1 < m; ++k) {
    double dt = out.z_path.times[k + 1] - out.z_path.times[k];
    cprime[k + 1] = cprime[k] +
                    0.5 * dt * (out.z_path.values[k] + out.z_path.values[k + 1]);
  }
  double window = std::min(path_r.times[last_pos], cprime.back());
  out.common_window = window;
  out.recovered_r.times = path_r.times;
  out.recovered_r.values.assign(n, 0.0);
  double sup = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double s = path_r.times[i];
    if (s >= window) {
      out.recovered_r.values[i] = out.recovered_r.values[i ? i - 1 : 0];
      continue;
    }
    double tau = inverse_at(out.z_path.times, cprime, s);
    out.recovered_r.values[i] = interp_at(out.z_path.times, out.z_path.values, tau);
    sup = std::max(sup, std::abs(out.recovered_r.values[i] - path_r.values[i]));
  }
  out.sup_error = sup;
  return out;
}

double ks_distance(std::vector<double> samples,
                   const std::function<double(double)>& cdf) {
  if (samples.empty()) return 1.0;
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    double F = cdf(samples[i]);
    d = std::max(d, std::abs(F - static_cast<double>(i) / n));
    d = std::max(d, std::abs(F - static_cast<double>(i + 1) / n));
  }
  return d;
}

void write_path_csv(const PathSample& path, std::ostream& os,
                    const std::vector<std::pair<std::string, std::string>>& metadata) {
  for (const auto& [k, v] : metadata) os << "# " << k << "=" << v << "\n";
  if (path.absorbed_at) {
    std::string line = "# absorbed_at=";
    append_csv_double(line, *path.absorbed_at);
    os << line << "\n";
  }
  os << "# exploded=" << (path.exploded ? "true" : "false") << "\n";
  os << "t,value\n";
  for (size_t i = 0; i < path.times.size(); ++i) {
    std::string line;
    append_csv_double(line, path.times[i]);
    line += ",";
    append_csv_double(line, path.values[i]);
    os << line << "\n";
  }
}

}  // namespace cbre::sim
