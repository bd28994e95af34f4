#include "cbre/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cbre::logistic {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMLogStep = 0.015;
constexpr double kMLo = 1e-12;
}

void LogisticModel::validate() const {
  if (c <= 0.0) throw std::invalid_argument("logistic model: c must be > 0");
  if (sigma < 0.0) throw std::invalid_argument("logistic model: sigma must be >= 0");
  branching.validate();
}

std::string to_string(AdhEstimate::Verdict v) {
  switch (v) {
    case AdhEstimate::Verdict::partial_holds: return "partial_holds";
    case AdhEstimate::Verdict::eth_holds: return "eth_holds";
    default: return "undecided";
  }
}

std::string to_string(SubordinatorRegime r) {
  switch (r) {
    case SubordinatorRegime::positive_recurrent: return "positive_recurrent";
    case SubordinatorRegime::positive_recurrent_infinite_mean:
      return "positive_recurrent_infinite_mean";
    case SubordinatorRegime::null_recurrent_to_zero: return "null_recurrent_to_zero";
    case SubordinatorRegime::transient: return "transient";
    case SubordinatorRegime::converges_to_zero_wpp: return "converges_to_zero_wpp";
    default: return "undecided";
  }
}

LogisticAnalytics::LogisticAnalytics(LogisticModel model) : model_(std::move(model)) {
  model_.validate();
}

bool LogisticAnalytics::general_mechanism() const {
  if (!model_.branching.mu.log_moment().finite) return false;
  return std::isfinite(model_.branching.psi_positive_root());
}

quad::TailClassification LogisticAnalytics::grey() const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (grey_) return *grey_;
  }
  quad::TailClassification g = model_.branching.grey();
  std::lock_guard<std::mutex> lock(mu_);
  grey_ = g;
  return g;
}

// ---------------------------------------------------------------------------
// m, I, varphi, r

void LogisticAnalytics::ensure_m(double need) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (m_table_ && m_table_->back() >= need) return;
  if (!model_.branching.first_moment_regime() &&
      !model_.branching.mu.log_moment().finite)
    throw std::domain_error(
        "m: log-moment condition fails, the defining integral diverges at 0");
  double hi = std::max(need * 1.05, 2e4);
  if (m_table_) hi = std::max(hi, 2.0 * m_table_->back());
  const LogisticModel m = model_;
  auto q = [m](double u) {
    if (u <= 0.0) return 0.0;
    return m.branching.psi(u) / m.omega(u);
  };
  std::vector<double> nodes = quad::log_grid(kMLo, hi, kMLogStep, true);
  m_table_ = std::make_shared<quad::CumulativeTable>(q, std::move(nodes));
}

std::shared_ptr<quad::CumulativeTable> LogisticAnalytics::m_snapshot(double need) const {
  ensure_m(need);
  std::lock_guard<std::mutex> lock(mu_);
  return m_table_;
}

double LogisticAnalytics::m_of(double lambda) const {
  if (lambda < 0.0) throw std::domain_error("m: lambda must be >= 0");
  if (lambda == 0.0) return 0.0;
  return m_snapshot(lambda)->eval(lambda);
}

double LogisticAnalytics::I_of(double lambda) const {
  if (lambda < 0.0) throw std::domain_error("I: lambda must be >= 0");
  if (lambda == 0.0) return 0.0;
  std::shared_ptr<quad::CumulativeTable> itab;
  {
    auto msnap = m_snapshot(std::max(lambda, 64.0));
    std::lock_guard<std::mutex> lock(mu_);
    if (!I_table_ || I_table_->back() < lambda) {
      double hi = std::max(64.0, lambda * 1.05);
      if (I_table_) hi = std::max(hi, 2.0 * I_table_->back());
      auto dens = [msnap](double u) {
        return std::exp(std::min(msnap->eval(u), 700.0));
      };
      I_table_ = std::make_shared<quad::CumulativeTable>(
          dens, quad::log_grid(1e-9, hi, 0.01, true));
    }
    itab = I_table_;
  }
  return itab->eval(lambda);
}

double LogisticAnalytics::varphi(double z) const {
  if (z < 0.0) throw std::domain_error("varphi: z must be >= 0");
  if (z == 0.0) return 0.0;
  double hi = 1.0;
  for (int it = 0; it < 80 && I_of(hi) < z; ++it) {
    if (m_of(hi) > 690.0)
      throw std::domain_error(
          "varphi: I is bounded on the probed range; mechanism is not general");
    hi *= 2.0;
  }
  auto f = [this](double u) { return I_of(u); };
  return quad::invert_monotone(f, z, 0.0, hi, 1e-13 * (1.0 + z));
}

double LogisticAnalytics::r_of(double z) const {
  double phi = varphi(z);
  return std::exp(-m_of(phi)) / std::sqrt(model_.omega(phi));
}

// ---------------------------------------------------------------------------
// Riccati tables per lambda

std::shared_ptr<const LogisticAnalytics::LambdaTables>
LogisticAnalytics::lambda_tables(double lambda, double z_need) const {
  if (lambda <= 0.0) throw std::domain_error("riccati: lambda must be > 0");
  if (!general_mechanism())
    throw std::domain_error("riccati: mechanism is not general (needs psi > 0 eventually and the log moment)");
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = lambda_cache_.find(lambda);
    if (it != lambda_cache_.end() && it->second->z_hi >= z_need) return it->second;
  }

  // start the window where the asymptote sqrt(lambda) e^{-m} / sqrt(omega)
  // falls below 1e-6
  double start = 16.0;
  for (int k = 0; k <= 40; ++k) {
    double t = std::pow(2.0, k);
    double l = 0.5 * std::log(lambda) - m_of(t) - 0.5 * std::log(model_.omega(t));
    if (l < std::log(1e-6)) {
      start = std::max(16.0, t);
      break;
    }
  }

  const bool grey_holds = grey().verdict == quad::Verdict::holds;
  double t_hi = std::max(start, z_need);
  auto tabs = std::make_shared<LambdaTables>();
  double prev_crit = kInf;
  bool settled = false;
  num::RiccatiProblem prob;
  auto self = this;
  for (int esc = 0; esc < 13 && !settled; ++esc) {
    ensure_m(8.0 * t_hi);  // the tail correction integrates beyond t_hi
    prob = num::RiccatiProblem{};
    prob.logG = [self](double t) { return self->m_of(t); };
    const LogisticModel m = model_;
    prob.omega = [m](double u) { return m.omega(u); };
    prob.G0 = 1.0;
    prob.omega_slope0 = model_.c;
    prob.lambda = lambda;
    prob.t_lo = 1e-6;
    prob.t_hi = t_hi;
    tabs->grid = num::solve_riccati_transformed(prob);
    tabs->z_hi = t_hi;

    double crit;
    if (grey_holds) {
      double tail_v = num::riccati_tail_integral(prob, t_hi);
      tabs->y_total = tabs->grid.W_of(t_hi) + tail_v;
      tabs->y_total_finite = std::isfinite(tabs->y_total);
      crit = tabs->y_total;
    } else {
      tabs->y_total = kInf;
      tabs->y_total_finite = false;
      crit = tabs->grid.W_of(0.5 * t_hi);
    }
    if (std::abs(crit - prev_crit) <= 1e-8 * std::max(1.0, std::abs(crit)))
      settled = true;
    else
      t_hi *= 2.0;
    prev_crit = crit;
  }
  if (!settled)
    throw std::runtime_error("riccati: window escalation did not stabilize the integral of y");

  // Q' = e^{2 W} - (psi/omega) Q on [0, z_hi]
  const num::RiccatiGrid* grid_ptr = &tabs->grid;
  const LogisticModel m = model_;
  auto rhs = [grid_ptr, m](double z, double q) {
    double w2 = 2.0 * grid_ptr->W_of(z);
    double ratio = (z > 0.0) ? m.branching.psi(z) / m.omega(z) : 0.0;
    return std::exp(w2) - ratio * q;
  };
  quad::OdeOptions qopts;
  qopts.rtol = 1e-10;
  qopts.atol = 1e-14;
  qopts.max_step = std::max(0.25, tabs->z_hi / 512.0);
  tabs->Q = quad::solve_ode(rhs, 0.0, tabs->z_hi, 0.0, qopts);
  if (!tabs->Q.completed)
    throw std::runtime_error("riccati: auxiliary linear solve aborted");

  std::lock_guard<std::mutex> lock(mu_);
  lambda_cache_[lambda] = tabs;
  return tabs;
}

num::RiccatiGrid LogisticAnalytics::riccati(double lambda) const {
  if (lambda == 0.0) {
    num::RiccatiProblem prob;
    auto self = this;
    prob.logG = [self](double t) { return self->m_of(t); };
    const LogisticModel m = model_;
    prob.omega = [m](double u) { return m.omega(u); };
    prob.lambda = 0.0;
    prob.t_lo = 1e-6;
    prob.t_hi = 16.0;
    return num::solve_riccati_transformed(prob);
  }
  return lambda_tables(lambda, 0.0)->grid;
}

double LogisticAnalytics::integral_y(double lambda) const {
  if (lambda == 0.0) return 0.0;
  auto tabs = lambda_tables(lambda, 0.0);
  if (!tabs->y_total_finite)
    throw std::domain_error("integral of y diverges (Grey's condition fails)");
  return tabs->y_total;
}

// ---------------------------------------------------------------------------
// h_lambda and the Laplace transform

double LogisticAnalytics::outer_truncation(double x, double lambda) const {
  (void)lambda;
  // decay bound o(e^{-xz/2}/omega): pick the first dyadic point past which
  // the remaining mass is negligible. The switch point is capped: beyond it
  // the bracket e^{-W} Q psi / omega has settled and the closed 1/psi tail
  // takes over, so pushing the Riccati window further buys nothing.
  for (int k = 4; k <= 13; ++k) {
    double z = std::pow(2.0, k);
    if (0.5 * x * z + std::log(model_.omega(z)) > 36.0) return z;
  }
  return std::pow(2.0, 13);
}

double LogisticAnalytics::h_integral(double x, double lambda, int moment) const {
  double z_sw = outer_truncation(x, lambda);
  auto tabs = lambda_tables(lambda, z_sw);
  const auto& grid = tabs->grid;
  const auto& Q = tabs->Q;
  const LogisticModel m = model_;
  auto integrand = [&](double z) {
    if (z <= 0.0) return (moment == 0) ? 1.0 / m.c : 0.0;
    double v = std::exp(-x * z - grid.W_of(z)) * std::max(Q.eval(z), 0.0) /
               m.omega(z);
    for (int i = 0; i < moment; ++i) v *= z;
    return v;
  };
  double acc = 0.0;
  double lo = 0.0, hiblk = 1.0;
  while (lo < z_sw) {
    double hi = std::min(hiblk, z_sw);
    acc += quad::integrate(integrand, lo, hi, {1e-11, 1e-15}).value;
    lo = hi;
    hiblk *= 2.0;
  }
  // analytic tail: beyond z_sw the bracket e^{-W} Q psi / omega has settled,
  // so the integrand is A z^k e^{-xz} / psi(z) with A matched at z_sw
  double A = std::exp(-grid.W_of(z_sw)) * std::max(Q.eval(z_sw), 0.0) *
             model_.branching.psi(z_sw) / m.omega(z_sw);
  if (A > 0.0) {
    auto tail = [&](double z) {
      double v = std::exp(-x * z) / m.branching.psi(z);
      for (int i = 0; i < moment; ++i) v *= z;
      return v;
    };
    quad::IntegralResult t = quad::integrate_improper(tail, z_sw, kInf, {}, {1e-9, 1e-14});
    if (t.converged) acc += A * t.value;
  }
  return acc;
}

double LogisticAnalytics::h_lambda(double x, double lambda) const {
  if (x < 0.0) throw std::domain_error("h: x must be >= 0");
  if (lambda < 0.0) throw std::domain_error("h: lambda must be >= 0");
  if (!model_.branching.first_moment_regime())
    throw std::domain_error("h: first-moment condition required");
  if (lambda == 0.0) return 1.0;
  if (x == 0.0) {
    auto tabs = lambda_tables(lambda, 0.0);
    if (!tabs->y_total_finite)
      throw std::domain_error("h at 0 requires Grey's condition");
    return std::exp(tabs->y_total);
  }
  return 1.0 + lambda * h_integral(x, lambda, 0);
}

double LogisticAnalytics::h_lambda_derivative(double x, double lambda, int order) const {
  if (order == 0) return h_lambda(x, lambda);
  if (x <= 0.0) throw std::domain_error("h derivatives need x > 0");
  double sign = (order % 2 == 0) ? 1.0 : -1.0;
  return sign * lambda * h_integral(x, lambda, order);
}

double LogisticAnalytics::h0_double_route(double lambda) const {
  if (grey().verdict != quad::Verdict::holds)
    throw std::domain_error("h(0) double route requires Grey's condition");
  return 1.0 + lambda * h_integral(0.0, lambda, 0);
}

FuncC2 LogisticAnalytics::h_lambda_as_function(double lambda) const {
  auto self = this;
  FuncC2 f;
  f.f = [self, lambda](double x) { return self->h_lambda(x, lambda); };
  f.f1 = [self, lambda](double x) { return self->h_lambda_derivative(x, lambda, 1); };
  f.f2 = [self, lambda](double x) { return self->h_lambda_derivative(x, lambda, 2); };
  return f;
}

double LogisticAnalytics::laplace_Ta(double x, double a, double lambda) const {
  if (!(0.0 <= a && a <= x)) throw std::domain_error("laplace_Ta: need 0 <= a <= x");
  if (lambda < 0.0) throw std::domain_error("laplace_Ta: lambda must be >= 0");
  if (lambda == 0.0 || x == a) return 1.0;
  return h_lambda(x, lambda) / h_lambda(a, lambda);
}

// ---------------------------------------------------------------------------
// mean extinction time

double LogisticAnalytics::mean_T0(double x) const {
  if (x < 0.0) throw std::domain_error("mean_T0: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (grey().verdict != quad::Verdict::holds)
    throw std::domain_error("mean_T0 requires Grey's condition");
  if (!general_mechanism())
    throw std::domain_error("mean_T0 requires a general mechanism");
  if (!model_.branching.first_moment_regime())
    throw std::domain_error("mean_T0 requires the first-moment condition");
  const bool from_infinity = std::isinf(x);
  const LogisticModel m = model_;
  auto self = this;

  auto inner = [self, m, x, from_infinity](double u) {
    double mu_ = self->m_of(u);
    auto f = [&, u, mu_](double z) {
      double dm = self->m_of(z) - mu_;
      if (dm > 700.0) return 0.0;
      double w = from_infinity ? 1.0 : -std::expm1(-z * x);
      return std::exp(-dm) * w / m.omega(z);
    };
    return quad::integrate_improper(f, u, kInf, {}, {1e-9, 1e-13}).value;
  };
  quad::IntegralResult outer =
      quad::integrate_improper(inner, 0.0, kInf, {}, {1e-8, 1e-11});
  if (!outer.converged)
    throw std::runtime_error("mean_T0: outer quadrature did not converge");
  return outer.value;
}

// ---------------------------------------------------------------------------
// subordinator-case functionals

namespace {

// int_ell^z du / omega(u) in closed form
double theta_ell(double z, double ell, double c, double sigma) {
  if (sigma == 0.0) return std::log(z / ell) / c;
  double kp = 2.0 * c / (sigma * sigma);
  return std::log(z * (kp + ell) / (ell * (kp + z))) / c;
}

}  // namespace

double LogisticAnalytics::f_lambda(double x, double lambda, double ell) const {
  if (!model_.branching.is_subordinator())
    throw std::domain_error("f_lambda: branching mechanism must be a subordinator exponent");
  if (x < 0.0 || lambda < 0.0 || ell <= 0.0)
    throw std::domain_error("f_lambda: bad arguments");
  const LogisticModel m = model_;
  double m_ell = m_of(ell);
  auto self = this;
  auto integrand = [self, m, x, lambda, ell, m_ell](double z) {
    if (z <= 0.0) return 0.0;
    double J = lambda * theta_ell(z, ell, m.c, m.sigma) + m_ell - self->m_of(z);
    double e = -x * z + J;
    if (e > 700.0) return kInf;
    if (e < -745.0) return 0.0;
    return std::exp(e) / m.omega(z);
  };
  quad::ImproperHints hints;
  double alpha = lambda / model_.c;
  if (alpha < 1.0 && alpha > 0.0) {
    hints.singular_at_a = quad::Singularity::power;
    hints.power_alpha = alpha;
  }
  quad::IntegralResult r = quad::integrate_improper(integrand, 0.0, kInf, hints,
                                                    {1e-10, 1e-13});
  if (!r.converged || !std::isfinite(r.value))
    throw std::runtime_error("f_lambda: integral diverges for these parameters");
  return r.value;
}

double LogisticAnalytics::duhalde_ratio(double x, double a, double lambda,
                                        double ell) const {
  if (!(0.0 <= a && a <= x)) throw std::domain_error("duhalde_ratio: need 0 <= a <= x");
  if (x == a) return 1.0;
  return f_lambda(x, lambda, ell) / f_lambda(a, lambda, ell);
}

// ---------------------------------------------------------------------------
// invariant law

InvariantLaw LogisticAnalytics::invariant_law() const {
  if (!model_.branching.is_subordinator())
    throw std::domain_error("invariant_law: subordinator mechanism required");
  if (model_.sigma <= 0.0)
    throw std::domain_error("invariant_law: sigma > 0 required");
  if (!model_.branching.mu.log_moment().finite)
    throw std::domain_error("invariant_law: log-moment condition required");

  InvariantLaw law;
  auto self = this;
  law.nu_laplace = [self](double lam) { return std::exp(self->m_of(lam)); };

  double head = quad::integrate([self](double u) { return std::exp(self->m_of(u)); },
                                0.0, 1.0, {1e-10, 1e-13}).value;
  quad::TailClassification tail = quad::classify_tail(
      [self](double u) { return std::exp(self->m_of(u)); }, 1.0);
  law.normalizer_finite = tail.verdict == quad::Verdict::holds;
  law.normalizer = law.normalizer_finite ? head + tail.value : kInf;
  if (law.normalizer_finite) law.rho_mean = 1.0 / law.normalizer;

  double delta = model_.branching.delta();
  MomentValue first = model_.branching.mu.int_tail_z(1e-300);
  law.nu_mean_finite = first.finite;
  law.nu_mean = first.finite ? (delta + first.value) / model_.c : kInf;

  double norm = law.normalizer;
  law.rho_laplace = [self, norm](double lam) {
    if (!std::isfinite(norm)) return 0.0;
    auto em = [self](double u) { return std::exp(self->m_of(u)); };
    return quad::integrate_improper(em, lam, kInf, {}, {1e-9, 1e-12}).value / norm;
  };

  // Levy density of nu per the explicit representation of -m; the
  // exponential is folded into the integrand so neither factor overflows
  const double K = 2.0 * model_.c / (model_.sigma * model_.sigma);
  const double s2 = model_.sigma * model_.sigma;
  const LevyMeasure mu = model_.branching.mu;
  law.pi_density = [K, s2, delta, mu](double z) {
    if (z <= 0.0) return 0.0;
    double head = (K * z < 745.0) ? delta * std::exp(-K * z) : 0.0;
    return 2.0 / (s2 * z) * (head + mu.exp_weighted_tail(K, z));
  };
  return law;
}

double LogisticAnalytics::m_dual_subordinator(double lambda) const {
  if (!model_.branching.is_subordinator())
    throw std::domain_error("m_dual: subordinator mechanism required");
  if (model_.sigma <= 0.0) throw std::domain_error("m_dual: sigma > 0 required");
  const double K = 2.0 * model_.c / (model_.sigma * model_.sigma);
  const double s2 = model_.sigma * model_.sigma;
  const double delta = model_.branching.delta();
  const LevyMeasure mu = model_.branching.mu;
  auto f = [&](double z) {
    if (z <= 0.0) return lambda * delta;  // limit of the integrand at 0
    double head = (K * z < 745.0) ? delta * std::exp(-K * z) : 0.0;
    return -std::expm1(-lambda * z) / z * (head + mu.exp_weighted_tail(K, z));
  };
  // split at the kinks of the weighted tail
  double lo = 0.0, acc = 0.0;
  for (double p : mu.kink_points()) {
    if (p <= lo) continue;
    acc += quad::integrate(f, lo, p, {1e-11, 1e-14}).value;
    lo = p;
  }
  acc += quad::integrate_improper(f, lo, kInf, {}, {1e-11, 1e-14}).value;
  return -2.0 / s2 * acc;
}

// ---------------------------------------------------------------------------
// recurrence integral and the taxonomy

quad::TailClassification LogisticAnalytics::recurrence_condition() const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (recurrence_) return *recurrence_;
  }
  const LogisticModel m = model_;
  // int_0^1 dz/z exp{-int_z^1 jump(u)/omega(u) du} with z = e^{-t}
  auto inner = [m](double z) {
    auto g = [m](double u) { return m.branching.mu.sub_jump_part(u) / m.omega(u); };
    return quad::integrate(g, z, 1.0, {1e-9, 1e-12}).value;
  };
  auto f = [inner](double t) { return std::exp(-inner(std::exp(-t))); };
  quad::TailClassification out = quad::classify_tail(f, 1.0);
  // fold in the head int_0^1 of the transformed integrand
  if (out.verdict == quad::Verdict::holds)
    out.value += quad::integrate(f, 0.0, 1.0, {1e-9, 1e-12}).value;
  std::lock_guard<std::mutex> lock(mu_);
  recurrence_ = out;
  return out;
}

AdhEstimate LogisticAnalytics::adh_estimate(int depth) const {
  double delta = model_.branching.delta();
  double s2 = model_.sigma * model_.sigma;
  if (std::abs(2.0 * delta - s2) > 1e-9 * std::max(1.0, s2))
    throw std::domain_error("adh_estimate: requires the boundary regime 2 delta = sigma^2");
  const double half_s2 = 0.5 * s2;
  AdhEstimate out;
  out.depth = depth;

  // iterates on the deep half of the grid z = 10^{-j}
  std::vector<double> zs;
  for (int j = 7; j <= 12; ++j) zs.push_back(std::pow(10.0, -j));
  std::vector<double> cur(zs.size());
  for (size_t i = 0; i < zs.size(); ++i)
    cur[i] = std::abs(std::log(zs[i])) * model_.branching.mu.tail_primitive(zs[i]);

  for (int k = 1; k <= depth; ++k) {
    if (k > 1) {
      // I^{(k)}(z) = l^{(k)}(z) (I^{(k-1)}(z) - sigma^2/2)
      for (size_t i = 0; i < zs.size(); ++i) {
        double l = std::abs(std::log(zs[i]));
        for (int j = 2; j <= k; ++j) l = std::log(l);
        cur[i] = l * (cur[i] - half_s2);
      }
    }
    double lo = *std::min_element(cur.begin(), cur.end());
    double hi = *std::max_element(cur.begin(), cur.end());
    out.inf_estimate = lo;
    out.sup_estimate = hi;
    out.decided_at = k;
    if (hi < 0.9 * half_s2) {
      out.verdict = AdhEstimate::Verdict::eth_holds;
      return out;
    }
    if (lo > 1.1 * half_s2) {
      out.verdict = AdhEstimate::Verdict::partial_holds;
      return out;
    }
    bool pinned = lo > 0.9 * half_s2 && hi < 1.1 * half_s2;
    if (!pinned) {
      out.verdict = AdhEstimate::Verdict::undecided;
      return out;
    }
  }
  out.verdict = AdhEstimate::Verdict::undecided;
  return out;
}

ClassificationReport LogisticAnalytics::classify_subordinator() const {
  if (!model_.branching.is_subordinator())
    throw std::domain_error("classify_subordinator: subordinator mechanism required");
  if (model_.c <= 0.0 || model_.sigma <= 0.0)
    throw std::domain_error("classify_subordinator: needs c > 0 and sigma > 0");
  ClassificationReport rep;
  const double delta = model_.branching.delta();
  const double s2 = model_.sigma * model_.sigma;
  const bool logmom = model_.branching.mu.log_moment().finite;

  if (2.0 * delta < s2 * (1.0 - 1e-12)) {
    rep.zero_polar = TriBool::no;
    rep.regime = SubordinatorRegime::converges_to_zero_wpp;
    rep.rule = "2 delta < sigma^2: driver reaches 0, process converges to 0 with positive probability";
    return rep;
  }
  rep.zero_polar = TriBool::yes;

  if (logmom) {
    rep.recurrence_integral = quad::Verdict::fails;  // integral diverges
  } else {
    rep.recurrence_integral = recurrence_condition().verdict;
  }

  const bool boundary = std::abs(2.0 * delta - s2) <= 1e-9 * std::max(1.0, s2);
  if (rep.recurrence_integral == quad::Verdict::fails) {  // divergent => recurrent
    if (!boundary) {  // 2 delta > sigma^2
      if (logmom) {
        rep.regime = SubordinatorRegime::positive_recurrent;
        rep.rule = "2 delta > sigma^2 and recurrence integral divergent: positive recurrent, invariant law = size-biased nu";
      } else {
        rep.regime = SubordinatorRegime::positive_recurrent_infinite_mean;
        rep.rule = "2 delta > sigma^2 without the log moment: positive recurrent, invariant law has infinite mean";
      }
      return rep;
    }
    // boundary regime: consult the adherence iterates
    AdhEstimate adh = adh_estimate(3);
    rep.adh = adh;
    switch (adh.verdict) {
      case AdhEstimate::Verdict::partial_holds:
        rep.regime = SubordinatorRegime::positive_recurrent;
        rep.rule = "2 delta = sigma^2 with adherence iterates above sigma^2/2: positive recurrent";
        break;
      case AdhEstimate::Verdict::eth_holds:
        rep.regime = SubordinatorRegime::null_recurrent_to_zero;
        rep.rule = "2 delta = sigma^2 with adherence iterates below sigma^2/2: null recurrent, converges to 0 in probability";
        break;
      default:
        rep.regime = SubordinatorRegime::undecided;
        rep.rule = "2 delta = sigma^2: adherence iterates undecided at the sampled depths";
        break;
    }
    return rep;
  }
  if (rep.recurrence_integral == quad::Verdict::holds) {  // finite => transient
    rep.regime = SubordinatorRegime::transient;
    rep.rule = "recurrence integral finite: transient, escape probability f_0(x)/f_0(a)";
    return rep;
  }
  rep.regime = SubordinatorRegime::undecided;
  rep.rule = "recurrence integral numerically inconclusive";
  return rep;
}

// ---------------------------------------------------------------------------
// generator

double LogisticAnalytics::generator_apply(const FuncC2& f, double x) const {
  if (x < 0.0) throw std::domain_error("generator: x must be >= 0");
  if (!model_.branching.first_moment_regime() &&
      !model_.branching.mu.is_empty())
    throw std::domain_error("generator: compensated form needs the first-moment condition");
  const double b = model_.branching.b;
  const double gamma = model_.branching.gamma;
  const double c = model_.c;
  const double sigma = model_.sigma;
  double v = (b * x - c * x * x) * f.f1(x) +
             (gamma * gamma * x + 0.5 * sigma * sigma * x * x) * f.f2(x);
  if (!model_.branching.mu.is_empty()) {
    double fx = f.f(x);
    double f1x = f.f1(x);
    auto jump = [&](double z) {
      double comp = (z < 1.0) ? z * f1x : 0.0;
      return f.f(x + z) - fx - comp;
    };
    v += x * model_.branching.mu.integrate(jump, 0.0, kInf);
  }
  return v;
}

}  // namespace cbre::logistic
