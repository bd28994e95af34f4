#include "cbre/diffusion_scale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cbre::scale {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTableLo = 1e-10;
constexpr double kLogStep = 0.02;
}

void DiffusionModel::validate() const {
  if (gamma < 0.0 || sigma < 0.0)
    throw std::invalid_argument("diffusion model: amplitudes must be >= 0");
  if (gamma == 0.0 && sigma == 0.0)
    throw std::invalid_argument("diffusion model: needs gamma > 0 or sigma > 0");
  if (std::abs(competition.g(0.0)) > 1e-14)
    throw std::invalid_argument("diffusion model: g(0) must be 0");
}

DiffusionScale::DiffusionScale(DiffusionModel model, double anchor)
    : model_(std::move(model)), anchor_(anchor) {
  model_.validate();
  if (model_.gamma <= 0.0)
    throw std::domain_error(
        "scale function: gamma = 0 makes the inner exponent non-integrable at 0");
}

// Tables are immutable snapshots swapped under the lock; growth rebuilds a
// fresh table so concurrent readers keep evaluating their old snapshot.
void DiffusionScale::ensure_tables(double need) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (exp_table_ && s_table_ && s_table_->back() >= need) return;
  double hi = std::max({need * 1.05, 16.0, anchor_ * 2.0});
  if (s_table_) hi = std::max(hi, 2.0 * s_table_->back());
  const DiffusionModel m = model_;
  auto ratio = [m](double z) { return m.drift(z) / m.diffusion(z); };
  auto etab = std::make_shared<quad::CumulativeTable>(
      ratio, quad::log_grid(kTableLo, hi * 1.05, kLogStep, false));
  double ea = etab->eval(anchor_);
  auto dens = [etab, ea](double u) {
    double e = etab->eval(std::max(u, kTableLo)) - ea;
    return std::exp(std::min(e, 700.0));
  };
  auto stab = std::make_shared<quad::CumulativeTable>(
      dens, quad::log_grid(1e-8, hi, kLogStep, true));
  exp_table_ = etab;
  exponent_at_anchor_ = ea;
  s_table_ = stab;
}

double DiffusionScale::inner_exponent(double u) const {
  ensure_tables(u);
  std::shared_ptr<quad::CumulativeTable> etab;
  double ea;
  {
    std::lock_guard<std::mutex> lock(mu_);
    etab = exp_table_;
    ea = exponent_at_anchor_;
  }
  return etab->eval(std::max(u, kTableLo)) - ea;
}

double DiffusionScale::scale_density(double u) const {
  return std::exp(std::min(inner_exponent(u), 700.0));
}

double DiffusionScale::S(double x) const {
  if (x < 0.0) throw std::domain_error("scale function: x must be >= 0");
  if (x == 0.0) return 0.0;
  ensure_tables(x);
  std::shared_ptr<quad::CumulativeTable> stab;
  {
    std::lock_guard<std::mutex> lock(mu_);
    stab = s_table_;
  }
  return stab->eval(x);
}

quad::TailClassification DiffusionScale::S_infinity() const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (s_inf_) return *s_inf_;
  }
  double head = S(1.0);
  auto self = this;
  auto s = [self](double u) { return self->scale_density(u); };
  quad::TailClassification tail = quad::classify_tail(s, 1.0);
  if (tail.verdict == quad::Verdict::holds) tail.value += head;
  std::lock_guard<std::mutex> lock(mu_);
  s_inf_ = tail;
  return tail;
}

double DiffusionScale::inverse_S(double y) const {
  if (y < 0.0) throw std::domain_error("inverse scale: y must be >= 0");
  if (y == 0.0) return 0.0;
  double hi = 1.0;
  while (S(hi) < y) {
    hi *= 2.0;
    if (hi > 1e12) throw std::domain_error("inverse scale: target above S(inf)");
  }
  auto f = [this](double x) { return S(x); };
  return quad::invert_monotone(f, y, 0.0, hi, 1e-13 * (1.0 + y));
}

double DiffusionScale::hitting_prob(double x, double y) const {
  if (!(0.0 <= x && x <= y)) throw std::domain_error("hitting_prob: need 0 <= x <= y");
  if (x == y) return 0.0;
  double sy = S(y);
  return (sy - S(x)) / sy;
}

DiffusionClassification DiffusionScale::classify() const {
  quad::TailClassification t = S_infinity();
  DiffusionClassification out;
  out.scale_divergence = t.verdict;
  switch (t.verdict) {
    case quad::Verdict::fails: out.extinct_as = TriBool::yes; break;  // S(inf)=inf
    case quad::Verdict::holds: out.extinct_as = TriBool::no; break;
    default: out.extinct_as = TriBool::unknown; break;
  }
  return out;
}

double DiffusionScale::p_to_infinity(double x) const {
  quad::TailClassification t = S_infinity();
  if (t.verdict == quad::Verdict::inconclusive)
    throw std::runtime_error("p_to_infinity: scale divergence test inconclusive");
  if (t.verdict == quad::Verdict::fails) return 0.0;
  return S(x) / t.value;
}

double DiffusionScale::asymptote_start(double lambda) const {
  // smallest dyadic x where sqrt(lambda) e^{-E} / sqrt(d) drops below 1e-6
  for (int k = 0; k <= 24; ++k) {
    double x = std::pow(2.0, k);
    double l = 0.5 * std::log(lambda) - inner_exponent(x) -
               0.5 * std::log(model_.diffusion(x));
    if (l < std::log(1e-6)) return x;
  }
  return 0.0;  // asymptote never falls (finite S(inf) branch)
}

num::RiccatiGrid DiffusionScale::riccati(double lambda, double x_need) const {
  if (lambda < 0.0) throw std::domain_error("riccati: lambda must be >= 0");
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = riccati_cache_.find(lambda);
    if (it != riccati_cache_.end() && it->second->t_hi >= x_need)
      return *it->second;
  }
  double a_start = asymptote_start(lambda);
  double t_hi = std::max({a_start, 2.0 * x_need, 16.0});
  ensure_tables(t_hi * 1.01);

  num::RiccatiProblem prob;
  auto self = this;
  prob.logG = [self](double t) { return self->inner_exponent(t); };
  const DiffusionModel m = model_;
  prob.omega = [m](double t) { return m.diffusion(t); };
  prob.G0 = scale_density(kTableLo);
  prob.omega_slope0 = model_.gamma * model_.gamma;
  prob.lambda = lambda;
  prob.t_lo = 1e-6;
  prob.t_hi = t_hi;
  auto grid = std::make_shared<num::RiccatiGrid>(num::solve_riccati_transformed(prob));
  std::lock_guard<std::mutex> lock(mu_);
  riccati_cache_[lambda] = grid;
  return *grid;
}

double DiffusionScale::laplace_Ta(double x, double a, double lambda) const {
  if (!(0.0 <= a && a <= x)) throw std::domain_error("laplace_Ta: need 0 <= a <= x");
  if (lambda < 0.0) throw std::domain_error("laplace_Ta: lambda must be >= 0");
  if (x == a || lambda == 0.0) return 1.0;

  double prev = -1.0;
  double x_need = std::max(x, 1.0);
  for (int it = 0; it < 13; ++it) {
    num::RiccatiGrid grid = riccati(lambda, x_need);
    double val = std::exp(-(grid.W_of(x) - grid.W_of(a)));
    if (prev >= 0.0 && std::abs(val - prev) <= 1e-8 * std::max(val, 1e-12))
      return val;
    prev = val;
    x_need = std::max(2.0 * x_need, grid.t_hi * 2.0);
  }
  throw std::runtime_error("laplace_Ta: shooting window escalation did not settle");
}

double scale_S(const DiffusionModel& model, double x) {
  return DiffusionScale(model).S(x);
}

DiffusionClassification classify_diffusion(const DiffusionModel& model) {
  return DiffusionScale(model).classify();
}

double hitting_prob(const DiffusionModel& model, double x, double y) {
  return DiffusionScale(model).hitting_prob(x, y);
}

num::RiccatiGrid riccati_bar_solve(const DiffusionModel& model, double lambda) {
  return DiffusionScale(model).riccati(lambda);
}

double laplace_Ta_diffusion(const DiffusionModel& model, double x, double a,
                            double lambda) {
  return DiffusionScale(model).laplace_Ta(x, a, lambda);
}

}  // namespace cbre::scale
