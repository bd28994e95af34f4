#include "cbre/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace cbre::num {

using cbre::quad::CumulativeTable;
using cbre::quad::OdeOptions;
using cbre::quad::OdeSolution;

double RiccatiGrid::w_of(double tq) const {
  if (w.empty()) return 0.0;
  if (tq <= t_lo) return w.front();
  if (tq >= t_hi) return w.back();
  double l = ode.eval(tq);
  return (l > -745.0) ? std::exp(l) : 0.0;
}

RiccatiGrid solve_riccati_transformed(const RiccatiProblem& prob) {
  RiccatiGrid out;
  out.lambda = prob.lambda;
  out.t_lo = prob.t_lo;
  out.t_hi = prob.t_hi;
  if (prob.lambda < 0.0)
    throw std::domain_error("riccati: lambda must be >= 0");

  if (prob.lambda == 0.0) {
    out.t = {prob.t_lo, prob.t_hi};
    out.w = {0.0, 0.0};
    out.end_bounds_ok = true;
    std::vector<double> nodes = {prob.t_lo, prob.t_hi};
    out.W_table = CumulativeTable([](double) { return 0.0; }, nodes);
    return out;
  }

  // Integrate l = ln w: uniform relative accuracy over the hundreds of
  // orders of magnitude the solution spans, and the W integrand
  // exp(logG + l) stays slowly varying.
  auto rhs = [&](double t, double l) {
    double lg = prob.logG(t);
    double a = lg + l;
    double grow = (a < 700.0) ? std::exp(a) : std::exp(700.0);
    double b = std::log(prob.lambda) - lg - l - std::log(prob.omega(t));
    double force = (b < 700.0) ? std::exp(b) : std::exp(700.0);
    return grow - force;
  };

  // start on the integral asymptote, clipped by the sqrt(lambda) r bound
  double lw_bound = 0.5 * std::log(prob.lambda) - prob.logG(prob.t_hi) -
                    0.5 * std::log(prob.omega(prob.t_hi));
  double asym = riccati_asymptote_log_w(prob, prob.t_hi);
  double l_hi = std::min(asym, lw_bound);

  OdeOptions opts;
  opts.rtol = prob.ode_rtol;
  opts.atol = std::max(prob.ode_atol, 1e-13);
  opts.max_step_rel = prob.max_step_rel;
  opts.max_step = prob.max_step > 0.0 ? prob.max_step
                                      : (prob.t_hi - prob.t_lo) / 64.0;
  opts.ceiling = 1e6;  // |ln w| staying bounded by far less in practice
  OdeSolution sol = solve_ode(rhs, prob.t_hi, prob.t_lo, l_hi, opts);
  if (!sol.completed)
    throw std::runtime_error("riccati: backward shooting aborted");

  // reverse to increasing order; w is the exponential of the solved state
  out.t.assign(sol.z.rbegin(), sol.z.rend());
  out.w.resize(out.t.size());
  for (size_t i = 0; i < out.t.size(); ++i) {
    double l = sol.y[sol.y.size() - 1 - i];
    out.w[i] = (l > -745.0) ? std::exp(l) : 0.0;
  }
  out.ode = std::move(sol);

  // defect in the image variable at cell midpoints:
  // y' - y^2 + lambda r^2 = e^{l-logG} l' - e^{2l} + lambda e^{-2 logG}/omega
  double scaled = 0.0, tame = 0.0;
  for (size_t i = 0; i + 1 < out.t.size(); ++i) {
    double tm = 0.5 * (out.t[i] + out.t[i + 1]);
    double l = out.ode.eval(tm);
    double dl = out.ode.eval_derivative(tm);
    double lg = prob.logG(tm);
    double yv = (l > -745.0) ? std::exp(l) : 0.0;
    double dy = (l - lg > -745.0) ? dl * std::exp(l - lg) : 0.0;
    double r2 = std::exp(-2.0 * lg) / prob.omega(tm);
    double resid = dy - (yv * yv - prob.lambda * r2);
    double scale = 1.0 + yv * yv + prob.lambda * r2;
    scaled = std::max(scaled, std::abs(resid) / scale);
    if (prob.lambda * r2 <= 1.0) tame = std::max(tame, std::abs(resid));
  }
  out.max_scaled_defect = scaled;
  out.max_tame_defect = tame;

  // end bounds y <= sqrt(lambda) r over the first and last 10% of the grid
  bool ok = true;
  size_t n = out.t.size();
  for (size_t i = 0; i < n; ++i) {
    if (i > n / 10 && i < n - 1 - n / 10) continue;
    double lbound = 0.5 * std::log(prob.lambda) - prob.logG(out.t[i]) -
                    0.5 * std::log(prob.omega(out.t[i]));
    double l = out.ode.y[out.ode.y.size() - 1 - i];
    if (l > lbound + 1e-6) {
      ok = false;
      break;
    }
  }
  out.end_bounds_ok = ok;

  // W(t) = stub + int_{t_lo}^t e^{logG + l}, with the integrable log blow-up
  // of w at 0 accounted for by the closed-form stub.
  double w_lo = out.w.front();
  out.stub_W = prob.G0 * w_lo * prob.t_lo +
               prob.lambda * prob.t_lo / prob.omega_slope0;

  std::vector<double> nodes;
  nodes.reserve(out.t.size());
  double last = -1.0;
  for (double tv : out.t) {
    if (tv > last) {
      nodes.push_back(tv);
      last = tv;
    }
  }
  // the table's integrand must own its state: the grid object may be moved
  auto ode_copy = std::make_shared<OdeSolution>(out.ode);
  auto logg = prob.logG;
  auto integrand = [ode_copy, logg](double t) {
    double e = logg(t) + ode_copy->eval(t);
    return (e > -745.0) ? std::exp(e) : 0.0;
  };
  out.W_table = CumulativeTable(integrand, nodes);
  return out;
}

double RiccatiGrid::W_of(double tq) const {
  if (tq <= t_lo) return stub_W * std::max(tq, 0.0) / t_lo;
  return stub_W + W_table.eval(std::min(tq, t_hi));
}

double riccati_asymptote_log_w(const RiccatiProblem& prob, double t) {
  // y(v(t)) = lambda int_t^inf e^{-logG(s)} / omega(s) ds, evaluated in the
  // factored form e^{-logG(t)} * int e^{-(logG(s)-logG(t))} / omega ds
  double lgt = prob.logG(t);
  auto f = [&](double s) {
    double d = prob.logG(s) - lgt;
    return (d < 700.0) ? std::exp(-d) / prob.omega(s) : 0.0;
  };
  quad::IntegralResult r = quad::integrate_improper(
      f, t, std::numeric_limits<double>::infinity(), {}, {1e-10, 1e-300});
  if (!std::isfinite(r.value) || r.value <= 0.0)
    return -std::numeric_limits<double>::infinity();
  return std::log(prob.lambda) - lgt + std::log(r.value);
}

double riccati_asymptote_w(const RiccatiProblem& prob, double t) {
  double lw = riccati_asymptote_log_w(prob, t);
  return (lw > -745.0) ? std::exp(lw) : 0.0;
}

double riccati_tail_integral(const RiccatiProblem& prob, double t_hi) {
  // inner(t) = int_{t_hi}^t exp(logG(s) - logG(t)) ds concentrates within a
  // few e-foldings of s = t; restrict the window before integrating so the
  // adaptive rule cannot miss the mass on huge transformed domains.
  auto inner = [&](double t) {
    double lgt = prob.logG(t);
    double span = t - t_hi;
    double u_max = span;
    for (double u = std::min(span, 1e-3 * t + 1e-6); u < span; u *= 2.0) {
      if (lgt - prob.logG(t - u) > 45.0) {
        u_max = u;
        break;
      }
    }
    auto e = [&](double u) {
      double d = prob.logG(t - u) - lgt;
      return (d > -745.0) ? std::exp(d) : 0.0;
    };
    return quad::integrate(e, 0.0, u_max, {1e-9, 1e-14}).value;
  };
  auto f = [&](double t) { return inner(t) / prob.omega(t); };
  quad::IntegralResult r = quad::integrate_improper(
      f, t_hi, std::numeric_limits<double>::infinity(), {}, {1e-9, 1e-13});
  return prob.lambda * r.value;
}

}  // namespace cbre::num
