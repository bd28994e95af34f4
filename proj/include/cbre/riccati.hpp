#pragma once

#include <functional>
#include <vector>

#include "cbre/ode.hpp"
#include "cbre/quadrature.hpp"

namespace cbre::num {

// The hitting-time kernels of both analytic modules solve the same Riccati
// problem y' = y^2 - lambda r(v)^2 on the image axis v of an increasing map
// with density G (G = e^m for the mechanism axis, G = s for the scale axis),
// where r(v) = 1/(G sqrt(Omega)) at the pre-image point. Substituting the
// pre-image variable t (v = int_0^t G) turns it into
//     w'(t) = G(t) w^2 - lambda / (G(t) Omega(t)),
// which avoids the superexponential image axis entirely. W below is
//     W(t) = int_0^{v(t)} y(u) du = int_0^t w G,
// the quantity every Laplace-transform formula consumes.
struct RiccatiProblem {
  std::function<double(double)> logG;   // ln of the axis density
  std::function<double(double)> omega;  // diffusion-scale weight
  double G0 = 1.0;                      // lim_{t->0} G(t)
  double omega_slope0 = 1.0;            // Omega'(0+) > 0
  double lambda = 0.0;
  double t_lo = 1e-6;
  double t_hi = 10.0;
  double ode_rtol = 1e-11;
  double ode_atol = 1e-14;
  double max_step_rel = 0.02;
  double max_step = 0.0;  // 0: span/64
};

struct RiccatiGrid {
  double lambda = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
  std::vector<double> t;  // increasing
  std::vector<double> w;  // transformed solution values
  double stub_W = 0.0;    // int of y over the image of (0, t_lo)

  // W(t) clamped to [0, t_hi]; the solve is escalated until the clamp error
  // is below the stabilization tolerance.
  double W_of(double t) const;
  double w_of(double t) const;  // dense solution value

  // diagnostics
  double max_scaled_defect = 0.0;  // |y'-y^2+lambda r^2| / (1+y^2+lambda r^2)
  double max_tame_defect = 0.0;    // absolute defect where lambda r^2 <= 1
  bool end_bounds_ok = false;      // y <= sqrt(lambda) r on both grid ends

  // filled by solve_riccati_transformed; ode carries ln(w)
  cbre::quad::OdeSolution ode;
  cbre::quad::CumulativeTable W_table;
};

// Backward shoot from the integral asymptote
//   w(t_hi) = lambda int_{t_hi}^inf exp(logG(s) - logG(t_hi)) / omega(s)^... ds
// (the first Picard iterate of y = lambda int r^2 - int y^2, always below the
// sqrt(lambda) r bound), then build W. Defect and end-bound checks are
// evaluated in the image variable.
RiccatiGrid solve_riccati_transformed(const RiccatiProblem& prob);

// The asymptote above: y(v(t)) = lambda int_{v(t)}^inf r^2 expressed on the
// pre-image axis (and its logarithm, which never under/overflows).
double riccati_asymptote_w(const RiccatiProblem& prob, double t);
double riccati_asymptote_log_w(const RiccatiProblem& prob, double t);

// Tail of int y beyond the image of t_hi, to first order in the asymptotic
// y(v) ~ lambda int_v^inf r^2:
//   lambda int_{t_hi}^inf (v(t) - v(t_hi)) / (G(t) Omega(t)) dt
// with v(t) - v(t_hi) evaluated as int exp(logG(s) - logG(t)) ds.
double riccati_tail_integral(const RiccatiProblem& prob, double t_hi);

}  // namespace cbre::num
