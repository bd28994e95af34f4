#include "cbre/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cbre::quad {

namespace {

// Dormand-Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 4th-order weights for the error estimate.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

size_t OdeSolution::locate(double zq) const {
  const bool fwd = z.back() >= z.front();
  size_t lo = 0, hi = z.size() - 1;
  while (hi - lo > 1) {
    size_t mid = (lo + hi) / 2;
    bool left = fwd ? (z[mid] <= zq) : (z[mid] >= zq);
    if (left) lo = mid; else hi = mid;
  }
  return lo;
}

double OdeSolution::eval(double zq) const {
  if (z.size() == 1) return y[0];
  size_t i = locate(zq);
  double h = z[i + 1] - z[i];
  double t = (zq - z[i]) / h;
  t = std::clamp(t, 0.0, 1.0);
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  return h00 * y[i] + h10 * h * dy[i] + h01 * y[i + 1] + h11 * h * dy[i + 1];
}

double OdeSolution::eval_derivative(double zq) const {
  if (z.size() == 1) return dy[0];
  size_t i = locate(zq);
  double h = z[i + 1] - z[i];
  double t = (zq - z[i]) / h;
  t = std::clamp(t, 0.0, 1.0);
  const double dh00 = 6 * t * (t - 1);
  const double dh10 = (1 - t) * (1 - 3 * t);
  const double dh01 = -dh00;
  const double dh11 = t * (3 * t - 2);
  return (dh00 * y[i] + dh01 * y[i + 1]) / h + dh10 * dy[i] + dh11 * dy[i + 1];
}

OdeSolution solve_ode(const OdeField& rhs, double z_start, double z_end,
                      double y_start, const OdeOptions& opts) {
  OdeSolution sol;
  sol.z.push_back(z_start);
  sol.y.push_back(y_start);
  sol.dy.push_back(rhs(z_start, y_start));
  sol.completed = true;
  if (z_end == z_start) return sol;

  const double dir = (z_end > z_start) ? 1.0 : -1.0;
  const double span = std::abs(z_end - z_start);

  auto cap = [&](double zc, double h) {
    if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
    if (opts.max_step_rel > 0.0)
      h = std::min(h, std::max(opts.max_step_rel * std::abs(zc), 1e-14));
    return h;
  };

  double z = z_start, y = y_start, f1 = sol.dy[0];
  double h = cap(z, std::min(span, std::max(1e-8, span * 1e-4)));

  for (long step = 0; step < opts.max_steps; ++step) {
    if ((z - z_end) * dir >= 0.0) break;
    h = std::min(h, std::abs(z_end - z));
    double hs = dir * h;

    double k2 = rhs(z + c2 * hs, y + hs * a21 * f1);
    double k3 = rhs(z + c3 * hs, y + hs * (a31 * f1 + a32 * k2));
    double k4 = rhs(z + c4 * hs, y + hs * (a41 * f1 + a42 * k2 + a43 * k3));
    double k5 = rhs(z + c5 * hs,
                    y + hs * (a51 * f1 + a52 * k2 + a53 * k3 + a54 * k4));
    double k6 = rhs(z + hs, y + hs * (a61 * f1 + a62 * k2 + a63 * k3 +
                                      a64 * k4 + a65 * k5));
    double ynew = y + hs * (b1 * f1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    double k7 = rhs(z + hs, ynew);  // FSAL
    double errterm = hs * (e1 * f1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 +
                           e7 * k7);
    double tol = opts.atol + opts.rtol * std::max(std::abs(y), std::abs(ynew));
    double err = std::abs(errterm) / tol;

    if (err <= 1.0 || h <= 1e-14 * (std::abs(z) + 1.0)) {
      z += hs;
      y = ynew;
      f1 = k7;
      sol.z.push_back(z);
      sol.y.push_back(y);
      sol.dy.push_back(f1);
      if (std::abs(y) > opts.ceiling) {
        sol.completed = false;
        return sol;
      }
    }
    double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    fac = std::clamp(fac, 0.2, 5.0);
    h = cap(z, h * fac);
  }
  if ((z - z_end) * dir < -1e-12 * (1.0 + std::abs(z_end)))
    sol.completed = false;
  return sol;
}

}  // namespace cbre::quad
