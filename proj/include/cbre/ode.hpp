#pragma once

#include <functional>
#include <vector>

namespace cbre::quad {

using OdeField = std::function<double(double, double)>;

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = 0.0;      // 0 => no absolute cap
  double max_step_rel = 0.0;  // 0 => no |z|-proportional cap (h <= rel*|z|)
  double ceiling = 1e300;     // blow-up detection on |y|
  long max_steps = 2'000'000;
};

// Solution of a scalar ODE y' = rhs(z, y) on a (possibly decreasing) grid.
// Dense evaluation is cubic Hermite between nodes using the stored
// derivatives, so node values are reproduced exactly.
struct OdeSolution {
  std::vector<double> z;   // strictly monotone, direction of integration
  std::vector<double> y;
  std::vector<double> dy;  // rhs at the nodes
  bool completed = false;  // false when blow-up aborted the run
  double eval(double zq) const;
  double eval_derivative(double zq) const;  // derivative of the interpolant
  size_t locate(double zq) const;
};

// Adaptive embedded Dormand-Prince 5(4); z_end < z_start integrates backward.
OdeSolution solve_ode(const OdeField& rhs, double z_start, double z_end,
                      double y_start, const OdeOptions& opts = {});

}  // namespace cbre::quad
