#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cbre/ode.hpp"

using namespace cbre::quad;

TEST_CASE("exponential growth benchmark") {
  auto sol = solve_ode([](double, double y) { return y; }, 0.0, 1.0, 1.0);
  CHECK(sol.completed);
  CHECK(sol.y.back() == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
  // dense output reproduces nodes exactly and is accurate between them
  CHECK(sol.eval(sol.z[1]) == sol.y[1]);
  CHECK(sol.eval(0.5) == doctest::Approx(std::exp(0.5)).epsilon(1e-8));
}

TEST_CASE("constant field") {
  auto sol = solve_ode([](double, double) { return 0.0; }, 0.0, 3.0, 4.25);
  for (double v : sol.y) CHECK(v == 4.25);
}

TEST_CASE("separable closed form y' = y^2, backward run") {
  // Through y(1) = 1 the solution is y(z) = 1/(2 - z); no pole in [0, 1].
  auto sol = solve_ode([](double, double y) { return y * y; }, 1.0, 0.0, 1.0);
  CHECK(sol.completed);
  CHECK(sol.y.back() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sol.eval(0.25) == doctest::Approx(1.0 / 1.75).epsilon(1e-8));
}

TEST_CASE("blow-up detection") {
  OdeOptions opts;
  opts.ceiling = 1e6;
  // y(0)=1 forward: pole at z = 1.
  auto sol = solve_ode([](double, double y) { return y * y; }, 0.0, 2.0, 1.0, opts);
  CHECK_FALSE(sol.completed);
  CHECK(std::abs(sol.z.back()) <= 1.0 + 1e-3);
}

TEST_CASE("order check: halving tolerance shrinks error consistently") {
  double err_loose, err_tight;
  {
    OdeOptions o;
    o.rtol = 1e-6;
    o.atol = 1e-9;
    auto s = solve_ode([](double, double y) { return y; }, 0.0, 2.0, 1.0, o);
    err_loose = std::abs(s.y.back() - std::exp(2.0));
  }
  {
    OdeOptions o;
    o.rtol = 1e-10;
    o.atol = 1e-13;
    auto s = solve_ode([](double, double y) { return y; }, 0.0, 2.0, 1.0, o);
    err_tight = std::abs(s.y.back() - std::exp(2.0));
  }
  CHECK(err_tight < err_loose);
  CHECK(err_tight < 1e-8);
}

TEST_CASE("relative step cap near zero") {
  OdeOptions o;
  o.max_step_rel = 0.05;
  auto sol = solve_ode([](double z, double) { return -1.0 / z; }, 1.0, 1e-6,
                       0.0, o);
  CHECK(sol.completed);
  CHECK(sol.y.back() == doctest::Approx(-std::log(1e-6)).epsilon(1e-7));
  for (size_t i = 1; i < sol.z.size(); ++i) {
    double h = std::abs(sol.z[i] - sol.z[i - 1]);
    CHECK(h <= 0.05 * std::abs(sol.z[i - 1]) * (1.0 + 1e-9) + 1e-13);
  }
}
