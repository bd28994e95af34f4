#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cbre/measure.hpp"

using namespace cbre;

TEST_CASE("compound poisson atoms: tails and moments") {
  auto m = LevyMeasure::compound_poisson(2.0, {{0.5, 1.0}, {3.0, 1.0}});
  CHECK(m.tail(0.25) == doctest::Approx(2.0));
  CHECK(m.tail(0.5) == doctest::Approx(1.0));
  CHECK(m.tail(2.9) == doctest::Approx(1.0));
  CHECK(m.tail(3.0) == doctest::Approx(0.0));
  CHECK(m.int_tail_z(1.0).value == doctest::Approx(3.0));  // rate*p*z = 2*0.5*3
  CHECK(m.log_moment().value == doctest::Approx(std::log(3.0)));
  CHECK(m.tail_primitive(1.0) == doctest::Approx(2.0 * (0.5 * 0.5 + 0.5 * 1.0)));
}

TEST_CASE("tail is non-increasing for every family") {
  std::vector<LevyMeasure> ms;
  ms.push_back(LevyMeasure::compound_poisson(1.5, {{0.3, 2.0}, {1.7, 1.0}}));
  ms.push_back(LevyMeasure::compound_poisson_exponential(2.0, 0.7));
  ms.push_back(LevyMeasure::power_law(1.0, 1.5, 0.0, INFINITY));
  ms.push_back(LevyMeasure::tabulated({0.01, 0.1, 1.0, 10.0}, {5.0, 2.0, 0.1, 1e-4}));
  for (const auto& m : ms) {
    double prev = INFINITY;
    for (double x = 1e-3; x < 20.0; x *= 1.7) {
      double t = m.tail(x);
      CHECK(t <= prev + 1e-12);
      CHECK(t >= 0.0);
      CHECK(std::isfinite(t));
      prev = t;
    }
  }
}

TEST_CASE("power law finiteness flags match the exponent") {
  auto m = LevyMeasure::power_law(1.0, 1.5, 0.0, INFINITY);
  CHECK(m.int_one_wedge_z2().finite);
  CHECK_FALSE(m.int_one_wedge_z().finite);  // alpha in (1,2): small jumps win
}

TEST_CASE("power law alpha above one has finite tail first moment") {
  auto m = LevyMeasure::power_law(2.0, 1.5, 0.0, INFINITY);
  auto t = m.int_tail_z(1.0);
  CHECK(t.finite);
  // int_1^inf z * 2 z^{-2.5} dz = 2/0.5... = 2 * [z^{-0.5}/0.5]_inf^1 = 4
  CHECK(t.value == doctest::Approx(4.0).epsilon(1e-8));
  auto sub = LevyMeasure::power_law(1.0, 0.5, 0.0, INFINITY);
  CHECK(sub.int_one_wedge_z().finite);   // alpha < 1
  CHECK_FALSE(sub.int_tail_z(1.0).finite);  // alpha < 1: tail z-moment diverges
}

TEST_CASE("single atom Levy-Khintchine term") {
  auto m = LevyMeasure::compound_poisson(1.0, {{1.0, 1.0}});
  double u = std::log(2.0);
  // indicator 1_{z<1} vanishes at z=1
  CHECK(m.lk_jump_part(u) == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("exponential-law closed form against quadrature") {
  auto m = LevyMeasure::compound_poisson_exponential(1.3, 0.8);
  auto byquad = LevyMeasure::tabulated(
      // fine log grid of the same exponential density, rate folded in
      [] {
        std::vector<double> z;
        for (double x = 1e-6; x < 60.0; x *= 1.05) z.push_back(x);
        return z;
      }(),
      [] {
        std::vector<double> f;
        for (double x = 1e-6; x < 60.0; x *= 1.05)
          f.push_back(1.3 * std::exp(-x / 0.8) / 0.8);
        return f;
      }());
  for (double u : {0.3, 1.0, 4.0}) {
    CHECK(m.lk_jump_part(u) ==
          doctest::Approx(byquad.lk_jump_part(u)).epsilon(2e-4));
    CHECK(m.sub_jump_part(u) ==
          doctest::Approx(byquad.sub_jump_part(u)).epsilon(2e-4));
  }
}

TEST_CASE("sampling above a threshold matches conditional tails") {
  std::mt19937 gen(99);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto check_sampler = [&](const LevyMeasure& m, double eps, double probe) {
    double rate = m.rate_above(eps);
    REQUIRE(rate > 0.0);
    int n = 20000, above = 0;
    for (int i = 0; i < n; ++i) {
      double z = m.sample_positive(eps, unif(gen));
      CHECK(z >= eps * (1.0 - 1e-12));
      if (z > probe) ++above;
    }
    double expect = m.tail(probe) / rate;
    CHECK(std::abs(static_cast<double>(above) / n - expect) < 0.02);
  };
  check_sampler(LevyMeasure::power_law(1.0, 1.2, 0.0, INFINITY), 0.01, 0.1);
  check_sampler(LevyMeasure::compound_poisson_exponential(2.0, 1.0), 0.5, 2.0);
  check_sampler(
      LevyMeasure::tabulated({0.01, 0.1, 1.0, 10.0}, {5.0, 2.0, 0.1, 1e-4}),
      0.02, 0.5);
}

TEST_CASE("two-sided atoms") {
  auto m = LevyMeasure::compound_poisson(0.1, {{0.5, 1.0}, {-0.5, 1.0}});
  CHECK(m.side() == MeasureSide::two_sided);
  CHECK(m.tail(0.4) == doctest::Approx(0.05));
  CHECK(m.tail_neg(0.4) == doctest::Approx(0.05));
  CHECK(m.negative_mass().value == doctest::Approx(0.05));
  CHECK(m.int_tail_signed(0.3).value == doctest::Approx(0.0));
  CHECK(m.int_abs_tail(0.3).value == doctest::Approx(0.05));
}

TEST_CASE("validation rejects broken inputs") {
  CHECK_THROWS(LevyMeasure::power_law(1.0, 2.5, 0.0, INFINITY).validate(true));
  CHECK_THROWS(LevyMeasure::tabulated({1.0, 0.5}, {1.0, 1.0}).validate(true));
  CHECK_THROWS(LevyMeasure::compound_poisson(1.0, {{-0.5, 1.0}}).validate(true));
  CHECK_NOTHROW(LevyMeasure::compound_poisson(1.0, {{-0.5, 1.0}}).validate(false));
}
