#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cbre/diffusion_scale.hpp"
#include "cbre/simulate.hpp"

using namespace cbre;
using namespace cbre::scale;

namespace {

DiffusionModel make(double b, double gamma, double sigma, CompetitionSpec comp) {
  DiffusionModel m;
  m.b = b;
  m.gamma = gamma;
  m.sigma = sigma;
  m.competition = std::move(comp);
  return m;
}

}  // namespace

TEST_CASE("scale function basics") {
  SUBCASE("no drift, no competition: S is the identity") {
    DiffusionModel m = make(0.0, 1.0, 1.0, CompetitionSpec::none());
    DiffusionScale sc(m);
    for (double x : {0.0, 0.3, 1.0, 4.0})
      CHECK(sc.S(x) == doctest::Approx(x).epsilon(1e-10));
  }
  SUBCASE("logistic closed form: hand-derived inner antiderivative") {
    // g = z^2, b = 0, gamma = sigma = 1: the inner ratio integrates to
    // 2(u-1) - 4 ln((2+u)/3), so s(u) = e^{2(u-1)} (3/(2+u))^4.
    DiffusionModel m = make(0.0, 1.0, 1.0, CompetitionSpec::logistic(1.0));
    DiffusionScale sc(m);
    auto closed = [](double u) {
      return std::exp(2.0 * (u - 1.0)) * std::pow(3.0 / (2.0 + u), 4.0);
    };
    for (double u : {0.1, 0.5, 1.0, 2.0, 5.0})
      CHECK(sc.scale_density(u) == doctest::Approx(closed(u)).epsilon(1e-9));
    for (double x : {0.5, 1.0, 3.0}) {
      double oracle = quad::integrate(closed, 0.0, x, {1e-12, 1e-14}).value;
      CHECK(sc.S(x) == doctest::Approx(oracle).epsilon(1e-9));
    }
  }
  SUBCASE("gamma = 0 is rejected") {
    DiffusionModel m = make(0.0, 0.0, 1.0, CompetitionSpec::logistic(1.0));
    CHECK_THROWS_AS(DiffusionScale sc(m), std::domain_error);
  }
}

TEST_CASE("extinction classification by scale divergence") {
  SUBCASE("logistic competition is absorbed a.s.") {
    auto cls = classify_diffusion(make(0.7, 1.0, 1.0, CompetitionSpec::logistic(1.0)));
    CHECK(cls.extinct_as == TriBool::yes);
  }
  SUBCASE("cooperative drag with strong upward drift escapes") {
    auto coop = CompetitionSpec::general([](double z) { return -z; }, "-z");
    auto cls = classify_diffusion(make(0.0, 1.0, 1.0, coop));
    CHECK(cls.extinct_as == TriBool::no);
    DiffusionScale sc(make(0.0, 1.0, 1.0, coop));
    double p1 = sc.p_to_infinity(1.0);
    double p2 = sc.p_to_infinity(2.0);
    CHECK(p1 > 0.0);
    CHECK(p2 > p1);
    CHECK(p2 < 1.0);
  }
  SUBCASE("driftless neutral case is null-recurrent-style absorbed") {
    auto cls = classify_diffusion(make(0.0, 1.0, 0.5, CompetitionSpec::none()));
    CHECK(cls.extinct_as == TriBool::yes);
  }
}

TEST_CASE("hitting probabilities") {
  DiffusionModel m = make(0.0, 1.0, 1.0, CompetitionSpec::none());
  DiffusionScale sc(m);
  SUBCASE("gambler's ruin with linear scale") {
    CHECK(sc.hitting_prob(1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("degenerate and monotone behaviour") {
    CHECK(sc.hitting_prob(2.0, 2.0) == 0.0);
    double prev = 1.0;
    for (double x : {0.25, 0.5, 1.0, 1.5}) {
      double p = sc.hitting_prob(x, 2.0);
      CHECK(p >= 0.0);
      CHECK(p <= prev);
      prev = p;
    }
  }
  SUBCASE("absorbed-a.s. models drive the exit probability to 1 as y grows") {
    DiffusionScale lg(make(0.0, 1.0, 1.0, CompetitionSpec::logistic(1.0)));
    CHECK(lg.hitting_prob(1.0, 40.0) > 0.999);
  }
}

TEST_CASE("anchor invariance of scale-derived quantities") {
  DiffusionModel m = make(0.5, 1.0, 1.0, CompetitionSpec::logistic(1.0));
  DiffusionScale base(m, 1.0);
  for (double anchor : {0.5, 2.0}) {
    DiffusionScale alt(m, anchor);
    // S rescales by a constant...
    double ratio = alt.S(1.0) / base.S(1.0);
    for (double x : {0.25, 2.0, 4.0})
      CHECK(alt.S(x) / base.S(x) == doctest::Approx(ratio).epsilon(1e-8));
    // ...so hitting probabilities and the classification stay put.
    CHECK(alt.hitting_prob(1.0, 3.0) ==
          doctest::Approx(base.hitting_prob(1.0, 3.0)).epsilon(1e-8));
    CHECK(alt.classify().extinct_as == base.classify().extinct_as);
  }
}

TEST_CASE("riccati solution on the scale axis") {
  DiffusionModel m = make(0.0, 1.0, 1.0, CompetitionSpec::logistic(1.0));
  DiffusionScale sc(m);
  SUBCASE("lambda = 0 gives the zero solution") {
    num::RiccatiGrid g = sc.riccati(0.0);
    for (double w : g.w) CHECK(w == 0.0);
    CHECK(g.W_of(5.0) == 0.0);
  }
  SUBCASE("defect and end bounds at lambda = 1") {
    num::RiccatiGrid g = sc.riccati(1.0);
    CHECK(g.max_scaled_defect <= 1e-8);
    CHECK(g.max_tame_defect <= 1e-8);
    CHECK(g.end_bounds_ok);
    for (double w : g.w) CHECK(w >= -1e-12);
  }
}

TEST_CASE("Laplace transform of the passage time") {
  DiffusionModel m = make(0.0, 1.0, 1.0, CompetitionSpec::logistic(1.0));
  DiffusionScale sc(m);
  SUBCASE("empty integration range") {
    CHECK(sc.laplace_Ta(1.0, 1.0, 2.0) == 1.0);
  }
  SUBCASE("monotone in lambda and in x, limits to 1 as lambda -> 0") {
    double prev = 1.0;
    for (double lam : {0.25, 0.5, 1.0, 2.0}) {
      double v = sc.laplace_Ta(1.0, 0.0, lam);
      CHECK(v > 0.0);
      CHECK(v < prev);
      prev = v;
    }
    CHECK(sc.laplace_Ta(2.0, 0.0, 1.0) < sc.laplace_Ta(1.0, 0.0, 1.0));
    CHECK(sc.laplace_Ta(1.0, 0.0, 1e-6) == doctest::Approx(1.0).epsilon(1e-4));
  }
  SUBCASE("agrees with the simulator within censored Monte Carlo bounds") {
    ModelSpec spec;
    spec.branching = {0.0, 1.0, LevyMeasure::empty()};
    spec.environment = {0.0, 0.0, LevyMeasure::empty()};
    spec.competition = CompetitionSpec::logistic(1.0);
    DiffusionModel dm = make(0.0, 1.0, 0.0, CompetitionSpec::logistic(1.0));
    double analytic = DiffusionScale(dm).laplace_Ta(1.0, 0.0, 1.0);
    sim::SimConfig cfg;
    cfg.dt = 4e-4;
    cfg.t_max = 30.0;
    cfg.n_paths = 4000;
    cfg.seed = 17;
    cfg.threads = 2;
    auto est = sim::estimate_hitting(spec, 1.0, 0.0, {1.0}, cfg);
    const auto& l = est.laplace[0];
    CHECK(analytic >= l.lower - 3.0 * l.lower_se - 5e-3);
    CHECK(analytic <= l.upper + 3.0 * l.upper_se + 5e-3);
  }
}
