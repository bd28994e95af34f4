#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cbre/measure.hpp"
#include "cbre/quadrature.hpp"

namespace cbre {

// Branching triplet (b, gamma, mu); psi is the Laplace exponent
//   psi(u) = -b u + gamma^2 u^2 + int (e^{-u z} - 1 + u z 1_{z<1}) mu(dz).
struct BranchingMechanism {
  double b = 0.0;
  double gamma = 0.0;
  LevyMeasure mu;

  double psi(double u) const;
  // psi'(0+) = -b - int_{z>=1} z mu(dz); infinite when the first moment of
  // the tail diverges.
  MomentValue psi_prime0() const;
  bool first_moment_regime() const;  // int (z ^ z^2) mu < inf
  bool is_subordinator() const;      // gamma = 0, int(1^z) mu < inf, delta >= 0
  double delta() const;              // b - int_{(0,1)} z mu(dz)
  // Smallest root location: psi > 0 on (root, inf); +inf when psi is never
  // positive (subordinator-type exponents).
  double psi_positive_root() const;
  quad::TailClassification grey() const;
  void validate() const;
};

struct EnvironmentSpec {
  double d = 0.0;
  double sigma = 0.0;
  LevyMeasure pi;

  double beta() const;
  void validate() const;
};

enum class DriftClass { to_minus_inf, oscillates, to_plus_inf, unknown };

std::string to_string(DriftClass c);

struct EnvironmentReport {
  double beta = 0.0;
  bool meanK1_defined = false;
  double meanK1 = 0.0;
  DriftClass drift_class = DriftClass::unknown;
};

EnvironmentReport environment_report(const EnvironmentSpec& env);

struct CompetitionSpec {
  enum class Kind { none, logistic, general };
  Kind kind = Kind::none;
  double c = 0.0;                          // logistic rate
  std::function<double(double)> g_fn;      // general map
  std::optional<double> z0;                // explicit H2 anchor, else detected
  std::string label;                       // for reports ("none", "cz^2", ...)

  static CompetitionSpec none();
  static CompetitionSpec logistic(double c);
  static CompetitionSpec general(std::function<double(double)> g,
                                 std::string label = "general",
                                 std::optional<double> z0 = std::nullopt);

  double g(double z) const;
  void validate() const;  // g(0)=0 and sampled monotonicity for general maps
  bool monotone_on_grid() const;
};

struct ModelSpec {
  BranchingMechanism branching;
  EnvironmentSpec environment;
  CompetitionSpec competition;
  void validate() const;
};

struct ConditionEntry {
  quad::Verdict verdict = quad::Verdict::inconclusive;
  double value = 0.0;       // finite integral when holds, last truncation else
  std::string witness;      // divergence / inconclusive diagnostic
};

struct ConditionReport {
  ConditionEntry grey;
  ConditionEntry log_moment;
  ConditionEntry first_moment;
  ConditionEntry h2_competition;
  double h2_z0 = 0.0;
};

ConditionReport condition_report(const ModelSpec& model);

enum class TriBool { yes, no, unknown };

std::string to_string(TriBool v);

struct ExtinctionReport {
  TriBool extinct_positive_prob = TriBool::unknown;
  TriBool extinct_as = TriBool::unknown;
  TriBool comes_down_from_infinity = TriBool::unknown;
  TriBool uniform_mean_finite = TriBool::unknown;
  bool regime_ok = true;  // first-moment regime precondition
  std::vector<std::string> rationale;
};

ExtinctionReport extinction_classifier(const ModelSpec& model);

// Constants from the descent-time construction: theta = -psi'(0+) + d, a rate
// A with C(A) > 0, a threshold M, and the resulting mean bound
// (1/C(A)) int_{M/e}^inf dw / (g(w) - theta w).
struct BoundConstants {
  double theta = 0.0;
  double A = 0.0;
  double M = 0.0;
  double C_of_A = 0.0;
  double sup_mean_T0_bound = 0.0;
  double a0 = 0.0;
};

// Direct evaluation of C(A) for a given A (also used as the independent
// re-check path in tests).
double bound_C_of_A(const ModelSpec& model, double A);

BoundConstants bound_constants(const ModelSpec& model);

}  // namespace cbre
