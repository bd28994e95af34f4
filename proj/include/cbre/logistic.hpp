#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "cbre/mechanisms.hpp"
#include "cbre/ode.hpp"
#include "cbre/quadrature.hpp"
#include "cbre/riccati.hpp"

namespace cbre::logistic {

// Logistic competition c z^2 in a Brownian environment of amplitude sigma,
// general branching mechanism. omega(u) = c u + sigma^2 u^2 / 2 is the
// branching mechanism of the time-changed driver.
struct LogisticModel {
  BranchingMechanism branching;
  double c = 1.0;
  double sigma = 0.0;

  double omega(double u) const { return c * u + 0.5 * sigma * sigma * u * u; }
  void validate() const;
};

struct InvariantLaw {
  double normalizer = 0.0;          // int_0^inf e^{m}; rho exists iff finite
  bool normalizer_finite = false;
  double nu_mean = 0.0;             // (delta + int s mu(ds)) / c
  bool nu_mean_finite = false;
  double rho_mean = 0.0;            // 1 / normalizer when defined
  std::function<double(double)> nu_laplace;   // e^{m(lambda)}
  std::function<double(double)> rho_laplace;  // normalizer^{-1} int_lam^inf e^m
  std::function<double(double)> pi_density;   // Levy density of nu
};

struct AdhEstimate {
  int depth = 0;                  // deepest iterate evaluated
  int decided_at = 0;             // iterate that produced the verdict
  double inf_estimate = 0.0;
  double sup_estimate = 0.0;
  enum class Verdict { partial_holds, eth_holds, undecided } verdict =
      Verdict::undecided;
};

std::string to_string(AdhEstimate::Verdict v);

enum class SubordinatorRegime {
  positive_recurrent,
  positive_recurrent_infinite_mean,
  null_recurrent_to_zero,
  transient,
  converges_to_zero_wpp,
  undecided,
};

std::string to_string(SubordinatorRegime r);

struct ClassificationReport {
  TriBool zero_polar = TriBool::unknown;
  SubordinatorRegime regime = SubordinatorRegime::undecided;
  quad::Verdict recurrence_integral = quad::Verdict::inconclusive;
  std::optional<AdhEstimate> adh;
  std::string rule;  // the condition that fired
};

struct FuncC2 {
  std::function<double(double)> f;
  std::function<double(double)> f1;
  std::function<double(double)> f2;
};

class LogisticAnalytics {
 public:
  explicit LogisticAnalytics(LogisticModel model);

  const LogisticModel& model() const { return model_; }
  double omega(double u) const { return model_.omega(u); }
  bool general_mechanism() const;
  quad::TailClassification grey() const;

  // m(lambda) = int_0^lambda psi/omega (log-moment required when the first
  // moment of the mechanism diverges).
  double m_of(double lambda) const;
  // I(lambda) = int_0^lambda e^m, its inverse, and r = phi' / sqrt(omega o phi)
  double I_of(double lambda) const;
  double varphi(double z) const;
  double r_of(double z) const;

  // Riccati solution for eq. y' = y^2 - lambda r^2 in the mechanism variable;
  // cached per lambda, window escalated until the integral of y stabilizes.
  num::RiccatiGrid riccati(double lambda) const;
  double integral_y(double lambda) const;  // int_0^infty y_lambda (Grey)

  double h_lambda(double x, double lambda) const;           // x >= 0
  double h_lambda_derivative(double x, double lambda, int order) const;
  double h0_double_route(double lambda) const;  // x=0 outer integral route
  FuncC2 h_lambda_as_function(double lambda) const;

  // E_x[e^{-lambda T_a}] = h_lambda(x) / h_lambda(a)
  double laplace_Ta(double x, double a, double lambda) const;

  // E_x[T_0]; pass +infinity for the started-from-infinity value.
  double mean_T0(double x) const;

  // subordinator-case functional f_lambda and the ratio formula for
  // E_x[exp(-lambda int_0^{T_a} Z)]
  double f_lambda(double x, double lambda, double ell = 1.0) const;
  double duhalde_ratio(double x, double a, double lambda, double ell = 1.0) const;

  InvariantLaw invariant_law() const;
  ClassificationReport classify_subordinator() const;
  AdhEstimate adh_estimate(int depth) const;

  // generator action (b x - c x^2) f' + (gamma^2 x + sigma^2 x^2/2) f'' +
  // x int (f(x+z) - f(x) - z f'(x) 1_{z<1}) mu(dz)
  double generator_apply(const FuncC2& f, double x) const;

  // dual representation of -m for subordinator mechanisms (sigma > 0)
  double m_dual_subordinator(double lambda) const;

  // recurrence integral of the subordinator taxonomy
  quad::TailClassification recurrence_condition() const;

 private:
  LogisticModel model_;

  struct LambdaTables {
    num::RiccatiGrid grid;
    quad::OdeSolution Q;  // Q' = e^{2W} - (psi/omega) Q, Q(0) = 0
    double z_hi = 0.0;
    double y_total = 0.0;
    bool y_total_finite = false;
  };

  void ensure_m(double need) const;
  std::shared_ptr<quad::CumulativeTable> m_snapshot(double need) const;
  std::shared_ptr<const LambdaTables> lambda_tables(double lambda,
                                                    double z_need) const;
  double outer_truncation(double x, double lambda) const;
  double h_integral(double x, double lambda, int moment) const;

  mutable std::mutex mu_;
  mutable std::shared_ptr<quad::CumulativeTable> m_table_;
  mutable std::shared_ptr<quad::CumulativeTable> I_table_;
  mutable std::map<double, std::shared_ptr<LambdaTables>> lambda_cache_;
  mutable std::optional<quad::TailClassification> grey_;
  mutable std::optional<quad::TailClassification> recurrence_;
};

}  // namespace cbre::logistic
