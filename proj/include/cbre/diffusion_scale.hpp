#pragma once

#include <map>
#include <memory>
#include <mutex>

#include "cbre/mechanisms.hpp"
#include "cbre/quadrature.hpp"
#include "cbre/riccati.hpp"

namespace cbre::scale {

// Pure-diffusion model: dZ = (bZ - g(Z)) dt + sqrt(2 gamma^2 Z) dB +
// sigma Z dB'. The competition map may take negative values here.
struct DiffusionModel {
  double b = 0.0;
  double gamma = 0.0;
  double sigma = 0.0;
  CompetitionSpec competition;

  double drift(double z) const { return competition.g(z) - b * z; }  // b(z)
  double diffusion(double z) const {
    return gamma * gamma * z + 0.5 * sigma * sigma * z * z;  // d(z)
  }
  void validate() const;
};

struct DiffusionClassification {
  quad::Verdict scale_divergence;  // verdict on int^inf s(u) du
  TriBool extinct_as = TriBool::unknown;
};

// Scale-function analytics for one model. All tables build lazily and are
// guarded by a mutex; evaluation is const and thread-safe afterwards.
class DiffusionScale {
 public:
  explicit DiffusionScale(DiffusionModel model, double anchor = 1.0);

  const DiffusionModel& model() const { return model_; }

  // E(u) = 2 int_anchor^u (g - b z)/(2 gamma^2 z + sigma^2 z^2) dz
  double inner_exponent(double u) const;
  double scale_density(double u) const;  // s(u) = e^{E(u)}
  double S(double x) const;              // int_0^x s, S(0) = 0
  quad::TailClassification S_infinity() const;
  double inverse_S(double y) const;      // bar-phi

  // P_x(T_0 < T_y) = (S(y) - S(x)) / S(y) for 0 <= x <= y
  double hitting_prob(double x, double y) const;

  DiffusionClassification classify() const;
  double p_to_infinity(double x) const;  // throws on inconclusive verdict

  // Riccati solution in the state variable (image axis = scale axis);
  // cached per lambda, re-solved on a larger window when a caller needs it.
  num::RiccatiGrid riccati(double lambda, double x_need = 0.0) const;

  // E_x[e^{-lambda T_a}] = exp{ -int_{S(a)}^{S(x)} bar-y_lambda }
  double laplace_Ta(double x, double a, double lambda) const;

 private:
  DiffusionModel model_;
  double anchor_;
  void ensure_tables(double need) const;
  double asymptote_start(double lambda) const;

  mutable std::mutex mu_;
  mutable std::shared_ptr<quad::CumulativeTable> exp_table_;  // int of b/d from 1e-10
  mutable std::shared_ptr<quad::CumulativeTable> s_table_;    // int_0^x s
  mutable double exponent_at_anchor_ = 0.0;
  mutable std::optional<quad::TailClassification> s_inf_;
  mutable std::map<double, std::shared_ptr<num::RiccatiGrid>> riccati_cache_;
  mutable std::map<double, double> riccati_thi_;
};

// Convenience wrappers matching the operation surface.
double scale_S(const DiffusionModel& model, double x);
DiffusionClassification classify_diffusion(const DiffusionModel& model);
double hitting_prob(const DiffusionModel& model, double x, double y);
num::RiccatiGrid riccati_bar_solve(const DiffusionModel& model, double lambda);
double laplace_Ta_diffusion(const DiffusionModel& model, double x, double a,
                            double lambda);

}  // namespace cbre::scale
