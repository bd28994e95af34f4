#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace cbre {

enum class MeasureFamily { empty, compound_poisson, power_law, tabulated };
enum class MeasureSide { positive, two_sided };

struct Atom {
  double z = 0.0;
  double p = 0.0;  // relative weight; normalized against the total rate
};

// A value that may be infinite; finiteness decided analytically per family.
struct MomentValue {
  bool finite = true;
  double value = 0.0;
};

// Levy measure on (0,inf) or on R\{0}. Supported families:
//  - empty
//  - compound-poisson: finite total rate, jump law = atom list or
//    exponential(mean) (positive axis only for the exponential law)
//  - power-law: density amplitude * |z|^{-1-alpha} on (z_min, z_max),
//    mirrored onto the negative axis when side == two_sided
//  - tabulated: piecewise log-linear density between positive nodes,
//    mirrored when side == two_sided
class LevyMeasure {
 public:
  LevyMeasure() = default;

  static LevyMeasure empty();
  static LevyMeasure compound_poisson(double rate, std::vector<Atom> atoms);
  static LevyMeasure compound_poisson_exponential(double rate, double mean);
  static LevyMeasure power_law(double amplitude, double alpha, double z_min,
                               double z_max = std::numeric_limits<double>::infinity(),
                               MeasureSide side = MeasureSide::positive);
  static LevyMeasure tabulated(std::vector<double> z, std::vector<double> density,
                               MeasureSide side = MeasureSide::positive);

  MeasureFamily family() const { return family_; }
  MeasureSide side() const { return side_; }
  bool is_empty() const;
  void validate(bool require_positive_axis) const;

  // Tail masses. tail(x) = mu((x, inf)), tail_neg(x) = mu((-inf, -x)), x > 0.
  double tail(double x) const;
  double tail_neg(double x) const;
  MomentValue total_mass() const;
  MomentValue negative_mass() const;  // mu((-inf, 0)), for the environment rule

  // int F(z) mu(dz) over {lo < z < hi} restricted to one sign of the axis at
  // a time internally; hi may be +inf, lo may be -inf. F must keep the
  // integral absolutely convergent.
  double integrate(const std::function<double(double)>& F, double lo,
                   double hi) const;

  // Partial moments with analytic finiteness flags.
  MomentValue int_one_wedge_z2() const;            // int (1 ^ z^2)
  MomentValue int_one_wedge_z() const;             // int (1 ^ |z|)
  MomentValue int_z_wedge_z2() const;              // int (z ^ z^2), positive axis
  MomentValue log_moment() const;                  // int_{z>1} ln z
  MomentValue int_tail_z(double from = 1.0) const;        // int_{z>=from} z
  MomentValue int_abs_tail(double from = 1.0) const;      // int_{|z|>=from} |z|
  MomentValue int_tail_signed(double from = 1.0) const;   // int_{|z|>=from} z

  // int_0^z tail(w) dw  (positive axis), used by the adherence estimates and
  // the invariant-law density.
  double tail_primitive(double z) const;

  // int_0^z e^{-K (z - v)} tail(v) dv, exact for atom laws; the exponential
  // is kept inside so nothing overflows.
  double exp_weighted_tail(double K, double z) const;

  // locations where densities/tails kink (atoms, support edges); integrands
  // built from the measure are split there.
  std::vector<double> kink_points() const;

  // Jump part of the Levy-Khintchine exponent:
  //   int (e^{-u z} - 1 + u z 1_{z<1}) mu(dz), positive-axis measures.
  double lk_jump_part(double u) const;
  // Subordinator form: int (1 - e^{-u z}) mu(dz); requires int (1^z) mu < inf.
  double sub_jump_part(double u) const;

  // Simulation support: finite rates above a positive threshold, and
  // inverse-CDF sampling of the conditional jump law.
  double rate_above(double eps) const;                  // mu({z >= eps})
  double rate_below_neg(double eps) const;              // mu({z <= -eps})
  double sample_positive(double eps, double u) const;   // quantile, u in (0,1)
  double sample_negative(double eps, double u) const;   // returns z < 0

  // Fields (kept public for serialization; treat as immutable after build).
  MeasureFamily family_ = MeasureFamily::empty;
  MeasureSide side_ = MeasureSide::positive;
  // compound poisson
  double cp_rate_ = 0.0;
  bool cp_exponential_ = false;
  double cp_exp_mean_ = 1.0;
  std::vector<Atom> atoms_;  // weights normalized to sum 1
  // power law
  double pl_amplitude_ = 0.0;
  double pl_alpha_ = 1.0;
  double pl_zmin_ = 0.0;
  double pl_zmax_ = std::numeric_limits<double>::infinity();
  // tabulated
  std::vector<double> tab_z_;
  std::vector<double> tab_f_;

 private:
  double density_positive(double z) const;  // density on the positive axis
  double tail_positive_only(double x) const;
  double integrate_positive(const std::function<double(double)>& F, double lo,
                            double hi) const;
};

}  // namespace cbre
