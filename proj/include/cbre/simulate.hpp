#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cbre/mechanisms.hpp"
#include "cbre/rng.hpp"

namespace cbre::sim {

struct SimConfig {
  double dt = 1e-3;
  double jump_cutoff_eps = 1e-3;  // smallest explicitly simulated jump
  double absorption_floor = -1.0;  // < 0 => 1e-8 * x0
  double t_max = 10.0;
  long n_paths = 1;
  uint64_t seed = 0;
  double explosion_ceiling = 1e12;
  int threads = 1;
  int record_stride = 1;  // grid thinning for recorded paths

  double floor_for(double x0) const {
    return absorption_floor >= 0.0 ? absorption_floor : 1e-8 * x0;
  }
  void validate() const;
};

struct PathSample {
  std::vector<double> times;
  std::vector<double> values;
  std::optional<double> absorbed_at;
  bool exploded = false;
};

struct LaplaceBounds {
  double lambda = 0.0;
  // censored paths contribute e^{-lambda t_max} to the upper variant and 0
  // to the lower variant
  double lower = 0.0, lower_se = 0.0;
  double upper = 0.0, upper_se = 0.0;
};

struct HittingTimeEstimate {
  double level = 0.0;
  long n_paths = 0;
  long n_hit = 0;
  double p_hit = 0.0, p_hit_se = 0.0;
  double mean_T = 0.0, mean_T_se = 0.0;  // over uncensored paths
  double censored_fraction = 0.0;
  bool all_censored = false;
  std::vector<LaplaceBounds> laplace;
};

struct OccupationLaplace {
  double lambda = 0.0;
  double lower = 0.0, lower_se = 0.0;
  double upper = 0.0, upper_se = 0.0;
  double censored_fraction = 0.0;
};

// SDE path of the competition model in its random environment, Euler scheme
// with threshold thinning of both jump measures.
PathSample simulate_path(const ModelSpec& model, double x0, const SimConfig& cfg,
                         uint64_t path_index = 0);

// First passage below `a` from x0 > a, with censored-aware Laplace bounds.
HittingTimeEstimate estimate_hitting(const ModelSpec& model, double x0, double a,
                                     const std::vector<double>& lambdas,
                                     const SimConfig& cfg);

// E[exp(-lambda int_0^{T_a} Z ds)], the functional matched by the
// subordinator-case ratio formula.
OccupationLaplace estimate_occupation_laplace(const ModelSpec& model, double x0,
                                              double a, double lambda,
                                              const SimConfig& cfg);

// Long-run occupation sample of a single path (for stationarity tests).
std::vector<double> occupation_samples(const ModelSpec& model, double x0,
                                       const SimConfig& cfg, double burn_in,
                                       int stride);

struct TwoSidedExit {
  long n_paths = 0;
  long n_lower = 0, n_upper = 0, n_censored = 0;
  double p_lower_first = 0.0;  // among decided paths
  double se = 0.0;
};

// First exit of (lower, upper): frequency of leaving through the bottom.
TwoSidedExit estimate_two_sided_exit(const ModelSpec& model, double x0,
                                     double lower, double upper,
                                     const SimConfig& cfg);

struct CoupledPair {
  PathSample low;
  PathSample high;
  double max_violation = 0.0;    // max over grid of (low - high)+
  long violation_count = 0;      // grid points with low > high + tol
};

// Shared-noise pair from x0 <= y0: common Gaussian increments, common
// environment jump marks, branching jumps by nested thinning.
CoupledPair coupled_pair(const ModelSpec& model, double x0, double y0,
                         const SimConfig& cfg, uint64_t path_index = 0);

// Autonomous process of the time-change representation:
//   dR = dX - (g(R)/R) dt + sigma sqrt(R) dW.
PathSample simulate_autonomous(const BranchingMechanism& mech, double sigma,
                               const CompetitionSpec& comp, double r0,
                               const SimConfig& cfg, uint64_t path_index = 0);

struct TimeChange {
  std::vector<double> times;  // grid of the source path
  std::vector<double> eta;    // additive functional samples
  double eta_end = 0.0;
};

struct LampertiRoundTrip {
  TimeChange clock;
  PathSample z_path;        // time-changed process on a uniform grid
  PathSample recovered_r;   // reciprocal change applied to z_path
  double sup_error = 0.0;   // sup distance to the input on the common window
  double common_window = 0.0;
};

// Forward time change R -> Z (clock eta_t = int ds / R_s, right-continuous
// inverse) followed by the reciprocal change Z -> R.
LampertiRoundTrip lamperti_round_trip(const PathSample& path_r, double dt_out);

// Kolmogorov-Smirnov sup distance between a sample and a reference CDF.
double ks_distance(std::vector<double> samples,
                   const std::function<double(double)>& cdf);

// CSV serialization: `# key=value` metadata lines, then `t,value` rows with
// 17 significant digits.
void write_path_csv(const PathSample& path, std::ostream& os,
                    const std::vector<std::pair<std::string, std::string>>& metadata);

}  // namespace cbre::sim
