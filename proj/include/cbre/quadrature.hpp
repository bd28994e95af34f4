#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace cbre::quad {

using Integrand = std::function<double(double)>;

struct IntegralResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  bool converged = false;
  long evaluations = 0;
};

// Endpoint behaviour hints for integrate_improper.
enum class Singularity {
  none,
  inverse_sqrt,  // f ~ (z-a)^{-1/2} near a, handled by z = a + t^2
  power,         // f ~ (z-a)^{alpha-1} near a, handled by z = a + t^p
};

struct ImproperHints {
  Singularity singular_at_a = Singularity::none;
  double power_alpha = 1.0;  // only read when singular_at_a == power
};

struct QuadOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  int max_depth = 52;
};

// Adaptive Gauss-Kronrod 15 on a finite interval. a < b not required.
IntegralResult integrate(const Integrand& f, double a, double b,
                         const QuadOptions& opts = {});

// Improper integral over [a, b] where b may be +infinity, with optional
// endpoint-singularity handling at a. Infinite upper limits use the
// substitution z = a + t/(1-t); singular endpoints use z = a + t^p.
IntegralResult integrate_improper(const Integrand& f, double a, double b,
                                  const ImproperHints& hints = {},
                                  const QuadOptions& opts = {});

enum class Verdict { holds, fails, inconclusive };

std::string to_string(Verdict v);

// Outcome of the truncated-cutoff divergence rule for tail integrals
// int_{u0}^infty f. `value` is the converged integral when verdict==holds,
// otherwise the last truncated value (the divergence witness).
struct TailClassification {
  Verdict verdict = Verdict::inconclusive;
  double value = 0.0;
  double last_cutoff = 0.0;
};

struct TailOptions {
  int k_max = 8;            // cutoffs u0 * 10^k, k = 1..k_max
  double rtol = 1e-8;       // successive-cutoff agreement => convergent
  double growth_factor = 1.01;  // persistent growth beyond this => divergent
  QuadOptions quad{};
};

// Decide convergence of int_{u0}^infty f(u) du by comparing truncations at
// geometrically growing cutoffs. f must be positive on [u0, infty).
TailClassification classify_tail(const Integrand& f, double u0,
                                 const TailOptions& opts = {});

// Bracketed hybrid secant/bisection root solve of f(x) = y on [lo, hi]
// for strictly increasing f. Throws std::invalid_argument when y is not
// bracketed by f(lo), f(hi).
double invert_monotone(const std::function<double(double)>& f, double y,
                       double lo, double hi, double atol = 1e-12);

// Prefix integrals F(x) = int_{nodes.front()}^{x} f of a smooth integrand on
// a fixed node set, with Gauss-Legendre panels per cell. eval() integrates
// the partial cell exactly (no interpolation of F).
class CumulativeTable {
 public:
  CumulativeTable() = default;
  CumulativeTable(Integrand f, std::vector<double> nodes);

  double eval(double x) const;       // F(x), x within [front, back]
  double front() const { return nodes_.front(); }
  double back() const { return nodes_.back(); }
  double total() const { return prefix_.back(); }
  // F(b) - F(a) without cancellation beyond the shared-prefix digits.
  double delta(double a, double b) const { return eval(b) - eval(a); }
  const std::vector<double>& nodes() const { return nodes_; }

  // Appends cells up to new_back (geometric spacing from the current back).
  void extend(double new_back, double log_step);

 private:
  Integrand f_;
  std::vector<double> nodes_;
  std::vector<double> prefix_;  // prefix_[i] = F(nodes_[i])
  double cell(double a, double b) const;
};

// Geometric grid helper: {0?} + lo * ratio^k up to hi (inclusive-ish).
std::vector<double> log_grid(double lo, double hi, double log_step,
                             bool include_zero);

}  // namespace cbre::quad
