#include "cbre/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace cbre::quad {

namespace {

// Gauss-Kronrod 15-7 nodes and weights on [-1, 1] (QUADPACK values).
constexpr double kKronrodX[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kKronrodW[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kGaussW[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelResult {
  double kronrod;
  double gauss;
  double err;
};

PanelResult gk15(const Integrand& f, double a, double b, long& evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kKronrodX[i]);
    fv[14 - i] = f(c + h * kKronrodX[i]);
  }
  fv[7] = f(c);
  evals += 15;

  double kron = 0.0;
  for (int i = 0; i < 7; ++i) kron += kKronrodW[i] * (fv[i] + fv[14 - i]);
  kron += kKronrodW[7] * fv[7];
  kron *= h;

  // Gauss-7 uses the odd Kronrod nodes (indices 1,3,5 and the centre).
  double gauss = kGaussW[3] * fv[7];
  gauss += kGaussW[0] * (fv[1] + fv[13]);
  gauss += kGaussW[1] * (fv[3] + fv[11]);
  gauss += kGaussW[2] * (fv[5] + fv[9]);
  gauss *= h;

  double err = std::abs(kron - gauss);
  // QUADPACK-style sharpening of the raw difference.
  double resabs = 0.0;
  for (int i = 0; i < 7; ++i)
    resabs += kKronrodW[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
  resabs += kKronrodW[7] * std::abs(fv[7]);
  resabs *= std::abs(h);
  if (resabs > 0.0 && err > 0.0) {
    double scaled = std::pow(200.0 * err / resabs, 1.5);
    err = std::min(err, resabs * std::min(1.0, scaled));
  }
  return {kron, gauss, err};
}

struct Panel {
  double a, b, value, err;
  int depth;
  bool operator<(const Panel& o) const { return err < o.err; }
};

// Global-budget adaptive subdivision: always split the worst panel until the
// summed error meets the target or the panel budget runs out.
void adapt(const Integrand& f, double a, double b, double rtol, double atol,
           const QuadOptions& opts, double& sum, double& errsum, long& evals,
           bool& ok) {
  std::priority_queue<Panel> heap;
  PanelResult first = gk15(f, a, b, evals);
  heap.push({a, b, first.kronrod, first.err, 0});
  sum = first.kronrod;
  errsum = first.err;
  const int max_panels = 4000;
  int n = 1;
  while (errsum > std::max(atol, rtol * std::abs(sum)) && n < max_panels) {
    Panel worst = heap.top();
    if (worst.depth >= opts.max_depth) break;
    heap.pop();
    double c = 0.5 * (worst.a + worst.b);
    PanelResult left = gk15(f, worst.a, c, evals);
    PanelResult right = gk15(f, c, worst.b, evals);
    sum += left.kronrod + right.kronrod - worst.value;
    errsum += left.err + right.err - worst.err;
    heap.push({worst.a, c, left.kronrod, left.err, worst.depth + 1});
    heap.push({c, worst.b, right.kronrod, right.err, worst.depth + 1});
    ++n;
  }
  ok = errsum <= std::max(atol, rtol * std::abs(sum));
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    default: return "inconclusive";
  }
}

IntegralResult integrate(const Integrand& f, double a, double b,
                         const QuadOptions& opts) {
  IntegralResult res;
  if (a == b) {
    res.converged = true;
    return res;
  }
  long evals = 0;
  double sum = 0.0, errsum = 0.0;
  bool ok = true;
  adapt(f, a, b, opts.rtol, opts.atol, opts, sum, errsum, evals, ok);
  res.value = sum;
  res.abs_error_estimate = errsum;
  res.evaluations = evals;
  res.converged = ok;
  return res;
}

IntegralResult integrate_improper(const Integrand& f, double a, double b,
                                  const ImproperHints& hints,
                                  const QuadOptions& opts) {
  const bool infinite = std::isinf(b);

  Integrand g = f;
  double lo = a, hi = b;

  if (hints.singular_at_a != Singularity::none) {
    // z = a + t^p maps the power singularity (z-a)^{alpha-1} to t^{p*alpha-1}.
    double p = 2.0;
    if (hints.singular_at_a == Singularity::power) {
      double alpha = std::max(hints.power_alpha, 1e-6);
      p = std::max(2.0, std::ceil(1.2 / alpha));
    }
    // Split at a+1 (or b if closer): singular part via substitution.
    double split = infinite ? a + 1.0 : std::min(a + 1.0, b);
    if (split > a) {
      Integrand fs = [f, a, p](double t) {
        double z = a + std::pow(t, p);
        return f(z) * p * std::pow(t, p - 1.0);
      };
      IntegralResult part1 = integrate(fs, 0.0, std::pow(split - a, 1.0 / p), opts);
      IntegralResult part2;
      if (infinite) {
        ImproperHints rest;
        part2 = integrate_improper(f, split, b, rest, opts);
      } else if (split < b) {
        part2 = integrate(f, split, b, opts);
      } else {
        part2.converged = true;
      }
      IntegralResult res;
      res.value = part1.value + part2.value;
      res.abs_error_estimate = part1.abs_error_estimate + part2.abs_error_estimate;
      res.evaluations = part1.evaluations + part2.evaluations;
      res.converged = part1.converged && part2.converged;
      return res;
    }
  }

  if (infinite) {
    // z = a + t/(1-t), dz = dt/(1-t)^2, t in [0,1).
    g = [f, a](double t) {
      double om = 1.0 - t;
      if (om <= 1e-150) return 0.0;  // integrand must vanish for convergence
      double z = a + t / om;
      double v = f(z);
      if (v == 0.0) return 0.0;
      return v / (om * om);
    };
    lo = 0.0;
    hi = 1.0;
  }
  return integrate(g, lo, hi, opts);
}

TailClassification classify_tail(const Integrand& f, double u0,
                                 const TailOptions& opts) {
  TailClassification out;
  std::vector<double> trunc;  // I_k = int_{u0}^{u0 10^k}
  int growth_hits = 0;
  double full_prev = 0.0;
  bool have_full_prev = false;
  for (int k = 1; k <= opts.k_max; ++k) {
    double lo = (k == 1) ? u0 : u0 * std::pow(10.0, k - 1);
    double cutoff = u0 * std::pow(10.0, k);
    IntegralResult piece = integrate(f, lo, cutoff, opts.quad);
    double cur = (trunc.empty() ? 0.0 : trunc.back()) + piece.value;
    trunc.push_back(cur);
    out.last_cutoff = cutoff;
    if (!std::isfinite(cur)) {  // truncations left the representable range
      out.verdict = Verdict::fails;
      out.value = cur;
      return out;
    }
    if (trunc.size() >= 3) {
      double d1 = trunc[trunc.size() - 2] - trunc[trunc.size() - 3];
      double d2 = trunc[trunc.size() - 1] - trunc[trunc.size() - 2];
      if (d2 <= 0.0) {  // mass exhausted to roundoff
        out.verdict = Verdict::holds;
        out.value = cur;
        return out;
      }
      double r = d2 / d1;
      if (r < 0.99) {
        // Decade increments decay geometrically: extrapolate the remainder,
        // preferring the substituted improper quadrature when it settles.
        double full = cur + d2 * r / (1.0 - r);
        IntegralResult rest = integrate_improper(
            f, cutoff, std::numeric_limits<double>::infinity(), {}, opts.quad);
        if (rest.converged) full = cur + rest.value;
        if (have_full_prev &&
            std::abs(full - full_prev) <=
                opts.rtol * std::max(std::abs(full), 1e-300)) {
          out.verdict = Verdict::holds;
          out.value = full;
          return out;
        }
        full_prev = full;
        have_full_prev = true;
      } else {
        have_full_prev = false;
      }
    }
    if (trunc.size() >= 2) {
      double prev = trunc[trunc.size() - 2];
      if (cur > prev * opts.growth_factor)
        ++growth_hits;
      else
        growth_hits = 0;
    }
  }
  out.value = trunc.back();
  // Divergent when the truncations kept growing by more than the fixed
  // factor all the way to the last cutoffs.
  out.verdict = (growth_hits >= 2) ? Verdict::fails : Verdict::inconclusive;
  return out;
}

double invert_monotone(const std::function<double(double)>& f, double y,
                       double lo, double hi, double atol) {
  double flo = f(lo) - y;
  double fhi = f(hi) - y;
  if (flo > 0.0 || fhi < 0.0)
    throw std::invalid_argument("invert_monotone: target not bracketed");
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  double a = lo, b = hi, fa = flo, fb = fhi;
  for (int it = 0; it < 200; ++it) {
    // Secant proposal, clipped into the bracket; bisection fallback.
    double x = (fb != fa) ? b - fb * (b - a) / (fb - fa) : 0.5 * (a + b);
    double margin = 0.1 * (b - a);
    if (!(x > a + 1e-3 * margin && x < b - 1e-3 * margin)) x = 0.5 * (a + b);
    double fx = f(x) - y;
    if (std::abs(fx) <= atol || 0.5 * (b - a) < 1e-16 * (std::abs(x) + 1.0)) {
      return x;
    }
    if (fx < 0.0) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
  }
  return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------
// CumulativeTable

namespace {
// Gauss-Legendre 15-point nodes/weights on [-1,1].
constexpr double kGL15X[15] = {
    -0.987992518020485428489565718587,  -0.937273392400705904307758947710,
    -0.848206583410427216200648320774,  -0.724417731360170047416186054614,
    -0.570972172608538847537226737254,  -0.394151347077563369897207370981,
    -0.201194093997434522300628303395,  0.0,
    0.201194093997434522300628303395,   0.394151347077563369897207370981,
    0.570972172608538847537226737254,   0.724417731360170047416186054614,
    0.848206583410427216200648320774,   0.937273392400705904307758947710,
    0.987992518020485428489565718587};
constexpr double kGL15W[15] = {
    0.030753241996117268354628393577,  0.070366047488108124709267416451,
    0.107159220467171935011869546686,  0.139570677926154314447804794511,
    0.166269205816993933553200860481,  0.186161000015562211026800561866,
    0.198431485327111576456118326444,  0.202578241925561272880620199968,
    0.198431485327111576456118326444,  0.186161000015562211026800561866,
    0.166269205816993933553200860481,  0.139570677926154314447804794511,
    0.107159220467171935011869546686,  0.070366047488108124709267416451,
    0.030753241996117268354628393577};
}  // namespace

CumulativeTable::CumulativeTable(Integrand f, std::vector<double> nodes)
    : f_(std::move(f)), nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw std::invalid_argument("CumulativeTable: need >= 2 nodes");
  prefix_.resize(nodes_.size());
  prefix_[0] = 0.0;
  for (size_t i = 1; i < nodes_.size(); ++i)
    prefix_[i] = prefix_[i - 1] + cell(nodes_[i - 1], nodes_[i]);
}

double CumulativeTable::cell(double a, double b) const {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 15; ++i) s += kGL15W[i] * f_(c + h * kGL15X[i]);
  return s * h;
}

double CumulativeTable::eval(double x) const {
  if (x <= nodes_.front()) return 0.0;
  if (x >= nodes_.back()) return prefix_.back();
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  size_t i = static_cast<size_t>(it - nodes_.begin()) - 1;
  return prefix_[i] + cell(nodes_[i], x);
}

void CumulativeTable::extend(double new_back, double log_step) {
  double x = nodes_.back();
  while (x < new_back) {
    double nx = std::min(new_back, x * std::exp(log_step));
    if (nx <= x) nx = x * (1.0 + 1e-12);
    prefix_.push_back(prefix_.back() + cell(x, nx));
    nodes_.push_back(nx);
    x = nx;
  }
}

std::vector<double> log_grid(double lo, double hi, double log_step,
                             bool include_zero) {
  std::vector<double> g;
  if (include_zero) g.push_back(0.0);
  double x = lo;
  while (x < hi) {
    g.push_back(x);
    x *= std::exp(log_step);
  }
  g.push_back(hi);
  return g;
}

}  // namespace cbre::quad
