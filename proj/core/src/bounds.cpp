#include "cramerlab/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "cramerlab/error.hpp"
#include "cramerlab/numeric.hpp"

namespace cramerlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogFourSqrtE = std::log(4.0) + 0.5;

void require_nonnegative(double x, const char* what) {
  if (!(x >= 0.0)) throw Error(ErrorCode::NegativeX, std::string(what) + " needs x >= 0");
}

}  // namespace

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
  if (count == 0) return {};
  std::vector<double> g(count);
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) g[i] = lo + step * static_cast<double>(i);
  g.back() = hi;
  return g;
}

double cramer_envelope(const CoefficientSet& c, double x, double C) {
  require_nonnegative(x, "cramer_envelope");
  const double gl = x_abs_log(c.gamma);
  const double mn = c.m_over_n();
  return C * (x * x * x * c.eps + x * x * (c.delta2 + mn + gl) +
              (1.0 + x) * (x_abs_log(c.eps) + gl + c.delta() + std::sqrt(mn)));
}

bool cramer_envelope_valid(const CoefficientSet& c, double x, const GateConfig& gates) {
  if (!(x >= 0.0)) return false;
  if (c.eps > 0.0 && x > gates.alpha0 / c.eps) return false;
  return evaluate_gates(c, gates).all();
}

double martingale_cramer_envelope(double eps, double iota, double x, double C) {
  if (!(eps > 0.0 && eps <= 0.5)) throw Error(ErrorCode::ParamOutOfRange, "martingale envelope needs eps in (0, 1/2]");
  if (!(iota >= 0.0 && iota <= 0.5))
    throw Error(ErrorCode::ParamOutOfRange, "martingale envelope needs iota in [0, 1/2]");
  require_nonnegative(x, "martingale_cramer_envelope");
  return C * (x * x * x * eps + x * x * iota * iota + (1.0 + x) * (x_abs_log(eps) + iota));
}

double berry_esseen_bound(const CoefficientSet& c, double C) {
  return C * (x_abs_log(c.gamma) + x_abs_log(c.eps) + c.delta() + std::sqrt(c.m_over_n()));
}

double log_bernstein_bound(double gamma, double eps, double tau2, double x) {
  require_nonnegative(x, "bernstein_bound");
  const double gl = x_abs_log(gamma);
  if (gl >= 1.0) throw Error(ErrorCode::GammaTooLarge, "bernstein bound needs gamma|ln gamma| < 1");
  const double k = 1.0 - gl;
  const double first = -(k * k * x * x) / (2.0 * (1.0 + tau2 + (2.0 / 3.0) * eps * k * x));
  if (gamma == 0.0) return first;
  const double lg = std::log(gamma);
  const double second = kLogFourSqrtE - lg * lg * x * x / (2.0 * 81.0 * 81.0);
  return log_add_exp(first, second);
}

double log_bernstein_bound(const CoefficientSet& c, double x) { return log_bernstein_bound(c.gamma, c.eps, c.tau2, x); }

double bernstein_bound(double gamma, double eps, double tau2, double x) {
  return std::exp(log_bernstein_bound(gamma, eps, tau2, x));
}

double bernstein_bound(const CoefficientSet& c, double x) { return std::exp(log_bernstein_bound(c, x)); }

double log_freedman_bound(double x, double v2, double a) {
  require_nonnegative(x, "freedman_bound");
  if (!(v2 > 0.0) || !(a >= 0.0)) throw Error(ErrorCode::ParamOutOfRange, "freedman bound needs v2 > 0, a >= 0");
  return -x * x / (2.0 * (v2 + a * x / 3.0));
}

double freedman_bound(double x, double v2, double a) { return std::exp(log_freedman_bound(x, v2, a)); }

double log_peligrad_bound(double x, std::size_t n, double bound_x1, std::span<const double> cond_norms) {
  require_nonnegative(x, "peligrad_bound");
  if (n < 1) throw Error(ErrorCode::ParamOutOfRange, "peligrad bound needs n >= 1");
  if (cond_norms.size() < n)
    throw Error(ErrorCode::MissingNorms, "peligrad bound needs " + std::to_string(n) + " conditional norms, got " +
                                             std::to_string(cond_norms.size()));
  long double series = 0.0L;
  for (std::size_t j = 1; j <= n; ++j) {
    if (!(cond_norms[j - 1] >= 0.0)) throw Error(ErrorCode::ParamOutOfRange, "conditional norms must be >= 0");
    series += static_cast<long double>(std::pow(static_cast<double>(j), -1.5) * cond_norms[j - 1]);
  }
  const double scale = bound_x1 + 80.0 * static_cast<double>(series);
  if (!(scale > 0.0)) return x > 0.0 ? -kInf : kLogFourSqrtE;
  return kLogFourSqrtE - x * x / (2.0 * static_cast<double>(n) * scale * scale);
}

double peligrad_bound(double x, std::size_t n, double bound_x1, std::span<const double> cond_norms) {
  return std::exp(log_peligrad_bound(x, n, bound_x1, cond_norms));
}

std::pair<double, double> gaussian_tail_sandwich(double x) {
  require_nonnegative(x, "gaussian_tail_sandwich");
  const double core = std::exp(-0.5 * x * x) / (1.0 + x);
  return {core / std::sqrt(2.0 * std::numbers::pi), core / std::sqrt(std::numbers::pi)};
}

double uniform_x_range(const CoefficientSet& c) {
  double r = kInf;
  if (c.eps > 0.0) r = std::min(r, std::cbrt(1.0 / c.eps));
  if (c.delta2 > 0.0) r = std::min(r, 1.0 / c.delta());
  if (c.m > 0) r = std::min(r, std::sqrt(1.0 / c.m_over_n()));
  const double gl = x_abs_log(c.gamma);
  if (gl > 0.0) r = std::min(r, 1.0 / std::sqrt(gl));
  return r;
}

BoundCurve cramer_envelope_curve(const CoefficientSet& coeffs, std::span<const double> x_grid,
                                 const GateConfig& gates, double C) {
  BoundCurve curve;
  curve.kind = "cramer_envelope";
  curve.unit = "log_ratio";
  curve.gate_mode = gates.mode;
  curve.shape_mode = true;
  curve.constants = {{"C", C}, {"alpha0", gates.alpha0}};
  for (double x : x_grid) {
    curve.x_grid.push_back(x);
    curve.value.push_back(cramer_envelope(coeffs, x, C));
    curve.valid.push_back(cramer_envelope_valid(coeffs, x, gates) ? 1 : 0);
  }
  return curve;
}

BoundCurve bernstein_curve(const CoefficientSet& coeffs, std::span<const double> x_grid, const GateConfig& gates) {
  BoundCurve curve;
  curve.kind = "bernstein";
  curve.unit = "probability";
  curve.gate_mode = gates.mode;
  curve.shape_mode = false;
  const bool gates_ok = evaluate_gates(coeffs, gates).all();
  for (double x : x_grid) {
    curve.x_grid.push_back(x);
    curve.value.push_back(bernstein_bound(coeffs, x));
    curve.valid.push_back(x > 0.0 && gates_ok ? 1 : 0);
  }
  return curve;
}

}  // namespace cramerlab
