#include "cramerlab/numeric.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <numbers>

#include "cramerlab/error.hpp"

namespace cramerlab {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// erfc underflows near 26.5; past this point the upper tail uses the
// asymptotic expansion of Mills' ratio.
constexpr double kErfcSafeX = 37.0;

double pairwise_lse(std::span<const double> v) noexcept {
  if (v.empty()) return kNegInf;
  if (v.size() == 1) return v[0];
  if (v.size() <= 8) {
    double m = *std::max_element(v.begin(), v.end());
    if (m == kNegInf) return kNegInf;
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - m);
    return m + std::log(acc);
  }
  const std::size_t half = v.size() / 2;
  return log_add_exp(pairwise_lse(v.first(half)), pairwise_lse(v.subspan(half)));
}

}  // namespace

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_sf(double x) noexcept { return 0.5 * std::erfc(x * kInvSqrt2); }

double log_normal_sf(double x) noexcept {
  if (std::isnan(x)) return x;
  if (x < -5.0) return std::log1p(-0.5 * std::erfc(-x * kInvSqrt2));
  if (x < kErfcSafeX) return std::log(0.5 * std::erfc(x * kInvSqrt2));
  const double z2 = 1.0 / (x * x);
  const double series = 1.0 - z2 * (1.0 - 3.0 * z2 * (1.0 - 5.0 * z2 * (1.0 - 7.0 * z2)));
  return -0.5 * x * x - std::log(x) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::OutOfRange, "normal_quantile needs p in (0,1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double normal_quantile_upper(double q) {
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorCode::OutOfRange, "normal_quantile_upper needs q in (0,1)");
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

double normal_quantile_upper_log(double log_q) {
  if (!(log_q < 0.0)) throw Error(ErrorCode::OutOfRange, "normal_quantile_upper_log needs log_q < 0");
  if (log_q > -700.0) return normal_quantile_upper(std::exp(log_q));
  // Newton on ln(1 − Φ(x)) = log_q; d/dx = −φ(x)/(1 − Φ(x)).
  double x = std::sqrt(-2.0 * log_q);
  for (int it = 0; it < 50; ++it) {
    const double ls = log_normal_sf(x);
    const double hazard = std::exp(-0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi) - ls);
    const double step = (ls - log_q) / hazard;
    x += step;
    if (std::abs(step) <= 4e-16 * x) break;
  }
  return x;
}

double log_sum_exp(std::span<const double> values) noexcept { return pairwise_lse(values); }

double zeta_three_halves_tail(long long J) {
  constexpr long long kAnchor = 1000;
  double direct = 0.0;
  long long a = J;
  if (J < kAnchor) {
    for (long long j = kAnchor; j > J; --j) direct += std::pow(static_cast<double>(j), -1.5);
    a = kAnchor;
  }
  // Σ_{j>a} j^{-3/2} = ∫_a^∞ − f(a)/2 − Σ_k B_{2k}/(2k)! f^{(2k−1)}(a)
  const double t = static_cast<double>(a);
  const double em = 2.0 / std::sqrt(t) - 0.5 * std::pow(t, -1.5) + 0.125 * std::pow(t, -2.5) -
                    (13.125 / 720.0) * std::pow(t, -4.5) + (324.84375 / 30240.0) * std::pow(t, -6.5);
  return direct + em;
}

}  // namespace cramerlab
