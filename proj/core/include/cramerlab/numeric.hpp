#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace cramerlab {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Standard normal CDF, Φ(x) = erfc(−x/√2)/2.
double normal_cdf(double x) noexcept;

/// Upper tail 1 − Φ(x), computed without cancellation.
double normal_sf(double x) noexcept;

/// ln(1 − Φ(x)); finite for every finite x (asymptotic series once erfc underflows).
double log_normal_sf(double x) noexcept;

/// ln Φ(x).
inline double log_normal_cdf(double x) noexcept { return log_normal_sf(-x); }

/// Φ^{-1}(p) for p in (0, 1).
double normal_quantile(double p);

/// Φ^{-1}(1 − q) evaluated from the upper-tail mass q, accurate for tiny q.
double normal_quantile_upper(double q);

/// Φ^{-1}(1 − e^{log_q}) for log_q < 0; finite even when e^{log_q} underflows.
double normal_quantile_upper_log(double log_q);

/// ln(e^a + e^b), exact for infinite arguments.
inline double log_add_exp(double a, double b) noexcept {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

/// ln Σ e^{v_i} by pairwise reduction.
double log_sum_exp(std::span<const double> values) noexcept;

/// x·|ln x| with the continuous extension 0 at x = 0.
inline double x_abs_log(double x) noexcept { return x > 0.0 ? x * std::abs(std::log(x)) : 0.0; }

/// Σ_{j > J} j^{-3/2} via Euler–Maclaurin; relative accuracy ~1e-15 for J ≥ 10.
double zeta_three_halves_tail(long long J);

}  // namespace cramerlab
