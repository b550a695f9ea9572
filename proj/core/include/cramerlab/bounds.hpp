#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cramerlab/coefficients.hpp"

namespace cramerlab {

/// A bound evaluated on an x-grid. `unit` is "log_ratio" or "probability".
struct BoundCurve {
  std::string kind;
  std::string unit;
  std::vector<double> x_grid;
  std::vector<double> value;
  std::vector<std::uint8_t> valid;
  GateMode gate_mode = GateMode::Practical;
  bool shape_mode = false;  // true when the value carries an unknown absolute constant
  std::map<std::string, double> constants;
};

/// `count` evenly spaced points on [lo, hi] (just lo when count == 1).
std::vector<double> linear_grid(double lo, double hi, std::size_t count);

/// C(x³ε + x²(δ² + m/n + γ|ln γ|) + (1+x)(ε|ln ε| + γ|ln γ| + δ + √(m/n))). Throws NegativeX.
double cramer_envelope(const CoefficientSet& coeffs, double x, double C = 1.0);

/// Where the envelope's hypotheses hold: 0 ≤ x ≤ α₀/ε and the gates pass.
bool cramer_envelope_valid(const CoefficientSet& coeffs, double x, const GateConfig& gates);

/// C(x³ε + x²ι² + (1+x)(ε|ln ε| + ι)) for eps ∈ (0, 1/2], iota ∈ [0, 1/2].
/// Throws ParamOutOfRange, NegativeX.
double martingale_cramer_envelope(double eps, double iota, double x, double C = 1.0);

/// C(γ|ln γ| + ε|ln ε| + δ + √(m/n)).
double berry_esseen_bound(const CoefficientSet& coeffs, double C = 1.0);

/// Two-term Bernstein-type bound on P(W_n ≥ xσ_n); no free constants.
/// Throws GammaTooLarge when γ|ln γ| ≥ 1, NegativeX for x < 0.
double bernstein_bound(double gamma, double eps, double tau2, double x);
double bernstein_bound(const CoefficientSet& coeffs, double x);
double log_bernstein_bound(double gamma, double eps, double tau2, double x);
double log_bernstein_bound(const CoefficientSet& coeffs, double x);

/// exp{−x²/(2(v² + ax/3))}.
double freedman_bound(double x, double v2, double a);
double log_freedman_bound(double x, double v2, double a);

/// 4√e exp{−x²/(2n(‖X₁‖ + 80 Σ_{j≤n} j^{-3/2}‖E[S_j|F₀]‖)²)} with cond_norms[j−1] = ‖E[S_j|F₀]‖∞.
/// Throws MissingNorms when fewer than n norms are supplied.
double peligrad_bound(double x, std::size_t n, double bound_x1, std::span<const double> cond_norms);
double log_peligrad_bound(double x, std::size_t n, double bound_x1, std::span<const double> cond_norms);

/// (e^{−x²/2}/(√(2π)(1+x)), e^{−x²/2}/(√π(1+x))), which bracket 1 − Φ(x). Throws NegativeX.
std::pair<double, double> gaussian_tail_sandwich(double x);

/// min{ε^{-1/3}, δ^{-1}, (n/m)^{1/2}, (γ|ln γ|)^{-1/2}}, zero coefficients contributing +inf.
double uniform_x_range(const CoefficientSet& coeffs);

BoundCurve cramer_envelope_curve(const CoefficientSet& coeffs, std::span<const double> x_grid,
                                 const GateConfig& gates, double C = 1.0);
BoundCurve bernstein_curve(const CoefficientSet& coeffs, std::span<const double> x_grid, const GateConfig& gates);

}  // namespace cramerlab
