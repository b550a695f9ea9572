#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cramerlab/models.hpp"

namespace cramerlab {

/// Deviation coefficients of a block size m at horizon n.
struct CoefficientSet {
  std::size_t n = 0;
  std::size_t m = 0;
  double sigma_n = 0.0;
  double sup_norm = 0.0;  // ‖X₀‖∞
  double eps = 0.0;       // m‖X₀‖∞ / (√n σ_n)
  double gamma = 0.0;     // (√m σ_n)^{-1} Σ_j j^{-3/2} ‖E[S_{mj}|F₀]‖∞
  double delta2 = 0.0;    // ‖E[S_m|F₀]‖∞²/(mσ_n²) + ‖E[S_m²|F₀]/(mσ_n²) − 1‖∞
  double tau2 = 0.0;      // δ_m² + m/n + 4ε_m²
  double gamma_truncation_error = 0.0;
  std::size_t gamma_terms = 0;  // series terms summed explicitly before the tail correction
  double tolerance = 0.0;
  // True when γ and δ² are upper bounds from a decay certificate rather than exact values.
  bool from_certificate = false;

  double delta() const noexcept;
  double tau() const noexcept;
  double m_over_n() const noexcept { return static_cast<double>(m) / static_cast<double>(n); }
  /// γ|ln γ|, 0 at γ = 0.
  double gamma_log_gamma() const noexcept;
  /// ς_n = γ|ln γ| + ε|ln ε| + δ + √(m/n).
  double varsigma() const noexcept;
};

enum class GateMode { Strict, Practical };

std::string_view to_string(GateMode mode) noexcept;
GateMode parse_gate_mode(std::string_view text);

/// Admissibility gates ε ≤ 1/4, γ ≤ e^{log_gamma_max}, δ² + m/n ≤ α₀.
/// Strict uses γ ≤ e^{−6400}; practical relaxes it to e^{−1}.
struct GateConfig {
  GateMode mode = GateMode::Practical;
  double alpha0 = 0.5;
  double eps_max = 0.25;
  double log_gamma_max = -1.0;

  static GateConfig strict();
  static GateConfig practical();
  static GateConfig for_mode(GateMode mode);
};

struct GateVerdict {
  GateConfig config;
  bool eps_ok = false;
  bool gamma_ok = false;
  bool variance_ok = false;
  bool all() const noexcept { return eps_ok && gamma_ok && variance_ok; }
};

GateVerdict evaluate_gates(const CoefficientSet& coeffs, const GateConfig& config);

/// Certified geometric contraction of centered functions: osc(P^r v) ≤ delta·osc(v).
struct Contraction {
  std::size_t r = 1;
  double delta = 1.0;
  /// Per-step rate δ^{1/r}.
  double rate() const noexcept;
  /// Σ_{j>0} δ^{⌊j/r⌋}-weighted bound on tails: Σ_{i>t} osc(P^i v) ≤ osc(P^t v)·factor().
  double tail_factor() const noexcept;
};

/// Smallest r ≤ max_r with a Dobrushin bound below 1. Throws WindowTooSmall.
Contraction find_contraction(const FiniteLatticeModel& model, std::size_t max_r = 64);

/// Exact-tier coefficients. The γ series is summed explicitly until the
/// certified error of the tail correction drops below `tol`.
/// Throws NoDecayCertificate, DegenerateVariance.
CoefficientSet coefficient_set(const FiniteLatticeModel& model, std::size_t n, std::size_t m, double tol = 1e-10);
CoefficientSet coefficient_set(const ModelSpec& model, std::size_t n, std::size_t m, double tol = 1e-10);

struct RemarkConstants {
  double c1 = 1.0;
  double c2 = 1.0;
};

/// Certificate-based coefficients for a sampled model: ε exact, γ and δ²
/// replaced by their certificate-based upper bounds with the given constants.
CoefficientSet coefficient_bounds(const SampledModel& model, std::size_t n, std::size_t m,
                                  const RemarkConstants& constants);

/// Exact-tier η certificate up to index N with a verification window of K
/// extra steps; builtin sampled models return their analytic certificate.
DecayCertificate eta_certificate(const FiniteLatticeModel& model, std::size_t N, std::size_t window = 64);
DecayCertificate eta_certificate(const ModelSpec& model, std::size_t N, std::size_t window = 64);

/// β to use for block-size rules: +inf for certified geometric decay, else the fitted exponent.
double effective_beta(const DecayCertificate& cert) noexcept;

struct RemarkBounds {
  double gamma_bound = 0.0;
  double delta2_bound = 0.0;
  std::string delta_regime;  // "m^{-1/2}", "m^{-1/2} sqrt(ln m)", "m^{-(beta-1)/2}"
  RemarkConstants constants;
};

/// Upper bounds on γ_m and δ_m² from η₁, η₂. Throws InsufficientCertificateLength when m exceeds the certificate.
RemarkBounds remark_vi_bounds(const DecayCertificate& cert, std::size_t m, double sigma_n, double bound_x0,
                              const RemarkConstants& constants = {});

/// Rate label for δ_m given β > 1. Throws BetaOutOfRange.
std::string delta_rate_regime(double beta);

enum class BlockPurpose { Cramer, BerryEsseen };
BlockPurpose parse_block_purpose(std::string_view text);

struct BlockChoice {
  std::size_t m = 1;
  BlockPurpose purpose = BlockPurpose::Cramer;
  double exponent = 0.0;    // m = ⌊n^exponent⌋
  double prediction = 0.0;  // x-range scale (cramer) or rate (berry_esseen) at this n
  std::string prediction_label;
};

/// Block size from the decay exponent β (β = +inf allowed). Throws BetaOutOfRange for β ≤ 1.
BlockChoice select_block_size(std::size_t n, double beta, BlockPurpose purpose);

struct DedeckerReport {
  std::size_t horizon = 0;
  std::vector<std::size_t> checkpoints;
  std::vector<double> series_partial;  // Σ_{k≤N} k^{-3/2}‖E[S_k|F₀]‖∞ at each checkpoint
  double series_at_horizon = 0.0;
  double tail_estimate = 0.0;  // remainder beyond the horizon
  double tail_error = 0.0;     // certified error of that estimate
  double tail_upper_bound = 0.0;  // H₁·Σ_{k>N} k^{-3/2}
  double sigma2 = 0.0;            // asymptotic variance
  std::vector<double> deviation;  // ‖E[S_k²|F₀]/k − σ²‖∞ at each checkpoint
  double geometric_rate = 0.0;
  bool series_converges = false;
  bool variance_condition_converging = false;
  bool slow_decay = false;
};

/// Throws NoDecayCertificate when no contraction can be certified.
DedeckerReport check_dedecker_conditions(const FiniteLatticeModel& model, std::size_t N);
DedeckerReport check_dedecker_conditions(const ModelSpec& model, std::size_t N);

}  // namespace cramerlab
