#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cramerlab/coefficients.hpp"
#include "cramerlab/exact_engine.hpp"
#include "cramerlab/models.hpp"

namespace cramerlab {

/// Wilson score interval for k successes in n trials at normal quantile z.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};
Interval wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054);

struct TailEstimate {
  double x = 0.0;
  double p = 0.0;  // estimate of P(W_n ≥ xσ_n)
  double lo = 0.0;
  double hi = 1.0;
  std::size_t hits = 0;
  std::size_t chains = 0;
  std::uint64_t seed = 0;
};

/// W_n = S_n/√n over `chains` independent stationary trajectories. Chain i uses
/// derive_seed(seed, i); the result does not depend on `threads`.
std::vector<double> simulate_W(const ModelSpec& model, std::size_t n, std::size_t chains, std::uint64_t seed,
                               unsigned threads = 1);

/// Tail estimate from simulated W values; atoms within 1e-9 (relative) of the threshold count as hits.
TailEstimate estimate_tail(std::span<const double> samples, double sigma_n, double x, std::uint64_t seed = 0);

enum class RatioMode { Exact, MonteCarlo };
std::string_view to_string(RatioMode mode) noexcept;

struct RatioOptions {
  RatioMode mode = RatioMode::Exact;
  std::size_t chains = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  GateConfig gates;
  double envelope_c = 1.0;
};

/// Right ratio P(W_n ≥ xσ_n)/(1−Φ(x)) and left ratio P(W_n ≤ −xσ_n)/Φ(−x) on a grid,
/// with Wilson intervals in MC mode (lo = hi = ratio in exact mode) and the
/// Cramér envelope as overlay.
struct RatioCurve {
  std::size_t n = 0;
  std::size_t m = 0;
  RatioMode source = RatioMode::Exact;
  std::vector<double> x_grid;
  std::vector<double> ratio, lo, hi;
  std::vector<double> left_ratio, left_lo, left_hi;
  std::vector<double> envelope;
  std::vector<std::uint8_t> envelope_valid;
  GateMode gate_mode = GateMode::Practical;
  std::size_t chains = 0;
  std::uint64_t seed = 0;
};

/// Throws BudgetExceeded (exact), ZeroDenominator for x > 37, ParamOutOfRange when MC has no chains.
RatioCurve ratio_curve(const ModelSpec& model, std::size_t n, std::size_t m, std::span<const double> x_grid,
                       const RatioOptions& options);
/// Exact-source curve from a precomputed table; the envelope uses `coeffs`.
RatioCurve ratio_curve(const TailTable& table, const CoefficientSet& coeffs, std::span<const double> x_grid,
                       const RatioOptions& options);
/// MC-source curve from simulated W values.
RatioCurve ratio_curve(std::span<const double> samples, double sigma_n, const CoefficientSet& coeffs,
                       std::span<const double> x_grid, const RatioOptions& options);

/// sup over jump points of |F̂(w/σ_n) − Φ|, ties grouped. Throws TooFewSamples below 100 samples.
double empirical_ks(std::span<const double> samples, double sigma_n);

struct MdpPoint {
  std::size_t n = 0;
  double a_n = 0.0;
  double log_tail = 0.0;  // ln P(a_n W_n ≥ c)
  double scaled = 0.0;    // a_n² ln P(a_n W_n ≥ c)
};

struct MdpResult {
  double c = 0.0;
  double a_exponent = 0.0;
  double sigma2 = 0.0;
  double limit = 0.0;  // −c²/(2σ²)
  std::string method;  // "binomial" or "dp"
  std::vector<MdpPoint> points;
};

/// Scaled log-tails a_n² ln P(a_n W_n ≥ c) with a_n = n^{−a_exponent}. I.i.d. two-point
/// models use the binomial law in log space; other exact models use the lattice DP.
/// Throws ExponentOutOfRange unless a_exponent ∈ (0, 1/2).
MdpResult mdp_diagnostic(const ModelSpec& model, double c, double a_exponent, std::span<const std::size_t> n_grid);

/// ln P(K ≥ k) for K ~ Binomial(n, p), summed in log space.
double log_binomial_upper_tail(std::size_t n, double p, std::int64_t k);

}  // namespace cramerlab
