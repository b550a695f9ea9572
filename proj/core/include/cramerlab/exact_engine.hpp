#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cramerlab/models.hpp"
#include "cramerlab/numeric.hpp"

namespace cramerlab {

/// Per-state conditional moments of a block sum S_m = X_1 + … + X_m given Y₀.
struct ConditionalMoments {
  std::size_t m = 0;
  std::vector<double> mean_by_state;    // E[S_m | Y₀ = s]
  std::vector<double> second_by_state;  // E[S_m² | Y₀ = s]
  double sup_mean = 0.0;                // ‖E[S_m|F₀]‖∞

  /// ‖E[S_m²|F₀]/(m σ_n²) − 1‖∞ for the ambient σ_n.
  double sup_second_dev(double sigma_n) const noexcept;
  /// E[D²|Y₀ = s] = E[S_m²|s] − E[S_m|s]², the block martingale variance.
  std::vector<double> martingale_variance() const;
};

/// Exact law of S_n on the lattice (1/denom)ℤ, stored as log-probabilities of
/// the integer sums k = Σ f_num(Y_i) for k = offset .. offset + size − 1.
/// The centered sum is S_n = (k − center)/denom with center = n·denom·E_π f.
class TailTable {
 public:
  static TailTable from_log_masses(std::size_t n, std::int64_t denom, std::int64_t offset, double center,
                                   std::vector<double> logp, double sigma_n);

  std::size_t n() const noexcept { return n_; }
  std::int64_t denom() const noexcept { return denom_; }
  std::int64_t offset() const noexcept { return offset_; }
  double center() const noexcept { return center_; }
  double sigma_n() const noexcept { return sigma_n_; }
  std::size_t size() const noexcept { return logp_.size(); }
  std::span<const double> logp() const noexcept { return logp_; }

  std::int64_t sum_at(std::size_t i) const noexcept { return offset_ + static_cast<std::int64_t>(i); }
  /// Centered S_n at atom i.
  double s_at(std::size_t i) const noexcept;
  /// W_n = S_n/√n at atom i.
  double w_at(std::size_t i) const noexcept;
  /// Ŵ_n = W_n/σ_n at atom i.
  double w_hat_at(std::size_t i) const noexcept { return w_at(i) / sigma_n_; }

  /// ln P(atom ≤ i) and ln P(atom ≥ i).
  double log_cdf_at(std::size_t i) const noexcept { return log_cdf_[i]; }
  double log_sf_at(std::size_t i) const noexcept { return log_sf_[i]; }
  /// P(atom ≤ i).
  double cdf_at(std::size_t i) const noexcept;

  /// ln P(W_n ≥ w). Atoms within 1e-9 (relative) of the threshold count as hits.
  double log_upper_tail(double w) const noexcept;
  /// ln P(W_n ≤ w), same atom convention.
  double log_lower_tail(double w) const noexcept;

  /// ln of the total mass; 0 up to round-off.
  double log_total() const noexcept { return log_sf_.empty() ? kNegInf : log_sf_.front(); }

 private:
  std::size_t n_ = 0;
  std::int64_t denom_ = 1;
  std::int64_t offset_ = 0;
  double center_ = 0.0;
  double sigma_n_ = 1.0;
  std::vector<double> logp_;
  std::vector<double> log_cdf_;
  std::vector<double> log_sf_;
};

struct DpBudget {
  std::size_t max_bytes = std::size_t{2} << 30;
};

/// Cov(X₀, X_k) under π.
double autocovariance(const FiniteLatticeModel& model, std::size_t k);
double autocovariance(const ModelSpec& model, std::size_t k);
/// γ(0..kmax).
std::vector<double> autocovariances(const FiniteLatticeModel& model, std::size_t kmax);

/// σ_n = √(E W_n²) from σ_n² = γ(0) + 2 Σ_{k<n} (1 − k/n) γ(k). Throws DegenerateVariance.
double sigma_n(const FiniteLatticeModel& model, std::size_t n);
double sigma_n(const ModelSpec& model, std::size_t n);

/// σ² = Σ_{k∈ℤ} γ(k), with the series summed until ‖P^k X‖∞ falls below 1e-17·‖X‖∞.
double asymptotic_variance(const FiniteLatticeModel& model);

ConditionalMoments conditional_block_moments(const FiniteLatticeModel& model, std::size_t m);
ConditionalMoments conditional_block_moments(const ModelSpec& model, std::size_t m);

/// ‖E[S_t|F₀]‖∞ for t = 1..horizon (entry t−1).
std::vector<double> conditional_mean_norms(const FiniteLatticeModel& model, std::size_t horizon);

/// Exact law of S_n from the stationary start, by log-space DP over (state, sum).
/// Throws BudgetExceeded naming the dimensions.
TailTable distribution_of_Sn(const FiniteLatticeModel& model, std::size_t n, const DpBudget& budget = {});
TailTable distribution_of_Sn(const ModelSpec& model, std::size_t n, const DpBudget& budget = {});

/// ln P(W_n ≥ xσ_n), inclusive at atoms.
double exact_tail(const TailTable& table, double x) noexcept;
/// ln P(W_n ≤ −xσ_n).
double exact_lower_tail(const TailTable& table, double x) noexcept;

/// H(s) = inf{x : F(x) ≥ s} for the law of Ŵ_n. Throws OutOfRange for s ∉ (0,1).
double quantile(const TailTable& table, double s);

/// sup_x |P(Ŵ_n ≤ x) − Φ(x)|, evaluated on both sides of every atom.
double ks_distance_exact(const TailTable& table);

}  // namespace cramerlab
