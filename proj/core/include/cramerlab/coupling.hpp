#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cramerlab/coefficients.hpp"
#include "cramerlab/exact_engine.hpp"

namespace cramerlab {

/// Generalized inverse H(s) = inf{x : F(x) ≥ s} of a discrete law, kept as its
/// positive-mass atoms together with the normal breakpoints z_i = Φ^{-1}(F(x_i)),
/// so that H(Φ(z)) is the first atom with z ≤ z_i. Breakpoints in the upper half
/// are computed from the survival function to keep precision near 1.
class QuantileTransform {
 public:
  /// Law of Ŵ_n = W_n/σ_n from an exact table.
  static QuantileTransform from_table(const TailTable& table);
  /// Empirical law of the samples (divided by `scale`). Throws TooFewSamples below 1000.
  static QuantileTransform from_samples(std::span<const double> samples, double scale = 1.0);

  /// H(s) for s ∈ (0, 1].
  double operator()(double s) const;
  /// H(Φ(z)), evaluated without forming Φ(z).
  double from_normal(double z) const;

  std::span<const double> atoms() const noexcept { return atoms_; }
  std::span<const double> breaks() const noexcept { return breaks_; }
  /// P(H(Φ(Z)) = atoms()[i]) computed from the breakpoints.
  std::vector<double> induced_masses() const;

 private:
  std::vector<double> atoms_;
  std::vector<double> log_cdf_;  // ln F(x_i)
  std::vector<double> log_sf_;   // ln (1 − F(x_i))
  std::vector<double> breaks_;
};

struct CoupledPair {
  double z = 0.0;
  double y = 0.0;
};

/// Draws Z i.i.d. standard normal and sets Y = H(Φ(Z)). Draws are generated in
/// blocks of 4096 seeded by derive_seed(seed, block); independent of `threads`.
std::vector<CoupledPair> sample_coupled_pairs(const QuantileTransform& transform, std::size_t draws,
                                              std::uint64_t seed, unsigned threads = 1);

struct CouplingConstants {
  double alpha = 1.0;
  double c_alpha = 1.0;
};

struct CouplingReport {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t draws = 0;
  std::uint64_t seed = 0;
  double varsigma = 0.0;
  CouplingConstants constants;
  std::size_t admissible = 0;  // draws with |Y| ≤ α/ς
  std::size_t violations = 0;  // admissible draws with |Y−Z| > 2C_α(Y²+1)ς
  double violation_fraction = 0.0;
  double gap_median = 0.0;  // of G = |Y−Z|/ς
  std::vector<double> survival_x;  // G at the quantile levels below
  std::vector<double> survival_p;  // P̂(G ≥ survival_x)
  double lambda_hat = 0.0;   // slope of ln P̂(G ≥ x) over the upper decile
  double lambda_se = 0.0;
  double marginal_ks = 0.0;  // KS distance between the Y sample and the table law
};

/// Throws DegenerateGap when ς_n is not a positive normal number.
CouplingReport coupling_report(const ModelSpec& model, std::size_t n, std::size_t m, std::size_t draws,
                               std::uint64_t seed, const CouplingConstants& constants = {}, unsigned threads = 1,
                               std::vector<CoupledPair>* pairs_out = nullptr);

}  // namespace cramerlab
