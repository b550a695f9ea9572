#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cramerlab/models.hpp"

namespace cramerlab {

/// How the trailing partial block X_{k+1,m} is treated.
enum class RemainderMode {
  Additive,       // k martingale blocks; the remainder is carried as a plain sum
  Martingalized,  // all k+1 blocks are recentred by their predictable parts
};

struct Block {
  std::size_t index = 0;   // 1-based block number i
  std::size_t start = 0;   // the block covers times start+1 .. start+length
  std::size_t length = 0;
  std::int64_t sum_num = 0;      // Σ f_num over the block (exact tier only)
  double block_sum = 0.0;        // X_{i,m}
  double predictable = 0.0;      // E[X_{i,m} | F_start]
  double predictable_se = 0.0;   // standard error when the predictable part is a resampled estimate
  double martingale_diff = 0.0;  // D_{i,m}
  double xi = 0.0;               // D_{i,m} / (√n σ_n)
  double cond_var = 0.0;         // E[ξ_i² | F_start]
  bool martingalized = true;
};

struct BlockDecomposition {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t k = 0;  // ⌊n/m⌋ full blocks
  RemainderMode mode = RemainderMode::Additive;
  double sigma_n = 0.0;
  bool estimated = false;  // predictable parts come from nested resampling
  std::vector<Block> blocks;
  std::vector<double> partial_sums;  // M_1, M_2, … over the martingalized blocks
  double quadratic_characteristic = 0.0;  // ⟨M⟩
  double total = 0.0;                     // S_n
  std::int64_t total_num = 0;             // Σ f_num(Y_1..Y_n), exact tier

  /// Σ_i X_{i,m}.
  double block_total() const noexcept;
};

/// `path` holds the visited states Y₀, Y₁, …, Y_n (so n = path.size() − 1).
/// Throws TrajectoryTooShort when n < m.
BlockDecomposition decompose(const FiniteLatticeModel& model, std::span<const std::size_t> path, std::size_t m,
                             RemainderMode mode = RemainderMode::Additive);

struct NestedOptions {
  std::size_t resamples = 256;
  std::uint64_t seed = 0;
};

/// Sampled-tier decomposition: predictable parts and conditional variances are
/// estimated by resampling the future innovations of each block. Throws
/// NestedEstimateUnavailable when the path carries no innovation history.
BlockDecomposition decompose(const SampledModel& model, const SampledPath& path, std::size_t m,
                             RemainderMode mode = RemainderMode::Additive, const NestedOptions& nested = {});

struct QuadraticDeviation {
  double exact = 0.0;  // ‖⟨M⟩_k − 1‖∞, exact sup over admissible block-start sequences
  double bound = 0.0;  // δ_m² + m/n
  double delta2 = 0.0;
  double m_over_n = 0.0;
};

/// Sup-norm deviation of the normalized quadratic characteristic of the k-block
/// martingale from 1, next to the bound (δ_m² + m/n).
QuadraticDeviation quadratic_characteristic_deviation(const FiniteLatticeModel& model, std::size_t n, std::size_t m);
QuadraticDeviation quadratic_characteristic_deviation(const ModelSpec& model, std::size_t n, std::size_t m);

}  // namespace cramerlab
