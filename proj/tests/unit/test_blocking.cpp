// Block decomposition and the quadratic characteristic.

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "cramerlab/blocking.hpp"
#include "cramerlab/coefficients.hpp"
#include "cramerlab/error.hpp"
#include "cramerlab/exact_engine.hpp"
#include "cramerlab/rng.hpp"

using namespace cramerlab;

namespace {

FiniteLatticeModel two_state(double rho) { return std::get<FiniteLatticeModel>(builtin("two_state", {{"rho", rho}})); }

}  // namespace

TEST(Decompose, PartitionIdentity) {
  auto m = two_state(0.4);
  auto path = sample_states(m, 10, 3);
  auto d = decompose(m, path, 3);
  EXPECT_EQ(d.k, 3u);
  ASSERT_EQ(d.blocks.size(), 4u);
  EXPECT_EQ(d.blocks.back().length, 1u);
  EXPECT_FALSE(d.blocks.back().martingalized);
  std::int64_t s = 0;
  for (std::size_t t = 1; t <= 10; ++t) s += m.f_num()[path[t]];
  EXPECT_EQ(d.total_num, s);
  EXPECT_DOUBLE_EQ(d.total, static_cast<double>(s));
  EXPECT_DOUBLE_EQ(d.block_total(), static_cast<double>(s));
  EXPECT_EQ(d.partial_sums.size(), 3u);

  auto all = decompose(m, path, 3, RemainderMode::Martingalized);
  EXPECT_TRUE(all.blocks.back().martingalized);
  EXPECT_EQ(all.partial_sums.size(), 4u);
}

TEST(Decompose, RademacherHasNoPredictablePart) {
  auto m = std::get<FiniteLatticeModel>(builtin("rademacher"));
  auto path = sample_states(m, 50, 8);
  auto d = decompose(m, path, 5);
  for (const auto& b : d.blocks) {
    EXPECT_EQ(b.predictable, 0.0);
    EXPECT_EQ(b.martingale_diff, b.block_sum);
  }
  EXPECT_NEAR(d.quadratic_characteristic, 1.0, 1e-14);
}

TEST(Decompose, TwoStatePredictablePart) {
  auto m = two_state(0.4);
  std::vector<std::size_t> path{1, 1, 0, 1, 0, 0, 0};
  auto d = decompose(m, path, 3);
  EXPECT_NEAR(d.blocks[0].predictable, 0.624, 1e-14);
  EXPECT_NEAR(d.blocks[1].predictable, 0.624, 1e-14);  // Y_3 = +1
  EXPECT_NEAR(d.blocks[0].block_sum, 1.0, 1e-15);
  EXPECT_NEAR(d.blocks[0].martingale_diff, 1.0 - 0.624, 1e-14);
}

TEST(Decompose, NormBounds) {
  auto m = two_state(0.4);
  const std::size_t n = 400, bm = 7;
  const auto c = coefficient_set(m, n, bm);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto d = decompose(m, sample_states(m, n, seed), bm);
    for (const auto& b : d.blocks) {
      if (!b.martingalized) continue;
      ASSERT_LE(std::abs(b.martingale_diff), 2.0 * bm * m.sup_norm() + 1e-12);
      ASSERT_LE(std::abs(b.xi), 2.0 * c.eps + 1e-12);
    }
  }
}

TEST(Decompose, EmpiricalMartingaleProperty) {
  auto m = two_state(0.4);
  const std::size_t bm = 4;
  double sum[2] = {0, 0}, sum2[2] = {0, 0};
  std::size_t cnt[2] = {0, 0};
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    auto path = sample_states(m, 16, derive_seed(77, seed));
    auto d = decompose(m, path, bm);
    for (const auto& b : d.blocks) {
      const std::size_t y = path[b.start];
      sum[y] += b.martingale_diff;
      sum2[y] += b.martingale_diff * b.martingale_diff;
      ++cnt[y];
    }
  }
  for (int s = 0; s < 2; ++s) {
    const double mean = sum[s] / cnt[s];
    const double se = std::sqrt((sum2[s] / cnt[s] - mean * mean) / cnt[s]);
    EXPECT_LE(std::abs(mean), 4.0 * se) << "state " << s;
  }
}

TEST(Decompose, Errors) {
  auto m = two_state(0.4);
  std::vector<std::size_t> path{0, 1, 1};
  try {
    decompose(m, path, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TrajectoryTooShort);
  }
  const auto ma = std::get<SampledModel>(builtin("moving_average", {{"c", 1}, {"L_trunc", 5}}));
  SampledPath bare;
  bare.values.assign(20, 0.5);
  try {
    decompose(ma, bare, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NestedEstimateUnavailable);
  }
}

TEST(Decompose, SampledPredictableMatchesAnalytic) {
  const auto ma = std::get<SampledModel>(builtin("moving_average", {{"c", 1}, {"L_trunc", 6}}));
  auto path = ma.sample(24, 5);
  auto d = decompose(ma, path, 4, RemainderMode::Additive, {.resamples = 4000, .seed = 9});
  EXPECT_TRUE(d.estimated);
  const auto w = ma.weights();
  const std::size_t L = ma.memory();
  for (const auto& b : d.blocks) {
    // E[X_t | F_start] keeps the innovations at times ≤ start
    double exact = 0.0;
    for (std::size_t t = b.start + 1; t <= b.start + b.length; ++t)
      for (std::size_t i = t - b.start; i <= L; ++i) exact += w[i] * path.innovations[L + t - i - 1];
    EXPECT_NEAR(b.predictable, exact, 5.0 * b.predictable_se + 1e-12) << b.index;
  }
  EXPECT_NEAR(d.block_total(), std::accumulate(path.values.begin(), path.values.end(), 0.0), 1e-12);
}

// ============================================================================
// Quadratic characteristic
// ============================================================================

TEST(QuadraticDeviation, RademacherDivisible) {
  auto q = quadratic_characteristic_deviation(builtin("rademacher"), 120, 6);
  EXPECT_NEAR(q.delta2, 0.0, 1e-12);
  EXPECT_LE(q.exact, 6.0 / 120.0 + 1e-12);
}

TEST(QuadraticDeviation, TwoStateWithinBound) {
  auto m = two_state(0.4);
  auto q = quadratic_characteristic_deviation(m, 120, 6);
  auto c = coefficient_set(m, 120, 6);
  EXPECT_NEAR(q.delta2, c.delta2, 1e-12);
  EXPECT_NEAR(q.m_over_n, 0.05, 1e-15);
  EXPECT_LE(q.exact, q.bound);
}

TEST(QuadraticDeviation, MatchesBruteForceOverStartStates) {
  auto m = two_state(0.6);
  const std::size_t n = 40, bm = 5, k = n / bm;
  auto cm = conditional_block_moments(m, bm);
  auto v = cm.martingale_variance();
  const double s2 = sigma_n(m, n) * sigma_n(m, n);
  double worst = 0.0;
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += v[(mask >> i) & 1u];
    worst = std::max(worst, std::abs(acc / (n * s2) - 1.0));
  }
  EXPECT_NEAR(quadratic_characteristic_deviation(m, n, bm).exact, worst, 1e-13);
}

TEST(QuadraticDeviation, SingleBlock) {
  auto m = two_state(0.4);
  const std::size_t n = 30;
  auto cm = conditional_block_moments(m, n);
  const double sig = sigma_n(m, n);
  double expect = 0.0;
  for (std::size_t s = 0; s < 2; ++s) {
    const double var = cm.second_by_state[s] - cm.mean_by_state[s] * cm.mean_by_state[s];
    expect = std::max(expect, std::abs(var / (n * sig * sig) - 1.0));
  }
  EXPECT_NEAR(quadratic_characteristic_deviation(m, n, n).exact, expect, 1e-12);
  // with no predictable part the single block reduces to the second-moment deviation
  auto r = std::get<FiniteLatticeModel>(builtin("rademacher"));
  EXPECT_NEAR(quadratic_characteristic_deviation(r, n, n).exact,
              conditional_block_moments(r, n).sup_second_dev(sigma_n(r, n)), 1e-12);
}

TEST(QuadraticDeviation, SampledUnsupported) {
  try {
    quadratic_characteristic_deviation(builtin("moving_average", {{"c", 1}, {"L_trunc", 3}}), 10, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SampledTierUnsupported);
  }
}
