// Quantile transform and the coupling report.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cramerlab/coupling.hpp"
#include "cramerlab/error.hpp"
#include "cramerlab/exact_engine.hpp"
#include "cramerlab/numeric.hpp"
#include "cramerlab/rng.hpp"

using namespace cramerlab;

TEST(QuantileTransform, TwoPointLaw) {
  auto h = QuantileTransform::from_table(distribution_of_Sn(builtin("rademacher"), 1));
  EXPECT_DOUBLE_EQ(h(0.3), -1.0);
  EXPECT_DOUBLE_EQ(h(0.5), -1.0);
  EXPECT_DOUBLE_EQ(h(0.7), 1.0);
  EXPECT_DOUBLE_EQ(h.from_normal(-0.1), -1.0);
  EXPECT_DOUBLE_EQ(h.from_normal(0.0), -1.0);
  EXPECT_DOUBLE_EQ(h.from_normal(0.1), 1.0);
  auto masses = h.induced_masses();
  EXPECT_NEAR(masses[0], 0.5, 1e-15);
  EXPECT_THROW(h(0.0), Error);
}

TEST(QuantileTransform, AgreesWithTableQuantile) {
  auto table = distribution_of_Sn(builtin("two_state", {{"rho", 0.4}}), 128);
  auto h = QuantileTransform::from_table(table);
  for (int i = 1; i < 1000; ++i) {
    const double s = i / 1000.0;
    EXPECT_DOUBLE_EQ(h(s), quantile(table, s)) << s;
  }
  // H(F(x)) ≤ x at atoms
  for (std::size_t i = 0; i + 1 < h.atoms().size(); ++i) EXPECT_LE(h.from_normal(h.breaks()[i]), h.atoms()[i]);
}

TEST(QuantileTransform, InducedMassesMatchTable) {
  auto table = distribution_of_Sn(builtin("two_state", {{"rho", 0.4}}), 64);
  auto h = QuantileTransform::from_table(table);
  auto masses = h.induced_masses();
  std::size_t j = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!std::isfinite(table.logp()[i])) continue;
    ASSERT_LT(j, masses.size());
    EXPECT_NEAR(masses[j], std::exp(table.logp()[i]), 1e-12);
    EXPECT_DOUBLE_EQ(h.atoms()[j], table.w_hat_at(i));
    ++j;
  }
}

TEST(QuantileTransform, FromSamples) {
  std::vector<double> few(999, 1.0);
  try {
    QuantileTransform::from_samples(few);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewSamples);
  }
  std::vector<double> s;
  for (int i = 0; i < 2000; ++i) s.push_back(i % 4);
  auto h = QuantileTransform::from_samples(s, 2.0);
  EXPECT_DOUBLE_EQ(h(0.25), 0.0);
  EXPECT_DOUBLE_EQ(h(0.26), 0.5);
  EXPECT_DOUBLE_EQ(h(1.0), 1.5);
}

TEST(CoupledPairs, MonotoneAndDeterministic) {
  auto h = QuantileTransform::from_table(distribution_of_Sn(builtin("two_state", {{"rho", 0.4}}), 256));
  auto a = sample_coupled_pairs(h, 10000, 12, 1);
  auto b = sample_coupled_pairs(h, 10000, 12, 3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].z, b[i].z);
    EXPECT_EQ(a[i].y, b[i].y);
  }
  std::sort(a.begin(), a.end(), [](auto& l, auto& r) { return l.z < r.z; });
  double zy = 0.0;
  for (std::size_t i = 1; i < a.size(); ++i) ASSERT_LE(a[i - 1].y, a[i].y);
  for (const auto& p : a) zy += p.z * p.y;
  EXPECT_GT(zy, 0.0);
}

TEST(CoupledPairs, MarginalKs) {
  auto table = distribution_of_Sn(builtin("two_state", {{"rho", 0.4}}), 128);
  auto h = QuantileTransform::from_table(table);
  const std::size_t draws = 100000;
  auto pairs = sample_coupled_pairs(h, draws, 2);
  std::vector<double> y;
  for (const auto& p : pairs) y.push_back(p.y);
  std::sort(y.begin(), y.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double x = table.w_hat_at(i);
    const auto upto = std::upper_bound(y.begin(), y.end(), x + 1e-12) - y.begin();
    worst = std::max(worst, std::abs(static_cast<double>(upto) / draws - table.cdf_at(i)));
  }
  EXPECT_LE(worst, 1.36 / std::sqrt(static_cast<double>(draws)));
}

TEST(CouplingReport, ShapeAndInvariants) {
  auto model = builtin("two_state", {{"rho", 0.4}});
  std::vector<CoupledPair> pairs;
  auto r = coupling_report(model, 1024, 7, 100000, 5, {}, 2, &pairs);
  EXPECT_EQ(pairs.size(), 100000u);
  EXPECT_GT(r.varsigma, 0.0);
  EXPECT_LT(r.lambda_hat, 0.0);
  EXPECT_GE(std::abs(r.lambda_hat), 3.0 * r.lambda_se);
  EXPECT_LE(r.marginal_ks, 1.36 / std::sqrt(1e5));
  for (std::size_t i = 1; i < r.survival_p.size(); ++i) {
    EXPECT_LE(r.survival_p[i], r.survival_p[i - 1]);
    EXPECT_GE(r.survival_x[i], r.survival_x[i - 1]);
  }
  EXPECT_LE(r.violations, r.admissible);
  auto again = coupling_report(model, 1024, 7, 100000, 5, {}, 1);
  EXPECT_EQ(again.lambda_hat, r.lambda_hat);
  EXPECT_EQ(again.gap_median, r.gap_median);
}

TEST(CouplingReport, GapTightensWithN) {
  auto model = builtin("two_state", {{"rho", 0.4}});
  auto small = coupling_report(model, 256, 4, 20000, 1);
  auto large = coupling_report(model, 4096, 10, 20000, 1);
  EXPECT_LE(large.gap_median, small.gap_median);
}

TEST(CouplingReport, NeedsExactTier) {
  EXPECT_THROW(coupling_report(builtin("moving_average", {{"c", 1}, {"L_trunc", 3}}), 64, 2, 1000, 1), Error);
}
