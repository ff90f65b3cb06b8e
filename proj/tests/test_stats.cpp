// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "growthsim/rng.hpp"
#include "growthsim/stats.hpp"

using namespace growthsim;

TEST(Wilson, KnownValues) {
  // 8 of 10 at 95%: (0.4902, 0.9433).
  const auto ci = wilson_interval(8, 10);
  EXPECT_NEAR(ci.lo, 0.49016, 1e-5);
  EXPECT_NEAR(ci.hi, 0.94331, 1e-5);
  const auto zero = wilson_interval(0, 100);
  EXPECT_EQ(zero.lo, 0.0);
  EXPECT_GT(zero.hi, 0.0);
  EXPECT_EQ(wilson_interval(0, 0).hi, 1.0);
  EXPECT_THROW(wilson_interval(3, 2), InvalidArgument);
  EXPECT_TRUE(ci.contains(0.8));
  EXPECT_TRUE(ci.overlaps(Interval{0.9, 1.0}));
  EXPECT_FALSE(ci.overlaps(Interval{0.95, 1.0}));
}

TEST(Moments, MeanVarianceQuantiles) {
  const auto m = moments({1, 2, 3, 4});
  EXPECT_EQ(m.n, 4u);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_DOUBLE_EQ(m.variance, 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.standard_error(), std::sqrt(5.0 / 12.0));
  EXPECT_EQ(moments({}).n, 0u);
  EXPECT_DOUBLE_EQ(quantile_sorted({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile_sorted({1, 2, 3, 4}, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile_sorted({7}, 0.3), 7.0);
  EXPECT_TRUE(std::isnan(quantile_sorted({}, 0.5)));
}

TEST(Kolmogorov, KnownQuantiles) {
  EXPECT_NEAR(kolmogorov_q(1.3581), 0.05, 1e-4);
  EXPECT_NEAR(kolmogorov_q(1.6276), 0.01, 1e-4);
  EXPECT_EQ(kolmogorov_q(0.0), 1.0);
}

TEST(KsTest, AcceptsRightLawRejectsWrongOne) {
  Rng rng(3);
  std::vector<double> xs;
  for (int i = 0; i < 5000; ++i) xs.push_back(rng.exponential(2.0));
  EXPECT_GT(ks_test(xs, [](double x) { return 1 - std::exp(-2 * x); }).p_value, 0.01);
  EXPECT_LT(ks_test(xs, [](double x) { return 1 - std::exp(-2.3 * x); }).p_value, 1e-6);
}

TEST(Rng, SeedMixingAndStreams) {
  EXPECT_NE(mix64(1, 0), mix64(1, 1));
  EXPECT_NE(mix64(1, 0), mix64(2, 0));
  static_assert(mix64(7, 3) == mix64(7, 3));
  Rng a(11), b(11);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.uniform(), b.uniform());
  Rng c(12);
  for (int i = 0; i < 100000; ++i) {
    const double u = c.uniform01();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}
