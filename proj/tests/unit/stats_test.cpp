#include <gtest/gtest.h>

#include <cmath>

#include "otranks/rng.hpp"
#include "otranks/stats.hpp"
#include "otranks/types.hpp"

namespace otranks {
namespace {

TEST(Kolmogorov, KnownValues) {
  // Tabulated upper-tail probabilities of the Kolmogorov distribution.
  EXPECT_NEAR(kolmogorov_sf(0.5), 0.9639452436648751, 1e-10);
  EXPECT_NEAR(kolmogorov_sf(1.0), 0.26999967167735456, 1e-10);
  EXPECT_NEAR(kolmogorov_sf(1.36), 0.049485876755377876, 1e-10);
  EXPECT_NEAR(kolmogorov_sf(1.63), 0.009846364888486529, 1e-10);
  EXPECT_EQ(kolmogorov_sf(0.0), 1.0);
  // Both series agree where they switch.
  EXPECT_NEAR(kolmogorov_sf(1.18 - 1e-12), kolmogorov_sf(1.18), 1e-10);
}

TEST(Ks, UniformSampleAccepted) {
  RandomStream rng(1);
  std::vector<double> v(5000);
  for (auto& x : v) x = rng.uniform();
  EXPECT_GT(ks_uniform(v).p_value, 0.001);
  for (auto& x : v) x = x * x;
  EXPECT_LT(ks_uniform(v).p_value, 1e-6);
}

TEST(Ks, StatisticByHand) {
  const std::vector<double> v{0.1, 0.4, 0.7};
  EXPECT_NEAR(ks_uniform(v).statistic, std::max({1.0 / 3 - 0.1, 0.4 - 1.0 / 3, 2.0 / 3 - 0.4, 0.7 - 2.0 / 3, 1.0 - 0.7}),
              1e-15);
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  EXPECT_DOUBLE_EQ(ks_two_sample(a, b).statistic, 1.0);
  EXPECT_DOUBLE_EQ(ks_two_sample(a, a).statistic, 0.0);
}

TEST(Ks, TwoSampleLevel) {
  RandomStream rng(2);
  int rejections = 0;
  for (int rep = 0; rep < 400; ++rep) {
    std::vector<double> a(200), b(300);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = rng.normal();
    if (ks_two_sample(a, b).p_value < 0.05) ++rejections;
  }
  // Binomial(400, 0.05): mean 20, sd 4.4.
  EXPECT_LT(rejections, 36);
}

TEST(ChiSquare, Values) {
  const std::vector<std::size_t> flat{10, 10, 10, 10};
  EXPECT_NEAR(chi_square_uniform(flat), 1.0, 1e-12);
  // Statistic 5 on one degree of freedom.
  const std::vector<std::size_t> skew{15, 5};
  EXPECT_NEAR(chi_square_uniform(skew), std::erfc(std::sqrt(5.0 / 2.0)), 1e-12);
  EXPECT_THROW(chi_square_uniform(std::vector<std::size_t>{3}), InputError);
}

TEST(Summary, MedianMeanSlope) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
  const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
  EXPECT_DOUBLE_EQ(mean(x), 2.5);
  EXPECT_DOUBLE_EQ(ols_slope(x, y), 2.0);
  EXPECT_THROW(median({}), InputError);
  EXPECT_THROW(ols_slope(std::vector<double>{1, 1}, std::vector<double>{1, 2}), InputError);
}

}  // namespace
}  // namespace otranks
