#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "otranks/gof_tests.hpp"
#include "otranks/stats.hpp"
#include "otranks/transport_maps.hpp"
#include "test_support.hpp"

namespace otranks {
namespace {

PointSet shifted(const PointSet& p, double dx, double dy) {
  PointSet out(2);
  for (std::size_t i = 0; i < p.size(); ++i) out.push_back(Vector{p[i][0] + dx, p[i][1] + dy});
  return out;
}

PointSet shuffled(const PointSet& p, std::uint64_t seed) {
  std::vector<std::size_t> idx(p.size());
  std::iota(idx.begin(), idx.end(), 0);
  RandomStream rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng.engine());
  PointSet out(p.dim());
  for (auto i : idx) out.push_back(p[i]);
  return out;
}

TEST(PermutationPvalue, CountingFormula) {
  std::vector<double> reps(99);
  std::iota(reps.begin(), reps.end(), 0.0);
  EXPECT_DOUBLE_EQ(permutation_pvalue(1000.0, reps), 0.01);
  EXPECT_DOUBLE_EQ(permutation_pvalue(-1.0, reps), 1.0);
  EXPECT_DOUBLE_EQ(permutation_pvalue(49.0, reps), 51.0 / 100.0);
}

TEST(PermutationTest, RejectsSmallB) {
  EXPECT_THROW(permutation_test(0.0, 18, 1, [](std::size_t, std::uint64_t) { return 0.0; }), InputError);
}

TEST(PermutationTest, ReplicateSeedsArePure) {
  auto fn = [](std::size_t, std::uint64_t seed) { return RandomStream(seed).uniform(); };
  std::vector<double> one, many;
  {
    testing::ScopedEnv env("OTRANKS_THREADS", "1");
    one = permutation_test(0.5, 40, 9, fn).replicates;
  }
  {
    testing::ScopedEnv env("OTRANKS_THREADS", "6");
    many = permutation_test(0.5, 40, 9, fn).replicates;
  }
  EXPECT_EQ(one, many);
  for (std::size_t b = 0; b < 40; ++b) EXPECT_EQ(one[b], RandomStream(derive_seed(9, b)).uniform());
}

TEST(PermutationTest, ExactUnderExchangeability) {
  // Observed and replicates are i.i.d. noise, so p is uniform on {1/20, ..., 1}.
  std::vector<std::size_t> counts(20, 0);
  for (std::uint64_t run = 0; run < 2000; ++run) {
    const double observed = RandomStream(derive_seed(run, 999)).uniform();
    const auto r = permutation_test(observed, 19, derive_seed(run, 1000),
                                    [](std::size_t, std::uint64_t seed) { return RandomStream(seed).uniform(); });
    const auto k = static_cast<std::size_t>(std::lround(r.p_value * 20.0)) - 1;
    ASSERT_LT(k, 20u);
    ++counts[k];
  }
  EXPECT_GT(chi_square_uniform(counts), 0.001);
}

TEST(NormalizedStatistic, Arithmetic) {
  EXPECT_EQ(normalized_statistic(0.3, 100, 0.3), 0.0);
  EXPECT_DOUBLE_EQ(normalized_statistic(0.5, 3, 0.2), 3.0 / std::log(3.0) * 0.3);
  EXPECT_DOUBLE_EQ(normalized_statistic(0.2 + 2 * 0.05, 50, 0.2), 2 * normalized_statistic(0.2 + 0.05, 50, 0.2));
  EXPECT_THROW(normalized_statistic(0.1, 1, 0.0), InputError);
}

TEST(TwoSample, IdenticalSamplesGiveZero) {
  const auto x = testing::gaussian_points(30, 2, 1);
  TwoSampleConfig cfg;
  cfg.permutations = 19;
  cfg.seed = 4;
  const auto r = two_sample_test(x, x, cfg);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
  cfg.exact2d = true;
  EXPECT_EQ(two_sample_test(x, x, cfg).statistic, 0.0);
}

TEST(TwoSample, StatisticBounds) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto x = testing::gaussian_points(20, 2, 10 + s);
    const auto y = shifted(testing::gaussian_points(25, 2, 20 + s), 1.5 * s, 0.0);
    TwoSampleConfig cfg;
    cfg.permutations = 0;
    cfg.mc_count = 2000;
    cfg.seed = s;
    const auto r = two_sample_test(x, y, cfg);
    EXPECT_GE(r.statistic, 0.0);
    EXPECT_LE(r.statistic, 2.0);
  }
}

TEST(TwoSample, MonteCarloAgreesWithExactOnSeparatedClusters) {
  const auto x = testing::gaussian_points(50, 2, 30);
  const auto y = shifted(testing::gaussian_points(50, 2, 31), 10.0, 10.0);
  TwoSampleConfig cfg;
  cfg.permutations = 0;
  cfg.seed = 5;
  const auto mc = two_sample_test(x, y, cfg);
  cfg.exact2d = true;
  const auto exact = two_sample_test(x, y, cfg);
  EXPECT_GT(mc.standard_error, 0.0);
  EXPECT_NEAR(mc.statistic, exact.statistic, 4 * mc.standard_error);
}

TEST(TwoSampleExact, SingleCells) {
  const auto cube = ReferenceMeasure::cube(2);
  const auto fx = fit(PointSet::from_rows({{0.1, 0.2}}), cube);
  const auto fy = fit(PointSet::from_rows({{3.0, -1.0}}), cube);
  const std::vector<Vector> rx{{0.2, 0.9}}, ry{{0.7, 0.4}};
  EXPECT_NEAR(two_sample_exact_2d(fx, fy, rx, ry), 0.25 + 0.25, 1e-15);
}

TEST(TwoSampleExact, IntersectionsPartitionAndMatchMonteCarlo) {
  const auto cube = ReferenceMeasure::cube(2);
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto fx = fit(testing::gaussian_points(10, 2, 40 + s), cube);
    const auto fy = fit(testing::gaussian_points(10, 2, 50 + s), cube);
    // Constant rank difference of length one: the double sum is the total intersection area.
    const std::vector<Vector> ones(10, Vector{1.0, 0.0}), zeros(10, Vector{0.0, 0.0});
    EXPECT_NEAR(two_sample_exact_2d(fx, fy, ones, zeros), 1.0, 1e-8);
    std::vector<Vector> rx(10), ry(10);
    RandomStream rng(60 + s);
    for (auto& v : rx) v = {rng.uniform(), rng.uniform()};
    for (auto& v : ry) v = {rng.uniform(), rng.uniform()};
    const double exact = two_sample_exact_2d(fx, fy, rx, ry);
    const auto mc = two_sample_mc(fx, fy, rx, ry, 1000000, 70 + s);
    EXPECT_NEAR(mc.mean, exact, 4 * mc.standard_error);
  }
}

TEST(TwoSample, RowOrderInvariance) {
  const auto x = testing::gaussian_points(25, 2, 80);
  const auto y = shifted(testing::gaussian_points(30, 2, 81), 0.5, 0.0);
  TwoSampleConfig cfg;
  cfg.permutations = 19;
  cfg.mc_count = 3000;
  cfg.seed = 6;
  const auto a = two_sample_test(x, y, cfg);
  const auto b = two_sample_test(shuffled(x, 1), shuffled(y, 2), cfg);
  EXPECT_EQ(a.statistic, b.statistic);
  cfg.exact2d = true;
  const auto c = two_sample_test(x, y, cfg);
  const auto e = two_sample_test(shuffled(x, 3), shuffled(y, 4), cfg);
  EXPECT_EQ(c.statistic, e.statistic);
}

TEST(TwoSample, CommonAffineMapLeavesCellsAndStatisticUnchanged) {
  const auto cube = ReferenceMeasure::cube(2);
  const auto x = testing::gaussian_points(20, 2, 90);
  const auto y = shifted(testing::gaussian_points(20, 2, 91), 1.0, 0.0);
  auto affine = [](const PointSet& p) {
    PointSet out(2);
    for (std::size_t i = 0; i < p.size(); ++i) out.push_back(Vector{2.5 * p[i][0] - 1.0, 2.5 * p[i][1] + 3.0});
    return out;
  };
  const SolverConfig solver;
  const auto fx = fit_sample(x, cube, solver), fy = fit_sample(y, cube, solver);
  const auto gx = fit_sample(affine(x), cube, solver), gy = fit_sample(affine(y), cube, solver);
  ASSERT_EQ(fx.site_of_row, gx.site_of_row);
  ASSERT_EQ(fy.site_of_row, gy.site_of_row);
  std::vector<Vector> rx(20), ry(20);
  RandomStream rng(92);
  for (auto& v : rx) v = {rng.uniform(), rng.uniform()};
  for (auto& v : ry) v = {rng.uniform(), rng.uniform()};
  EXPECT_NEAR(two_sample_exact_2d(fx.fit, fy.fit, rx, ry), two_sample_exact_2d(gx.fit, gy.fit, rx, ry), 1e-6);
}

TEST(TwoSample, RankedQuantilesHaveUniformMarginals) {
  const auto cube = ReferenceMeasure::cube(2);
  std::vector<double> c0, c1;
  for (std::uint64_t rep = 0; rep < 500; ++rep) {
    const auto x = testing::gaussian_points(15, 2, derive_seed(rep, 1));
    const auto y = testing::gaussian_points(15, 2, derive_seed(rep, 2));
    const auto pooled = pooled_ranks(x, y, cube, {}, derive_seed(rep, 3));
    const auto fx = fit_sample(x, cube, {});
    RandomStream rng(derive_seed(rep, 4));
    const Vector u{rng.uniform(), rng.uniform()};
    const std::size_t site = fx.fit.potential().assign(u);
    const auto row = static_cast<std::size_t>(
        std::find(fx.site_of_row.begin(), fx.site_of_row.end(), site) - fx.site_of_row.begin());
    const Vector& r = pooled.site_rank[pooled.pooled.site_of_row[row]];
    c0.push_back(r[0]);
    c1.push_back(r[1]);
  }
  EXPECT_GT(ks_uniform(c0).p_value, 0.001);
  EXPECT_GT(ks_uniform(c1).p_value, 0.001);
}

TEST(TwoSample, ConsistencyDirection) {
  std::vector<double> null_medians;
  for (std::size_t n : {50u, 100u, 200u}) {
    std::vector<double> t0, t1;
    for (std::uint64_t rep = 0; rep < 12; ++rep) {
      TwoSampleConfig cfg;
      cfg.permutations = 0;
      cfg.mc_count = 2000;
      cfg.seed = rep;
      const auto x = testing::gaussian_points(n, 2, derive_seed(n, 3 * rep));
      const auto y0 = testing::gaussian_points(n, 2, derive_seed(n, 3 * rep + 1));
      const auto y1 = shifted(testing::gaussian_points(n, 2, derive_seed(n, 3 * rep + 2)), 1.0, 0.0);
      t0.push_back(two_sample_test(x, y0, cfg).statistic);
      t1.push_back(two_sample_test(x, y1, cfg).statistic);
    }
    EXPECT_GT(median(t1), median(t0)) << "n = " << n;
    null_medians.push_back(median(t0));
  }
  EXPECT_GT(null_medians[0], null_medians[1]);
  EXPECT_GT(null_medians[1], null_medians[2]);
}

TEST(TwoSample, InputChecks) {
  const auto x = testing::gaussian_points(10, 2, 100);
  TwoSampleConfig cfg;
  cfg.mc_count = 50;
  EXPECT_THROW(two_sample_test(x, x, cfg), InputError);
  cfg.mc_count = 1000;
  EXPECT_THROW(two_sample_test(x, testing::gaussian_points(10, 3, 101), cfg), DimensionMismatch);
  EXPECT_THROW(two_sample_test(x, PointSet::from_rows({{0.0, 0.0}}), cfg), InputError);
  cfg.exact2d = true;
  EXPECT_THROW(two_sample_test(testing::gaussian_points(10, 3, 102), testing::gaussian_points(10, 3, 103), cfg),
               InputError);
}

TEST(Independence, ContributionsAndDeterminism) {
  const auto z = testing::gaussian_points(60, 2, 110);
  IndependenceConfig cfg;
  cfg.split = {1, 1};
  cfg.permutations = 19;
  cfg.seed = 3;
  const auto r = independence_test(z, cfg);
  ASSERT_EQ(r.contributions.size(), 60u);
  for (double c : r.contributions) {
    EXPECT_GE(c, 0.0);
    EXPECT_LE(c, 2.0);
  }
  EXPECT_DOUBLE_EQ(r.statistic, mean(r.contributions));
  const auto again = independence_test(z, cfg);
  EXPECT_EQ(r.statistic, again.statistic);
  EXPECT_EQ(r.replicates, again.replicates);
  EXPECT_EQ(r.p_value, again.p_value);
}

TEST(Independence, RowOrderInvariance) {
  const auto z = testing::gaussian_points(50, 2, 111);
  IndependenceConfig cfg;
  cfg.split = {1, 1};
  cfg.permutations = 0;
  const auto a = independence_test(z, cfg);
  const auto b = independence_test(shuffled(z, 5), cfg);
  EXPECT_NEAR(a.statistic, b.statistic, 1e-15);
}

TEST(Independence, ComonotoneExceedsIndependent) {
  std::vector<double> t0, t1;
  for (std::uint64_t rep = 0; rep < 50; ++rep) {
    IndependenceConfig cfg;
    cfg.split = {1, 1};
    cfg.permutations = 0;
    cfg.seed = rep;
    const auto z0 = testing::gaussian_points(500, 2, derive_seed(rep, 1));
    PointSet z1(2);
    for (std::size_t i = 0; i < z0.size(); ++i) z1.push_back(Vector{z0[i][0], z0[i][0]});
    t0.push_back(independence_test(z0, cfg).statistic);
    t1.push_back(independence_test(z1, cfg).statistic);
  }
  EXPECT_GT(median(t1), 5 * median(t0));
}

TEST(Independence, ThreeBlocksAndSplitChecks) {
  const auto z = testing::gaussian_points(40, 3, 112);
  IndependenceConfig cfg;
  cfg.split = {1, 1, 1};
  cfg.permutations = 19;
  const auto r = independence_test(z, cfg);
  for (double c : r.contributions) EXPECT_LE(c, 3.0);
  EXPECT_EQ(r.replicates.size(), 19u);
  cfg.split = {1, 2, 1};
  EXPECT_THROW(independence_test(z, cfg), InputError);
  cfg.split = {3};
  EXPECT_THROW(independence_test(z, cfg), InputError);
  cfg.split = {0, 3};
  EXPECT_THROW(independence_test(z, cfg), InputError);
}

}  // namespace
}  // namespace otranks
