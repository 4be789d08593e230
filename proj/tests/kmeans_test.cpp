#include <gtest/gtest.h>

#include "hyperpart/errors.hpp"
#include "hyperpart/kmeans.hpp"
#include "hyperpart/metrics.hpp"
#include "oracles.hpp"

namespace hyperpart {
namespace {

TEST(KMeans, NearOptimalOnSmallOneDimensionalInstances) {
  Rng rng(123);
  for (int instance = 0; instance < 50; ++instance) {
    const int n = 2 + static_cast<int>(rng.below(9));
    Eigen::MatrixXd points(n, 1);
    for (int i = 0; i < n; ++i) points(i, 0) = rng.uniform(-5.0, 5.0);
    const double optimum = testing::brute_force_kmeans_cost(points, 2);
    const KMeansResult result = kmeans(points, 2, RngSeed{static_cast<std::uint64_t>(instance)});
    EXPECT_LE(result.cost, optimum * 1.05 + 1e-12) << "instance " << instance;
  }
}

TEST(KMeans, NoSinglePointMoveImproves) {
  Rng rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 6 + static_cast<int>(rng.below(30));
    const int k = 2 + static_cast<int>(rng.below(3));
    Eigen::MatrixXd points(n, 2);
    for (int i = 0; i < n; ++i) points.row(i) << rng.normal(), rng.normal();
    KMeansOptions options;
    options.restarts = 1;
    const KMeansResult r = kmeans(points, k, RngSeed{static_cast<std::uint64_t>(trial)}, options);
    Partition moved = r.partition;
    for (int i = 0; i < n; ++i) {
      const int own = moved.labels[i];
      for (int c = 0; c < k; ++c) {
        moved.labels[i] = c;
        EXPECT_GE(kmeans_cost(points, moved), r.cost - 1e-9) << "trial " << trial << " point " << i;
      }
      moved.labels[i] = own;
    }
  }
}

TEST(KMeans, ReportedCostMatchesLabels) {
  Rng rng(4);
  Eigen::MatrixXd points(40, 3);
  for (Eigen::Index i = 0; i < points.size(); ++i) points.data()[i] = rng.normal();
  const KMeansResult result = kmeans(points, 4, RngSeed{1});
  EXPECT_NEAR(result.cost, kmeans_cost(points, result.partition), 1e-10);
  EXPECT_EQ(result.restart_costs.size(), 10u);
  for (std::size_t t = 1; t < result.cost_trace.size(); ++t) {
    EXPECT_LE(result.cost_trace[t], result.cost_trace[t - 1] + 1e-12);
  }
}

TEST(KMeans, SeparatedBlobsRecovered) {
  Rng rng(8);
  const int per = 15;
  Eigen::MatrixXd points(3 * per, 2);
  std::vector<int> truth;
  const double centers[3][2] = {{0, 0}, {10, 0}, {0, 10}};
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < per; ++i) {
      points(c * per + i, 0) = centers[c][0] + 0.3 * rng.normal();
      points(c * per + i, 1) = centers[c][1] + 0.3 * rng.normal();
      truth.push_back(c);
    }
  }
  const KMeansResult result = kmeans(points, 3, RngSeed{2});
  EXPECT_EQ(clustering_error(Partition(truth, 3), result.partition), 0);
  EXPECT_FALSE(result.degenerate);
}

TEST(KMeans, DeterministicPerSeed) {
  Rng rng(5);
  Eigen::MatrixXd points(30, 2);
  for (Eigen::Index i = 0; i < points.size(); ++i) points.data()[i] = rng.uniform();
  EXPECT_EQ(kmeans(points, 3, RngSeed{9}).partition, kmeans(points, 3, RngSeed{9}).partition);
}

TEST(KMeans, EachPointOwnClusterWhenKEqualsN) {
  const Eigen::MatrixXd points = Eigen::MatrixXd::Zero(4, 2);
  const KMeansResult result = kmeans(points, 4, RngSeed{1});
  EXPECT_EQ(result.partition.labels, (std::vector<int>{0, 1, 2, 3}));
  EXPECT_EQ(result.cost, 0.0);
}

TEST(KMeans, FlagsTooFewDistinctPoints) {
  Eigen::MatrixXd points(6, 1);
  points << 1, 1, 1, 2, 2, 2;
  const KMeansResult result = kmeans(points, 3, RngSeed{1});
  EXPECT_TRUE(result.degenerate);
  EXPECT_NEAR(result.cost, 0.0, 1e-15);
}

TEST(KMeans, RejectsTooFewPoints) {
  EXPECT_THROW(kmeans(Eigen::MatrixXd::Zero(2, 1), 3, RngSeed{1}), InvalidArgument);
  EXPECT_THROW(kmeans(Eigen::MatrixXd::Zero(2, 1), 0, RngSeed{1}), InvalidArgument);
}

}  // namespace
}  // namespace hyperpart
