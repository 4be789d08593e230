#include <gtest/gtest.h>

#include "hyperpart/errors.hpp"
#include "hyperpart/metrics.hpp"
#include "oracles.hpp"

namespace hyperpart {
namespace {

TEST(ClusteringError, Examples) {
  const Partition a({0, 0, 1, 1}, 2);
  EXPECT_EQ(clustering_error(a, a), 0);
  EXPECT_EQ(clustering_error(a, Partition({1, 1, 0, 0}, 2)), 0);
  EXPECT_EQ(clustering_error(a, Partition({0, 1, 1, 1}, 2)), 1);
}

TEST(ClusteringError, PadsMismatchedClassCounts) {
  EXPECT_EQ(clustering_error(Partition({0, 0, 1, 1}, 2), Partition({0, 1, 2, 2}, 3)), 1);
  EXPECT_EQ(confusion_matrix(Partition({0, 1}, 2), Partition({0, 0}, 1)).rows(), 2);
  EXPECT_THROW(clustering_error(Partition({0, 1}, 2), Partition({0, 1, 1}, 2)), InvalidArgument);
}

TEST(ClusteringError, MatchesBruteForceAndIsSymmetric) {
  Rng rng(1);
  for (int instance = 0; instance < 300; ++instance) {
    const int n = 1 + static_cast<int>(rng.below(8));
    const int k = 1 + static_cast<int>(rng.below(4));
    const Partition a = testing::random_partition(n, k, rng), b = testing::random_partition(n, k, rng);
    const int err = clustering_error(a, b);
    EXPECT_EQ(err, testing::brute_force_error(a.labels, b.labels, k));
    EXPECT_EQ(err, clustering_error(b, a));
    EXPECT_GE(err, 0);
    EXPECT_LE(err, n);
    std::vector<int> relabeled = b.labels;
    for (int& l : relabeled) l = (l + 1) % k;
    EXPECT_EQ(clustering_error(a, Partition(relabeled, k)), err);
  }
}

TEST(ClusteringError, ZeroOnlyForRelabelings) {
  Rng rng(2);
  for (int instance = 0; instance < 100; ++instance) {
    const Partition a = testing::random_partition(7, 3, rng), b = testing::random_partition(7, 3, rng);
    const auto cm = confusion_matrix(a, b);
    // Equal up to relabeling iff every row and column has at most one nonzero.
    bool matching = true;
    for (int r = 0; r < cm.rows(); ++r) matching &= (cm.row(r).array() > 0).count() <= 1;
    for (int c = 0; c < cm.cols(); ++c) matching &= (cm.col(c).array() > 0).count() <= 1;
    EXPECT_EQ(clustering_error(a, b) == 0, matching);
    EXPECT_EQ(cm.sum(), 7);
  }
}

TEST(ClusteringError, HungarianAgreesWithEnumeration) {
  Rng rng(3);
  for (int instance = 0; instance < 200; ++instance) {
    const int k = 1 + static_cast<int>(rng.below(6));
    const int n = k + static_cast<int>(rng.below(30));
    const Partition a = testing::random_partition(n, k, rng), b = testing::random_partition(n, k, rng);
    EXPECT_EQ(clustering_error_hungarian(a, b), clustering_error_enumerate(a, b));
  }
}

TEST(ClusteringError, HungarianForManyClasses) {
  Rng rng(4);
  std::vector<int> labels(60);
  for (int i = 0; i < 60; ++i) labels[i] = i % 12;
  std::vector<int> shuffled(12);
  std::iota(shuffled.begin(), shuffled.end(), 0);
  for (int i = 11; i > 0; --i) std::swap(shuffled[i], shuffled[rng.below(i + 1)]);
  std::vector<int> permuted(60);
  for (int i = 0; i < 60; ++i) permuted[i] = shuffled[labels[i]];
  permuted[5] = (permuted[5] + 1) % 12;
  EXPECT_EQ(clustering_error(Partition(labels, 12), Partition(permuted, 12)), 1);
}

TEST(Assignment, MaximizesProfit) {
  Eigen::MatrixXd profit(3, 3);
  profit << 1, 5, 0, 4, 1, 0, 0, 0, 3;
  EXPECT_EQ(max_weight_assignment(profit), (std::vector<int>{1, 0, 2}));
}

TEST(NormalizedAssociativity, SingleClusterIsOneOverM) {
  Rng rng(5);
  for (const int m : {2, 3, 4}) {
    const auto h = testing::random_hypergraph(7, m, 0.5, rng);
    EXPECT_NEAR(normalized_associativity(h, Partition(std::vector<int>(7, 0), 1)), 1.0 / m, 1e-14);
  }
}

TEST(NormalizedAssociativity, SplitEdgeHasNoAssociation) {
  const WeightedUniformHypergraph h(3, 3, {0, 1, 2}, {1.0});
  EXPECT_EQ(normalized_associativity(h, Partition({0, 0, 1}, 2)), 0.0);
}

TEST(NormalizedAssociativity, ZeroWeightsGiveZero) {
  const WeightedUniformHypergraph h(5, 3, {0, 1, 2, 2, 3, 4}, {0.0, 0.0});
  const std::vector<double> betas{0.2, 0.3, 0.5};
  for (const auto& p : {Partition({0, 0, 0, 0, 0}, 1), Partition({0, 1, 0, 1, 1}, 2)}) {
    EXPECT_EQ(normalized_associativity(h, p), 0.0);
    EXPECT_EQ(tensor_trace_nassoc(h, p, betas), 0.0);
  }
}

TEST(TensorTrace, SingleEdgeSingleCluster) {
  const WeightedUniformHypergraph h(3, 3, {0, 1, 2}, {1.0});
  const std::vector<double> betas(3, 1.0 / 3);
  EXPECT_NEAR(tensor_trace_nassoc(h, Partition({0, 0, 0}, 1), betas), 1.0 / 3, 1e-15);
}

TEST(TensorTrace, AgreesWithAssociativityForEveryBeta) {
  Rng rng(6);
  for (int instance = 0; instance < 30; ++instance) {
    const int m = 2 + instance % 2;
    const int n = 4 + static_cast<int>(rng.below(5));
    const auto h = testing::random_hypergraph(n, m, 0.6, rng);
    const Partition p = testing::random_partition(n, 1 + static_cast<int>(rng.below(3)), rng);
    std::vector<double> betas(static_cast<std::size_t>(m));
    double total = 0.0;
    for (double& b : betas) total += (b = rng.uniform());
    for (double& b : betas) b /= total;
    EXPECT_NEAR(tensor_trace_nassoc(h, p, betas), normalized_associativity(h, p), 1e-12);
  }
}

TEST(TensorTrace, BetaChoiceDoesNotMatter) {
  Rng rng(7);
  const auto h = testing::random_hypergraph(6, 3, 0.7, rng);
  const Partition p({0, 1, 0, 1, 1, 0}, 2);
  const std::vector<double> half{0.5, 0.5, 0.0}, third(3, 1.0 / 3);
  EXPECT_NEAR(tensor_trace_nassoc(h, p, half), tensor_trace_nassoc(h, p, third), 1e-12);
  const auto h7 = testing::random_hypergraph(7, 3, 0.5, rng);
  const Partition p7 = testing::random_partition(7, 3, rng);
  EXPECT_NEAR(tensor_trace_nassoc(h7, p7, third), normalized_associativity(h7, p7), 1e-12);
}

TEST(TensorTrace, Rejects) {
  Rng rng(8);
  const auto big = testing::random_hypergraph(11, 2, 0.3, rng);
  const std::vector<double> pair{0.5, 0.5};
  EXPECT_THROW(tensor_trace_nassoc(big, Partition(std::vector<int>(11, 0), 1), pair), SizeError);
  const auto h = testing::random_hypergraph(5, 2, 0.5, rng);
  const std::vector<double> bad{0.7, 0.7};
  EXPECT_THROW(tensor_trace_nassoc(h, Partition(std::vector<int>(5, 0), 1), bad), InvalidArgument);
}

TEST(NormalizedAssociativity, GroundTruthBeatsRandomPartitions) {
  // Cross-class weight must be small: N-Assoc rewards big clusters otherwise.
  const PlantedSpec spec = PlantedSpec::balanced_pq(12, 3, 3, 0.8, 0.01, 1.0);
  const auto h = testing::mean_hypergraph(spec);
  const double truth = normalized_associativity(h, spec.psi);
  Rng rng(9);
  for (int t = 0; t < 200; ++t) {
    const Partition p = testing::random_partition(12, 3, rng);
    if (clustering_error(p, spec.psi) == 0) continue;
    EXPECT_LT(normalized_associativity(h, p), truth);
  }
}

}  // namespace
}  // namespace hyperpart
