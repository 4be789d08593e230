#include <gtest/gtest.h>

#include <set>

#include "hyperpart/errors.hpp"
#include "hyperpart/hypergraph.hpp"
#include "hyperpart/random.hpp"
#include "oracles.hpp"

namespace hyperpart {
namespace {

using Tuples = std::vector<std::vector<Vertex>>;

Tuples collect(int n, int m) {
  Tuples out;
  for (const auto& edge : enumerate_edges(n, m)) out.push_back(edge);
  return out;
}

TEST(EnumerateEdges, SmallCases) {
  EXPECT_EQ(collect(3, 2), (Tuples{{0, 1}, {0, 2}, {1, 2}}));
  EXPECT_EQ(collect(3, 3), (Tuples{{0, 1, 2}}));
  const Tuples five = collect(5, 3);
  ASSERT_EQ(five.size(), 10u);
  EXPECT_EQ(five.front(), (std::vector<Vertex>{0, 1, 2}));
  EXPECT_EQ(five.back(), (std::vector<Vertex>{2, 3, 4}));
}

TEST(EnumerateEdges, LexicographicSortedAndComplete) {
  for (int n = 2; n <= 8; ++n) {
    for (int m = 2; m <= n; ++m) {
      const Tuples all = collect(n, m);
      EXPECT_EQ(all.size(), binomial(n, m));
      EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
      EXPECT_EQ(std::set<std::vector<Vertex>>(all.begin(), all.end()).size(), all.size());
      for (const auto& t : all) EXPECT_TRUE(std::is_sorted(t.begin(), t.end()));
    }
  }
}

TEST(EnumerateEdges, RejectsBadOrder) {
  EXPECT_THROW(enumerate_edges(3, 4), InvalidArgument);
  EXPECT_THROW(enumerate_edges(3, 1), InvalidArgument);
}

TEST(Combinatorics, Binomial) {
  EXPECT_EQ(binomial(5, 3), 10u);
  EXPECT_EQ(binomial(60, 3), 34220u);
  EXPECT_EQ(binomial(4, 7), 0u);
  EXPECT_EQ(binomial(250, 4), 158882750u);
  EXPECT_THROW(binomial(200, 100), SizeError);
  EXPECT_DOUBLE_EQ(binomial_real(49, 2), 1176.0);
  EXPECT_DOUBLE_EQ(factorial(4), 24.0);
  EXPECT_DOUBLE_EQ(factorial(0), 1.0);
}

TEST(Combinatorics, RankIsABijection) {
  for (int m = 1; m <= 4; ++m) {
    const int n = 9;
    std::set<std::uint64_t> ranks;
    std::vector<Vertex> back(static_cast<std::size_t>(m));
    for_each_subset(n, m, [&](std::span<const Vertex> tuple) {
      const std::uint64_t rank = subset_rank(tuple);
      ranks.insert(rank);
      subset_unrank(rank, m, back);
      EXPECT_TRUE(std::equal(back.begin(), back.end(), tuple.begin()));
    });
    EXPECT_EQ(ranks.size(), binomial(n, m));
    EXPECT_EQ(*ranks.rbegin(), binomial(n, m) - 1);
  }
}

TEST(Combinatorics, UnrankLargeIds) {
  // C(70000, 4) ~ 1e18 still fits in 64 bits.
  std::vector<Vertex> tuple{3, 1000, 60000, 69999};
  std::vector<Vertex> back(4);
  subset_unrank(subset_rank(tuple), 4, back);
  EXPECT_EQ(back, tuple);
}

TEST(Hypergraph, ValidatesInvariants) {
  EXPECT_NO_THROW(WeightedUniformHypergraph(4, 3, {0, 1, 2, 1, 2, 3}, {0.5, 1.0}));
  EXPECT_THROW(WeightedUniformHypergraph(4, 3, {0, 2, 1}, {0.5}), DataError);        // unsorted
  EXPECT_THROW(WeightedUniformHypergraph(4, 3, {0, 1, 4}, {0.5}), DataError);        // out of range
  EXPECT_THROW(WeightedUniformHypergraph(4, 3, {0, 1, 1}, {0.5}), DataError);        // repeated id
  EXPECT_THROW(WeightedUniformHypergraph(4, 3, {0, 1, 2, 0, 1, 2}, {0.5, 0.5}), DataError);  // duplicate
  EXPECT_THROW(WeightedUniformHypergraph(4, 3, {0, 1, 2}, {1.5}), DataError);        // weight > 1
  EXPECT_THROW(WeightedUniformHypergraph(4, 3, {0, 1, 2}, {-0.1}), DataError);       // weight < 0
  EXPECT_THROW(WeightedUniformHypergraph(4, 3, {0, 1, 2}, {0.5, 0.5}), DataError);   // length mismatch
}

TEST(Hypergraph, DegreesDoubleCountEdges) {
  Rng rng(11);
  const auto h = testing::random_hypergraph(9, 3, 0.4, rng);
  const auto degrees = h.vertex_degrees();
  double total = 0.0;
  for (const double d : degrees) total += d;
  EXPECT_NEAR(total, 3.0 * h.total_weight(), 1e-12);
}

TEST(Oracle, RoundTripsThroughHypergraph) {
  Rng rng(5);
  const auto h = testing::random_hypergraph(8, 3, 0.5, rng);
  const EdgeWeightOracle oracle = oracle_from_hypergraph(h);
  EXPECT_EQ(oracle.materialize(), h);
  const std::vector<Vertex> probe{0, 1, 2};
  EXPECT_EQ(oracle(probe), oracle(probe));
}

TEST(PartitionType, ValidatesLabels) {
  EXPECT_THROW(Partition({0, 2}, 2), DataError);
  EXPECT_THROW(Partition({0, -1}, 2), DataError);
  EXPECT_EQ(Partition({0, 1, 1}, 3).class_sizes(), (std::vector<int>{1, 2, 0}));
}

TEST(PartitionType, BalancedSizes) {
  EXPECT_EQ(balanced_partition(10, 3).class_sizes(), (std::vector<int>{4, 3, 3}));
  EXPECT_EQ(balanced_partition(6, 2).labels, (std::vector<int>{0, 0, 0, 1, 1, 1}));
}

TEST(Random, SplitMixReferenceStream) {
  // First outputs of SplitMix64 seeded with 0 (published reference values).
  Rng rng(0);
  EXPECT_EQ(rng.next(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(rng.next(), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(rng.next(), 0x06C45D188009454FULL);
}

TEST(Random, IdenticalSeedsIdenticalStreams) {
  Rng a(RngSeed{42}), b(RngSeed{42});
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.next(), b.next());
  }
  EXPECT_NE(derive_seed(RngSeed{1}, 0).value, derive_seed(RngSeed{1}, 1).value);
}

TEST(Random, BelowIsInRangeAndRoughlyUniform) {
  Rng rng(3);
  std::vector<int> counts(7, 0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (const int c : counts) EXPECT_NEAR(c, draws / 7.0, 5.0 * std::sqrt(draws / 7.0));
}

TEST(Random, NormalMoments) {
  Rng rng(9);
  double sum = 0.0, sum_sq = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const double x = rng.normal();
    sum += x;
    sum_sq += x * x;
  }
  EXPECT_NEAR(sum / draws, 0.0, 0.02);
  EXPECT_NEAR(sum_sq / draws, 1.0, 0.02);
}

}  // namespace
}  // namespace hyperpart
