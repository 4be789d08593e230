#include <gtest/gtest.h>

#include <cfloat>
#include <cmath>
#include <numeric>

#include "hyperpart/errors.hpp"
#include "hyperpart/metrics.hpp"
#include "hyperpart/subspace.hpp"
#include "oracles.hpp"

namespace hyperpart {
namespace {

Eigen::MatrixXd gaussian(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd x(rows, cols);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  return x;
}

Eigen::MatrixXd random_orthogonal(int d, Rng& rng) {
  return Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian(d, d, rng)).householderQ();
}

PointCloud lines_cloud(int points_per, RngSeed seed) {
  return generate_subspaces(SubspaceSpec{.k = 3, .r = 1, .points_per = points_per, .noise_sigma = 0.0, .ambient_dim = 3},
                            seed);
}

TEST(Generate, NoiselessPointsLieInTheirSubspace) {
  const PointCloud cloud =
      generate_subspaces(SubspaceSpec{.k = 5, .r = 3, .points_per = 20, .noise_sigma = 0.0, .ambient_dim = 5}, RngSeed{1});
  ASSERT_EQ(cloud.n(), 100);
  ASSERT_EQ(cloud.bases.size(), 5u);
  ASSERT_TRUE(cloud.labels.has_value());
  for (int c = 0; c < 5; ++c) {
    const Eigen::MatrixXd& b = cloud.bases[c];
    EXPECT_TRUE((b.transpose() * b).isIdentity(1e-12));
    EXPECT_LE(testing::residual_to_basis(cloud.points.middleCols(20 * c, 20), b), 1e-12);
    for (int i = 20 * c; i < 20 * (c + 1); ++i) EXPECT_EQ(cloud.labels->labels[i], c);
  }
}

TEST(Generate, SingleSubspace) {
  const PointCloud cloud =
      generate_subspaces(SubspaceSpec{.k = 1, .r = 2, .points_per = 12, .noise_sigma = 0.0, .ambient_dim = 4}, RngSeed{2});
  EXPECT_NEAR(fit_error(cloud.points, 2), 0.0, 1e-12);
  EXPECT_GT(fit_error(cloud.points, 1), 1e-3);
}

TEST(Generate, LineSetupHasThreeDistinctLines) {
  const PointCloud cloud = lines_cloud(10, RngSeed{3});
  ASSERT_EQ(cloud.bases.size(), 3u);
  for (int a = 0; a < 3; ++a) {
    EXPECT_EQ(cloud.bases[a].cols(), 1);
    for (int b = a + 1; b < 3; ++b) EXPECT_LT(std::abs(cloud.bases[a].col(0).dot(cloud.bases[b].col(0))), 1.0 - 1e-9);
  }
}

TEST(Generate, NoiseAddsResidual) {
  const PointCloud cloud =
      generate_subspaces(SubspaceSpec{.k = 2, .r = 2, .points_per = 200, .noise_sigma = 0.1, .ambient_dim = 4}, RngSeed{4});
  const double residual = testing::residual_to_basis(cloud.points.leftCols(200), cloud.bases[0]);
  // Two orthogonal noise directions, 200 points, variance 0.01 each.
  EXPECT_NEAR(residual * residual, 200 * 2 * 0.01, 0.8);
}

TEST(Generate, RejectsBadSpecs) {
  EXPECT_THROW(generate_subspaces(SubspaceSpec{.k = 2, .r = 3, .points_per = 5, .noise_sigma = 0, .ambient_dim = 3}, RngSeed{1}),
               InvalidArgument);
  EXPECT_THROW(generate_subspaces(SubspaceSpec{.k = 2, .r = 1, .points_per = 5, .noise_sigma = -1, .ambient_dim = 3}, RngSeed{1}),
               InvalidArgument);
}

TEST(FitError, CollinearPointsFitALine) {
  Eigen::MatrixXd y(2, 3);
  y << 1, -2, 0.5, 2, -4, 1;
  EXPECT_NEAR(fit_error(y, 1), 0.0, 1e-14);
  EXPECT_NEAR(fit_error(y, 1, FitErrorKind::PolarCurvature), 0.0, 1e-14);
}

TEST(FitError, OrthogonalPerturbationOfLonePoint) {
  // The other points already span the subspace, so it cannot tilt: f = delta^2.
  Rng rng(5);
  const Eigen::MatrixXd basis = random_orthogonal(5, rng);
  Eigen::MatrixXd y = basis.leftCols(3) * gaussian(3, 5, rng);
  EXPECT_NEAR(fit_error(y, 3), 0.0, 1e-12);
  y.col(2).setZero();
  for (const double delta : {1e-2, 1e-3}) {
    Eigen::MatrixXd perturbed = y;
    perturbed.col(2) = delta * basis.col(4);
    EXPECT_NEAR(fit_error(perturbed, 3), delta * delta, 1e-12);
  }
}

TEST(FitError, OrthogonalPerturbationFirstOrder) {
  // Y = B C + delta v e_j^T with v orthogonal to span(B): the Gram gains
  // delta^2 e_j e_j^T, so to first order f = delta^2 * |P_null(C) e_j|^2 <= delta^2.
  Rng rng(5);
  const Eigen::MatrixXd basis = random_orthogonal(5, rng);
  const Eigen::MatrixXd coefficients = gaussian(3, 5, rng);
  const Eigen::MatrixXd in_plane = basis.leftCols(3) * coefficients;
  const Eigen::MatrixXd row_space = coefficients.transpose() * (coefficients * coefficients.transpose()).inverse() * coefficients;
  const double null_share = 1.0 - row_space(2, 2);
  for (const double delta : {1e-2, 1e-3}) {
    Eigen::MatrixXd perturbed = in_plane;
    perturbed.col(2) += delta * basis.col(4);
    const double f = fit_error(perturbed, 3);
    EXPECT_LE(f, delta * delta * (1 + 1e-9));
    EXPECT_NEAR(f, delta * delta * null_share, 10 * std::pow(delta, 4) + 1e-15);
  }
}

TEST(FitError, MatchesGramTailFromJacobiOracle) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd y = gaussian(5, 5, rng);
    const Eigen::VectorXd values = testing::jacobi_eigen(y.transpose() * y).first;
    EXPECT_NEAR(fit_error(y, 3), values(3) + values(4), 1e-10);
  }
}

TEST(FitError, InvariantUnderRotationAndPermutation) {
  Rng rng(7);
  for (const FitErrorKind kind : {FitErrorKind::SvdResidual, FitErrorKind::PolarCurvature}) {
    const Eigen::MatrixXd y = gaussian(4, 4, rng);
    const double f = fit_error(y, 2, kind);
    const Eigen::MatrixXd q = random_orthogonal(4, rng);
    EXPECT_NEAR(fit_error(q * y, 2, kind), f, 1e-10 * std::max(1.0, f));
    Eigen::MatrixXd permuted(4, 4);
    permuted << y.col(2), y.col(0), y.col(3), y.col(1);
    EXPECT_NEAR(fit_error(permuted, 2, kind), f, 1e-10 * std::max(1.0, f));
    EXPECT_NEAR(fit_error(3.0 * y, 2, kind), 9.0 * f, 1e-9 * std::max(1.0, f));
  }
}

TEST(FitError, PolarVanishesOnlyOnSubspaces) {
  Rng rng(8);
  const Eigen::MatrixXd basis = random_orthogonal(5, rng).leftCols(2);
  EXPECT_NEAR(fit_error(basis * gaussian(2, 4, rng), 2, FitErrorKind::PolarCurvature), 0.0, 1e-12);
  EXPECT_GT(fit_error(gaussian(5, 4, rng), 2, FitErrorKind::PolarCurvature), 1e-3);
}

TEST(FitError, RejectsTooFewPoints) {
  EXPECT_THROW(fit_error(Eigen::MatrixXd::Ones(3, 2), 2), InvalidArgument);
  EXPECT_THROW(fit_error(Eigen::MatrixXd::Ones(3, 2), 0), InvalidArgument);
}

TEST(FitError, CloudOverloadSelectsColumns) {
  Rng rng(9);
  PointCloud cloud;
  cloud.points = gaussian(4, 8, rng);
  const std::vector<Vertex> ids{1, 4, 6, 7};
  Eigen::MatrixXd picked(4, 4);
  picked << cloud.points.col(1), cloud.points.col(4), cloud.points.col(6), cloud.points.col(7);
  EXPECT_NEAR(fit_error(cloud, ids, 2), fit_error(picked, 2), 1e-12);
}

TEST(Oracle, KernelValues) {
  Rng rng(10);
  PointCloud cloud;
  cloud.points = gaussian(4, 7, rng);
  const Eigen::MatrixXd line = random_orthogonal(4, rng).leftCols(1);
  cloud.points.leftCols(3) = line * gaussian(1, 3, rng);
  const std::vector<Vertex> exact{0, 1, 2};
  EXPECT_NEAR(edge_weight_oracle(cloud, 1, 0.5)(exact), 1.0, 1e-14);

  const std::vector<Vertex> generic{2, 4, 6};
  const double f = fit_error(cloud, generic, 1);
  EXPECT_NEAR(edge_weight_oracle(cloud, 1, std::sqrt(f))(generic), std::exp(-1.0), 1e-12);

  const auto oracle = edge_weight_oracle(cloud, 1, 0.7);
  std::vector<std::pair<double, double>> pairs;
  for_each_subset(7, 3, [&](std::span<const Vertex> t) {
    const double w = oracle(t);
    EXPECT_GT(w, 0.0);
    EXPECT_LE(w, 1.0);
    pairs.emplace_back(fit_error(cloud, t, 1), w);
  });
  std::sort(pairs.begin(), pairs.end());
  for (std::size_t i = 1; i < pairs.size(); ++i) EXPECT_LE(pairs[i].second, pairs[i - 1].second);

  const auto tiny = edge_weight_oracle(cloud, 1, 1e-200);
  EXPECT_GE(tiny(generic), DBL_MIN);
  EXPECT_THROW(edge_weight_oracle(cloud, 1, 0.0), InvalidArgument);
  EXPECT_THROW(edge_weight_oracle(cloud, 1, -1.0), InvalidArgument);
}

TEST(Oracle, MaterializedHypergraphIsValid) {
  const PointCloud cloud =
      generate_subspaces(SubspaceSpec{.k = 2, .r = 1, .points_per = 5, .noise_sigma = 0.05, .ambient_dim = 3}, RngSeed{11});
  EXPECT_NO_THROW(edge_weight_oracle(cloud, 1, 0.1).materialize());
}

TEST(Sigma, Candidates) {
  const std::vector<double> equal(5, 0.36);
  const auto grid = sigma_candidates(equal);
  ASSERT_EQ(grid.size(), 7u);
  EXPECT_NEAR(grid[0] * grid[0], 0.36, 1e-15);
  for (std::size_t j = 1; j < grid.size(); ++j) EXPECT_NEAR(grid[j] * grid[j], grid[j - 1] * grid[j - 1] / 2, 1e-15);
  const std::vector<double> zeros(4, 0.0);
  EXPECT_EQ(sigma_candidates(zeros), std::vector<double>{kSigmaFloor});
  EXPECT_THROW(sigma_candidates(std::vector<double>{}), InvalidArgument);
}

TEST(Sigma, PicksLowestCostFirstOnTies) {
  const std::vector<double> f{1.0, 2.0};
  const SigmaChoice choice = estimate_sigma(f, [](double sigma) {
    SpectralResult r;
    r.kmeans_cost = std::abs(std::log2(sigma * sigma) + 2.0);
    return r;
  });
  EXPECT_EQ(choice.costs.size(), 7u);
  const double rms = std::sqrt(2.5);
  EXPECT_NEAR(choice.sigma * choice.sigma, rms / 8, 1e-12);  // log2(rms) ~ 0.66, closest integer offset is j=3
  const SigmaChoice flat = estimate_sigma(f, [](double) { return SpectralResult{}; });
  EXPECT_EQ(flat.index, 0u);
}

TEST(TetrisAffinity, AllSubsetsReproduceFlattenedAffinity) {
  Rng rng(12);
  for (const int m : {3, 4}) {
    const auto h = testing::random_hypergraph(8, m, 0.6, rng);
    SubsetSample all{.size = m - 1, .flat = {}};
    for_each_subset(8, m - 1, [&](std::span<const Vertex> s) { all.flat.insert(all.flat.end(), s.begin(), s.end()); });
    const Eigen::MatrixXd a_hat = tetris_affinity(oracle_from_hypergraph(h), all);
    EXPECT_TRUE(a_hat.isApprox(testing::flatten_by_definition(h) / factorial(m - 2), 1e-13));
  }
}

TEST(TetrisAffinity, MatchesDirectAccumulation) {
  Rng rng(13);
  const auto h = testing::random_hypergraph(9, 4, 0.7, rng);
  const auto oracle = oracle_from_hypergraph(h);
  SubsetSample sample{.size = 3, .flat = {}};
  for (int j = 0; j < 25; ++j) {
    std::vector<Vertex> s;
    while (s.size() < 3) {
      const auto v = static_cast<Vertex>(rng.below(9));
      if (std::find(s.begin(), s.end(), v) == s.end()) s.push_back(v);
    }
    std::sort(s.begin(), s.end());
    sample.flat.insert(sample.flat.end(), s.begin(), s.end());
  }
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(9, 9);
  for (std::size_t j = 0; j < sample.count(); ++j) {
    const auto s = sample.subset(j);
    for (Vertex i = 0; i < 9; ++i) {
      if (std::find(s.begin(), s.end(), i) != s.end()) continue;
      std::vector<Vertex> e(s.begin(), s.end());
      e.push_back(i);
      std::sort(e.begin(), e.end());
      for (const Vertex member : s) expected(i, member) += oracle(e);
    }
  }
  EXPECT_TRUE(tetris_affinity(oracle, sample).isApprox(expected, 1e-14));
}

TEST(Tetris, SingleIterationIsUniformSampledTtm) {
  const PointCloud cloud =
      generate_subspaces(SubspaceSpec{.k = 3, .r = 2, .points_per = 12, .noise_sigma = 0.02, .ambient_dim = 4}, RngSeed{14});
  TetrisConfig config;
  config.c = 60;
  config.max_iters = 1;
  config.sigma = 0.3;
  const TetrisResult result = tetris(cloud, 3, 2, config, RngSeed{5});
  EXPECT_EQ(result.partition, uniform_sampled_ttm_subspace(cloud, 3, 2, 60, 0.3, RngSeed{5}));
  EXPECT_EQ(result.iterations.size(), 1u);
}

TEST(Tetris, OnePointPerSubspace) {
  const PointCloud cloud = lines_cloud(1, RngSeed{15});
  const Partition p = uniform_sampled_ttm_subspace(cloud, 3, 1, 1, 1.0, RngSeed{1});
  EXPECT_EQ(clustering_error(*cloud.labels, p), 0);
}

TEST(Tetris, NoiselessLinesRecovered) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const PointCloud cloud = lines_cloud(15, RngSeed{100 + seed});
    TetrisConfig config;
    config.c = 150;
    const TetrisResult result = tetris(cloud, 3, 1, config, RngSeed{seed});
    EXPECT_EQ(clustering_error(*cloud.labels, result.partition), 0) << seed;
    int quota = 0;
    for (const int q : result.iterations.front().quota) quota += q;
    EXPECT_EQ(quota, 150);
    EXPECT_LE(result.iterations.size(), 20u);
  }
}

TEST(Tetris, Deterministic) {
  const PointCloud cloud =
      generate_subspaces(SubspaceSpec{.k = 2, .r = 2, .points_per = 15, .noise_sigma = 0.05, .ambient_dim = 4}, RngSeed{16});
  TetrisConfig config;
  config.c = 40;
  EXPECT_EQ(tetris(cloud, 2, 2, config, RngSeed{3}).partition, tetris(cloud, 2, 2, config, RngSeed{3}).partition);
}

TEST(Tetris, RejectsBadArguments) {
  const PointCloud cloud = lines_cloud(3, RngSeed{17});
  TetrisConfig config;
  EXPECT_THROW(tetris(cloud, 10, 1, config, RngSeed{1}), InvalidArgument);
  EXPECT_THROW(tetris(cloud, 3, 8, config, RngSeed{1}), InvalidArgument);
  config.c = 0;
  EXPECT_THROW(tetris(cloud, 3, 1, config, RngSeed{1}), InvalidArgument);
  config.c = 1;
  config.max_iters = 0;
  EXPECT_THROW(tetris(cloud, 3, 1, config, RngSeed{1}), InvalidArgument);
}

TEST(SubspaceTtm, PermutationEquivariant) {
  const PointCloud cloud = lines_cloud(10, RngSeed{18});
  std::vector<int> order(30);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(19);
  for (int i = 29; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  PointCloud shuffled;
  shuffled.points.resize(3, 30);
  std::vector<int> shuffled_truth(30);
  for (int i = 0; i < 30; ++i) {
    shuffled.points.col(i) = cloud.points.col(order[i]);
    shuffled_truth[i] = cloud.labels->labels[order[i]];
  }
  const SubspaceTtmResult base = subspace_ttm(cloud, 3, 1, std::nullopt, RngSeed{2});
  const SubspaceTtmResult moved = subspace_ttm(shuffled, 3, 1, std::nullopt, RngSeed{2});
  EXPECT_EQ(clustering_error(*cloud.labels, base.partition), 0);
  EXPECT_EQ(clustering_error(Partition(shuffled_truth, 3), moved.partition), 0);
  std::vector<int> pulled_back(30);
  for (int i = 0; i < 30; ++i) pulled_back[order[i]] = moved.partition.labels[i];
  EXPECT_EQ(clustering_error(base.partition, Partition(pulled_back, 3)), 0);
}

TEST(SubspaceTtm, EdgeCap) {
  PointCloud cloud;
  cloud.points = Eigen::MatrixXd::Ones(6, 400);
  EXPECT_THROW(subspace_ttm(cloud, 2, 3, 1.0, RngSeed{1}), SizeError);
}

}  // namespace
}  // namespace hyperpart
