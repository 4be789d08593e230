#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hyperpart/hypergraph.hpp"
#include "hyperpart/random.hpp"
#include "hyperpart/spectral.hpp"

namespace hyperpart {

/// n points in R^{r_a}, stored one per column.
struct PointCloud {
  Eigen::MatrixXd points;                    // r_a x n
  std::optional<Partition> labels;           // ground truth, if known
  std::vector<Eigen::MatrixXd> bases;        // generating bases (r_a x r), if known

  int n() const { return static_cast<int>(points.cols()); }
  int ambient_dim() const { return static_cast<int>(points.rows()); }
  // Throws DataError on non-finite coordinates or an empty cloud.
  void validate() const;
};

struct SubspaceSpec {
  int k = 1;
  int r = 1;
  int points_per = 1;
  double noise_sigma = 0.0;
  int ambient_dim = 2;

  void validate() const;
};

// k random r-dim linear subspaces (orthonormalized Gaussian bases). Point i
// belongs to subspace floor(i / points_per) and equals B * u + noise, with u
// uniform on the unit sphere of R^r and noise ~ N(0, noise_sigma^2 I).
PointCloud generate_subspaces(const SubspaceSpec& spec, RngSeed seed);

enum class FitErrorKind { SvdResidual, PolarCurvature };

/// Error of fitting an r-dim linear subspace to the given columns.
///
/// SvdResidual: sum of squared distances to the best-fit subspace through the
/// origin, i.e. trace(G) minus the top r eigenvalues of the Gram G = Y^T Y.
///
/// PolarCurvature: the origin is appended to the points, and for every
/// (r+2)-point sub-collection z the affine polar curvature
///   c(z) = diam(z) * sqrt(sum_i psin^2 at z_i)
/// is taken; the result is the mean of c(z)^2. Both kinds vanish exactly when
/// the points lie in a common r-dim subspace and scale as s^2.
///
/// Throws InvalidArgument for fewer than r+1 points or r < 1.
double fit_error(const Eigen::MatrixXd& columns, int r, FitErrorKind kind = FitErrorKind::SvdResidual);

// Same, for the cloud's columns listed in `ids`.
double fit_error(const PointCloud& cloud, std::span<const Vertex> ids, int r,
                 FitErrorKind kind = FitErrorKind::SvdResidual);

// w_e = exp(-f_r / sigma^2) over (r+2)-tuples. Throws InvalidArgument when
// sigma <= 0.
EdgeWeightOracle edge_weight_oracle(const PointCloud& cloud, int r, double sigma,
                                    FitErrorKind kind = FitErrorKind::SvdResidual);

inline constexpr double kSigmaFloor = 1e-6;
inline constexpr int kSigmaGridSize = 7;

// sigma_j = sqrt(2^{-j} * RMS(f)) for j = 0..6, or {kSigmaFloor} when every
// f is zero. Throws InvalidArgument on an empty list.
std::vector<double> sigma_candidates(std::span<const double> fit_errors);

struct SigmaChoice {
  double sigma = 0.0;
  std::size_t index = 0;
  std::vector<double> candidates;
  std::vector<double> costs;
};

// Picks the candidate whose clustering has the smallest k-means embedding
// cost (first one on ties). `cluster` maps a sigma to the clustering.
template <typename ClusterFn>
SigmaChoice estimate_sigma(std::span<const double> fit_errors, ClusterFn&& cluster) {
  SigmaChoice choice;
  choice.candidates = sigma_candidates(fit_errors);
  for (std::size_t j = 0; j < choice.candidates.size(); ++j) {
    const SpectralResult result = cluster(choice.candidates[j]);
    choice.costs.push_back(result.kmeans_cost);
    if (result.kmeans_cost < choice.costs[choice.index]) choice.index = j;
  }
  choice.sigma = choice.candidates[choice.index];
  return choice;
}

/// A batch of sampled (m-1)-subsets, stored flat and sorted within each.
struct SubsetSample {
  int size = 0;
  std::vector<Vertex> flat;

  std::size_t count() const { return size == 0 ? 0 : flat.size() / static_cast<std::size_t>(size); }
  std::span<const Vertex> subset(std::size_t j) const {
    return {flat.data() + j * static_cast<std::size_t>(size), static_cast<std::size_t>(size)};
  }
};

// A_hat(i, s) += w(S + {i}) for every subset S, every i outside S, every s in
// S. Over all C(n, m-1) subsets this is flatten(h).a / (m-2)!.
Eigen::MatrixXd tetris_affinity(const EdgeWeightOracle& oracle, const SubsetSample& subsets);

struct TetrisConfig {
  int c = 1;
  int max_iters = 20;
  std::optional<double> sigma;  // empty: re-estimated each iteration
  double convergence_tol = 0.01;
  FitErrorKind fit = FitErrorKind::SvdResidual;
  SpectralOptions spectral;

  void validate() const;
};

struct TetrisIteration {
  double sigma = 0.0;
  int label_changes = -1;  // Err against the previous labels; -1 on the first pass
  std::vector<int> quota;  // subsets drawn per cluster for the next pass
  std::vector<std::string> notes;
};

struct TetrisResult {
  Partition partition;
  std::vector<TetrisIteration> iterations;
  bool converged = false;
  double kmeans_cost = 0.0;
};

/// Iteratively sampled TTM for subspace clustering with m = r + 2: sample c
/// uniform (m-1)-subsets, accumulate A_hat over their n completions, cluster
/// the left singular vectors of D_hat^{-1} A_hat, then resample c/k subsets
/// inside each cluster and repeat. Stops once at most convergence_tol * n
/// labels change (up to relabeling) or after max_iters passes.
///
/// Per-cluster quotas are floor(c/k); the remainder goes to the largest
/// clusters. A cluster with fewer than m-1 points hands its quota to uniform
/// draws over all points, which is noted in the iteration log.
TetrisResult tetris(const PointCloud& cloud, int k, int r, const TetrisConfig& config, RngSeed seed);

// One pass of the above with a fixed sigma.
Partition uniform_sampled_ttm_subspace(const PointCloud& cloud, int k, int r, int c, double sigma, RngSeed seed,
                                       const SpectralOptions& options = {});

inline constexpr std::uint64_t kFullSubspaceEdgeCap = 5'000'000;

struct SubspaceTtmResult {
  Partition partition;
  double sigma = 0.0;
};

// TTM on the complete (r+2)-uniform fit-error hypergraph. An empty sigma is
// chosen from the candidate grid over all fit errors. Throws SizeError above
// kFullSubspaceEdgeCap edges.
SubspaceTtmResult subspace_ttm(const PointCloud& cloud, int k, int r, std::optional<double> sigma, RngSeed seed,
                               FitErrorKind fit = FitErrorKind::SvdResidual, const SpectralOptions& options = {});

// k-means directly on the points (baseline).
Partition kmeans_points(const PointCloud& cloud, int k, RngSeed seed, const KMeansOptions& options = {});

}  // namespace hyperpart
