#pragma once

#include <Eigen/Dense>

#include "hyperpart/hypergraph.hpp"
#include "hyperpart/kmeans.hpp"
#include "hyperpart/random.hpp"

namespace hyperpart {

/// Flattened affinity of an m-uniform hypergraph:
///   A_ij = (m-2)! * sum_{e containing i, j} w_e,  D_ii = sum_j A_ij,
///   L = D^{-1/2} A D^{-1/2} (zero rows/columns where D_ii = 0).
struct FlattenedAffinity {
  Eigen::MatrixXd a;
  Eigen::VectorXd d;
  Eigen::MatrixXd l;
};

struct SpectralEmbedding {
  Eigen::MatrixXd x;      // n x k, orthonormal columns
  Eigen::MatrixXd x_bar;  // rows scaled to unit norm (zero rows stay zero)
  Eigen::VectorXd eigvals;  // descending
};

// O(m^2 |E|). Fills a and d; call normalize() for l.
FlattenedAffinity flatten(const WeightedUniformHypergraph& h);

// Wraps an arbitrary symmetric nonnegative affinity (e.g. the expected one).
FlattenedAffinity from_affinity(Eigen::MatrixXd a);

void normalize(FlattenedAffinity& f);

// Symmetric normalization of a given matrix by the given degrees.
Eigen::MatrixXd normalized_matrix(const Eigen::MatrixXd& a, const Eigen::VectorXd& d);

struct EigenOptions {
  double tol = 1e-10;
  // Dense tridiagonal QR up to this size, seeded subspace iteration above.
  int dense_limit = 512;
  int max_iterations = 5000;
  RngSeed seed{0x5EED};
};

/// Orthonormal eigenvectors of the k algebraically largest eigenvalues of a
/// symmetric matrix, eigenvalues descending. Equal eigenvalues keep the
/// solver's order. Throws ConvergenceError (carrying the achieved residual)
/// if some column has ||L x - lambda x|| > tol * ||L||.
SpectralEmbedding dominant_eigenvectors(const Eigen::MatrixXd& l, int k, const EigenOptions& options = {});

// Rows with norm below 1e-12 are left as zero rows.
Eigen::MatrixXd row_normalize(const Eigen::MatrixXd& x);

struct SpectralOptions {
  KMeansOptions kmeans;
  EigenOptions eigen;
};

struct SpectralResult {
  Partition partition;
  SpectralEmbedding embedding;
  double kmeans_cost = 0.0;
  bool degenerate = false;
};

// Steps after the affinity: eigenvectors of the normalized matrix,
// row normalization, k-means.
SpectralResult cluster_embedding_of(const Eigen::MatrixXd& symmetric, int k, RngSeed seed,
                                    const SpectralOptions& options = {});

// Full TTM pipeline on a symmetric affinity (normalize, embed, k-means).
SpectralResult ttm_partition_affinity(const Eigen::MatrixXd& a, int k, RngSeed seed,
                                      const SpectralOptions& options = {});

SpectralResult ttm_partition(const WeightedUniformHypergraph& h, int k, RngSeed seed,
                             const SpectralOptions& options = {});

// Normalized hypergraph cut operator D_v^{-1/2} H W D_e^{-1} H^T D_v^{-1/2}
// with D_e = m I and D_v(i) = sum_{e containing i} w_e.
Eigen::MatrixXd nhcut_matrix(const WeightedUniformHypergraph& h);

SpectralResult nhcut_partition(const WeightedUniformHypergraph& h, int k, RngSeed seed,
                               const SpectralOptions& options = {});

inline constexpr int kHosvdDefaultCap = 150;

// Gram matrix of the mode-1 unfolding of the adjacency tensor, accumulated
// per (m-1)-tail without forming the n x n^{m-1} unfolding.
Eigen::MatrixXd hosvd_gram(const WeightedUniformHypergraph& h);

// Throws SizeError when n > size_cap.
SpectralResult hosvd_partition(const WeightedUniformHypergraph& h, int k, RngSeed seed,
                               const SpectralOptions& options = {}, int size_cap = kHosvdDefaultCap);

}  // namespace hyperpart
