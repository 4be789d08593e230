#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hyperpart/hypergraph.hpp"

namespace hyperpart {

// counts(a, b) = #{i : psi_i = a, psi'_i = b}, padded to max(k, k') classes.
Eigen::MatrixXi confusion_matrix(const Partition& psi, const Partition& psi_prime);

// Largest total of profit(r, assignment[r]) over permutations, via the
// Hungarian method (O(K^3)).
std::vector<int> max_weight_assignment(const Eigen::MatrixXd& profit);

/// Multi-class 0-1 loss minimized over relabelings of psi_prime. Exhaustive
/// over permutations for up to 8 classes, Hungarian method above. Throws
/// InvalidArgument on length mismatch.
int clustering_error(const Partition& psi, const Partition& psi_prime);

// Forces one route; used to cross-check the two.
int clustering_error_enumerate(const Partition& psi, const Partition& psi_prime);
int clustering_error_hungarian(const Partition& psi, const Partition& psi_prime);

// sum_j assoc(V_j) / vol(V_j); clusters with zero volume contribute 0.
double normalized_associativity(const WeightedUniformHypergraph& h, const Partition& partition);

inline constexpr int kTraceMaxVertices = 10;

/// (1/m!) Trace(A x_1 Y1^T ... x_m Ym^T) by explicit summation over all n^m
/// index tuples, with Y_l(i, j) = 1{i in V_j} / vol(V_j)^{beta_l}. The betas
/// must be m nonnegative numbers summing to 1. Throws SizeError for n > 10.
double tensor_trace_nassoc(const WeightedUniformHypergraph& h, const Partition& partition,
                           std::span<const double> betas);

}  // namespace hyperpart
