#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hyperpart/errors.hpp"
#include "hyperpart/hypergraph.hpp"
#include "hyperpart/random.hpp"

namespace hyperpart {

/// Symmetric order-m tensor over k classes, stored densely (k^m entries).
class BlockTensor {
 public:
  BlockTensor() = default;
  BlockTensor(int k, int m, std::vector<double> values);

  // B = p + q when all indices coincide, q otherwise.
  static BlockTensor from_pq(int k, int m, double p, double q);

  int k() const { return k_; }
  int m() const { return m_; }

  double operator()(std::span<const int> classes) const;

  bool is_symmetric() const;

 private:
  int k_ = 0;
  int m_ = 0;
  std::vector<double> values_;
};

enum class WeightLaw { Bernoulli, BoundedUniform };

struct PqParameters {
  double p = 0.0;
  double q = 0.0;
};

/// Planted partition model: w_e independent with E[w_e] = alpha * B[psi(e)].
struct PlantedSpec {
  int n = 0;
  int k = 0;
  int m = 0;
  double alpha = 1.0;
  BlockTensor tensor;
  std::optional<PqParameters> pq;
  Partition psi;
  WeightLaw weight_law = WeightLaw::Bernoulli;

  // Balanced psi and the (p, q) tensor.
  static PlantedSpec balanced_pq(int n, int k, int m, double p, double q, double alpha,
                                 WeightLaw law = WeightLaw::Bernoulli);

  // Throws DataError/InvalidArgument if sizes, ranges or symmetry are off.
  void validate() const;

  double edge_mean(std::span<const Vertex> sorted_tuple) const;

  bool is_balanced() const;
};

WeightedUniformHypergraph generate(const PlantedSpec& spec, RngSeed seed);

// Expected flattened affinity, computed by direct enumeration of the
// (m-2)-subsets completing every pair.
Eigen::MatrixXd expected_affinity(const PlantedSpec& spec);

struct ExpectedQuantities {
  Eigen::MatrixXd g;              // k x k, expected affinity between classes
  Eigen::VectorXd d_expected;     // expected degree of each vertex
  double d_min = 0.0;
  double delta = 0.0;
  double lambda_k_g = 0.0;        // smallest eigenvalue of g
  std::vector<int> class_sizes;
};

// General path: G from class-composition counts, then delta from its
// definition. Works for any psi.
ExpectedQuantities expected_quantities(const PlantedSpec& spec);

class ClosedFormUnavailable : public Error {
 public:
  using Error::Error;
};

struct PqClosedForm {
  double d_min = 0.0;
  double delta = 0.0;
};

// Closed forms for the balanced (p, q) model. Throws ClosedFormUnavailable
// for unbalanced psi or a general tensor.
PqClosedForm pq_closed_form(const PlantedSpec& spec);

}  // namespace hyperpart
