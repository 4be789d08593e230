#pragma once

#include <Eigen/Dense>

#include "hyperpart/hypergraph.hpp"
#include "hyperpart/random.hpp"

namespace hyperpart {

struct KMeansOptions {
  int restarts = 10;
  int max_iterations = 100;
  double relative_tolerance = 1e-9;
};

struct KMeansResult {
  Partition partition;
  Eigen::MatrixXd centers;  // k x d
  double cost = 0.0;        // sum of squared distances to assigned centers
  // Set when the points have fewer than k distinct locations, so some
  // requested clusters stay empty.
  bool degenerate = false;
  // Cost after every Lloyd step of the winning restart.
  std::vector<double> cost_trace;
  // Final cost of each restart.
  std::vector<double> restart_costs;
};

/// k-means on the rows of `points`: D^2-weighted seeding followed by Lloyd
/// iterations, repeated `restarts` times; the lowest-cost run wins.
/// With n == k every point gets its own cluster. Throws InvalidArgument when
/// n < k.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, RngSeed seed, const KMeansOptions& options = {});

double kmeans_cost(const Eigen::MatrixXd& points, const Partition& partition);

}  // namespace hyperpart
