#include "hyperpart/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "hyperpart/errors.hpp"

namespace hyperpart {

namespace {

struct Run {
  std::vector<int> labels;
  Eigen::MatrixXd centers;
  double cost = 0.0;
  bool degenerate = false;
  std::vector<double> trace;
};

double assign(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers, std::vector<int>& labels) {
  double cost = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
      const double dist = (points.row(i) - centers.row(c)).squaredNorm();
      if (dist < best_dist) {
        best_dist = dist;
        best = static_cast<int>(c);
      }
    }
    labels[i] = best;
    cost += best_dist;
  }
  return cost;
}

// Means of the assigned points; empty clusters keep their previous center.
void update_centers(const Eigen::MatrixXd& points, const std::vector<int>& labels, Eigen::MatrixXd& centers) {
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(centers.rows(), centers.cols());
  std::vector<int> counts(static_cast<std::size_t>(centers.rows()), 0);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    sums.row(labels[i]) += points.row(i);
    ++counts[labels[i]];
  }
  for (Eigen::Index c = 0; c < centers.rows(); ++c) {
    if (counts[c] > 0) centers.row(c) = sums.row(c) / counts[c];
  }
}

// Hartigan single-point transfers from a Lloyd fixed point. Moving x from a to b
// changes the cost by |b|/(|b|+1) d(x,c_b)^2 - |a|/(|a|-1) d(x,c_a)^2; apply every
// strictly improving move until none is left. Centers stay exact means throughout.
void refine_by_transfers(const Eigen::MatrixXd& points, std::vector<int>& labels, Eigen::MatrixXd& centers) {
  update_centers(points, labels, centers);
  std::vector<int> counts(static_cast<std::size_t>(centers.rows()), 0);
  for (int label : labels) ++counts[label];
  const int max_passes = 100;
  for (int pass = 0; pass < max_passes; ++pass) {
    bool moved = false;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      const int from = labels[i];
      if (counts[from] <= 1) continue;
      const double removal = counts[from] / (counts[from] - 1.0) * (points.row(i) - centers.row(from)).squaredNorm();
      int to = from;
      double best_delta = 0.0;
      for (Eigen::Index c = 0; c < centers.rows(); ++c) {
        if (c == from) continue;
        const double addition = counts[c] / (counts[c] + 1.0) * (points.row(i) - centers.row(c)).squaredNorm();
        const double delta = addition - removal;
        if (delta < best_delta - 1e-12 * removal) {
          best_delta = delta;
          to = static_cast<int>(c);
        }
      }
      if (to == from) continue;
      centers.row(from) = (centers.row(from) * counts[from] - points.row(i)) / (counts[from] - 1.0);
      centers.row(to) = (centers.row(to) * counts[to] + points.row(i)) / (counts[to] + 1.0);
      --counts[from];
      ++counts[to];
      labels[i] = to;
      moved = true;
    }
    if (!moved) break;
  }
  update_centers(points, labels, centers);
}

Eigen::MatrixXd seed_centers(const Eigen::MatrixXd& points, int k, Rng& rng, bool& degenerate) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centers(k, points.cols());
  centers.row(0) = points.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
  Eigen::VectorXd nearest(n);
  for (Eigen::Index i = 0; i < n; ++i) nearest(i) = (points.row(i) - centers.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = nearest.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double running = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        running += nearest(i);
        if (running > target && nearest(i) > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      degenerate = true;
      pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centers.row(c) = points.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      nearest(i) = std::min(nearest(i), (points.row(i) - centers.row(c)).squaredNorm());
    }
  }
  return centers;
}

Run lloyd(const Eigen::MatrixXd& points, int k, Rng& rng, const KMeansOptions& options) {
  Run run;
  run.labels.assign(static_cast<std::size_t>(points.rows()), 0);
  run.centers = seed_centers(points, k, rng, run.degenerate);
  double previous = std::numeric_limits<double>::infinity();
  for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
    const double cost = assign(points, run.centers, run.labels);
    run.trace.push_back(cost);
    update_centers(points, run.labels, run.centers);
    if (iteration > 0 && previous - cost <= options.relative_tolerance * previous) break;
    previous = cost;
  }
  refine_by_transfers(points, run.labels, run.centers);
  run.cost = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    run.cost += (points.row(i) - run.centers.row(run.labels[i])).squaredNorm();
  }
  run.trace.push_back(run.cost);
  return run;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, RngSeed seed, const KMeansOptions& options) {
  if (k < 1) throw InvalidArgument("k-means needs k >= 1");
  if (points.rows() < k) {
    throw InvalidArgument("k-means needs n >= k (n=" + std::to_string(points.rows()) + ", k=" + std::to_string(k) +
                          ")");
  }
  if (points.rows() == k) {
    // Each point is its own cluster: the only labeling with k nonempty classes.
    KMeansResult own;
    std::vector<int> labels(static_cast<std::size_t>(k));
    std::iota(labels.begin(), labels.end(), 0);
    own.partition = Partition(std::move(labels), k);
    own.centers = points;
    own.cost_trace = {0.0};
    own.restart_costs = {0.0};
    return own;
  }
  Rng rng(seed);
  KMeansResult best;
  best.cost = std::numeric_limits<double>::infinity();
  const int restarts = std::max(options.restarts, 1);
  for (int r = 0; r < restarts; ++r) {
    Run run = lloyd(points, k, rng, options);
    best.restart_costs.push_back(run.cost);
    if (run.cost < best.cost) {
      best.cost = run.cost;
      best.partition = Partition(std::move(run.labels), k);
      best.centers = std::move(run.centers);
      best.degenerate = run.degenerate;
      best.cost_trace = std::move(run.trace);
    }
  }
  return best;
}

double kmeans_cost(const Eigen::MatrixXd& points, const Partition& partition) {
  Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(partition.k, points.cols());
  update_centers(points, partition.labels, centers);
  double cost = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    cost += (points.row(i) - centers.row(partition.labels[i])).squaredNorm();
  }
  return cost;
}

}  // namespace hyperpart
