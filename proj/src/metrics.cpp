#include "hyperpart/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hyperpart/errors.hpp"

namespace hyperpart {

namespace {

constexpr int kEnumerateMaxClasses = 8;

void check_lengths(const Partition& psi, const Partition& psi_prime) {
  if (psi.size() != psi_prime.size()) {
    throw InvalidArgument("partitions differ in length (" + std::to_string(psi.size()) + " vs " +
                          std::to_string(psi_prime.size()) + ")");
  }
}

}  // namespace

Eigen::MatrixXi confusion_matrix(const Partition& psi, const Partition& psi_prime) {
  check_lengths(psi, psi_prime);
  const int classes = std::max(psi.k, psi_prime.k);
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(classes, classes);
  for (std::size_t i = 0; i < psi.size(); ++i) ++counts(psi.labels[i], psi_prime.labels[i]);
  return counts;
}

std::vector<int> max_weight_assignment(const Eigen::MatrixXd& profit) {
  // Shortest augmenting path with potentials on cost = -profit; 1-based
  // internally with row/column 0 as the virtual source.
  const int size = static_cast<int>(profit.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(size + 1, 0.0), v(size + 1, 0.0);
  std::vector<int> match(size + 1, 0), way(size + 1, 0);
  for (int row = 1; row <= size; ++row) {
    match[0] = row;
    int col0 = 0;
    std::vector<double> min_slack(size + 1, inf);
    std::vector<bool> used(size + 1, false);
    do {
      used[col0] = true;
      const int row0 = match[col0];
      double delta = inf;
      int col1 = 0;
      for (int col = 1; col <= size; ++col) {
        if (used[col]) continue;
        const double cur = -profit(row0 - 1, col - 1) - u[row0] - v[col];
        if (cur < min_slack[col]) {
          min_slack[col] = cur;
          way[col] = col0;
        }
        if (min_slack[col] < delta) {
          delta = min_slack[col];
          col1 = col;
        }
      }
      for (int col = 0; col <= size; ++col) {
        if (used[col]) {
          u[match[col]] += delta;
          v[col] -= delta;
        } else {
          min_slack[col] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const int col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<int> assignment(static_cast<std::size_t>(size), 0);
  for (int col = 1; col <= size; ++col) assignment[match[col] - 1] = col - 1;
  return assignment;
}

int clustering_error_enumerate(const Partition& psi, const Partition& psi_prime) {
  const Eigen::MatrixXi counts = confusion_matrix(psi, psi_prime);
  const int classes = static_cast<int>(counts.rows());
  std::vector<int> perm(static_cast<std::size_t>(classes));
  std::iota(perm.begin(), perm.end(), 0);
  int best = 0;
  do {
    int agree = 0;
    for (int a = 0; a < classes; ++a) agree += counts(a, perm[a]);
    best = std::max(best, agree);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<int>(psi.size()) - best;
}

int clustering_error_hungarian(const Partition& psi, const Partition& psi_prime) {
  const Eigen::MatrixXi counts = confusion_matrix(psi, psi_prime);
  const auto assignment = max_weight_assignment(counts.cast<double>());
  int agree = 0;
  for (int a = 0; a < counts.rows(); ++a) agree += counts(a, assignment[a]);
  return static_cast<int>(psi.size()) - agree;
}

int clustering_error(const Partition& psi, const Partition& psi_prime) {
  check_lengths(psi, psi_prime);
  if (std::max(psi.k, psi_prime.k) <= kEnumerateMaxClasses) return clustering_error_enumerate(psi, psi_prime);
  return clustering_error_hungarian(psi, psi_prime);
}

double normalized_associativity(const WeightedUniformHypergraph& h, const Partition& partition) {
  if (partition.size() != static_cast<std::size_t>(h.n())) {
    throw InvalidArgument("partition length does not match the vertex count");
  }
  std::vector<double> assoc(static_cast<std::size_t>(partition.k), 0.0);
  std::vector<double> volume(static_cast<std::size_t>(partition.k), 0.0);
  for (std::size_t e = 0; e < h.num_edges(); ++e) {
    const auto tuple = h.edge(e);
    const int first = partition.labels[tuple[0]];
    bool inside = true;
    for (const Vertex v : tuple) {
      volume[partition.labels[v]] += h.weight(e);
      inside = inside && partition.labels[v] == first;
    }
    if (inside) assoc[first] += h.weight(e);
  }
  double total = 0.0;
  for (int j = 0; j < partition.k; ++j) {
    if (volume[j] > 0.0) total += assoc[j] / volume[j];
  }
  return total;
}

double tensor_trace_nassoc(const WeightedUniformHypergraph& h, const Partition& partition,
                           std::span<const double> betas) {
  const int n = h.n();
  const int m = h.m();
  if (n > kTraceMaxVertices) {
    throw SizeError("tensor trace is brute force and capped at n <= " + std::to_string(kTraceMaxVertices));
  }
  if (partition.size() != static_cast<std::size_t>(n)) {
    throw InvalidArgument("partition length does not match the vertex count");
  }
  if (betas.size() != static_cast<std::size_t>(m)) throw InvalidArgument("need one beta per tensor mode");
  double beta_sum = 0.0;
  for (const double b : betas) {
    if (b < 0.0) throw InvalidArgument("betas must be nonnegative");
    beta_sum += b;
  }
  if (std::abs(beta_sum - 1.0) > 1e-12) throw InvalidArgument("betas must sum to 1");

  // Dense adjacency tensor over all n^m index tuples; zero on repeated indices.
  std::size_t entries = 1;
  for (int t = 0; t < m; ++t) entries *= static_cast<std::size_t>(n);
  std::vector<double> tensor(entries, 0.0);
  std::vector<int> perm(static_cast<std::size_t>(m));
  for (std::size_t e = 0; e < h.num_edges(); ++e) {
    const auto tuple = h.edge(e);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      std::size_t index = 0;
      for (int t = 0; t < m; ++t) index = index * static_cast<std::size_t>(n) + tuple[perm[t]];
      tensor[index] = h.weight(e);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  std::vector<double> volume(static_cast<std::size_t>(partition.k), 0.0);
  const auto degree = h.vertex_degrees();
  for (int i = 0; i < n; ++i) volume[partition.labels[i]] += degree[i];

  // y[l](i, j) = 1{i in V_j} / vol(V_j)^{beta_l}; zero-volume clusters give 0.
  std::vector<Eigen::MatrixXd> y(static_cast<std::size_t>(m), Eigen::MatrixXd::Zero(n, partition.k));
  for (int l = 0; l < m; ++l) {
    for (int i = 0; i < n; ++i) {
      const int j = partition.labels[i];
      if (volume[j] > 0.0) y[l](i, j) = 1.0 / std::pow(volume[j], betas[l]);
    }
  }

  double trace = 0.0;
  std::vector<int> index(static_cast<std::size_t>(m), 0);
  for (std::size_t flat = 0; flat < entries; ++flat) {
    std::size_t rest = flat;
    for (int t = m - 1; t >= 0; --t) {
      index[t] = static_cast<int>(rest % static_cast<std::size_t>(n));
      rest /= static_cast<std::size_t>(n);
    }
    const double value = tensor[flat];
    if (value == 0.0) continue;
    for (int j = 0; j < partition.k; ++j) {
      double product = value;
      for (int l = 0; l < m && product != 0.0; ++l) product *= y[l](index[l], j);
      trace += product;
    }
  }
  return trace / factorial(m);
}

}  // namespace hyperpart
