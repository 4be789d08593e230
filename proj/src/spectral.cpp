#include "hyperpart/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "hyperpart/errors.hpp"

namespace hyperpart {

namespace {

double max_residual(const Eigen::MatrixXd& l, const Eigen::MatrixXd& x, const Eigen::VectorXd& eigvals) {
  double worst = 0.0;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    worst = std::max(worst, (l * x.col(c) - eigvals(c) * x.col(c)).norm());
  }
  return worst;
}

SpectralEmbedding dense_dominant(const Eigen::MatrixXd& l, int k, double& spectral_norm) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("dense symmetric eigensolver failed", std::numeric_limits<double>::infinity());
  }
  const Eigen::Index n = l.rows();
  const auto& values = solver.eigenvalues();  // ascending
  spectral_norm = std::max(std::abs(values(0)), std::abs(values(n - 1)));
  SpectralEmbedding out;
  out.x.resize(n, k);
  out.eigvals.resize(k);
  for (int c = 0; c < k; ++c) {
    out.x.col(c) = solver.eigenvectors().col(n - 1 - c);
    out.eigvals(c) = values(n - 1 - c);
  }
  return out;
}

// Block power iteration on L + shift*I, shift = Gershgorin bound so the
// shifted matrix is positive semidefinite and its top block is L's top block.
SpectralEmbedding subspace_iteration(const Eigen::MatrixXd& l, int k, const EigenOptions& options,
                                     double& spectral_norm) {
  const Eigen::Index n = l.rows();
  const double bound = l.cwiseAbs().rowwise().sum().maxCoeff();
  spectral_norm = bound;
  const Eigen::Index block = std::min<Eigen::Index>(n, k + 8);
  Rng rng(options.seed);
  Eigen::MatrixXd q(n, block);
  for (Eigen::Index j = 0; j < block; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) q(i, j) = rng.normal();
  }
  q = Eigen::HouseholderQR<Eigen::MatrixXd>(q).householderQ() * Eigen::MatrixXd::Identity(n, block);
  SpectralEmbedding out;
  double residual = std::numeric_limits<double>::infinity();
  for (int iteration = 1; iteration <= options.max_iterations; ++iteration) {
    Eigen::MatrixXd z = l * q + bound * q;
    q = Eigen::HouseholderQR<Eigen::MatrixXd>(z).householderQ() * Eigen::MatrixXd::Identity(n, block);
    if (iteration % 10 != 0 && iteration != options.max_iterations) continue;
    const Eigen::MatrixXd projected = q.transpose() * l * q;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(projected);
    out.x.resize(n, k);
    out.eigvals.resize(k);
    for (int c = 0; c < k; ++c) {
      out.x.col(c) = q * small.eigenvectors().col(block - 1 - c);
      out.eigvals(c) = small.eigenvalues()(block - 1 - c);
    }
    residual = max_residual(l, out.x, out.eigvals);
    if (residual <= options.tol * bound) return out;
  }
  throw ConvergenceError("subspace iteration did not converge (residual " + std::to_string(residual) + ")",
                         residual);
}

}  // namespace

FlattenedAffinity flatten(const WeightedUniformHypergraph& h) {
  const int n = h.n();
  const double scale = factorial(h.m() - 2);
  FlattenedAffinity f;
  f.a = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t e = 0; e < h.num_edges(); ++e) {
    const auto tuple = h.edge(e);
    const double w = scale * h.weight(e);
    for (std::size_t s = 0; s < tuple.size(); ++s) {
      for (std::size_t t = s + 1; t < tuple.size(); ++t) {
        f.a(tuple[s], tuple[t]) += w;
        f.a(tuple[t], tuple[s]) += w;
      }
    }
  }
  f.d = f.a.rowwise().sum();
  return f;
}

FlattenedAffinity from_affinity(Eigen::MatrixXd a) {
  if (a.rows() != a.cols()) throw InvalidArgument("affinity matrix must be square");
  FlattenedAffinity f;
  f.d = a.rowwise().sum();
  f.a = std::move(a);
  return f;
}

Eigen::MatrixXd normalized_matrix(const Eigen::MatrixXd& a, const Eigen::VectorXd& d) {
  const Eigen::Index n = a.rows();
  Eigen::VectorXd inv_sqrt(n);
  for (Eigen::Index i = 0; i < n; ++i) inv_sqrt(i) = d(i) > 0.0 ? 1.0 / std::sqrt(d(i)) : 0.0;
  return inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
}

void normalize(FlattenedAffinity& f) { f.l = normalized_matrix(f.a, f.d); }

SpectralEmbedding dominant_eigenvectors(const Eigen::MatrixXd& l, int k, const EigenOptions& options) {
  if (l.rows() != l.cols()) throw InvalidArgument("eigensolver needs a square matrix");
  if (k < 1 || k > l.rows()) {
    throw InvalidArgument("eigensolver needs 1 <= k <= n (k=" + std::to_string(k) + ")");
  }
  double spectral_norm = 0.0;
  SpectralEmbedding out = l.rows() <= options.dense_limit ? dense_dominant(l, k, spectral_norm)
                                                          : subspace_iteration(l, k, options, spectral_norm);
  const double residual = max_residual(l, out.x, out.eigvals);
  if (residual > options.tol * std::max(spectral_norm, 1e-300)) {
    throw ConvergenceError("eigenvector residual " + std::to_string(residual) + " exceeds tolerance", residual);
  }
  out.x_bar = row_normalize(out.x);
  return out;
}

Eigen::MatrixXd row_normalize(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out = x;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double norm = x.row(i).norm();
    if (norm < 1e-12) {
      out.row(i).setZero();
    } else {
      out.row(i) /= norm;
    }
  }
  return out;
}

SpectralResult cluster_embedding_of(const Eigen::MatrixXd& symmetric, int k, RngSeed seed,
                                    const SpectralOptions& options) {
  SpectralResult result;
  result.embedding = dominant_eigenvectors(symmetric, k, options.eigen);
  KMeansResult km = kmeans(result.embedding.x_bar, k, seed, options.kmeans);
  result.partition = std::move(km.partition);
  result.kmeans_cost = km.cost;
  result.degenerate = km.degenerate;
  return result;
}

SpectralResult ttm_partition_affinity(const Eigen::MatrixXd& a, int k, RngSeed seed, const SpectralOptions& options) {
  if (k < 1) throw InvalidArgument("partitioning needs k >= 1");
  FlattenedAffinity f = from_affinity(a);
  normalize(f);
  return cluster_embedding_of(f.l, k, seed, options);
}

SpectralResult ttm_partition(const WeightedUniformHypergraph& h, int k, RngSeed seed, const SpectralOptions& options) {
  if (k < 2 || k > h.n()) throw InvalidArgument("TTM needs 2 <= k <= n");
  FlattenedAffinity f = flatten(h);
  normalize(f);
  return cluster_embedding_of(f.l, k, seed, options);
}

Eigen::MatrixXd nhcut_matrix(const WeightedUniformHypergraph& h) {
  const int n = h.n();
  const double inv_edge_degree = 1.0 / h.m();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t e = 0; e < h.num_edges(); ++e) {
    const auto tuple = h.edge(e);
    const double w = h.weight(e) * inv_edge_degree;
    for (const Vertex u : tuple) {
      for (const Vertex v : tuple) p(u, v) += w;
    }
  }
  const Eigen::VectorXd vertex_degree = h.m() * p.diagonal();
  return normalized_matrix(p, vertex_degree);
}

SpectralResult nhcut_partition(const WeightedUniformHypergraph& h, int k, RngSeed seed,
                               const SpectralOptions& options) {
  if (k < 2 || k > h.n()) throw InvalidArgument("NH-Cut needs 2 <= k <= n");
  return cluster_embedding_of(nhcut_matrix(h), k, seed, options);
}

Eigen::MatrixXd hosvd_gram(const WeightedUniformHypergraph& h) {
  const int n = h.n();
  const int m = h.m();
  struct Entry {
    std::uint64_t tail;
    Vertex head;
    double weight;
  };
  std::vector<Entry> entries;
  entries.reserve(h.num_edges() * static_cast<std::size_t>(m));
  std::vector<Vertex> tail(static_cast<std::size_t>(m - 1));
  for (std::size_t e = 0; e < h.num_edges(); ++e) {
    const auto tuple = h.edge(e);
    for (int drop = 0; drop < m; ++drop) {
      std::size_t next = 0;
      for (int t = 0; t < m; ++t) {
        if (t != drop) tail[next++] = tuple[t];
      }
      entries.push_back({subset_rank(tail), tuple[drop], h.weight(e)});
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& x, const Entry& y) { return std::tie(x.tail, x.head) < std::tie(y.tail, y.head); });
  const double scale = factorial(m - 1);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t begin = 0; begin < entries.size();) {
    std::size_t end = begin;
    while (end < entries.size() && entries[end].tail == entries[begin].tail) ++end;
    for (std::size_t a = begin; a < end; ++a) {
      for (std::size_t b = begin; b < end; ++b) {
        gram(entries[a].head, entries[b].head) += scale * entries[a].weight * entries[b].weight;
      }
    }
    begin = end;
  }
  return gram;
}

SpectralResult hosvd_partition(const WeightedUniformHypergraph& h, int k, RngSeed seed, const SpectralOptions& options,
                               int size_cap) {
  if (h.n() > size_cap) {
    throw SizeError("HOSVD is capped at n <= " + std::to_string(size_cap) + " (got n=" + std::to_string(h.n()) + ")");
  }
  if (k < 2 || k > h.n()) throw InvalidArgument("HOSVD needs 2 <= k <= n");
  return cluster_embedding_of(hosvd_gram(h), k, seed, options);
}

}  // namespace hyperpart
