#include "hyperpart/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <string>

#include "hyperpart/errors.hpp"
#include "hyperpart/metrics.hpp"

namespace hyperpart {

namespace {

// Heap-free storage for the small Gram matrices of a single edge.
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 8, 8>;

template <typename Matrix>
double tail_eigen_sum(const Matrix& gram, int r) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
  const auto& values = solver.eigenvalues();  // ascending
  double tail = 0.0;
  for (Eigen::Index t = 0; t + r < values.size(); ++t) tail += values(t);
  return std::max(tail, 0.0);
}

// Sum of the m - r smallest eigenvalues of an m x m Gram.
double svd_residual_of_gram(const Eigen::Ref<const Eigen::MatrixXd>& gram, int r) {
  if (gram.rows() <= 8) return tail_eigen_sum(SmallMatrix(gram), r);
  return tail_eigen_sum(Eigen::MatrixXd(gram), r);
}

// sqrt(det(U^T U)) for the unit-normalized columns of `vectors`; 0 when a
// column vanishes.
double polar_sine(Eigen::MatrixXd vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    const double norm = vectors.col(c).norm();
    if (norm == 0.0) return 0.0;
    vectors.col(c) /= norm;
  }
  const double det = (vectors.transpose() * vectors).determinant();
  return std::sqrt(std::max(det, 0.0));
}

// diam(z)^2 * sum_i psin_i^2 for the columns z of an affine (q-2)-flat test.
double squared_polar_curvature(const Eigen::MatrixXd& z) {
  const Eigen::Index q = z.cols();
  double diam = 0.0;
  for (Eigen::Index a = 0; a < q; ++a) {
    for (Eigen::Index b = a + 1; b < q; ++b) diam = std::max(diam, (z.col(a) - z.col(b)).squaredNorm());
  }
  double psin_sq = 0.0;
  Eigen::MatrixXd diffs(z.rows(), q - 1);
  for (Eigen::Index i = 0; i < q; ++i) {
    Eigen::Index next = 0;
    for (Eigen::Index j = 0; j < q; ++j) {
      if (j != i) diffs.col(next++) = z.col(j) - z.col(i);
    }
    const double s = polar_sine(diffs);
    psin_sq += s * s;
  }
  return diam * psin_sq;
}

double polar_curvature_error(const Eigen::MatrixXd& columns, int r) {
  const Eigen::Index count = columns.cols();
  Eigen::MatrixXd with_origin(columns.rows(), count + 1);
  with_origin.leftCols(count) = columns;
  with_origin.col(count).setZero();
  const int q = static_cast<int>(count + 1);
  const int group = std::min(r + 2, q);
  double total = 0.0;
  std::size_t groups = 0;
  Eigen::MatrixXd z(columns.rows(), group);
  for_each_subset(q, group, [&](std::span<const Vertex> pick) {
    for (int t = 0; t < group; ++t) z.col(t) = with_origin.col(pick[t]);
    total += squared_polar_curvature(z);
    ++groups;
  });
  return total / static_cast<double>(groups);
}

double kernel_weight(double f, double sigma) {
  return std::max(std::exp(-f / (sigma * sigma)), std::numeric_limits<double>::min());
}

// Evaluates f_r on tuples of cloud columns, reusing the global Gram Y^T Y for
// the SVD residual.
class FitEvaluator {
 public:
  FitEvaluator(const PointCloud& cloud, int r, FitErrorKind kind) : cloud_(cloud), r_(r), kind_(kind) {
    if (kind_ == FitErrorKind::SvdResidual) gram_ = cloud.points.transpose() * cloud.points;
  }

  double operator()(std::span<const Vertex> ids) const {
    const auto m = static_cast<Eigen::Index>(ids.size());
    if (kind_ == FitErrorKind::SvdResidual) {
      SmallMatrix small(m, m);
      if (m > 8) {
        Eigen::MatrixXd big(m, m);
        for (Eigen::Index a = 0; a < m; ++a) {
          for (Eigen::Index b = 0; b < m; ++b) big(a, b) = gram_(ids[a], ids[b]);
        }
        return svd_residual_of_gram(big, r_);
      }
      for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b < m; ++b) small(a, b) = gram_(ids[a], ids[b]);
      }
      return tail_eigen_sum(small, r_);
    }
    Eigen::MatrixXd columns(cloud_.ambient_dim(), m);
    for (Eigen::Index t = 0; t < m; ++t) columns.col(t) = cloud_.points.col(ids[t]);
    return polar_curvature_error(columns, r_);
  }

 private:
  const PointCloud& cloud_;
  int r_;
  FitErrorKind kind_;
  Eigen::MatrixXd gram_;
};

void check_fit_arguments(Eigen::Index count, int r) {
  if (r < 1) throw InvalidArgument("fit error needs r >= 1");
  if (count < r + 1) {
    throw InvalidArgument("fit error needs at least r+1 points (got " + std::to_string(count) + ", r=" +
                          std::to_string(r) + ")");
  }
}

void check_clustering_arguments(const PointCloud& cloud, int k, int r) {
  cloud.validate();
  if (r < 1) throw InvalidArgument("subspace dimension r must be >= 1");
  if (k < 2 || k > cloud.n()) throw InvalidArgument("subspace clustering needs 2 <= k <= n");
  if (r + 2 > cloud.n()) throw InvalidArgument("subspace clustering needs m = r+2 <= n");
}

// Inserts i into the sorted subset and writes the sorted (|S|+1)-tuple.
void completion(std::span<const Vertex> subset, Vertex i, std::vector<Vertex>& out) {
  out.clear();
  bool placed = false;
  for (const Vertex s : subset) {
    if (!placed && i < s) {
      out.push_back(i);
      placed = true;
    }
    out.push_back(s);
  }
  if (!placed) out.push_back(i);
}

bool contains(std::span<const Vertex> subset, Vertex i) {
  return std::binary_search(subset.begin(), subset.end(), i);
}

constexpr double kSkipped = -1.0;

// f_r of every completion, indexed [j * n + i]; kSkipped where i is in S_j.
std::vector<double> completion_errors(const FitEvaluator& fit, int n, const SubsetSample& subsets) {
  std::vector<double> errors(subsets.count() * static_cast<std::size_t>(n), kSkipped);
  std::vector<Vertex> tuple;
  for (std::size_t j = 0; j < subsets.count(); ++j) {
    const auto subset = subsets.subset(j);
    for (int i = 0; i < n; ++i) {
      if (contains(subset, static_cast<Vertex>(i))) continue;
      completion(subset, static_cast<Vertex>(i), tuple);
      errors[j * static_cast<std::size_t>(n) + i] = fit(tuple);
    }
  }
  return errors;
}

Eigen::MatrixXd accumulate(int n, const SubsetSample& subsets, const std::vector<double>& errors, double sigma) {
  Eigen::MatrixXd a_hat = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t j = 0; j < subsets.count(); ++j) {
    const auto subset = subsets.subset(j);
    for (int i = 0; i < n; ++i) {
      const double f = errors[j * static_cast<std::size_t>(n) + i];
      if (f == kSkipped) continue;
      const double w = kernel_weight(f, sigma);
      for (const Vertex s : subset) a_hat(i, s) += w;
    }
  }
  return a_hat;
}

// Left singular vectors of D^{-1} A via the eigenvectors of (D^{-1} A)(D^{-1} A)^T.
SpectralResult cluster_one_sided(const Eigen::MatrixXd& a_hat, int k, RngSeed seed, const SpectralOptions& options) {
  const Eigen::VectorXd degree = a_hat.rowwise().sum();
  Eigen::VectorXd inverse(degree.size());
  for (Eigen::Index i = 0; i < degree.size(); ++i) inverse(i) = degree(i) > 0.0 ? 1.0 / degree(i) : 0.0;
  const Eigen::MatrixXd l_hat = inverse.asDiagonal() * a_hat;
  const Eigen::MatrixXd outer = l_hat * l_hat.transpose();
  return cluster_embedding_of(outer, k, seed, options);
}

void draw_subsets(std::span<const Vertex> members, int size, int count, Rng& rng, SubsetSample& out) {
  const std::uint64_t total = binomial(members.size(), static_cast<std::uint64_t>(size));
  std::vector<Vertex> local(static_cast<std::size_t>(size));
  for (int d = 0; d < count; ++d) {
    subset_unrank(rng.below(total), size, local);
    for (const Vertex t : local) out.flat.push_back(members[t]);
  }
}

std::vector<Vertex> all_vertices(int n) {
  std::vector<Vertex> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), Vertex{0});
  return ids;
}

std::vector<double> valid_errors(const std::vector<double>& errors) {
  std::vector<double> out;
  out.reserve(errors.size());
  for (const double f : errors) {
    if (f != kSkipped) out.push_back(f);
  }
  return out;
}

}  // namespace

void PointCloud::validate() const {
  if (points.cols() < 1) throw DataError("point cloud is empty");
  if (points.rows() < 1) throw DataError("point cloud has ambient dimension 0");
  if (!points.allFinite()) throw DataError("point cloud has non-finite coordinates");
  if (labels && labels->size() != static_cast<std::size_t>(points.cols())) {
    throw DataError("point cloud labels do not match the point count");
  }
}

void SubspaceSpec::validate() const {
  if (k < 1) throw InvalidArgument("subspace spec needs k >= 1");
  if (r < 1) throw InvalidArgument("subspace spec needs r >= 1");
  if (r >= ambient_dim) throw InvalidArgument("subspace spec needs r < r_a");
  if (points_per < 1) throw InvalidArgument("subspace spec needs at least one point per subspace");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw InvalidArgument("noise sigma must be >= 0");
}

PointCloud generate_subspaces(const SubspaceSpec& spec, RngSeed seed) {
  spec.validate();
  Rng rng(seed);
  PointCloud cloud;
  for (int j = 0; j < spec.k; ++j) {
    Eigen::MatrixXd gaussian(spec.ambient_dim, spec.r);
    for (Eigen::Index c = 0; c < gaussian.cols(); ++c) {
      for (Eigen::Index row = 0; row < gaussian.rows(); ++row) gaussian(row, c) = rng.normal();
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian);
    cloud.bases.push_back(qr.householderQ() * Eigen::MatrixXd::Identity(spec.ambient_dim, spec.r));
  }
  const int n = spec.k * spec.points_per;
  cloud.points.resize(spec.ambient_dim, n);
  std::vector<int> labels(static_cast<std::size_t>(n));
  Eigen::VectorXd coefficients(spec.r);
  for (int i = 0; i < n; ++i) {
    const int j = i / spec.points_per;
    labels[i] = j;
    double norm = 0.0;
    while (norm == 0.0) {
      for (int t = 0; t < spec.r; ++t) coefficients(t) = rng.normal();
      norm = coefficients.norm();
    }
    cloud.points.col(i) = cloud.bases[j] * (coefficients / norm);
    for (int t = 0; t < spec.ambient_dim; ++t) cloud.points(t, i) += spec.noise_sigma * rng.normal();
  }
  cloud.labels = Partition(std::move(labels), spec.k);
  return cloud;
}

double fit_error(const Eigen::MatrixXd& columns, int r, FitErrorKind kind) {
  check_fit_arguments(columns.cols(), r);
  if (kind == FitErrorKind::PolarCurvature) return polar_curvature_error(columns, r);
  return svd_residual_of_gram(columns.transpose() * columns, r);
}

double fit_error(const PointCloud& cloud, std::span<const Vertex> ids, int r, FitErrorKind kind) {
  Eigen::MatrixXd columns(cloud.ambient_dim(), static_cast<Eigen::Index>(ids.size()));
  for (std::size_t t = 0; t < ids.size(); ++t) {
    if (ids[t] >= static_cast<Vertex>(cloud.n())) throw InvalidArgument("point id out of range");
    columns.col(static_cast<Eigen::Index>(t)) = cloud.points.col(ids[t]);
  }
  return fit_error(columns, r, kind);
}

EdgeWeightOracle edge_weight_oracle(const PointCloud& cloud, int r, double sigma, FitErrorKind kind) {
  if (!(sigma > 0.0)) throw InvalidArgument("kernel scale sigma must be positive");
  cloud.validate();
  if (r < 1) throw InvalidArgument("subspace dimension r must be >= 1");
  auto owned = std::make_shared<PointCloud>(cloud);
  auto fit = std::make_shared<FitEvaluator>(*owned, r, kind);
  return EdgeWeightOracle(cloud.n(), r + 2, [owned, fit, sigma](std::span<const Vertex> tuple) {
    return kernel_weight((*fit)(tuple), sigma);
  });
}

std::vector<double> sigma_candidates(std::span<const double> fit_errors) {
  if (fit_errors.empty()) throw InvalidArgument("sigma estimation needs at least one fit error");
  double sum_sq = 0.0;
  for (const double f : fit_errors) sum_sq += f * f;
  const double rms = std::sqrt(sum_sq / static_cast<double>(fit_errors.size()));
  if (rms == 0.0) return {kSigmaFloor};
  std::vector<double> out;
  for (int j = 0; j < kSigmaGridSize; ++j) out.push_back(std::sqrt(std::ldexp(rms, -j)));
  return out;
}

Eigen::MatrixXd tetris_affinity(const EdgeWeightOracle& oracle, const SubsetSample& subsets) {
  if (subsets.size != oracle.m() - 1) throw InvalidArgument("subsets must have m-1 points");
  const int n = oracle.n();
  Eigen::MatrixXd a_hat = Eigen::MatrixXd::Zero(n, n);
  std::vector<Vertex> tuple;
  for (std::size_t j = 0; j < subsets.count(); ++j) {
    const auto subset = subsets.subset(j);
    for (int i = 0; i < n; ++i) {
      if (contains(subset, static_cast<Vertex>(i))) continue;
      completion(subset, static_cast<Vertex>(i), tuple);
      const double w = oracle(tuple);
      for (const Vertex s : subset) a_hat(i, s) += w;
    }
  }
  return a_hat;
}

void TetrisConfig::validate() const {
  if (c < 1) throw InvalidArgument("Tetris needs c >= 1");
  if (max_iters < 1) throw InvalidArgument("Tetris needs max_iters >= 1");
  if (sigma && !(*sigma > 0.0)) throw InvalidArgument("kernel scale sigma must be positive");
  if (!(convergence_tol >= 0.0)) throw InvalidArgument("convergence tolerance must be >= 0");
}

TetrisResult tetris(const PointCloud& cloud, int k, int r, const TetrisConfig& config, RngSeed seed) {
  check_clustering_arguments(cloud, k, r);
  config.validate();
  const int n = cloud.n();
  const int size = r + 1;  // m - 1
  const FitEvaluator fit(cloud, r, config.fit);
  const std::vector<Vertex> everyone = all_vertices(n);

  SubsetSample subsets{size, {}};
  {
    Rng rng(derive_seed(seed, 0));
    draw_subsets(everyone, size, config.c, rng, subsets);
  }

  TetrisResult result;
  for (int iteration = 0; iteration < config.max_iters; ++iteration) {
    const std::vector<double> errors = completion_errors(fit, n, subsets);
    const RngSeed cluster_seed = derive_seed(seed, 2 * static_cast<std::uint64_t>(iteration) + 1);
    TetrisIteration log;
    SpectralResult clustered;
    if (config.sigma) {
      log.sigma = *config.sigma;
      clustered = cluster_one_sided(accumulate(n, subsets, errors, log.sigma), k, cluster_seed, config.spectral);
    } else {
      std::vector<SpectralResult> tried;
      const SigmaChoice choice = estimate_sigma(valid_errors(errors), [&](double sigma) {
        tried.push_back(cluster_one_sided(accumulate(n, subsets, errors, sigma), k, cluster_seed, config.spectral));
        return tried.back();
      });
      log.sigma = choice.sigma;
      clustered = std::move(tried[choice.index]);
    }

    bool done = iteration + 1 == config.max_iters;
    if (!result.iterations.empty()) {
      log.label_changes = clustering_error(result.partition, clustered.partition);
      if (log.label_changes <= config.convergence_tol * n) {
        result.converged = true;
        done = true;
      }
    }
    result.partition = std::move(clustered.partition);
    result.kmeans_cost = clustered.kmeans_cost;
    if (done) {
      result.iterations.push_back(std::move(log));
      break;
    }

    // Per-cluster quotas: floor(c/k), remainder to the largest clusters.
    const std::vector<int> sizes = result.partition.class_sizes();
    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return sizes[a] > sizes[b]; });
    log.quota.assign(static_cast<std::size_t>(k), config.c / k);
    for (int t = 0; t < config.c % k; ++t) ++log.quota[order[t]];

    std::vector<std::vector<Vertex>> members(static_cast<std::size_t>(k));
    for (int i = 0; i < n; ++i) members[result.partition.labels[i]].push_back(static_cast<Vertex>(i));
    Rng rng(derive_seed(seed, 2 * static_cast<std::uint64_t>(iteration) + 2));
    SubsetSample next{size, {}};
    int spill = 0;
    for (int j = 0; j < k; ++j) {
      if (static_cast<int>(members[j].size()) < size) {
        log.notes.push_back("cluster " + std::to_string(j) + " has " + std::to_string(members[j].size()) +
                            " points; its quota of " + std::to_string(log.quota[j]) +
                            " subsets is drawn from all points");
        spill += log.quota[j];
        continue;
      }
      draw_subsets(members[j], size, log.quota[j], rng, next);
    }
    draw_subsets(everyone, size, spill, rng, next);
    subsets = std::move(next);
    result.iterations.push_back(std::move(log));
  }
  return result;
}

Partition uniform_sampled_ttm_subspace(const PointCloud& cloud, int k, int r, int c, double sigma, RngSeed seed,
                                       const SpectralOptions& options) {
  TetrisConfig config;
  config.c = c;
  config.max_iters = 1;
  config.sigma = sigma;
  config.spectral = options;
  return tetris(cloud, k, r, config, seed).partition;
}

SubspaceTtmResult subspace_ttm(const PointCloud& cloud, int k, int r, std::optional<double> sigma, RngSeed seed,
                               FitErrorKind fit_kind, const SpectralOptions& options) {
  check_clustering_arguments(cloud, k, r);
  if (sigma && !(*sigma > 0.0)) throw InvalidArgument("kernel scale sigma must be positive");
  const int n = cloud.n();
  const int m = r + 2;
  const std::uint64_t edges = binomial(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(m));
  if (edges > kFullSubspaceEdgeCap) {
    throw SizeError("complete fit-error hypergraph has " + std::to_string(edges) + " edges (cap " +
                    std::to_string(kFullSubspaceEdgeCap) + ")");
  }
  const FitEvaluator fit(cloud, r, fit_kind);
  std::vector<double> errors;
  errors.reserve(edges);
  for_each_subset(n, m, [&](std::span<const Vertex> tuple) { errors.push_back(fit(tuple)); });

  const double scale = factorial(m - 2);
  auto cluster = [&](double s) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    std::size_t e = 0;
    for_each_subset(n, m, [&](std::span<const Vertex> tuple) {
      const double w = scale * kernel_weight(errors[e++], s);
      for (int p = 0; p < m; ++p) {
        for (int q = p + 1; q < m; ++q) {
          a(tuple[p], tuple[q]) += w;
          a(tuple[q], tuple[p]) += w;
        }
      }
    });
    return ttm_partition_affinity(a, k, seed, options);
  };

  SubspaceTtmResult out;
  if (sigma) {
    out.sigma = *sigma;
    out.partition = cluster(*sigma).partition;
    return out;
  }
  std::vector<SpectralResult> tried;
  const SigmaChoice choice = estimate_sigma(errors, [&](double s) {
    tried.push_back(cluster(s));
    return tried.back();
  });
  out.sigma = choice.sigma;
  out.partition = std::move(tried[choice.index].partition);
  return out;
}

Partition kmeans_points(const PointCloud& cloud, int k, RngSeed seed, const KMeansOptions& options) {
  cloud.validate();
  return kmeans(cloud.points.transpose(), k, seed, options).partition;
}

}  // namespace hyperpart
