#include "hyperpart/planted.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hyperpart {

namespace {

std::size_t power(int base, int exponent) {
  std::size_t result = 1;
  for (int i = 0; i < exponent; ++i) result *= static_cast<std::size_t>(base);
  return result;
}

// Calls fn(multiplicities) for every multiset of size `size` over k classes.
template <typename Fn>
void for_each_composition(int k, int size, std::vector<int>& counts, int cls, Fn&& fn) {
  if (cls == k - 1) {
    counts[cls] = size;
    fn(counts);
    counts[cls] = 0;
    return;
  }
  for (int c = 0; c <= size; ++c) {
    counts[cls] = c;
    for_each_composition(k, size - c, counts, cls + 1, fn);
  }
  counts[cls] = 0;
}

}  // namespace

BlockTensor::BlockTensor(int k, int m, std::vector<double> values) : k_(k), m_(m), values_(std::move(values)) {
  if (k < 1 || m < 2) throw InvalidArgument("block tensor needs k >= 1 and m >= 2");
  if (values_.size() != power(k, m)) {
    throw InvalidArgument("block tensor needs k^m = " + std::to_string(power(k, m)) + " entries");
  }
}

BlockTensor BlockTensor::from_pq(int k, int m, double p, double q) {
  if (k < 1 || m < 2) throw InvalidArgument("block tensor needs k >= 1 and m >= 2");
  std::vector<double> values(power(k, m), q);
  for (int c = 0; c < k; ++c) {
    std::size_t index = 0;
    for (int t = 0; t < m; ++t) index = index * static_cast<std::size_t>(k) + static_cast<std::size_t>(c);
    values[index] = p + q;
  }
  return BlockTensor(k, m, std::move(values));
}

double BlockTensor::operator()(std::span<const int> classes) const {
  std::size_t index = 0;
  for (const int c : classes) index = index * static_cast<std::size_t>(k_) + static_cast<std::size_t>(c);
  return values_[index];
}

bool BlockTensor::is_symmetric() const {
  std::vector<int> classes(static_cast<std::size_t>(m_));
  for (std::size_t index = 0; index < values_.size(); ++index) {
    std::size_t rest = index;
    for (int t = m_ - 1; t >= 0; --t) {
      classes[t] = static_cast<int>(rest % static_cast<std::size_t>(k_));
      rest /= static_cast<std::size_t>(k_);
    }
    std::sort(classes.begin(), classes.end());
    if ((*this)(classes) != values_[index]) return false;
  }
  return true;
}

PlantedSpec PlantedSpec::balanced_pq(int n, int k, int m, double p, double q, double alpha, WeightLaw law) {
  PlantedSpec spec;
  spec.n = n;
  spec.k = k;
  spec.m = m;
  spec.alpha = alpha;
  spec.tensor = BlockTensor::from_pq(k, m, p, q);
  spec.pq = PqParameters{p, q};
  spec.psi = balanced_partition(n, k);
  spec.weight_law = law;
  spec.validate();
  return spec;
}

void PlantedSpec::validate() const {
  if (m < 2) throw InvalidArgument("planted model needs m >= 2");
  if (k < 1) throw InvalidArgument("planted model needs k >= 1");
  if (n < m) throw InvalidArgument("planted model needs n >= m");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DataError("alpha must lie in [0, 1]");
  if (psi.size() != static_cast<std::size_t>(n) || psi.k != k) {
    throw InvalidArgument("ground-truth partition must have n labels over k classes");
  }
  if (tensor.k() != k || tensor.m() != m) throw InvalidArgument("block tensor shape does not match (k, m)");
  if (!tensor.is_symmetric()) throw DataError("block tensor is not symmetric");
  if (pq) {
    const auto [p, q] = *pq;
    if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0)) throw DataError("p and q must lie in [0, 1]");
    if (q > 1.0 - p + 1e-15) throw DataError("(p, q) model requires q <= 1 - p");
  }
}

double PlantedSpec::edge_mean(std::span<const Vertex> sorted_tuple) const {
  int classes[16];
  std::vector<int> spill;
  std::span<int> view;
  if (sorted_tuple.size() <= 16) {
    view = std::span<int>(classes, sorted_tuple.size());
  } else {
    spill.resize(sorted_tuple.size());
    view = spill;
  }
  for (std::size_t t = 0; t < sorted_tuple.size(); ++t) view[t] = psi.labels[sorted_tuple[t]];
  return alpha * tensor(view);
}

bool PlantedSpec::is_balanced() const {
  const auto sizes = psi.class_sizes();
  return std::all_of(sizes.begin(), sizes.end(), [&](int s) { return s == sizes.front(); });
}

WeightedUniformHypergraph generate(const PlantedSpec& spec, RngSeed seed) {
  spec.validate();
  Rng rng(seed);
  std::vector<Vertex> flat;
  std::vector<double> weights;
  for_each_subset(spec.n, spec.m, [&](std::span<const Vertex> tuple) {
    const double mean = spec.edge_mean(tuple);
    if (!(mean >= 0.0 && mean <= 1.0)) {
      throw DataError("edge mean " + std::to_string(mean) + " outside [0, 1]");
    }
    // One uniform per subset keeps streams aligned across laws.
    const double u = rng.uniform();
    double w = 0.0;
    if (spec.weight_law == WeightLaw::Bernoulli) {
      w = u < mean ? 1.0 : 0.0;
    } else {
      const double lo = std::max(0.0, 2.0 * mean - 1.0);
      const double hi = std::min(1.0, 2.0 * mean);
      w = lo + (hi - lo) * u;
    }
    if (w > 0.0) {
      flat.insert(flat.end(), tuple.begin(), tuple.end());
      weights.push_back(w);
    }
  });
  return WeightedUniformHypergraph(spec.n, spec.m, std::move(flat), std::move(weights));
}

Eigen::MatrixXd expected_affinity(const PlantedSpec& spec) {
  spec.validate();
  const int n = spec.n;
  const int m = spec.m;
  const double scale = factorial(m - 2);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  std::vector<int> classes(static_cast<std::size_t>(m));
  std::vector<Vertex> others(static_cast<std::size_t>(n - 2));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      std::size_t next = 0;
      for (int v = 0; v < n; ++v) {
        if (v != i && v != j) others[next++] = static_cast<Vertex>(v);
      }
      classes[0] = spec.psi.labels[i];
      classes[1] = spec.psi.labels[j];
      double sum = 0.0;
      for_each_subset(n - 2, m - 2, [&](std::span<const Vertex> picks) {
        for (std::size_t t = 0; t < picks.size(); ++t) classes[t + 2] = spec.psi.labels[others[picks[t]]];
        sum += spec.alpha * spec.tensor(classes);
      });
      a(i, j) = a(j, i) = scale * sum;
    }
  }
  return a;
}

ExpectedQuantities expected_quantities(const PlantedSpec& spec) {
  spec.validate();
  const int k = spec.k;
  const int m = spec.m;
  ExpectedQuantities out;
  out.class_sizes = spec.psi.class_sizes();
  const double scale = factorial(m - 2);

  out.g = Eigen::MatrixXd::Zero(k, k);
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  std::vector<int> classes(static_cast<std::size_t>(m));
  for (int a = 0; a < k; ++a) {
    for (int b = a; b < k; ++b) {
      std::vector<int> pool = out.class_sizes;
      --pool[a];
      --pool[b];
      double sum = 0.0;
      for_each_composition(k, m - 2, counts, 0, [&](const std::vector<int>& mult) {
        double ways = 1.0;
        std::size_t t = 2;
        for (int c = 0; c < k; ++c) {
          if (mult[c] > 0 && pool[c] < mult[c]) return;
          ways *= binomial_real(std::max(pool[c], 0), mult[c]);
          for (int r = 0; r < mult[c]; ++r) classes[t++] = c;
        }
        classes[0] = a;
        classes[1] = b;
        sum += ways * spec.alpha * spec.tensor(classes);
      });
      out.g(a, b) = out.g(b, a) = scale * sum;
    }
  }

  const int n = spec.n;
  out.d_expected.resize(n);
  for (int i = 0; i < n; ++i) {
    const int a = spec.psi.labels[i];
    double d = -out.g(a, a);
    for (int b = 0; b < k; ++b) d += out.g(a, b) * out.class_sizes[b];
    out.d_expected(i) = d;
  }
  out.d_min = out.d_expected.minCoeff();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(out.g, Eigen::EigenvaluesOnly);
  out.lambda_k_g = solver.eigenvalues()(0);

  double min_ratio = std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const int a = spec.psi.labels[i];
    const double d = out.d_expected(i);
    min_ratio = std::min(min_ratio, out.class_sizes[a] / d);
    const double diag = out.g(a, a) / d;
    lo = std::min(lo, diag);
    hi = std::max(hi, diag);
  }
  out.delta = out.lambda_k_g * min_ratio - (hi - lo);
  return out;
}

PqClosedForm pq_closed_form(const PlantedSpec& spec) {
  spec.validate();
  if (!spec.pq) throw ClosedFormUnavailable("closed forms need the (p, q) model");
  if (!spec.is_balanced() || spec.n % spec.k != 0) {
    throw ClosedFormUnavailable("closed forms need balanced classes");
  }
  const auto [p, q] = *spec.pq;
  const double n = spec.n;
  const double k = spec.k;
  const int m = spec.m;
  const double per_class = n / k;
  PqClosedForm out;
  out.d_min = factorial(m - 1) * spec.alpha *
              (p * binomial_real(per_class - 1, m - 1) + q * binomial_real(n - 1, m - 1));
  out.delta = factorial(m - 2) * spec.alpha * p * n * binomial_real(per_class - 2, m - 2) / (k * out.d_min);
  return out;
}

}  // namespace hyperpart
