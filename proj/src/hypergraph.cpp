#include "hyperpart/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "hyperpart/errors.hpp"

namespace hyperpart {

std::uint64_t binomial(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    // result * (n - r + i) / i stays integral at every step.
    result = result * (n - r + i) / i;
    if (result > static_cast<unsigned __int128>(UINT64_MAX)) {
      throw SizeError("binomial coefficient C(" + std::to_string(n) + "," + std::to_string(r) +
                      ") overflows 64 bits");
    }
  }
  return static_cast<std::uint64_t>(result);
}

double binomial_real(double n, double r) {
  if (r < 0 || r > n) return 0.0;
  double result = 1.0;
  for (int i = 1; i <= static_cast<int>(r); ++i) result = result * (n - r + i) / i;
  return result;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

std::uint64_t subset_rank(std::span<const Vertex> sorted_tuple) {
  std::uint64_t rank = 0;
  for (std::size_t t = 0; t < sorted_tuple.size(); ++t) rank += binomial(sorted_tuple[t], t + 1);
  return rank;
}

namespace {

// C(n, r) <= bound, without overflowing when C(n, r) is huge.
bool binomial_at_most(std::uint64_t n, std::uint64_t r, std::uint64_t bound) {
  if (r > n) return true;
  r = std::min(r, n - r);
  unsigned __int128 value = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    value = value * (n - r + i) / i;
    if (value > bound) return false;
  }
  return value <= bound;
}

}  // namespace

void subset_unrank(std::uint64_t rank, int m, std::span<Vertex> out) {
  for (int t = m; t >= 1; --t) {
    // Largest v with C(v, t) <= rank.
    std::uint64_t lo = static_cast<std::uint64_t>(t - 1);
    std::uint64_t hi = lo + 1;
    while (binomial_at_most(hi, t, rank)) hi *= 2;
    while (hi - lo > 1) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      if (binomial_at_most(mid, t, rank)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    out[t - 1] = static_cast<Vertex>(lo);
    rank -= binomial(lo, t);
  }
}

EdgeRange::iterator::iterator(int n, int m) : n_(n), tuple_(static_cast<std::size_t>(m)), done_(false) {
  for (int t = 0; t < m; ++t) tuple_[t] = static_cast<Vertex>(t);
}

EdgeRange::iterator& EdgeRange::iterator::operator++() {
  const int m = static_cast<int>(tuple_.size());
  int t = m - 1;
  while (t >= 0 && tuple_[t] == static_cast<Vertex>(n_ - m + t)) --t;
  if (t < 0) {
    done_ = true;
    return *this;
  }
  ++tuple_[t];
  for (int u = t + 1; u < m; ++u) tuple_[u] = tuple_[u - 1] + 1;
  return *this;
}

EdgeRange::EdgeRange(int n, int m) : n_(n), m_(m) {}

EdgeRange enumerate_edges(int n, int m) {
  if (m < 2 || m > n) {
    throw InvalidArgument("invalid edge order m=" + std::to_string(m) + " for n=" + std::to_string(n) +
                          " (need 2 <= m <= n)");
  }
  return EdgeRange(n, m);
}

WeightedUniformHypergraph::WeightedUniformHypergraph(int n, int m) : n_(n), m_(m) {
  if (n < 1) throw DataError("hypergraph needs at least one vertex");
  if (m < 2) throw DataError("edge order must be at least 2");
}

WeightedUniformHypergraph::WeightedUniformHypergraph(int n, int m, std::vector<Vertex> flat_vertices,
                                                     std::vector<double> weights)
    : WeightedUniformHypergraph(n, m) {
  const auto mm = static_cast<std::size_t>(m);
  if (flat_vertices.size() != weights.size() * mm) {
    throw DataError("edge list has " + std::to_string(flat_vertices.size()) + " ids for " +
                    std::to_string(weights.size()) + " edges of order " + std::to_string(m));
  }
  std::vector<std::uint64_t> ranks;
  ranks.reserve(weights.size());
  for (std::size_t e = 0; e < weights.size(); ++e) {
    const std::span<const Vertex> tuple(flat_vertices.data() + e * mm, mm);
    for (std::size_t t = 0; t < mm; ++t) {
      if (tuple[t] >= static_cast<Vertex>(n)) {
        throw DataError("edge " + std::to_string(e) + " has vertex id " + std::to_string(tuple[t]) +
                        " outside [0, " + std::to_string(n) + ")");
      }
      if (t > 0 && tuple[t] <= tuple[t - 1]) {
        throw DataError("edge " + std::to_string(e) + " is not strictly ascending");
      }
    }
    const double w = weights[e];
    if (!(w >= 0.0 && w <= 1.0)) {
      throw DataError("edge " + std::to_string(e) + " has weight " + std::to_string(w) + " outside [0, 1]");
    }
    ranks.push_back(subset_rank(tuple));
  }
  std::sort(ranks.begin(), ranks.end());
  if (std::adjacent_find(ranks.begin(), ranks.end()) != ranks.end()) {
    throw DataError("edge list contains a duplicate edge");
  }
  vertices_ = std::move(flat_vertices);
  weights_ = std::move(weights);
}

double WeightedUniformHypergraph::total_weight() const {
  double total = 0.0;
  for (const double w : weights_) total += w;
  return total;
}

std::vector<double> WeightedUniformHypergraph::vertex_degrees() const {
  std::vector<double> degree(static_cast<std::size_t>(n_), 0.0);
  for (std::size_t e = 0; e < num_edges(); ++e) {
    for (const Vertex v : edge(e)) degree[v] += weights_[e];
  }
  return degree;
}

EdgeWeightOracle::EdgeWeightOracle(int n, int m, Evaluator evaluator)
    : n_(n), m_(m), evaluator_(std::move(evaluator)) {
  if (m < 2 || m > n) throw InvalidArgument("oracle order must satisfy 2 <= m <= n");
}

WeightedUniformHypergraph EdgeWeightOracle::materialize() const {
  std::vector<Vertex> flat;
  std::vector<double> weights;
  for (const auto& tuple : enumerate_edges(n_, m_)) {
    const double w = evaluator_(tuple);
    if (w != 0.0) {
      flat.insert(flat.end(), tuple.begin(), tuple.end());
      weights.push_back(w);
    }
  }
  return WeightedUniformHypergraph(n_, m_, std::move(flat), std::move(weights));
}

EdgeWeightOracle oracle_from_hypergraph(const WeightedUniformHypergraph& h) {
  auto table = std::make_shared<std::unordered_map<std::uint64_t, double>>();
  table->reserve(h.num_edges());
  for (std::size_t e = 0; e < h.num_edges(); ++e) table->emplace(subset_rank(h.edge(e)), h.weight(e));
  return EdgeWeightOracle(h.n(), h.m(), [table](std::span<const Vertex> tuple) {
    const auto it = table->find(subset_rank(tuple));
    return it == table->end() ? 0.0 : it->second;
  });
}

Partition::Partition(std::vector<int> labels_in, int k_in) : labels(std::move(labels_in)), k(k_in) {
  if (k < 1) throw InvalidArgument("partition needs k >= 1");
  for (const int label : labels) {
    if (label < 0 || label >= k) {
      throw DataError("label " + std::to_string(label) + " outside [0, " + std::to_string(k) + ")");
    }
  }
}

std::vector<int> Partition::class_sizes() const {
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  for (const int label : labels) ++sizes[label];
  return sizes;
}

Partition balanced_partition(int n, int k) {
  if (k < 1 || n < k) throw InvalidArgument("balanced partition needs 1 <= k <= n");
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    labels[i] = static_cast<int>(static_cast<long long>(i) * k / n);
  }
  return Partition(std::move(labels), k);
}

}  // namespace hyperpart
