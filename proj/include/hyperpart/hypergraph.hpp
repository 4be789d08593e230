#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iterator>
#include <memory>
#include <span>
#include <vector>

namespace hyperpart {

using Vertex = std::uint32_t;

// Binomial coefficient C(n, r); throws SizeError on uint64 overflow.
std::uint64_t binomial(std::uint64_t n, std::uint64_t r);

// Same value in floating point, for sizes that only feed closed forms.
double binomial_real(double n, double r);

double factorial(int n);

// Colexicographic rank of a sorted tuple of distinct ids:
// sum_t C(tuple[t], t + 1). Bijective onto [0, C(n, m)).
std::uint64_t subset_rank(std::span<const Vertex> sorted_tuple);

// Inverse of subset_rank for tuples of size m.
void subset_unrank(std::uint64_t rank, int m, std::span<Vertex> out);

/// Lexicographic enumeration of the sorted m-subsets of {0, ..., n-1}.
///
///   for (const auto& edge : enumerate_edges(5, 3)) { ... }  // 10 tuples
class EdgeRange {
 public:
  class iterator {
   public:
    using value_type = std::vector<Vertex>;
    using difference_type = std::ptrdiff_t;
    using reference = const std::vector<Vertex>&;
    using iterator_category = std::input_iterator_tag;

    iterator() = default;
    iterator(int n, int m);

    reference operator*() const { return tuple_; }
    const std::vector<Vertex>* operator->() const { return &tuple_; }
    iterator& operator++();
    void operator++(int) { ++*this; }
    bool operator==(std::default_sentinel_t) const { return done_; }

   private:
    int n_ = 0;
    std::vector<Vertex> tuple_;
    bool done_ = true;
  };

  EdgeRange(int n, int m);

  iterator begin() const { return iterator(n_, m_); }
  std::default_sentinel_t end() const { return {}; }
  std::uint64_t size() const { return binomial(n_, m_); }

 private:
  int n_;
  int m_;
};

// Throws InvalidArgument unless 2 <= m <= n.
EdgeRange enumerate_edges(int n, int m);

// Calls fn(span<const Vertex>) for every sorted m-subset, lexicographically.
// Unlike enumerate_edges this also accepts m in {0, 1}.
template <typename Fn>
void for_each_subset(int n, int m, Fn&& fn) {
  if (m < 0 || m > n) return;
  std::vector<Vertex> tuple(static_cast<std::size_t>(m));
  for (int t = 0; t < m; ++t) tuple[t] = static_cast<Vertex>(t);
  while (true) {
    fn(std::span<const Vertex>(tuple));
    int t = m - 1;
    while (t >= 0 && tuple[t] == static_cast<Vertex>(n - m + t)) --t;
    if (t < 0) return;
    ++tuple[t];
    for (int u = t + 1; u < m; ++u) tuple[u] = tuple[u - 1] + 1;
  }
}

/// Weighted m-uniform hypergraph on vertices 0..n-1. Edges are stored as a
/// flat array of sorted tuples; the order-m adjacency tensor is never
/// materialized. Immutable after construction.
class WeightedUniformHypergraph {
 public:
  WeightedUniformHypergraph(int n, int m);

  // Validates every invariant (sorted, distinct, in range, unique, weight in
  // [0, 1]) and throws DataError on violation.
  WeightedUniformHypergraph(int n, int m, std::vector<Vertex> flat_vertices,
                            std::vector<double> weights);

  int n() const { return n_; }
  int m() const { return m_; }
  std::size_t num_edges() const { return weights_.size(); }

  std::span<const Vertex> edge(std::size_t e) const {
    return {vertices_.data() + e * static_cast<std::size_t>(m_), static_cast<std::size_t>(m_)};
  }
  double weight(std::size_t e) const { return weights_[e]; }

  std::span<const double> weights() const { return weights_; }
  std::span<const Vertex> flat_vertices() const { return vertices_; }

  double total_weight() const;

  // deg(v) = sum of weights of edges containing v.
  std::vector<double> vertex_degrees() const;

  friend bool operator==(const WeightedUniformHypergraph&, const WeightedUniformHypergraph&) = default;

 private:
  int n_;
  int m_;
  std::vector<Vertex> vertices_;
  std::vector<double> weights_;
};

/// On-demand edge weight evaluator over sorted m-tuples of distinct ids.
/// The evaluator must be pure and return values in [0, 1].
class EdgeWeightOracle {
 public:
  using Evaluator = std::function<double(std::span<const Vertex>)>;

  EdgeWeightOracle(int n, int m, Evaluator evaluator);

  int n() const { return n_; }
  int m() const { return m_; }

  double operator()(std::span<const Vertex> sorted_tuple) const { return evaluator_(sorted_tuple); }

  // Evaluates every m-subset; zero weights are dropped.
  WeightedUniformHypergraph materialize() const;

 private:
  int n_;
  int m_;
  Evaluator evaluator_;
};

// Stored weight for listed edges, 0 for every other m-subset.
EdgeWeightOracle oracle_from_hypergraph(const WeightedUniformHypergraph& h);

/// Assignment of n items to k classes, labels in [0, k).
struct Partition {
  std::vector<int> labels;
  int k = 0;

  Partition() = default;
  Partition(std::vector<int> labels_in, int k_in);

  std::size_t size() const { return labels.size(); }
  std::vector<int> class_sizes() const;

  friend bool operator==(const Partition&, const Partition&) = default;
};

// Balanced ground truth: vertex i in class floor(i * k / n).
Partition balanced_partition(int n, int k);

}  // namespace hyperpart
