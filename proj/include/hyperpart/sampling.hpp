#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "hyperpart/hypergraph.hpp"
#include "hyperpart/random.hpp"
#include "hyperpart/spectral.hpp"

namespace hyperpart {

enum class SamplingKind { Uniform, WeightProportional, Explicit };

struct EdgeDraw;
class SamplingPlan;
EdgeDraw draw(const SamplingPlan& plan, RngSeed seed);

/// Distribution (p_e) over the m-subsets plus the sample size N. Draws are
/// always with replacement.
///
/// Uniform plans cover all C(n, m) subsets implicitly (p_e = 1 / C(n, m));
/// the other kinds carry an explicit support list with one probability per
/// listed tuple.
class SamplingPlan {
 public:
  static SamplingPlan uniform(int n, int m, std::uint64_t n_samples);
  static SamplingPlan weight_proportional(const WeightedUniformHypergraph& h, std::uint64_t n_samples);
  // Walks every m-subset; refused for m >= 4 with n > 60.
  static SamplingPlan weight_proportional(const EdgeWeightOracle& oracle, std::uint64_t n_samples);
  // probabilities[s] belongs to the s-th tuple in support_flat. Must be
  // nonnegative and sum to 1.
  static SamplingPlan explicit_plan(int n, int m, std::vector<Vertex> support_flat, std::vector<double> probabilities,
                                    std::uint64_t n_samples);

  SamplingKind kind() const { return kind_; }
  int n() const { return n_; }
  int m() const { return m_; }
  std::uint64_t n_samples() const { return n_samples_; }

  // Number of subsets with a listed probability (C(n, m) for uniform).
  std::uint64_t support_size() const;
  std::span<const Vertex> support_tuple(std::size_t s) const;
  double support_probability(std::size_t s) const;

  // p_e for an arbitrary sorted tuple (0 outside the support).
  double probability(std::span<const Vertex> sorted_tuple) const;

 private:
  SamplingPlan() = default;

  SamplingKind kind_ = SamplingKind::Uniform;
  int n_ = 0;
  int m_ = 0;
  std::uint64_t n_samples_ = 0;
  std::vector<Vertex> support_;
  std::vector<double> probabilities_;
  std::vector<double> cumulative_;
  std::vector<std::uint64_t> ranks_;  // sorted, for probability() lookup
  std::vector<double> ranked_probabilities_;

  friend EdgeDraw draw(const SamplingPlan& plan, RngSeed seed);
};

/// Multiset of drawn edges: distinct tuples in ascending rank order, each with
/// its multiplicity and the probability it was drawn with.
struct EdgeDraw {
  int n = 0;
  int m = 0;
  std::uint64_t n_samples = 0;
  std::vector<Vertex> tuples;  // flat, m ids per distinct edge
  std::vector<std::uint64_t> counts;
  std::vector<double> probabilities;

  std::size_t distinct() const { return counts.size(); }
  std::span<const Vertex> tuple(std::size_t s) const {
    return {tuples.data() + s * static_cast<std::size_t>(m), static_cast<std::size_t>(m)};
  }
};

struct SampledAffinity {
  Eigen::MatrixXd a_hat;
  EdgeDraw samples;
};

/// A_hat = ((m-2)! / N) * sum over drawn e (with multiplicity) of (w_e / p_e) R_e.
/// Throws DataError if a drawn edge carries p_e = 0.
SampledAffinity estimate_affinity(EdgeDraw samples, const EdgeWeightOracle& oracle);

// sum_e p_e * contribution(e) over the plan's support with N = 1, i.e. the
// exact expectation of A_hat. Equals flatten(h).a when the plan covers
// every positive-weight edge.
Eigen::MatrixXd expected_estimate(const SamplingPlan& plan, const EdgeWeightOracle& oracle);

// max over the support of w_e / p_e.
double weight_ratio_bound(const SamplingPlan& plan, const EdgeWeightOracle& oracle);

SpectralResult sampled_ttm_partition(const EdgeWeightOracle& oracle, const SamplingPlan& plan, int k, RngSeed seed,
                                     const SpectralOptions& options = {});

}  // namespace hyperpart
