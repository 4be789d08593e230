#include "hyperpart/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "hyperpart/errors.hpp"

namespace hyperpart {

namespace {

constexpr int kOraclePassMaxN = 60;

void add_pair_contributions(Eigen::MatrixXd& a, std::span<const Vertex> tuple, double value) {
  for (std::size_t s = 0; s < tuple.size(); ++s) {
    for (std::size_t t = s + 1; t < tuple.size(); ++t) {
      a(tuple[s], tuple[t]) += value;
      a(tuple[t], tuple[s]) += value;
    }
  }
}

}  // namespace

SamplingPlan SamplingPlan::uniform(int n, int m, std::uint64_t n_samples) {
  if (m < 2 || m > n) throw InvalidArgument("sampling plan needs 2 <= m <= n");
  if (n_samples < 1) throw InvalidArgument("sampling plan needs N >= 1");
  SamplingPlan plan;
  plan.kind_ = SamplingKind::Uniform;
  plan.n_ = n;
  plan.m_ = m;
  plan.n_samples_ = n_samples;
  binomial(n, m);  // throws if the subset count does not fit
  return plan;
}

SamplingPlan SamplingPlan::explicit_plan(int n, int m, std::vector<Vertex> support_flat,
                                         std::vector<double> probabilities, std::uint64_t n_samples) {
  if (m < 2 || m > n) throw InvalidArgument("sampling plan needs 2 <= m <= n");
  if (n_samples < 1) throw InvalidArgument("sampling plan needs N >= 1");
  if (support_flat.size() != probabilities.size() * static_cast<std::size_t>(m)) {
    throw InvalidArgument("support and probability lists differ in length");
  }
  if (probabilities.empty()) throw DataError("sampling plan has empty support");
  double total = 0.0;
  for (const double p : probabilities) {
    if (!(p >= 0.0)) throw DataError("sampling probabilities must be nonnegative");
    total += p;
  }
  if (!(std::abs(total - 1.0) <= 1e-9)) throw DataError("sampling probabilities must sum to 1");

  SamplingPlan plan;
  plan.kind_ = SamplingKind::Explicit;
  plan.n_ = n;
  plan.m_ = m;
  plan.n_samples_ = n_samples;
  plan.support_ = std::move(support_flat);
  plan.probabilities_ = std::move(probabilities);
  plan.cumulative_.resize(plan.probabilities_.size());
  std::partial_sum(plan.probabilities_.begin(), plan.probabilities_.end(), plan.cumulative_.begin());

  std::vector<std::pair<std::uint64_t, double>> ranked;
  ranked.reserve(plan.probabilities_.size());
  for (std::size_t s = 0; s < plan.probabilities_.size(); ++s) {
    ranked.emplace_back(subset_rank(plan.support_tuple(s)), plan.probabilities_[s]);
  }
  std::sort(ranked.begin(), ranked.end());
  for (std::size_t s = 1; s < ranked.size(); ++s) {
    if (ranked[s].first == ranked[s - 1].first) throw DataError("sampling support lists an edge twice");
  }
  for (const auto& [rank, p] : ranked) {
    plan.ranks_.push_back(rank);
    plan.ranked_probabilities_.push_back(p);
  }
  return plan;
}

SamplingPlan SamplingPlan::weight_proportional(const WeightedUniformHypergraph& h, std::uint64_t n_samples) {
  std::vector<Vertex> support;
  std::vector<double> weights;
  double total = 0.0;
  for (std::size_t e = 0; e < h.num_edges(); ++e) {
    if (h.weight(e) > 0.0) {
      const auto tuple = h.edge(e);
      support.insert(support.end(), tuple.begin(), tuple.end());
      weights.push_back(h.weight(e));
      total += h.weight(e);
    }
  }
  if (weights.empty()) throw DataError("weight-proportional sampling needs at least one positive weight");
  for (double& w : weights) w /= total;
  SamplingPlan plan = explicit_plan(h.n(), h.m(), std::move(support), std::move(weights), n_samples);
  plan.kind_ = SamplingKind::WeightProportional;
  return plan;
}

SamplingPlan SamplingPlan::weight_proportional(const EdgeWeightOracle& oracle, std::uint64_t n_samples) {
  if (oracle.m() >= 4 && oracle.n() > kOraclePassMaxN) {
    throw SizeError("weight-proportional plan over an oracle is capped at n <= " + std::to_string(kOraclePassMaxN) +
                    " for m >= 4");
  }
  return weight_proportional(oracle.materialize(), n_samples);
}

std::uint64_t SamplingPlan::support_size() const {
  return kind_ == SamplingKind::Uniform ? binomial(n_, m_) : probabilities_.size();
}

std::span<const Vertex> SamplingPlan::support_tuple(std::size_t s) const {
  return {support_.data() + s * static_cast<std::size_t>(m_), static_cast<std::size_t>(m_)};
}

double SamplingPlan::support_probability(std::size_t s) const {
  return kind_ == SamplingKind::Uniform ? 1.0 / static_cast<double>(binomial(n_, m_)) : probabilities_[s];
}

double SamplingPlan::probability(std::span<const Vertex> sorted_tuple) const {
  if (kind_ == SamplingKind::Uniform) return 1.0 / static_cast<double>(binomial(n_, m_));
  const std::uint64_t rank = subset_rank(sorted_tuple);
  const auto it = std::lower_bound(ranks_.begin(), ranks_.end(), rank);
  if (it == ranks_.end() || *it != rank) return 0.0;
  return ranked_probabilities_[static_cast<std::size_t>(it - ranks_.begin())];
}

EdgeDraw draw(const SamplingPlan& plan, RngSeed seed) {
  Rng rng(seed);
  const int m = plan.m();
  // rank -> (count, probability)
  std::map<std::uint64_t, std::pair<std::uint64_t, double>> drawn;
  std::vector<Vertex> tuple(static_cast<std::size_t>(m));
  if (plan.kind() == SamplingKind::Uniform) {
    const std::uint64_t total = binomial(plan.n(), m);
    const double p = 1.0 / static_cast<double>(total);
    for (std::uint64_t s = 0; s < plan.n_samples(); ++s) {
      auto& slot = drawn[rng.below(total)];
      ++slot.first;
      slot.second = p;
    }
  } else {
    const double total = plan.cumulative_.back();
    for (std::uint64_t s = 0; s < plan.n_samples(); ++s) {
      const double target = rng.uniform() * total;
      auto it = std::upper_bound(plan.cumulative_.begin(), plan.cumulative_.end(), target);
      if (it == plan.cumulative_.end()) --it;
      const auto index = static_cast<std::size_t>(it - plan.cumulative_.begin());
      auto& slot = drawn[subset_rank(plan.support_tuple(index))];
      ++slot.first;
      slot.second = plan.probabilities_[index];
    }
  }
  EdgeDraw out;
  out.n = plan.n();
  out.m = m;
  out.n_samples = plan.n_samples();
  out.tuples.reserve(drawn.size() * static_cast<std::size_t>(m));
  for (const auto& [rank, slot] : drawn) {
    subset_unrank(rank, m, tuple);
    out.tuples.insert(out.tuples.end(), tuple.begin(), tuple.end());
    out.counts.push_back(slot.first);
    out.probabilities.push_back(slot.second);
  }
  return out;
}

SampledAffinity estimate_affinity(EdgeDraw samples, const EdgeWeightOracle& oracle) {
  if (samples.n != oracle.n() || samples.m != oracle.m()) {
    throw InvalidArgument("drawn edges and oracle disagree on (n, m)");
  }
  if (samples.n_samples < 1) throw InvalidArgument("estimator needs N >= 1");
  const double scale = factorial(samples.m - 2) / static_cast<double>(samples.n_samples);
  SampledAffinity out;
  out.a_hat = Eigen::MatrixXd::Zero(samples.n, samples.n);
  for (std::size_t s = 0; s < samples.distinct(); ++s) {
    const double p = samples.probabilities[s];
    if (!(p > 0.0)) throw DataError("drawn edge has recorded probability 0");
    const auto tuple = samples.tuple(s);
    const double w = oracle(tuple);
    add_pair_contributions(out.a_hat, tuple, scale * static_cast<double>(samples.counts[s]) * (w / p));
  }
  out.samples = std::move(samples);
  return out;
}

Eigen::MatrixXd expected_estimate(const SamplingPlan& plan, const EdgeWeightOracle& oracle) {
  const double scale = factorial(plan.m() - 2);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(plan.n(), plan.n());
  auto contribute = [&](std::span<const Vertex> tuple, double p) {
    if (p > 0.0) add_pair_contributions(a, tuple, p * (scale * (oracle(tuple) / p)));
  };
  if (plan.kind() == SamplingKind::Uniform) {
    const double p = plan.support_probability(0);
    for_each_subset(plan.n(), plan.m(), [&](std::span<const Vertex> tuple) { contribute(tuple, p); });
  } else {
    for (std::size_t s = 0; s < plan.support_size(); ++s) contribute(plan.support_tuple(s), plan.support_probability(s));
  }
  return a;
}

double weight_ratio_bound(const SamplingPlan& plan, const EdgeWeightOracle& oracle) {
  double worst = 0.0;
  if (plan.kind() == SamplingKind::Uniform) {
    const double p = plan.support_probability(0);
    for_each_subset(plan.n(), plan.m(), [&](std::span<const Vertex> tuple) { worst = std::max(worst, oracle(tuple) / p); });
  } else {
    for (std::size_t s = 0; s < plan.support_size(); ++s) {
      const double p = plan.support_probability(s);
      if (p > 0.0) worst = std::max(worst, oracle(plan.support_tuple(s)) / p);
    }
  }
  return worst;
}

SpectralResult sampled_ttm_partition(const EdgeWeightOracle& oracle, const SamplingPlan& plan, int k, RngSeed seed,
                                     const SpectralOptions& options) {
  if (k < 2 || k > oracle.n()) throw InvalidArgument("sampled TTM needs 2 <= k <= n");
  SampledAffinity estimate = estimate_affinity(draw(plan, derive_seed(seed, 1)), oracle);
  return ttm_partition_affinity(estimate.a_hat, k, derive_seed(seed, 2), options);
}

}  // namespace hyperpart
