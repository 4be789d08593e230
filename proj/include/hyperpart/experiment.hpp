#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hyperpart/planted.hpp"

namespace hyperpart {

enum class ExperimentFamily { Planted, Subspace };

/// Flat key=value experiment description; a key given several times (or with
/// a comma-separated value) forms a list.
///
///   experiment=vary_m
///   n=40
///   n=100
///   m=3
///   methods=ttm,nhcut
///   trials=50
///   seed=1
///
/// Planted experiments (vary_m, vary_p, heatmap_planted, sampling_compare)
/// sweep n, m, k, p, q, alpha; subspace experiments (heatmap_lines,
/// subspace_grid) sweep n (total points, divisible by k), k, sigma_a, with
/// r and r_a fixed and m = r + 2.
struct ExperimentConfig {
  std::string experiment;
  std::vector<int> n;
  std::vector<int> m;
  std::vector<int> k;
  std::vector<double> p;
  std::vector<double> q;
  std::vector<double> alpha;
  std::vector<double> sigma_a;
  std::vector<std::uint64_t> samples;  // key N (alias sampling.N); empty = 8 n ceil(ln^2 n)
  std::vector<int> c;                  // empty = 100 k
  std::vector<std::string> sampling_kinds;  // uniform | weighted
  std::vector<std::string> methods;
  int trials = 1;
  std::uint64_t seed = 0;
  WeightLaw weight_law = WeightLaw::Bernoulli;
  bool balanced = true;
  int r = 3;
  int r_a = 5;
  // When false every wall_ms is written as 0 so output files are byte-stable.
  bool timing = true;
  int threads = 0;  // 0: hardware concurrency
  std::string partitions_dir;  // when set, truth and predicted partitions are saved here

  ExperimentFamily family() const;
  // Fills defaults for empty lists and checks ranges; throws InvalidArgument.
  void finalize();
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ResultRow {
  std::string method;
  int n = 0;
  int m = 0;
  int k = 0;
  std::optional<double> p;
  std::optional<double> q;
  std::optional<double> alpha;
  std::optional<double> sigma_a;
  std::optional<std::uint64_t> samples;
  std::optional<int> c;
  int trial = 0;
  std::uint64_t seed = 0;
  int err = 0;
  double frac_err = 0.0;
  double wall_ms = 0.0;
};

inline constexpr const char* kResultHeader = "method,n,m,k,p,q,alpha,sigma_a,N,c,trial,seed,err,frac_err,wall_ms";

// Runs every (cell, trial) task on a thread pool; rows come back sorted by
// method, cell parameters and trial.
std::vector<ResultRow> run_grid(ExperimentConfig config);

void write_results(std::ostream& out, const std::vector<ResultRow>& rows, bool timing);
// Per-cell trials, mean/median/standard error of err and frac_err, mean wall_ms.
void write_summary(std::ostream& out, const std::vector<ResultRow>& rows, bool timing);

// File stem used for saved partitions, e.g. "ttm_n100_m3_k2_p0.1_q0.2_alpha1_t0".
std::string partition_stem(const ResultRow& row);
std::string truth_stem(const ResultRow& row);

std::filesystem::path summary_path(const std::filesystem::path& results_path);

struct ExperimentOutput {
  std::filesystem::path results;
  std::filesystem::path summary;
  std::size_t rows = 0;
};

ExperimentOutput run_experiment(const ExperimentConfig& config, const std::filesystem::path& results_path);

}  // namespace hyperpart
