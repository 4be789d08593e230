#include "hyperpart/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "hyperpart/errors.hpp"
#include "hyperpart/io.hpp"
#include "hyperpart/metrics.hpp"
#include "hyperpart/sampling.hpp"
#include "hyperpart/spectral.hpp"
#include "hyperpart/subspace.hpp"

namespace hyperpart {

namespace {

const std::set<std::string> kPlantedExperiments = {"vary_m", "vary_p", "heatmap_planted", "sampling_compare"};
const std::set<std::string> kSubspaceExperiments = {"heatmap_lines", "subspace_grid"};
const std::set<std::string> kPlantedMethods = {"ttm", "nhcut", "hosvd", "sampled_ttm"};
const std::set<std::string> kSubspaceMethods = {"ttm", "tetris", "sampled_ttm", "kmeans_embed"};

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

bool parse_bool(std::string_view text) {
  if (text == "true" || text == "on" || text == "1") return true;
  if (text == "false" || text == "off" || text == "0") return false;
  throw InvalidArgument("expected a boolean, got '" + std::string(text) + "'");
}

int to_int(std::string_view text) {
  try {
    const long long value = parse_integer(text);
    if (value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max()) {
      throw InvalidArgument("integer out of range: " + std::string(text));
    }
    return static_cast<int>(value);
  } catch (const DataError& e) {
    throw InvalidArgument(e.what());
  }
}

double to_double(std::string_view text) {
  try {
    return parse_double(text);
  } catch (const DataError& e) {
    throw InvalidArgument(e.what());
  }
}

std::uint64_t to_u64(std::string_view text) {
  const long long value = [&] {
    try {
      return parse_integer(text);
    } catch (const DataError& e) {
      throw InvalidArgument(e.what());
    }
  }();
  if (value < 0) throw InvalidArgument("expected a nonnegative integer, got '" + std::string(text) + "'");
  return static_cast<std::uint64_t>(value);
}

std::uint64_t default_samples(int n) {
  const double log_n = std::log(static_cast<double>(n));
  return 8ULL * static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(std::ceil(log_n * log_n));
}

std::string field(const std::optional<double>& value) { return value ? format_double(*value) : std::string(); }
template <typename Int>
std::string field(const std::optional<Int>& value) {
  return value ? std::to_string(*value) : std::string();
}

std::string fixed3(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.3f", value);
  return buffer;
}

auto cell_key(const ResultRow& row) {
  return std::tie(row.method, row.n, row.m, row.k, row.p, row.q, row.alpha, row.sigma_a, row.samples, row.c);
}

// One generated instance plus every configured method run on it.
struct Task {
  int n = 0;
  int m = 0;
  int k = 0;
  double p = 0.0;
  double q = 0.0;
  double alpha = 0.0;
  double sigma_a = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

RngSeed method_seed(std::uint64_t trial_seed, const std::string& variant) {
  return derive_seed(RngSeed{trial_seed}, stable_hash(variant));
}

void save_if_requested(const ExperimentConfig& config, const ResultRow& row, const Partition& truth,
                       const Partition& predicted) {
  if (config.partitions_dir.empty()) return;
  const std::filesystem::path dir(config.partitions_dir);
  save_partition(dir / (truth_stem(row) + ".part"), truth);
  save_partition(dir / (partition_stem(row) + ".part"), predicted);
}

ResultRow base_row(const Task& task, const std::string& method) {
  ResultRow row;
  row.method = method;
  row.n = task.n;
  row.m = task.m;
  row.k = task.k;
  row.trial = task.trial;
  row.seed = task.seed;
  return row;
}

void finish_row(ResultRow& row, const Partition& truth, const Partition& predicted, double wall_ms) {
  row.err = clustering_error(truth, predicted);
  row.frac_err = static_cast<double>(row.err) / row.n;
  row.wall_ms = wall_ms;
}

std::vector<ResultRow> run_planted_task(const ExperimentConfig& config, const Task& task) {
  PlantedSpec spec = PlantedSpec::balanced_pq(task.n, task.k, task.m, task.p, task.q, task.alpha, config.weight_law);
  if (!config.balanced) spec.psi = graded_partition(task.n, task.k);
  spec.validate();
  const WeightedUniformHypergraph h = generate(spec, RngSeed{task.seed});
  std::vector<ResultRow> rows;
  for (const std::string& method : config.methods) {
    auto planted_row = [&](const std::string& name) {
      ResultRow row = base_row(task, name);
      row.p = task.p;
      row.q = task.q;
      row.alpha = task.alpha;
      return row;
    };
    if (method == "sampled_ttm") {
      const EdgeWeightOracle oracle = oracle_from_hypergraph(h);
      const std::vector<std::uint64_t> sample_sizes =
          config.samples.empty() ? std::vector<std::uint64_t>{default_samples(task.n)} : config.samples;
      for (const std::string& kind : config.sampling_kinds) {
        for (const std::uint64_t samples : sample_sizes) {
          ResultRow row = planted_row("sampled_ttm_" + kind);
          row.samples = samples;
          const RngSeed seed = method_seed(task.seed, row.method + "/N=" + std::to_string(samples));
          Stopwatch clock;
          Partition predicted;
          if (kind == "weighted" && h.num_edges() == 0) {
            // Nothing to sample in proportion to; everything lands in one class.
            predicted = Partition(std::vector<int>(static_cast<std::size_t>(task.n), 0), task.k);
          } else {
            const SamplingPlan plan = kind == "uniform" ? SamplingPlan::uniform(task.n, task.m, samples)
                                                        : SamplingPlan::weight_proportional(h, samples);
            predicted = sampled_ttm_partition(oracle, plan, task.k, seed).partition;
          }
          finish_row(row, spec.psi, predicted, clock.ms());
          save_if_requested(config, row, spec.psi, predicted);
          rows.push_back(std::move(row));
        }
      }
      continue;
    }
    ResultRow row = planted_row(method);
    const RngSeed seed = method_seed(task.seed, method);
    Stopwatch clock;
    Partition predicted;
    if (method == "ttm") {
      predicted = ttm_partition(h, task.k, seed).partition;
    } else if (method == "nhcut") {
      predicted = nhcut_partition(h, task.k, seed).partition;
    } else {
      predicted = hosvd_partition(h, task.k, seed).partition;
    }
    finish_row(row, spec.psi, predicted, clock.ms());
    save_if_requested(config, row, spec.psi, predicted);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ResultRow> run_subspace_task(const ExperimentConfig& config, const Task& task) {
  SubspaceSpec spec;
  spec.k = task.k;
  spec.r = config.r;
  spec.ambient_dim = config.r_a;
  spec.points_per = task.n / task.k;
  spec.noise_sigma = task.sigma_a;
  const PointCloud cloud = generate_subspaces(spec, RngSeed{task.seed});
  const Partition& truth = *cloud.labels;
  const std::vector<int> budgets = config.c.empty() ? std::vector<int>{100 * task.k} : config.c;
  std::vector<ResultRow> rows;
  for (const std::string& method : config.methods) {
    auto subspace_row = [&](std::optional<int> c) {
      ResultRow row = base_row(task, method);
      row.sigma_a = task.sigma_a;
      row.c = c;
      return row;
    };
    if (method == "tetris" || method == "sampled_ttm") {
      for (const int c : budgets) {
        ResultRow row = subspace_row(c);
        const RngSeed seed = method_seed(task.seed, method + "/c=" + std::to_string(c));
        TetrisConfig tetris_config;
        tetris_config.c = c;
        if (method == "sampled_ttm") tetris_config.max_iters = 1;
        Stopwatch clock;
        const Partition predicted = tetris(cloud, task.k, config.r, tetris_config, seed).partition;
        finish_row(row, truth, predicted, clock.ms());
        save_if_requested(config, row, truth, predicted);
        rows.push_back(std::move(row));
      }
      continue;
    }
    ResultRow row = subspace_row(std::nullopt);
    const RngSeed seed = method_seed(task.seed, method);
    Stopwatch clock;
    const Partition predicted = method == "ttm" ? subspace_ttm(cloud, task.k, config.r, std::nullopt, seed).partition
                                                : kmeans_points(cloud, task.k, seed);
    finish_row(row, truth, predicted, clock.ms());
    save_if_requested(config, row, truth, predicted);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Task> expand_tasks(const ExperimentConfig& config) {
  std::vector<Task> tasks;
  auto add_trials = [&](Task cell, const std::string& key) {
    for (int t = 0; t < config.trials; ++t) {
      cell.trial = t;
      cell.seed = config.seed + stable_hash(key + "#trial=" + std::to_string(t));
      tasks.push_back(cell);
    }
  };
  if (config.family() == ExperimentFamily::Planted) {
    for (const int n : config.n) {
      for (const int m : config.m) {
        for (const int k : config.k) {
          for (const double p : config.p) {
            for (const double q : config.q) {
              for (const double alpha : config.alpha) {
                const std::string key = "planted/n=" + std::to_string(n) + ";m=" + std::to_string(m) +
                                        ";k=" + std::to_string(k) + ";p=" + format_double(p) +
                                        ";q=" + format_double(q) + ";alpha=" + format_double(alpha) +
                                        ";law=" + to_string(config.weight_law) +
                                        ";balanced=" + (config.balanced ? "true" : "false");
                add_trials(Task{n, m, k, p, q, alpha, 0.0, 0, 0}, key);
              }
            }
          }
        }
      }
    }
  } else {
    for (const int n : config.n) {
      for (const int k : config.k) {
        for (const double sigma_a : config.sigma_a) {
          const std::string key = "subspace/n=" + std::to_string(n) + ";k=" + std::to_string(k) +
                                  ";r=" + std::to_string(config.r) + ";r_a=" + std::to_string(config.r_a) +
                                  ";sigma_a=" + format_double(sigma_a);
          add_trials(Task{n, config.r + 2, k, 0.0, 0.0, 0.0, sigma_a, 0, 0}, key);
        }
      }
    }
  }
  return tasks;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t half = values.size() / 2;
  return values.size() % 2 == 1 ? values[half] : 0.5 * (values[half - 1] + values[half]);
}

double mean(const std::vector<double>& values) {
  double total = 0.0;
  for (const double v : values) total += v;
  return total / static_cast<double>(values.size());
}

double standard_error(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double mu = mean(values);
  double ss = 0.0;
  for (const double v : values) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
}

}  // namespace

ExperimentFamily ExperimentConfig::family() const {
  return kSubspaceExperiments.count(experiment) ? ExperimentFamily::Subspace : ExperimentFamily::Planted;
}

void ExperimentConfig::finalize() {
  if (!kPlantedExperiments.count(experiment) && !kSubspaceExperiments.count(experiment)) {
    throw InvalidArgument("unknown experiment '" + experiment + "'");
  }
  if (n.empty()) throw InvalidArgument("config needs at least one n");
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  if (threads < 0) throw InvalidArgument("threads must be >= 0");
  if (sampling_kinds.empty()) sampling_kinds = {"uniform"};
  for (const auto& kind : sampling_kinds) {
    if (kind != "uniform" && kind != "weighted") {
      throw InvalidArgument("unknown sampling kind '" + kind + "' (uniform | weighted)");
    }
  }
  for (const auto s : samples) {
    if (s < 1) throw InvalidArgument("N must be >= 1");
  }
  for (const int budget : c) {
    if (budget < 1) throw InvalidArgument("c must be >= 1");
  }

  if (family() == ExperimentFamily::Planted) {
    if (m.empty()) m = {3};
    if (k.empty()) k = {2};
    if (p.empty()) p = {0.1};
    if (q.empty()) q = {0.2};
    if (alpha.empty()) alpha = {1.0};
    if (methods.empty()) methods = {"ttm", "nhcut", "hosvd"};
    if (!sigma_a.empty() || !c.empty()) throw InvalidArgument("sigma_a and c apply to subspace experiments only");
    for (const auto& method : methods) {
      if (!kPlantedMethods.count(method)) throw InvalidArgument("method '" + method + "' does not apply to " + experiment);
    }
    const bool hosvd = std::find(methods.begin(), methods.end(), "hosvd") != methods.end();
    for (const int size : n) {
      for (const int order : m) {
        if (order < 2 || order > size) throw InvalidArgument("need 2 <= m <= n");
      }
      for (const int classes : k) {
        if (classes < 2 || classes > size) throw InvalidArgument("need 2 <= k <= n");
      }
      if (hosvd && size > kHosvdDefaultCap) {
        throw InvalidArgument("hosvd is capped at n <= " + std::to_string(kHosvdDefaultCap));
      }
    }
  } else {
    if (k.empty()) k = {5};
    if (sigma_a.empty()) sigma_a = {0.0};
    if (methods.empty()) methods = {"tetris"};
    if (!p.empty() || !q.empty() || !alpha.empty() || !samples.empty()) {
      throw InvalidArgument("p, q, alpha and N apply to planted experiments only");
    }
    if (!m.empty() && (m.size() != 1 || m.front() != r + 2)) {
      throw InvalidArgument("subspace experiments fix m = r + 2");
    }
    m = {r + 2};
    if (std::find(sampling_kinds.begin(), sampling_kinds.end(), "weighted") != sampling_kinds.end()) {
      throw InvalidArgument("subspace experiments sample uniformly");
    }
    if (r < 1 || r >= r_a) throw InvalidArgument("need 1 <= r < r_a");
    for (const auto& method : methods) {
      if (!kSubspaceMethods.count(method)) throw InvalidArgument("method '" + method + "' does not apply to " + experiment);
    }
    for (const int size : n) {
      for (const int classes : k) {
        if (classes < 2 || size % classes != 0) throw InvalidArgument("n must be a multiple of k >= 2");
        if (r + 2 > size) throw InvalidArgument("need m = r + 2 <= n");
      }
    }
    for (const double s : sigma_a) {
      if (!(s >= 0.0)) throw InvalidArgument("sigma_a must be >= 0");
    }
  }
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::set<std::string> seen_scalars;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidArgument("config line " + std::to_string(line_no) + " is not key=value");
    }
    const std::string key(trim(body.substr(0, eq)));
    const std::string_view value = trim(body.substr(eq + 1));
    std::vector<std::string_view> items;
    for (std::size_t pos = 0;;) {
      const auto comma = value.find(',', pos);
      const auto item = trim(value.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
      if (!item.empty()) items.push_back(item);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    auto scalar = [&]() -> std::string_view {
      if (!seen_scalars.insert(key).second) throw InvalidArgument("config key '" + key + "' given twice");
      if (items.size() != 1) throw InvalidArgument("config key '" + key + "' takes one value");
      return items.front();
    };
    if (key == "n") {
      for (auto v : items) config.n.push_back(to_int(v));
    } else if (key == "m") {
      for (auto v : items) config.m.push_back(to_int(v));
    } else if (key == "k") {
      for (auto v : items) config.k.push_back(to_int(v));
    } else if (key == "p") {
      for (auto v : items) config.p.push_back(to_double(v));
    } else if (key == "q") {
      for (auto v : items) config.q.push_back(to_double(v));
    } else if (key == "alpha") {
      for (auto v : items) config.alpha.push_back(to_double(v));
    } else if (key == "sigma_a") {
      for (auto v : items) config.sigma_a.push_back(to_double(v));
    } else if (key == "N" || key == "sampling.N") {
      for (auto v : items) config.samples.push_back(to_u64(v));
    } else if (key == "c") {
      for (auto v : items) config.c.push_back(to_int(v));
    } else if (key == "sampling.kind") {
      for (auto v : items) config.sampling_kinds.emplace_back(v);
    } else if (key == "methods" || key == "method") {
      for (auto v : items) config.methods.emplace_back(v);
    } else if (key == "experiment") {
      config.experiment = std::string(scalar());
    } else if (key == "trials") {
      config.trials = to_int(scalar());
    } else if (key == "seed") {
      config.seed = to_u64(scalar());
    } else if (key == "weight_law") {
      config.weight_law = parse_weight_law(scalar());
    } else if (key == "balanced") {
      config.balanced = parse_bool(scalar());
    } else if (key == "r") {
      config.r = to_int(scalar());
    } else if (key == "r_a") {
      config.r_a = to_int(scalar());
    } else if (key == "timing") {
      config.timing = parse_bool(scalar());
    } else if (key == "threads") {
      config.threads = to_int(scalar());
    } else if (key == "partitions_dir") {
      config.partitions_dir = std::string(scalar());
    } else {
      throw InvalidArgument("unknown config key '" + key + "' (line " + std::to_string(line_no) + ")");
    }
  }
  config.finalize();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config " + path.string());
  return parse_config(in);
}

std::vector<ResultRow> run_grid(ExperimentConfig config) {
  config.finalize();
  if (!config.partitions_dir.empty()) std::filesystem::create_directories(config.partitions_dir);
  const std::vector<Task> tasks = expand_tasks(config);
  std::vector<std::vector<ResultRow>> results(tasks.size());
  std::vector<std::exception_ptr> failures(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      try {
        results[t] = config.family() == ExperimentFamily::Planted ? run_planted_task(config, tasks[t])
                                                                  : run_subspace_task(config, tasks[t]);
      } catch (...) {
        failures[t] = std::current_exception();
      }
    }
  };
  const unsigned hardware = std::max(1U, std::thread::hardware_concurrency());
  const std::size_t workers =
      std::min<std::size_t>(tasks.size(), config.threads > 0 ? static_cast<std::size_t>(config.threads) : hardware);
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& thread : pool) thread.join();
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<ResultRow> rows;
  for (auto& batch : results) {
    for (auto& row : batch) rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tuple_cat(cell_key(a), std::tie(a.trial)) < std::tuple_cat(cell_key(b), std::tie(b.trial));
  });
  return rows;
}

void write_results(std::ostream& out, const std::vector<ResultRow>& rows, bool timing) {
  out << kResultHeader << '\n';
  for (const ResultRow& row : rows) {
    out << row.method << ',' << row.n << ',' << row.m << ',' << row.k << ',' << field(row.p) << ',' << field(row.q)
        << ',' << field(row.alpha) << ',' << field(row.sigma_a) << ',' << field(row.samples) << ',' << field(row.c)
        << ',' << row.trial << ',' << row.seed << ',' << row.err << ',' << format_double(row.frac_err) << ','
        << (timing ? fixed3(row.wall_ms) : std::string("0")) << '\n';
  }
}

void write_summary(std::ostream& out, const std::vector<ResultRow>& rows, bool timing) {
  out << "method,n,m,k,p,q,alpha,sigma_a,N,c,trials,mean_err,median_err,se_err,mean_frac_err,median_frac_err,"
         "se_frac_err,mean_wall_ms\n";
  for (std::size_t begin = 0; begin < rows.size();) {
    std::size_t end = begin;
    std::vector<double> errs, fracs, walls;
    while (end < rows.size() && cell_key(rows[end]) == cell_key(rows[begin])) {
      errs.push_back(rows[end].err);
      fracs.push_back(rows[end].frac_err);
      walls.push_back(rows[end].wall_ms);
      ++end;
    }
    const ResultRow& row = rows[begin];
    out << row.method << ',' << row.n << ',' << row.m << ',' << row.k << ',' << field(row.p) << ',' << field(row.q)
        << ',' << field(row.alpha) << ',' << field(row.sigma_a) << ',' << field(row.samples) << ',' << field(row.c)
        << ',' << errs.size() << ',' << format_double(mean(errs)) << ',' << format_double(median(errs)) << ','
        << format_double(standard_error(errs)) << ',' << format_double(mean(fracs)) << ','
        << format_double(median(fracs)) << ',' << format_double(standard_error(fracs)) << ','
        << (timing ? fixed3(mean(walls)) : std::string("0")) << '\n';
    begin = end;
  }
}

std::string partition_stem(const ResultRow& row) {
  std::string stem = row.method + "_n" + std::to_string(row.n) + "_m" + std::to_string(row.m) + "_k" +
                     std::to_string(row.k);
  if (row.p) stem += "_p" + format_double(*row.p);
  if (row.q) stem += "_q" + format_double(*row.q);
  if (row.alpha) stem += "_alpha" + format_double(*row.alpha);
  if (row.sigma_a) stem += "_sigma" + format_double(*row.sigma_a);
  if (row.samples) stem += "_N" + std::to_string(*row.samples);
  if (row.c) stem += "_c" + std::to_string(*row.c);
  return stem + "_t" + std::to_string(row.trial);
}

std::string truth_stem(const ResultRow& row) {
  ResultRow cell = row;
  cell.method = "truth";
  cell.samples.reset();
  cell.c.reset();
  return partition_stem(cell);
}

std::filesystem::path summary_path(const std::filesystem::path& results_path) {
  std::filesystem::path out = results_path;
  if (out.extension() == ".csv") out.replace_extension();
  out += ".summary.csv";
  return out;
}

ExperimentOutput run_experiment(const ExperimentConfig& config, const std::filesystem::path& results_path) {
  ExperimentConfig finalized = config;
  finalized.finalize();
  ExperimentOutput output{results_path, summary_path(results_path), 0};
  // Open both files before the run so an unwritable path fails fast.
  std::ofstream results(output.results);
  if (!results) throw DataError("cannot write " + output.results.string());
  std::ofstream summary(output.summary);
  if (!summary) throw DataError("cannot write " + output.summary.string());
  const std::vector<ResultRow> rows = run_grid(finalized);
  write_results(results, rows, finalized.timing);
  write_summary(summary, rows, finalized.timing);
  if (!results || !summary) throw DataError("write failed for " + output.results.string());
  output.rows = rows.size();
  return output;
}

}  // namespace hyperpart
