// Command-line front end: generators, partitioners, evaluation and the
// experiment harness. Exit codes: 0 ok, 2 usage, 3 data/size, 4 non-convergence.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hyperpart/errors.hpp"
#include "hyperpart/experiment.hpp"
#include "hyperpart/io.hpp"
#include "hyperpart/metrics.hpp"
#include "hyperpart/planted.hpp"
#include "hyperpart/sampling.hpp"
#include "hyperpart/spectral.hpp"
#include "hyperpart/subspace.hpp"

namespace {

using namespace hyperpart;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitConvergence = 4;

struct Options {
  std::optional<std::uint64_t> seed;

  struct {
    int n = 0, k = 0, m = 0;
    double p = 0.0, q = 0.0, alpha = 1.0;
    std::string law = "bernoulli";
    bool unbalanced = false;
    std::string out, truth;
  } planted;

  struct {
    int k = 0, r = 0, ambient = 0, points_per = 0;
    double noise = 0.0;
    std::string out;
  } subspace;

  struct {
    std::string input, method = "ttm", out, embedding;
    int k = 0;
  } partition;

  struct {
    std::string input, dist = "uniform", out, draws;
    int k = 0;
    std::uint64_t samples = 0;
  } sampled;

  struct {
    std::string input, sigma = "auto", fit = "svd", out;
    int k = 0, r = 0, c = 0, max_iters = 20;
  } tetris;

  struct {
    std::string truth, predicted;
  } eval;

  struct {
    std::string config, out;
  } experiment;
};

RngSeed require_seed(const Options& options) {
  if (!options.seed) throw InvalidArgument("--seed is required for this command");
  return RngSeed{*options.seed};
}

// Shortest round-trip text, always with a decimal point ("0.0", not "0").
std::string decimal(double value) {
  std::string text = format_double(value);
  if (text.find_first_of(".eEn") == std::string::npos) text += ".0";
  return text;
}

int gen_planted(const Options& o) {
  const auto& g = o.planted;
  PlantedSpec spec = PlantedSpec::balanced_pq(g.n, g.k, g.m, g.p, g.q, g.alpha, parse_weight_law(g.law));
  if (g.unbalanced) spec.psi = graded_partition(g.n, g.k);
  spec.validate();
  const WeightedUniformHypergraph h = generate(spec, require_seed(o));
  save_hypergraph(g.out, h);
  save_partition(g.truth, spec.psi);
  std::cout << "wrote " << h.num_edges() << " edges to " << g.out << " and ground truth to " << g.truth << '\n';
  return 0;
}

int gen_subspace(const Options& o) {
  const auto& g = o.subspace;
  SubspaceSpec spec;
  spec.k = g.k;
  spec.r = g.r;
  spec.ambient_dim = g.ambient;
  spec.points_per = g.points_per;
  spec.noise_sigma = g.noise;
  const PointCloud cloud = generate_subspaces(spec, require_seed(o));
  save_point_cloud(g.out, cloud);
  std::cout << "wrote " << cloud.n() << " points to " << g.out << '\n';
  return 0;
}

int partition(const Options& o) {
  const auto& g = o.partition;
  const RngSeed seed = require_seed(o);
  const WeightedUniformHypergraph h = load_hypergraph(g.input);
  SpectralResult result;
  if (g.method == "ttm") {
    result = ttm_partition(h, g.k, seed);
  } else if (g.method == "nhcut") {
    result = nhcut_partition(h, g.k, seed);
  } else {
    result = hosvd_partition(h, g.k, seed);
  }
  save_partition(g.out, result.partition);
  if (!g.embedding.empty()) {
    std::ofstream out(g.embedding);
    if (!out) throw DataError("cannot write " + g.embedding);
    write_embedding(out, result.embedding.x);
  }
  return 0;
}

int sampled_partition(const Options& o) {
  const auto& g = o.sampled;
  const RngSeed seed = require_seed(o);
  const WeightedUniformHypergraph h = load_hypergraph(g.input);
  const SamplingPlan plan = g.dist == "uniform" ? SamplingPlan::uniform(h.n(), h.m(), g.samples)
                                                : SamplingPlan::weight_proportional(h, g.samples);
  const EdgeWeightOracle oracle = oracle_from_hypergraph(h);
  const SpectralResult result = sampled_ttm_partition(oracle, plan, g.k, seed);
  save_partition(g.out, result.partition);
  if (!g.draws.empty()) {
    // Same draw as the one inside sampled_ttm_partition.
    const EdgeDraw edges = draw(plan, derive_seed(seed, 1));
    std::ofstream out(g.draws);
    if (!out) throw DataError("cannot write " + g.draws);
    write_edge_draw(out, edges, oracle);
  }
  return 0;
}

int run_tetris(const Options& o) {
  const auto& g = o.tetris;
  const RngSeed seed = require_seed(o);
  const PointCloud cloud = load_point_cloud(g.input);
  TetrisConfig config;
  config.c = g.c;
  config.max_iters = g.max_iters;
  config.fit = g.fit == "polar" ? FitErrorKind::PolarCurvature : FitErrorKind::SvdResidual;
  if (g.sigma != "auto") {
    try {
      config.sigma = parse_double(g.sigma);
    } catch (const DataError&) {
      throw InvalidArgument("--sigma takes 'auto' or a positive number");
    }
  }
  const TetrisResult result = tetris(cloud, g.k, g.r, config, seed);
  save_partition(g.out, result.partition);
  for (std::size_t t = 0; t < result.iterations.size(); ++t) {
    const auto& it = result.iterations[t];
    std::cerr << "iteration " << t + 1 << ": sigma=" << format_double(it.sigma);
    if (it.label_changes >= 0) std::cerr << " changes=" << it.label_changes;
    std::cerr << '\n';
    for (const auto& note : it.notes) std::cerr << "  " << note << '\n';
  }
  std::cerr << (result.converged ? "converged" : "stopped at max-iters") << '\n';
  return 0;
}

int eval(const Options& o) {
  Partition truth = load_partition(o.eval.truth);
  Partition predicted = load_partition(o.eval.predicted);
  if (truth.size() != predicted.size()) throw DataError("partition files differ in length");
  const int err = clustering_error(truth, predicted);
  std::cout << "err=" << err << " frac=" << decimal(static_cast<double>(err) / truth.size()) << '\n';
  return 0;
}

int experiment(const Options& o) {
  const ExperimentConfig config = load_config(o.experiment.config);
  const ExperimentOutput out = run_experiment(config, o.experiment.out);
  std::cout << "wrote " << out.rows << " rows to " << out.results.string() << " and " << out.summary.string()
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral partitioning of uniform hypergraphs"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--seed", o.seed, "Base seed (required by stochastic commands)");

  auto* gp = app.add_subcommand("gen-planted", "Sample a hypergraph from the planted (p, q) model");
  gp->add_option("--n", o.planted.n)->required();
  gp->add_option("--k", o.planted.k)->required();
  gp->add_option("--m", o.planted.m)->required();
  gp->add_option("--p", o.planted.p)->required();
  gp->add_option("--q", o.planted.q)->required();
  gp->add_option("--alpha", o.planted.alpha);
  gp->add_option("--weight-law", o.planted.law)->check(CLI::IsMember({"bernoulli", "bounded_uniform"}));
  gp->add_flag("--unbalanced", o.planted.unbalanced, "Class sizes proportional to 1:2:...:k");
  gp->add_option("--out", o.planted.out, "Hypergraph file")->default_val("planted.hgr");
  gp->add_option("--truth", o.planted.truth, "Ground-truth partition file")->default_val("truth.part");

  auto* gs = app.add_subcommand("gen-subspace", "Sample points near random linear subspaces");
  gs->add_option("--k", o.subspace.k)->required();
  gs->add_option("--r", o.subspace.r)->required();
  gs->add_option("--r-a", o.subspace.ambient, "Ambient dimension")->required();
  gs->add_option("--points-per", o.subspace.points_per)->required();
  gs->add_option("--noise", o.subspace.noise, "Noise standard deviation")->default_val(0.0);
  gs->add_option("--out", o.subspace.out)->default_val("points.csv");

  auto* pa = app.add_subcommand("partition", "Partition a hypergraph file");
  pa->add_option("hypergraph", o.partition.input)->required()->check(CLI::ExistingFile);
  pa->add_option("--method", o.partition.method)->check(CLI::IsMember({"ttm", "nhcut", "hosvd"}));
  pa->add_option("--k", o.partition.k)->required();
  pa->add_option("--out", o.partition.out)->default_val("partition.part");
  pa->add_option("--embedding", o.partition.embedding, "Also write the eigenvector embedding as CSV");

  auto* sp = app.add_subcommand("sampled-partition", "TTM on a sampled affinity estimate");
  sp->add_option("hypergraph", o.sampled.input)->required()->check(CLI::ExistingFile);
  sp->add_option("--dist", o.sampled.dist)->check(CLI::IsMember({"uniform", "weighted"}));
  sp->add_option("--samples", o.sampled.samples, "Number of draws N")->required()->check(CLI::PositiveNumber);
  sp->add_option("--k", o.sampled.k)->required();
  sp->add_option("--out", o.sampled.out)->default_val("partition.part");
  sp->add_option("--draws", o.sampled.draws, "Write the drawn edges with multiplicities");

  auto* te = app.add_subcommand("tetris", "Subspace clustering of a point CSV");
  te->add_option("points", o.tetris.input)->required()->check(CLI::ExistingFile);
  te->add_option("--k", o.tetris.k)->required();
  te->add_option("--r", o.tetris.r)->required();
  te->add_option("--c", o.tetris.c, "Sampled subsets per iteration")->required();
  te->add_option("--sigma", o.tetris.sigma, "'auto' or a fixed kernel scale");
  te->add_option("--max-iters", o.tetris.max_iters);
  te->add_option("--fit", o.tetris.fit)->check(CLI::IsMember({"svd", "polar"}));
  te->add_option("--out", o.tetris.out)->default_val("partition.part");

  auto* ev = app.add_subcommand("eval", "Clustering error between two partition files");
  ev->add_option("truth", o.eval.truth)->required()->check(CLI::ExistingFile);
  ev->add_option("predicted", o.eval.predicted)->required()->check(CLI::ExistingFile);

  auto* ex = app.add_subcommand("experiment", "Run a config grid and write results and summary CSVs");
  ex->add_option("config", o.experiment.config)->required()->check(CLI::ExistingFile);
  ex->add_option("--out", o.experiment.out)->default_val("results.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (gp->parsed()) return gen_planted(o);
    if (gs->parsed()) return gen_subspace(o);
    if (pa->parsed()) return partition(o);
    if (sp->parsed()) return sampled_partition(o);
    if (te->parsed()) return run_tetris(o);
    if (ev->parsed()) return eval(o);
    return experiment(o);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}
