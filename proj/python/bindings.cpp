#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hyperpart/errors.hpp"
#include "hyperpart/io.hpp"
#include "hyperpart/metrics.hpp"
#include "hyperpart/planted.hpp"
#include "hyperpart/sampling.hpp"
#include "hyperpart/spectral.hpp"
#include "hyperpart/subspace.hpp"

namespace py = pybind11;
using namespace hyperpart;

namespace {

using Labels = std::vector<int>;

Partition to_partition(const Labels& labels) {
  int k = 0;
  for (const int label : labels) k = std::max(k, label + 1);
  return Partition(labels, k);
}

WeightedUniformHypergraph make_hypergraph(int n, int m, const std::vector<std::vector<Vertex>>& edges,
                                          std::vector<double> weights) {
  std::vector<Vertex> flat;
  for (const auto& edge : edges) {
    if (static_cast<int>(edge.size()) != m) throw InvalidArgument("every edge needs exactly m vertices");
    flat.insert(flat.end(), edge.begin(), edge.end());
  }
  return WeightedUniformHypergraph(n, m, std::move(flat), std::move(weights));
}

std::vector<std::vector<Vertex>> edge_list(const WeightedUniformHypergraph& h) {
  std::vector<std::vector<Vertex>> out;
  out.reserve(h.num_edges());
  for (std::size_t e = 0; e < h.num_edges(); ++e) {
    const auto edge = h.edge(e);
    out.emplace_back(edge.begin(), edge.end());
  }
  return out;
}

PointCloud to_cloud(const Eigen::MatrixXd& points) {
  PointCloud cloud;
  cloud.points = points;
  cloud.validate();
  return cloud;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Spectral partitioning of weighted uniform hypergraphs";

  auto base = py::register_exception<Error>(mod, "HyperpartError", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(mod, "InvalidArgument", PyExc_ValueError);
  py::register_exception<DataError>(mod, "DataError", base.ptr());
  py::register_exception<SizeError>(mod, "SizeError", base.ptr());
  py::register_exception<ConvergenceError>(mod, "ConvergenceError", base.ptr());

  py::class_<WeightedUniformHypergraph>(mod, "Hypergraph")
      .def(py::init(&make_hypergraph), py::arg("n"), py::arg("m"), py::arg("edges"), py::arg("weights"))
      .def_property_readonly("n", &WeightedUniformHypergraph::n)
      .def_property_readonly("m", &WeightedUniformHypergraph::m)
      .def_property_readonly("num_edges", &WeightedUniformHypergraph::num_edges)
      .def_property_readonly("edges", &edge_list)
      .def_property_readonly("weights", [](const WeightedUniformHypergraph& h) {
        return std::vector<double>(h.weights().begin(), h.weights().end());
      })
      .def("__repr__", [](const WeightedUniformHypergraph& h) {
        return "<Hypergraph n=" + std::to_string(h.n()) + " m=" + std::to_string(h.m()) +
               " edges=" + std::to_string(h.num_edges()) + ">";
      });

  mod.def(
      "load_hypergraph", [](const std::string& path) { return load_hypergraph(path); }, py::arg("path"));
  mod.def(
      "save_hypergraph", [](const std::string& path, const WeightedUniformHypergraph& h) { save_hypergraph(path, h); },
      py::arg("path"), py::arg("h"));

  mod.def(
      "generate_planted",
      [](int n, int k, int m, double p, double q, double alpha, const std::string& law, bool balanced,
         std::uint64_t seed) {
        PlantedSpec spec = PlantedSpec::balanced_pq(n, k, m, p, q, alpha, parse_weight_law(law));
        if (!balanced) spec.psi = graded_partition(n, k);
        return py::make_tuple(generate(spec, RngSeed{seed}), spec.psi.labels);
      },
      py::arg("n"), py::arg("k"), py::arg("m"), py::arg("p"), py::arg("q"), py::arg("alpha") = 1.0,
      py::arg("weight_law") = "bernoulli", py::arg("balanced") = true, py::arg("seed"),
      "Sample a planted (p, q) hypergraph; returns (hypergraph, truth labels).");

  mod.def(
      "flatten", [](const WeightedUniformHypergraph& h) { return flatten(h).a; }, py::arg("h"),
      "Pairwise affinity A(i, j) = (m-2)! * total weight of edges holding i and j.");

  mod.def(
      "ttm_partition",
      [](const WeightedUniformHypergraph& h, int k, std::uint64_t seed) {
        return ttm_partition(h, k, RngSeed{seed}).partition.labels;
      },
      py::arg("h"), py::arg("k"), py::arg("seed"));
  mod.def(
      "nhcut_partition",
      [](const WeightedUniformHypergraph& h, int k, std::uint64_t seed) {
        return nhcut_partition(h, k, RngSeed{seed}).partition.labels;
      },
      py::arg("h"), py::arg("k"), py::arg("seed"));
  mod.def(
      "hosvd_partition",
      [](const WeightedUniformHypergraph& h, int k, std::uint64_t seed) {
        return hosvd_partition(h, k, RngSeed{seed}).partition.labels;
      },
      py::arg("h"), py::arg("k"), py::arg("seed"));
  mod.def(
      "sampled_ttm_partition",
      [](const WeightedUniformHypergraph& h, int k, std::uint64_t samples, const std::string& dist,
         std::uint64_t seed) {
        if (dist != "uniform" && dist != "weighted") throw InvalidArgument("dist must be 'uniform' or 'weighted'");
        const SamplingPlan plan = dist == "uniform" ? SamplingPlan::uniform(h.n(), h.m(), samples)
                                                    : SamplingPlan::weight_proportional(h, samples);
        return sampled_ttm_partition(oracle_from_hypergraph(h), plan, k, RngSeed{seed}).partition.labels;
      },
      py::arg("h"), py::arg("k"), py::arg("samples"), py::arg("dist") = "uniform", py::arg("seed"));

  mod.def(
      "generate_subspaces",
      [](int k, int r, int points_per, double noise, int ambient_dim, std::uint64_t seed) {
        const PointCloud cloud =
            generate_subspaces(SubspaceSpec{k, r, points_per, noise, ambient_dim}, RngSeed{seed});
        return py::make_tuple(cloud.points, cloud.labels->labels);
      },
      py::arg("k"), py::arg("r"), py::arg("points_per"), py::arg("noise") = 0.0, py::arg("ambient_dim"),
      py::arg("seed"), "Points near k random r-dim subspaces; returns (points r_a x n, labels).");

  mod.def(
      "fit_error",
      [](const Eigen::MatrixXd& columns, int r, const std::string& kind) {
        if (kind != "svd" && kind != "polar") throw InvalidArgument("kind must be 'svd' or 'polar'");
        return fit_error(columns, r, kind == "svd" ? FitErrorKind::SvdResidual : FitErrorKind::PolarCurvature);
      },
      py::arg("columns"), py::arg("r"), py::arg("kind") = "svd");

  mod.def(
      "tetris",
      [](const Eigen::MatrixXd& points, int k, int r, int c, std::optional<double> sigma, int max_iters,
         std::uint64_t seed) {
        TetrisConfig config;
        config.c = c;
        config.sigma = sigma;
        config.max_iters = max_iters;
        return tetris(to_cloud(points), k, r, config, RngSeed{seed}).partition.labels;
      },
      py::arg("points"), py::arg("k"), py::arg("r"), py::arg("c"), py::arg("sigma") = std::nullopt,
      py::arg("max_iters") = 20, py::arg("seed"), "Iteratively sampled subspace clustering of the columns.");

  mod.def(
      "clustering_error",
      [](const Labels& truth, const Labels& predicted) {
        return clustering_error(to_partition(truth), to_partition(predicted));
      },
      py::arg("truth"), py::arg("predicted"));
  mod.def(
      "normalized_associativity",
      [](const WeightedUniformHypergraph& h, const Labels& labels) {
        return normalized_associativity(h, to_partition(labels));
      },
      py::arg("h"), py::arg("labels"));
}
