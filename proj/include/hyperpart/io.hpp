#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "hyperpart/hypergraph.hpp"
#include "hyperpart/planted.hpp"
#include "hyperpart/sampling.hpp"
#include "hyperpart/subspace.hpp"

namespace hyperpart {

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
// Full-string parse; throws DataError on trailing junk or a malformed number.
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

// Hypergraph text format:
//   n m E
//   v1 ... vm w        (E lines, ascending 0-based ids)
// Lines starting with '#' are ignored.
void write_hypergraph(std::ostream& out, const WeightedUniformHypergraph& h);
WeightedUniformHypergraph read_hypergraph(std::istream& in);

// One integer label per line. k defaults to max label + 1.
void write_partition(std::ostream& out, const Partition& partition);
Partition read_partition(std::istream& in, std::optional<int> k = std::nullopt);

// One row per point; with labels the header is "# labels=last" and each row
// ends in the integer label.
void write_point_cloud(std::ostream& out, const PointCloud& cloud);
PointCloud read_point_cloud(std::istream& in);

// n rows, one column per embedding dimension, 17 significant digits.
void write_embedding(std::ostream& out, const Eigen::MatrixXd& x);

// Hypergraph format with a multiplicity column: v1 ... vm w count.
void write_edge_draw(std::ostream& out, const EdgeDraw& draw, const EdgeWeightOracle& oracle);

// Planted model as config keys n, k, m, alpha, p, q, weight_law, balanced.
// Only (p, q) specs serialize; others throw InvalidArgument.
void write_planted_spec(std::ostream& out, const PlantedSpec& spec);

std::string to_string(WeightLaw law);
WeightLaw parse_weight_law(std::string_view text);

// Class sizes proportional to 1 : 2 : ... : k, used for balanced=false.
Partition graded_partition(int n, int k);

// File wrappers; throw DataError when the file cannot be opened.
WeightedUniformHypergraph load_hypergraph(const std::filesystem::path& path);
void save_hypergraph(const std::filesystem::path& path, const WeightedUniformHypergraph& h);
Partition load_partition(const std::filesystem::path& path, std::optional<int> k = std::nullopt);
void save_partition(const std::filesystem::path& path, const Partition& partition);
PointCloud load_point_cloud(const std::filesystem::path& path);
void save_point_cloud(const std::filesystem::path& path, const PointCloud& cloud);

}  // namespace hyperpart
