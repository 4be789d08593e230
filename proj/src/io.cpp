#include "hyperpart/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hyperpart/errors.hpp"

namespace hyperpart {

namespace {

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char separator) {
  std::vector<std::string_view> fields;
  if (separator == ' ') {
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
      if (pos >= line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
      fields.push_back(line.substr(pos, end - pos));
      pos = end;
    }
    return fields;
  }
  std::size_t pos = 0;
  while (true) {
    const auto end = line.find(separator, pos);
    fields.push_back(trim(line.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos)));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return fields;
}

// Next line that is neither blank nor a '#' comment.
bool next_data_line(std::istream& in, std::string& line, int& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    return true;
  }
  return false;
}

std::string at_line(int line_no) { return " (line " + std::to_string(line_no) + ")"; }

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buffer{};
  const auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  if (ec != std::errc()) throw Error("cannot format number");
  return {buffer.data(), end};
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw DataError("malformed number '" + std::string(text) + "'");
  }
  return value;
}

long long parse_integer(std::string_view text) {
  text = trim(text);
  long long value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw DataError("malformed integer '" + std::string(text) + "'");
  }
  return value;
}

void write_hypergraph(std::ostream& out, const WeightedUniformHypergraph& h) {
  out << h.n() << ' ' << h.m() << ' ' << h.num_edges() << '\n';
  for (std::size_t e = 0; e < h.num_edges(); ++e) {
    for (const Vertex v : h.edge(e)) out << v << ' ';
    out << format_double(h.weight(e)) << '\n';
  }
}

WeightedUniformHypergraph read_hypergraph(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!next_data_line(in, line, line_no)) throw DataError("hypergraph file is empty");
  const auto header = split(line, ' ');
  if (header.size() != 3) throw DataError("hypergraph header must be 'n m E'" + at_line(line_no));
  const long long n = parse_integer(header[0]);
  const long long m = parse_integer(header[1]);
  const long long edges = parse_integer(header[2]);
  if (n < 1 || m < 2 || m > n || edges < 0) throw DataError("invalid hypergraph header" + at_line(line_no));
  std::vector<Vertex> flat;
  std::vector<double> weights;
  flat.reserve(static_cast<std::size_t>(edges * m));
  weights.reserve(static_cast<std::size_t>(edges));
  for (long long e = 0; e < edges; ++e) {
    if (!next_data_line(in, line, line_no)) {
      throw DataError("hypergraph file ends after " + std::to_string(e) + " of " + std::to_string(edges) + " edges");
    }
    const auto fields = split(line, ' ');
    if (static_cast<long long>(fields.size()) != m + 1) {
      throw DataError("edge line needs " + std::to_string(m) + " ids and a weight" + at_line(line_no));
    }
    for (long long t = 0; t < m; ++t) {
      const long long v = parse_integer(fields[t]);
      if (v < 0 || v >= n) throw DataError("vertex id " + std::to_string(v) + " out of range" + at_line(line_no));
      flat.push_back(static_cast<Vertex>(v));
    }
    weights.push_back(parse_double(fields[m]));
  }
  if (next_data_line(in, line, line_no)) throw DataError("more edge lines than the header declares" + at_line(line_no));
  return WeightedUniformHypergraph(static_cast<int>(n), static_cast<int>(m), std::move(flat), std::move(weights));
}

void write_partition(std::ostream& out, const Partition& partition) {
  for (const int label : partition.labels) out << label << '\n';
}

Partition read_partition(std::istream& in, std::optional<int> k) {
  std::string line;
  int line_no = 0;
  std::vector<int> labels;
  int max_label = -1;
  while (next_data_line(in, line, line_no)) {
    const long long label = parse_integer(line);
    if (label < 0) throw DataError("negative label" + at_line(line_no));
    labels.push_back(static_cast<int>(label));
    max_label = std::max(max_label, static_cast<int>(label));
  }
  if (labels.empty()) throw DataError("partition file is empty");
  return Partition(std::move(labels), k.value_or(max_label + 1));
}

void write_point_cloud(std::ostream& out, const PointCloud& cloud) {
  if (cloud.labels) out << "# labels=last\n";
  for (int i = 0; i < cloud.n(); ++i) {
    for (int t = 0; t < cloud.ambient_dim(); ++t) {
      if (t > 0) out << ',';
      out << format_double(cloud.points(t, i));
    }
    if (cloud.labels) out << ',' << cloud.labels->labels[i];
    out << '\n';
  }
}

PointCloud read_point_cloud(std::istream& in) {
  std::string line;
  int line_no = 0;
  bool labels_last = false;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  int width = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      if (trim(body.substr(1)) == "labels=last") labels_last = true;
      continue;
    }
    const auto fields = split(body, ',');
    const int coords = static_cast<int>(fields.size()) - (labels_last ? 1 : 0);
    if (coords < 1) throw DataError("point row has no coordinates" + at_line(line_no));
    if (width >= 0 && coords != width) throw DataError("point rows differ in dimension" + at_line(line_no));
    width = coords;
    std::vector<double> row;
    for (int t = 0; t < coords; ++t) row.push_back(parse_double(fields[t]));
    if (labels_last) {
      const long long label = parse_integer(fields.back());
      if (label < 0) throw DataError("negative label" + at_line(line_no));
      labels.push_back(static_cast<int>(label));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("point file has no rows");
  PointCloud cloud;
  cloud.points.resize(width, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int t = 0; t < width; ++t) cloud.points(t, static_cast<Eigen::Index>(i)) = rows[i][t];
  }
  if (labels_last) {
    const int k = *std::max_element(labels.begin(), labels.end()) + 1;
    cloud.labels = Partition(std::move(labels), k);
  }
  cloud.validate();
  return cloud;
}

void write_embedding(std::ostream& out, const Eigen::MatrixXd& x) {
  std::array<char, 40> buffer{};
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (c > 0) out << ',';
      std::snprintf(buffer.data(), buffer.size(), "%.17g", x(i, c));
      out << buffer.data();
    }
    out << '\n';
  }
}

void write_edge_draw(std::ostream& out, const EdgeDraw& draw, const EdgeWeightOracle& oracle) {
  out << draw.n << ' ' << draw.m << ' ' << draw.distinct() << '\n';
  for (std::size_t s = 0; s < draw.distinct(); ++s) {
    const auto tuple = draw.tuple(s);
    for (const Vertex v : tuple) out << v << ' ';
    out << format_double(oracle(tuple)) << ' ' << draw.counts[s] << '\n';
  }
}

std::string to_string(WeightLaw law) { return law == WeightLaw::Bernoulli ? "bernoulli" : "bounded_uniform"; }

WeightLaw parse_weight_law(std::string_view text) {
  if (text == "bernoulli") return WeightLaw::Bernoulli;
  if (text == "bounded_uniform") return WeightLaw::BoundedUniform;
  throw InvalidArgument("unknown weight law '" + std::string(text) + "' (bernoulli | bounded_uniform)");
}

Partition graded_partition(int n, int k) {
  if (k < 1 || n < k) throw InvalidArgument("graded partition needs 1 <= k <= n");
  const long long total = static_cast<long long>(k) * (k + 1) / 2;
  std::vector<int> labels(static_cast<std::size_t>(n));
  int label = 0;
  for (int i = 0; i < n; ++i) {
    // Class j ends at floor(n * (j+1)(j+2)/2 / total).
    while (label < k - 1 && static_cast<long long>(i) * total >= static_cast<long long>(n) * (label + 1) * (label + 2) / 2) {
      ++label;
    }
    labels[i] = label;
  }
  return Partition(std::move(labels), k);
}

void write_planted_spec(std::ostream& out, const PlantedSpec& spec) {
  if (!spec.pq) throw InvalidArgument("only (p, q) planted specs serialize to config keys");
  out << "n=" << spec.n << '\n'
      << "k=" << spec.k << '\n'
      << "m=" << spec.m << '\n'
      << "alpha=" << format_double(spec.alpha) << '\n'
      << "p=" << format_double(spec.pq->p) << '\n'
      << "q=" << format_double(spec.pq->q) << '\n'
      << "weight_law=" << to_string(spec.weight_law) << '\n'
      << "balanced=" << (spec.is_balanced() ? "true" : "false") << '\n';
}

WeightedUniformHypergraph load_hypergraph(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_hypergraph(in);
}

void save_hypergraph(const std::filesystem::path& path, const WeightedUniformHypergraph& h) {
  auto out = open_out(path);
  write_hypergraph(out, h);
}

Partition load_partition(const std::filesystem::path& path, std::optional<int> k) {
  auto in = open_in(path);
  return read_partition(in, k);
}

void save_partition(const std::filesystem::path& path, const Partition& partition) {
  auto out = open_out(path);
  write_partition(out, partition);
}

PointCloud load_point_cloud(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_point_cloud(in);
}

void save_point_cloud(const std::filesystem::path& path, const PointCloud& cloud) {
  auto out = open_out(path);
  write_point_cloud(out, cloud);
}

}  // namespace hyperpart
