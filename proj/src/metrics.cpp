#include "sgpart/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace sgp {

namespace {

std::size_t uncut_edges(std::span<const Machine> assignment,
                        const EdgeList& edges) {
  if (edges.edges.empty()) throw ConfigError("edge set is empty");
  if (assignment.size() < edges.n)
    throw ConfigError("assignment shorter than vertex count");
  std::size_t uncut = 0;
  for (const Edge& e : edges.edges) {
    const Machine a = assignment[e.u];
    const Machine b = assignment[e.v];
    if (a == kUnassigned || b == kUnassigned)
      throw ConfigError("edge endpoint is unassigned");
    uncut += a == b ? 1 : 0;
  }
  return uncut;
}

double choose2(std::size_t x) {
  const auto d = static_cast<double>(x);
  return d * (d - 1.0) / 2.0;
}

}  // namespace

double fraction_cut(std::span<const Machine> assignment, const EdgeList& edges) {
  const std::size_t uncut = uncut_edges(assignment, edges);
  return static_cast<double>(edges.size() - uncut) /
         static_cast<double>(edges.size());
}

double fraction_uncut(std::span<const Machine> assignment,
                      const EdgeList& edges) {
  const std::size_t uncut = uncut_edges(assignment, edges);
  return static_cast<double>(uncut) / static_cast<double>(edges.size());
}

double imbalance(std::span<const std::size_t> sizes, std::size_t n) {
  if (n == 0 || sizes.empty()) throw ConfigError("imbalance of empty partition");
  const std::size_t largest = *std::max_element(sizes.begin(), sizes.end());
  // max / (n / k) == max * k / n, without rounding n / k.
  return static_cast<double>(largest) * static_cast<double>(sizes.size()) /
         static_cast<double>(n);
}

double imbalance(const PartitionState& state) {
  if (!state.complete()) throw ConfigError("partition is incomplete");
  return imbalance(state.sizes(), state.n());
}

double pair_precision(std::span<const Machine> assignment, std::size_t k,
                      const GroundTruth& truth) {
  const std::size_t n = truth.n();
  if (n < 2) throw ConfigError("precision needs at least two vertices");
  if (assignment.size() != n)
    throw ConfigError("assignment and truth differ in length");
  const std::size_t kt = truth.k;
  std::vector<std::size_t> table(k * kt, 0);
  std::vector<std::size_t> machine_sizes(k, 0);
  std::vector<std::size_t> cluster_sizes(kt, 0);
  for (std::size_t v = 0; v < n; ++v) {
    const Machine m = assignment[v];
    if (m == kUnassigned) throw ConfigError("vertex is unassigned");
    if (m >= k) throw ConfigError("machine id out of range");
    const ClusterId c = truth.psi[v];
    if (c >= kt) throw ConfigError("cluster id out of range");
    ++table[m * kt + c];
    ++machine_sizes[m];
    ++cluster_sizes[c];
  }
  double both = 0.0;
  for (std::size_t cell : table) both += choose2(cell);
  double same_machine = 0.0;
  for (std::size_t s : machine_sizes) same_machine += choose2(s);
  double same_cluster = 0.0;
  for (std::size_t s : cluster_sizes) same_cluster += choose2(s);
  const double total = choose2(n);
  const double neither = total - same_machine - same_cluster + both;
  return (both + neither) / total;
}

std::size_t boundary_edges(std::span<const char> in_set, const EdgeList& edges) {
  if (in_set.size() < edges.n) throw ConfigError("membership mask too short");
  std::size_t crossing = 0;
  for (const Edge& e : edges.edges)
    crossing += (in_set[e.u] != 0) != (in_set[e.v] != 0) ? 1 : 0;
  return crossing;
}

std::size_t volume(std::span<const char> in_set, const EdgeList& edges) {
  if (in_set.size() < edges.n) throw ConfigError("membership mask too short");
  std::size_t vol = 0;
  for (const Edge& e : edges.edges)
    vol += (in_set[e.u] ? 1 : 0) + (in_set[e.v] ? 1 : 0);
  return vol;
}

double conductance(std::span<const char> in_set, const EdgeList& edges) {
  const std::size_t vol = volume(in_set, edges);
  if (vol == 0) throw ConfigError("conductance of a zero-volume set");
  return static_cast<double>(boundary_edges(in_set, edges)) /
         static_cast<double>(vol);
}

double conductance(std::span<const Vertex> members, const EdgeList& edges) {
  if (members.empty()) throw ConfigError("conductance of an empty set");
  std::vector<char> mask(edges.n, 0);
  for (Vertex v : members) mask.at(v) = 1;
  return conductance(mask, edges);
}

std::string csv_header() {
  return "run_id,n,k,p,q,B,algorithm,seed,lambda,rho,precision,wall_time_s";
}

std::string csv_row(const MetricsReport& r) {
  // %.17g keeps doubles round-trippable.
  char numbers[256];
  std::snprintf(numbers, sizeof numbers, "%.17g,%.17g,%.17g", r.lambda, r.rho,
                r.precision);
  char probs[96];
  std::snprintf(probs, sizeof probs, "%.17g,%.17g", r.p, r.q);
  char wall[48];
  std::snprintf(wall, sizeof wall, "%.6f", r.wall_time_s);
  std::ostringstream out;
  out << r.run_id << ',' << r.n << ',' << r.k << ',' << probs << ','
      << r.buffer << ',' << r.algorithm << ',' << r.seed << ',' << numbers
      << ',' << wall;
  return out.str();
}

namespace {

template <typename T>
T parse_field(const std::string& field, const char* name) {
  T value{};
  const char* first = field.data();
  const char* last = first + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ParseError(std::string("bad ") + name + " field '" + field + "'");
  return value;
}

}  // namespace

MetricsReport parse_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  if (fields.size() != 12)
    throw ParseError("expected 12 columns, found " +
                     std::to_string(fields.size()));
  if (!fields[11].empty() && fields[11].back() == '\r') fields[11].pop_back();
  MetricsReport r;
  r.run_id = fields[0];
  r.n = parse_field<std::size_t>(fields[1], "n");
  r.k = parse_field<std::size_t>(fields[2], "k");
  r.p = parse_field<double>(fields[3], "p");
  r.q = parse_field<double>(fields[4], "q");
  r.buffer = parse_field<std::size_t>(fields[5], "B");
  r.algorithm = fields[6];
  r.seed = parse_field<std::uint64_t>(fields[7], "seed");
  r.lambda = parse_field<double>(fields[8], "lambda");
  r.rho = parse_field<double>(fields[9], "rho");
  r.precision = parse_field<double>(fields[10], "precision");
  r.wall_time_s = parse_field<double>(fields[11], "wall_time_s");
  return r;
}

MetricsReport evaluate(std::span<const Machine> assignment, std::size_t k,
                       const EdgeList& edges, const GroundTruth& truth) {
  MetricsReport report;
  report.n = truth.n();
  report.k = k;
  report.sizes.assign(k, 0);
  for (Machine m : assignment) {
    if (m == kUnassigned || m >= k)
      throw ConfigError("assignment is incomplete or out of range");
    ++report.sizes[m];
  }
  report.lambda = fraction_cut(assignment, edges);
  report.rho = imbalance(report.sizes, report.n);
  report.precision = pair_precision(assignment, k, truth);
  return report;
}

}  // namespace sgp
