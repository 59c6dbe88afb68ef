#include "sgpart/knn.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <string>

#include "sgpart/metrics.hpp"
#include "sgpart/rng.hpp"

namespace sgp {

GroundTruth PointSet::truth() const {
  GroundTruth t;
  t.psi = labels;
  ClusterId top = 0;
  for (ClusterId c : labels) top = std::max(top, c);
  t.k = labels.empty() ? 0 : static_cast<std::size_t>(top) + 1;
  return t;
}

namespace {

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

PointSet load_points(std::istream& in) {
  PointSet points;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(trim(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() < 2) fail(line_no, "need a label and at least one value");
    const std::size_t dim = fields.size() - 1;
    if (points.labels.empty()) {
      points.dim = dim;
    } else if (dim != points.dim) {
      fail(line_no, "expected " + std::to_string(points.dim) +
                        " values, found " + std::to_string(dim));
    }
    ClusterId label = 0;
    {
      const auto f = fields[0];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), label);
      if (ec != std::errc() || ptr != f.data() + f.size())
        fail(line_no, "label '" + std::string(f) + "' is not an unsigned integer");
    }
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const auto f = fields[i];
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
      if (ec != std::errc() || ptr != f.data() + f.size())
        fail(line_no, "value '" + std::string(f) + "' is not numeric");
      points.coords.push_back(value);
    }
    points.labels.push_back(label);
  }
  if (points.labels.empty()) throw ParseError("point file is empty");
  return points;
}

void write_points(std::ostream& out, const PointSet& points) {
  char buf[32];
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << points.labels[i];
    for (double v : points.point(i)) {
      // Shortest representation that round-trips.
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
      out << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    out << '\n';
  }
}

PointSet gaussian_clusters(std::size_t n, std::size_t dim,
                           const std::vector<std::vector<double>>& centers,
                           double sigma, std::uint64_t seed) {
  if (centers.size() < 2) throw ConfigError("need at least two centers");
  if (dim == 0) throw ConfigError("dimension must be positive");
  for (const auto& c : centers)
    if (c.size() != dim) throw ConfigError("center dimension mismatch");
  if (sigma < 0.0) throw ConfigError("sigma must be non-negative");

  const std::size_t c = centers.size();
  std::vector<ClusterId> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < c; ++i)
    labels.insert(labels.end(), n / c + (i < n % c ? 1 : 0),
                  static_cast<ClusterId>(i));

  Rng rng(seed);
  std::shuffle(labels.begin(), labels.end(), rng);
  std::normal_distribution<double> noise(0.0, 1.0);
  PointSet points;
  points.dim = dim;
  points.labels = labels;
  points.coords.reserve(n * dim);
  for (ClusterId label : labels)
    for (std::size_t d = 0; d < dim; ++d)
      points.coords.push_back(centers[label][d] + sigma * noise(rng));
  return points;
}

IncidenceStream knn_stream(const PointSet& points, std::size_t k_prime,
                           Reference reference, std::size_t buffer,
                           kernels::Backend backend) {
  const std::size_t n = points.size();
  if (k_prime < 1) throw ConfigError("k' must be at least 1");
  if (reference == Reference::FirstB) {
    if (buffer > n) throw ConfigError("B exceeds the number of points");
    if (buffer < k_prime) throw ConfigError("B must be at least k'");
  }
  const std::span<const double> all(points.coords);
  const std::size_t dim = points.dim;

  std::vector<Edge> edges;
  auto link = [&](std::size_t a, std::size_t b) {
    edges.push_back({static_cast<Vertex>(std::min(a, b)),
                     static_cast<Vertex>(std::max(a, b))});
  };

  if (reference == Reference::AllArrived) {
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j :
           kernels::nearest(backend, points.point(i), all, i, dim, k_prime))
        link(i, j);
  } else {
    // Reference points see each other; the query itself is excluded by
    // asking for one extra neighbor and dropping it.
    for (std::size_t i = 0; i < buffer; ++i) {
      std::vector<std::size_t> near = kernels::nearest(
          backend, points.point(i), all, buffer, dim, k_prime + 1);
      // Duplicates of point i at smaller indices can push i itself out.
      if (const auto self = std::find(near.begin(), near.end(), i);
          self != near.end())
        near.erase(self);
      if (near.size() > k_prime) near.resize(k_prime);
      for (std::size_t j : near) link(i, j);
    }
    for (std::size_t i = buffer; i < n; ++i)
      for (std::size_t j :
           kernels::nearest(backend, points.point(i), all, buffer, dim, k_prime))
        link(i, j);
  }

  EdgeList graph{n, std::move(edges)};
  graph.canonicalize();
  std::vector<Vertex> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<Vertex>(i);
  return stream_in_order(graph, order);
}

std::vector<std::optional<double>> class_conductances(const GroundTruth& truth,
                                                      const EdgeList& edges) {
  std::vector<std::optional<double>> out(truth.k);
  std::vector<char> mask(edges.n, 0);
  for (std::size_t c = 0; c < truth.k; ++c) {
    for (std::size_t v = 0; v < edges.n; ++v) mask[v] = truth.psi[v] == c;
    if (volume(mask, edges) > 0) out[c] = conductance(mask, edges);
  }
  return out;
}

}  // namespace sgp
