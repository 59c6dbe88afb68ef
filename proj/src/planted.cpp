#include "sgpart/planted.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "sgpart/rng.hpp"

namespace sgp {

void PlantedConfig::validate() const {
  if (k < 2) throw ConfigError("k must be at least 2");
  if (n < k) throw ConfigError("n must be at least k");
  if (n > std::numeric_limits<Vertex>::max())
    throw ConfigError("n exceeds the vertex id range");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p must lie in [0, 1]");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("q must lie in [0, 1]");
  if (q > p) throw ConfigError("q must not exceed p");
}

std::vector<std::size_t> GroundTruth::cluster_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (ClusterId c : psi) ++sizes.at(c);
  return sizes;
}

GroundTruth balanced_truth(std::size_t n, std::size_t k) {
  if (k == 0 || n < k) throw ConfigError("need 1 <= k <= n");
  GroundTruth truth;
  truth.k = k;
  truth.psi.reserve(n);
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t size = base + (c < extra ? 1 : 0);
    truth.psi.insert(truth.psi.end(), size, static_cast<ClusterId>(c));
  }
  return truth;
}

bool EdgeList::is_canonical() const {
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (e.u >= e.v || e.v >= n) return false;
    if (i > 0 && !(edges[i - 1] < e)) return false;
  }
  return true;
}

void EdgeList::canonicalize() {
  for (Edge& e : edges)
    if (e.u > e.v) std::swap(e.u, e.v);
  std::erase_if(edges, [](const Edge& e) { return e.u == e.v; });
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

std::vector<std::size_t> EdgeList::degrees() const {
  std::vector<std::size_t> deg(n, 0);
  for (const Edge& e : edges) {
    ++deg[e.u];
    ++deg[e.v];
  }
  return deg;
}

std::pair<EdgeList, GroundTruth> generate(const PlantedConfig& config) {
  config.validate();
  GroundTruth truth = balanced_truth(config.n, config.k);
  EdgeList graph;
  graph.n = config.n;

  Rng rng(config.graph_seed);
  const auto n = static_cast<Vertex>(config.n);
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v) {
      const double prob = truth.psi[u] == truth.psi[v] ? config.p : config.q;
      if (unit_double(rng) < prob) graph.edges.push_back({u, v});
    }
  }
  return {std::move(graph), std::move(truth)};
}

std::vector<Vertex> random_order(std::size_t n, std::uint64_t seed) {
  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), Vertex{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

IncidenceStream stream_in_order(const EdgeList& edges,
                                std::span<const Vertex> order) {
  const std::size_t n = edges.n;
  if (order.size() != n) throw ConfigError("order must list every vertex");
  constexpr auto kUnseen = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> position(n, kUnseen);
  for (std::size_t i = 0; i < n; ++i) {
    if (order[i] >= n || position[order[i]] != kUnseen)
      throw ConfigError("order is not a permutation");
    position[order[i]] = i;
  }

  IncidenceStream events(n);
  for (std::size_t i = 0; i < n; ++i) events[i].vertex = order[i];

  // Count first so each back-neighbor list is allocated once.
  std::vector<std::size_t> back_degree(n, 0);
  for (const Edge& e : edges.edges) {
    if (e.u == e.v || e.u >= n || e.v >= n)
      throw ConfigError("edge list has an invalid edge");
    const std::size_t later = std::max(position[e.u], position[e.v]);
    ++back_degree[later];
  }
  for (std::size_t i = 0; i < n; ++i)
    events[i].back_neighbors.reserve(back_degree[i]);
  for (const Edge& e : edges.edges) {
    const bool u_later = position[e.u] > position[e.v];
    const std::size_t later = u_later ? position[e.u] : position[e.v];
    events[later].back_neighbors.push_back(u_later ? e.v : e.u);
  }
  for (IncidenceEvent& ev : events)
    std::sort(ev.back_neighbors.begin(), ev.back_neighbors.end());
  return events;
}

IncidenceStream stream(const EdgeList& edges, std::uint64_t order_seed) {
  const std::vector<Vertex> order = random_order(edges.n, order_seed);
  return stream_in_order(edges, order);
}

EdgeList edges_of(const IncidenceStream& events, std::size_t n) {
  EdgeList graph;
  graph.n = n;
  for (const IncidenceEvent& ev : events)
    for (Vertex u : ev.back_neighbors) graph.edges.push_back({u, ev.vertex});
  graph.canonicalize();
  return graph;
}

void validate_stream(const IncidenceStream& events, std::size_t n) {
  if (events.size() != n)
    throw ConfigError("stream length does not match vertex count");
  std::vector<char> arrived(n, 0);
  for (const IncidenceEvent& ev : events) {
    if (ev.vertex >= n || arrived[ev.vertex])
      throw ConfigError("vertex " + std::to_string(ev.vertex) +
                        " is out of range or arrives twice");
    for (std::size_t i = 0; i < ev.back_neighbors.size(); ++i) {
      const Vertex u = ev.back_neighbors[i];
      if (u >= n || !arrived[u])
        throw ConfigError("vertex " + std::to_string(ev.vertex) +
                          " lists a neighbor that has not arrived");
      if (i > 0 && ev.back_neighbors[i - 1] >= u)
        throw ConfigError("back-neighbors of vertex " +
                          std::to_string(ev.vertex) + " are not ascending");
    }
    arrived[ev.vertex] = 1;
  }
}

void write_stream(std::ostream& out, const IncidenceStream& events,
                  std::size_t n, std::size_t k) {
  out << n << ' ' << k << '\n';
  for (const IncidenceEvent& ev : events) {
    out << ev.vertex << ':';
    for (Vertex u : ev.back_neighbors) out << ' ' << u;
    out << '\n';
  }
}

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

// Reads one unsigned integer token or fails with the line number.
template <typename T>
T read_unsigned(std::istringstream& in, std::size_t line_no) {
  std::string token;
  if (!(in >> token)) parse_fail(line_no, "missing integer");
  if (token.empty() ||
      !std::all_of(token.begin(), token.end(),
                   [](char c) { return c >= '0' && c <= '9'; }))
    parse_fail(line_no, "expected unsigned integer, got '" + token + "'");
  try {
    const unsigned long long value = std::stoull(token);
    if (value > std::numeric_limits<T>::max())
      parse_fail(line_no, "integer out of range");
    return static_cast<T>(value);
  } catch (const std::out_of_range&) {
    parse_fail(line_no, "integer out of range");
  }
}

}  // namespace

StreamFile read_stream(std::istream& in) {
  StreamFile file;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!have_header) {
      std::istringstream fields(line);
      file.n = read_unsigned<std::size_t>(fields, line_no);
      file.k = read_unsigned<std::size_t>(fields, line_no);
      std::string rest;
      if (fields >> rest) parse_fail(line_no, "trailing data in header");
      have_header = true;
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos) parse_fail(line_no, "missing ':'");
    IncidenceEvent ev;
    std::istringstream head(line.substr(0, colon));
    ev.vertex = read_unsigned<Vertex>(head, line_no);
    std::string rest;
    if (head >> rest) parse_fail(line_no, "unexpected data before ':'");
    std::istringstream tail(line.substr(colon + 1));
    while (tail >> std::ws && !tail.eof())
      ev.back_neighbors.push_back(read_unsigned<Vertex>(tail, line_no));
    file.events.push_back(std::move(ev));
  }
  if (!have_header) throw ParseError("stream file has no header");
  try {
    validate_stream(file.events, file.n);
  } catch (const ConfigError& e) {
    throw ParseError(std::string("invalid stream: ") + e.what());
  }
  return file;
}

void write_truth(std::ostream& out, const GroundTruth& truth) {
  for (std::size_t v = 0; v < truth.psi.size(); ++v)
    out << v << ' ' << truth.psi[v] << '\n';
}

GroundTruth read_truth(std::istream& in) {
  std::vector<std::pair<Vertex, ClusterId>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    const auto v = read_unsigned<Vertex>(fields, line_no);
    const auto c = read_unsigned<ClusterId>(fields, line_no);
    std::string rest;
    if (fields >> rest) parse_fail(line_no, "trailing data");
    rows.emplace_back(v, c);
  }
  if (rows.empty()) throw ParseError("truth file is empty");
  GroundTruth truth;
  truth.psi.assign(rows.size(), 0);
  std::vector<char> seen(rows.size(), 0);
  ClusterId max_cluster = 0;
  for (const auto& [v, c] : rows) {
    if (v >= rows.size() || seen[v])
      throw ParseError("truth file must list each vertex 0..n-1 once");
    seen[v] = 1;
    truth.psi[v] = c;
    max_cluster = std::max(max_cluster, c);
  }
  truth.k = static_cast<std::size_t>(max_cluster) + 1;
  return truth;
}

}  // namespace sgp
