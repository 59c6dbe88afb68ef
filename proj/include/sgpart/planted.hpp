#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sgp {

using Vertex = std::uint32_t;
using ClusterId = std::uint32_t;

/// Raised for invalid model or algorithm parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a stream, truth or point file cannot be parsed.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters of the planted partition model G(n, k, p, q).
///
/// Vertices are split into k contiguous blocks of size floor(n/k) or
/// ceil(n/k); the first n mod k blocks are the larger ones. Each pair inside
/// a block is an edge with probability p, each pair across blocks with
/// probability q.
struct PlantedConfig {
  std::size_t n = 0;
  std::size_t k = 2;
  double p = 0.5;
  double q = 0.05;
  std::uint64_t graph_seed = 0;
  std::uint64_t order_seed = 0;

  /// Throws ConfigError unless k >= 2, n >= k and 0 <= q <= p <= 1.
  /// q == p is accepted (the G(n, p) degenerate case).
  void validate() const;
};

struct GroundTruth {
  std::size_t k = 0;
  std::vector<ClusterId> psi;

  std::size_t n() const { return psi.size(); }
  std::vector<std::size_t> cluster_sizes() const;
};

/// Balanced contiguous-block labeling used by the generator.
GroundTruth balanced_truth(std::size_t n, std::size_t k);

struct Edge {
  Vertex u;  // u < v
  Vertex v;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct EdgeList {
  std::size_t n = 0;
  std::vector<Edge> edges;

  std::size_t size() const { return edges.size(); }
  /// Sorted, duplicate-free, loop-free and in range.
  bool is_canonical() const;
  /// Sorts, drops self-loops and duplicates; orients each pair as u < v.
  void canonicalize();
  std::vector<std::size_t> degrees() const;
};

/// One stream element: the arriving vertex and its edges to vertices that
/// arrived earlier, ascending.
struct IncidenceEvent {
  Vertex vertex = 0;
  std::vector<Vertex> back_neighbors;
  friend bool operator==(const IncidenceEvent&, const IncidenceEvent&) = default;
};

using IncidenceStream = std::vector<IncidenceEvent>;

/// Samples G(n, k, p, q). Iterates all n(n-1)/2 pairs, so the cost is
/// quadratic in n; intended for n up to a few 10^4.
std::pair<EdgeList, GroundTruth> generate(const PlantedConfig& config);

/// Uniformly random permutation of 0..n-1 determined by seed.
std::vector<Vertex> random_order(std::size_t n, std::uint64_t seed);

/// Builds the incidence stream for the given arrival order.
IncidenceStream stream_in_order(const EdgeList& edges,
                                std::span<const Vertex> order);

/// Incidence stream in random order.
IncidenceStream stream(const EdgeList& edges, std::uint64_t order_seed);

/// Reassembles the canonical edge set carried by a stream.
EdgeList edges_of(const IncidenceStream& events, std::size_t n);

/// Checks that every vertex 0..n-1 arrives exactly once and every
/// back-neighbor arrived strictly earlier. Throws ConfigError otherwise.
void validate_stream(const IncidenceStream& events, std::size_t n);

struct StreamFile {
  std::size_t n = 0;
  std::size_t k = 0;
  IncidenceStream events;
};

// Text format: header "n k", then one "vertex: id1 id2 ..." line per event.
void write_stream(std::ostream& out, const IncidenceStream& events,
                  std::size_t n, std::size_t k);
StreamFile read_stream(std::istream& in);

// Text format: one "vertex cluster" line per vertex.
void write_truth(std::ostream& out, const GroundTruth& truth);
GroundTruth read_truth(std::istream& in);

}  // namespace sgp
