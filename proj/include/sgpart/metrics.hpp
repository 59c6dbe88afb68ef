#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sgpart/partition.hpp"
#include "sgpart/planted.hpp"

namespace sgp {

/// Fraction of edges whose endpoints sit on different machines.
/// Throws ConfigError on an unassigned endpoint or an empty edge set.
double fraction_cut(std::span<const Machine> assignment, const EdgeList& edges);

/// Complement of fraction_cut, computed from the uncut count.
double fraction_uncut(std::span<const Machine> assignment,
                      const EdgeList& edges);

/// Normalized maximum load: max machine size divided by n/k.
double imbalance(std::span<const std::size_t> sizes, std::size_t n);
/// Throws ConfigError unless every vertex is committed.
double imbalance(const PartitionState& state);

/// Fraction of the n(n-1)/2 vertex pairs whose same-machine relation agrees
/// with their same-cluster relation. Uses the machine x cluster contingency
/// table, so the cost is O(n + k * truth.k).
double pair_precision(std::span<const Machine> assignment, std::size_t k,
                      const GroundTruth& truth);

/// Number of edges with exactly one endpoint flagged in `in_set`.
std::size_t boundary_edges(std::span<const char> in_set, const EdgeList& edges);

/// Sum of degrees over flagged vertices.
std::size_t volume(std::span<const char> in_set, const EdgeList& edges);

/// phi(U) = E(U, V \ U) / vol(U). Throws ConfigError when vol(U) is zero.
double conductance(std::span<const char> in_set, const EdgeList& edges);
double conductance(std::span<const Vertex> members, const EdgeList& edges);

/// One experiment outcome with full provenance.
struct MetricsReport {
  std::string run_id;
  std::size_t n = 0;
  std::size_t k = 0;
  double p = 0.0;
  double q = 0.0;
  std::size_t buffer = 0;
  std::string algorithm;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  double rho = 0.0;
  double precision = 0.0;
  double wall_time_s = 0.0;
  std::vector<std::size_t> sizes;
};

/// Header: run_id,n,k,p,q,B,algorithm,seed,lambda,rho,precision,wall_time_s
std::string csv_header();
std::string csv_row(const MetricsReport& report);
/// Parses one data row written by csv_row. Throws ParseError.
MetricsReport parse_csv_row(const std::string& line);

/// Computes lambda, rho, precision and sizes for a complete assignment.
MetricsReport evaluate(std::span<const Machine> assignment, std::size_t k,
                       const EdgeList& edges, const GroundTruth& truth);

}  // namespace sgp
