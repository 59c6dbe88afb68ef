#pragma once

// Path-2 streaming classification.
//
// The first B arrivals are buffered and held provisionally. Two random
// samples are drawn from the buffer: representatives S and references R.
// Every later vertex j is matched to the representative x* with which it
// shares the most (ARGMAX) or enough (THRESHOLD) common neighbors inside R,
// and is committed to x*'s machine on arrival. Buffered vertices that were
// never picked as x* are classified the same way once the stream ends.
//
// Representatives are grouped into at most k sets by average linkage on
// their own common-neighbor counts; a group binds to the emptiest unowned
// machine the first time one of its members is chosen. An arrival with no
// common neighbor with any representative follows the majority group of its
// buffered neighbors.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sgpart/kernels.hpp"
#include "sgpart/partition.hpp"
#include "sgpart/planted.hpp"

namespace sgp {

inline constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();

enum class Mode { Threshold, Argmax };

struct EgyptParams {
  std::size_t buffer = 0;
  /// |S|; 0 selects min(B, ceil(3 k ln n)).
  std::size_t sample_size = 0;
  /// |R|; 0 selects min(B, ceil(ln(n)^6)).
  std::size_t reference_size = 0;
  Mode mode = Mode::Argmax;
  /// Model probabilities assumed by THRESHOLD mode.
  double p_hat = 0.0;
  double q_hat = 0.0;
  /// Multiplies the expected count M; 1/k gives the per-cluster convention.
  double m_scale = 1.0;
  std::uint64_t sample_seed = 0;
  /// Draw R from the buffer minus S instead of independently.
  bool disjoint_samples = false;
  kernels::Backend backend = kernels::Backend::Parallel;
};

std::size_t default_sample_size(std::size_t n, std::size_t k);
std::size_t default_reference_size(std::size_t n);

/// Fills in default sample sizes and validates against n and k.
/// Throws ConfigError on a violated constraint.
EgyptParams resolve_params(const EgyptParams& params, std::size_t n,
                           std::size_t k);

/// M = m_scale * (p^2 + (k-1) q^2) * r_size.
double expected_same_cluster_count(double p_hat, double q_hat, std::size_t k,
                                   std::size_t reference_size,
                                   double m_scale = 1.0);

/// M - M^(2/3).
double acceptance_threshold(double expected_count);

/// Estimates (p_hat, q_hat) from the buffered subgraph. Experimental:
/// q_hat is the overall buffer edge density and p_hat the largest pairwise
/// co-neighbor density among sampled buffer vertices.
struct ProbabilityEstimate {
  double p_hat = 0.0;
  double q_hat = 0.0;
};

/// Number of u in `reference` adjacent to both j and x, given each vertex's
/// neighbor list. Inputs need not be sorted.
std::uint32_t common_neighbors_in(std::span<const Vertex> j_neighbors,
                                  std::span<const Vertex> x_neighbors,
                                  std::span<const Vertex> reference);

struct Choice {
  std::size_t index = 0;  // position in the representative list
  bool fallback = false;  // THRESHOLD found no qualifying representative
};

/// Picks a representative from `counts[i]` (for `representatives[i]`).
/// ARGMAX: largest count. THRESHOLD: any count >= threshold, else ARGMAX
/// with fallback set. Ties go to the smallest vertex id. `exclude` removes
/// one position from consideration.
Choice choose_representative(std::span<const Vertex> representatives,
                             std::span<const std::uint32_t> counts, Mode mode,
                             double threshold,
                             std::size_t exclude = static_cast<std::size_t>(-1));

/// Partitions the representatives into at most `groups` sets by average-
/// linkage agglomeration on a symmetric row-major |S| x |S| similarity,
/// followed by moving members to the group of highest mean similarity until
/// stable. Returns a group index per representative. Ties merge the pair with
/// the fewest combined members, then the lexicographically smallest pair of
/// minimum member ids.
std::vector<std::size_t> group_by_similarity(
    std::span<const Vertex> representatives,
    std::span<const double> similarity, std::size_t groups);

/// Same, with cosine similarity computed from common-neighbor counts whose
/// diagonal holds each representative's degree into R.
std::vector<std::size_t> group_representatives(
    std::span<const Vertex> representatives,
    std::span<const std::uint32_t> pair_counts, std::size_t groups);

/// State captured from the first B events.
class BufferPhase {
 public:
  /// `params` must already be resolved.
  BufferPhase(std::span<const IncidenceEvent> buffer_events, std::size_t n,
              const EgyptParams& params);

  std::span<const Vertex> vertices() const { return vertices_; }
  std::span<const Vertex> sample() const { return sample_; }
  std::span<const Vertex> reference() const { return reference_; }

  bool is_buffered(Vertex v) const { return slot_.at(v) >= 0; }
  /// Position of a buffered vertex in arrival order.
  std::size_t slot(Vertex v) const;
  /// Edge query between two buffered vertices, O(1).
  bool adjacent(Vertex a, Vertex b) const;
  /// Buffered neighbors of a buffered vertex, in arrival order.
  std::vector<Vertex> buffer_neighbors(Vertex buffered) const;

  /// R-membership bits of an arbitrary neighbor list.
  std::vector<std::uint64_t> reference_bits(
      std::span<const Vertex> neighbors) const;
  /// R-membership bits of a buffered vertex's neighborhood.
  std::span<const std::uint64_t> reference_row(Vertex buffered) const;

  /// Common-neighbor counts in R between a query and every x in S.
  void sample_counts(std::span<const std::uint64_t> query,
                     std::span<std::uint32_t> out,
                     kernels::Backend backend) const;

  /// Row-major |S| x |S| common-neighbor counts in R between samples.
  std::vector<std::uint32_t> sample_pair_counts() const;

  /// Cosine similarity between samples of their count profiles against every
  /// buffered vertex (walks of length four through R).
  std::vector<double> sample_similarity() const;

  /// Plug-in estimate of the model probabilities from buffer densities.
  ProbabilityEstimate estimate_probabilities() const;

 private:
  std::size_t n_;
  std::vector<Vertex> vertices_;
  std::vector<std::int32_t> slot_;
  std::vector<std::int32_t> reference_slot_;
  kernels::BitMatrix adjacency_;      // B x B
  kernels::BitMatrix reference_rows_; // B x |R|
  kernels::BitMatrix sample_rows_;    // |S| x |R|
  std::vector<Vertex> sample_;
  std::vector<Vertex> reference_;
};

struct EgyptResult {
  std::vector<Machine> assignment;
  /// x* chosen for each vertex; a representative tagged by its follower
  /// keeps the label of its own classification, if any.
  std::vector<Vertex> representative;
  std::vector<Vertex> sample;
  std::vector<Vertex> reference;
  std::size_t overflow_events = 0;
  std::size_t threshold_fallbacks = 0;
  /// Buffer vertices that lost the non-classified tag during the pass.
  std::size_t tagged_in_pass = 0;
  /// Buffer vertices classified after the pass.
  std::size_t finalized = 0;
  /// Vertices with no common neighbor with any representative, placed by
  /// the majority group of their buffered neighbors instead.
  std::size_t zero_evidence = 0;
  std::size_t machines_bound = 0;
  /// Group of each representative (parallel to `sample`).
  std::vector<std::size_t> representative_group;
};

/// Single pass over `stream`, which must list every vertex 0..n-1 once.
EgyptResult run_egypt(const IncidenceStream& stream, std::size_t k,
                      const EgyptParams& params, std::size_t capacity);

}  // namespace sgp
