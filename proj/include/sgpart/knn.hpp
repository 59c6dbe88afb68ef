#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "sgpart/kernels.hpp"
#include "sgpart/planted.hpp"

namespace sgp {

/// Labeled points, row-major. Row order is stream order.
struct PointSet {
  std::size_t dim = 0;
  std::vector<double> coords;
  std::vector<ClusterId> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * dim, dim};
  }
  /// Labels as a ground truth with k = max label + 1.
  GroundTruth truth() const;
};

// CSV: one "label,v1,...,vd" row per point.
PointSet load_points(std::istream& in);
void write_points(std::ostream& out, const PointSet& points);

/// n points spread evenly over the centers (the first n mod c centers get
/// one extra), isotropic Gaussian noise, shuffled by seed. Label = center
/// index. Throws ConfigError with fewer than two centers or ragged centers.
PointSet gaussian_clusters(std::size_t n, std::size_t dim,
                           const std::vector<std::vector<double>>& centers,
                           double sigma, std::uint64_t seed);

enum class Reference { FirstB, AllArrived };

/// k'-NN incidence stream in point order.
///
/// FirstB: points 0..B-1 form the reference set; each links to its k'
/// nearest other reference points, and every later point links to its k'
/// nearest reference points. AllArrived: point i links to its k' nearest
/// among points 0..i-1. Euclidean distance, ties to the smaller index,
/// undirected edges deduplicated.
IncidenceStream knn_stream(const PointSet& points, std::size_t k_prime,
                           Reference reference, std::size_t buffer = 0,
                           kernels::Backend backend = kernels::Backend::Parallel);

/// phi of each label class; nullopt for a class with zero volume.
std::vector<std::optional<double>> class_conductances(const GroundTruth& truth,
                                                      const EdgeList& edges);

}  // namespace sgp
