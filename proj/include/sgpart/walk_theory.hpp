#pragma once

// Expected walk counts in the planted partition model.
//
// With the (p, q)-matrix A (A[u][v] = p when u and v share a cluster,
// diagonal included, q otherwise) and m vertices per cluster, A^t has only
// two distinct entries: p_t within a cluster and q_t across clusters.

#include <cstddef>
#include <vector>

#include "sgpart/kernels.hpp"
#include "sgpart/planted.hpp"

namespace sgp {

struct WalkProfile {
  int t = 1;
  double p_t = 0.0;
  double q_t = 0.0;
  std::size_t m = 0;
  std::size_t k = 0;
  double p = 0.0;
  double q = 0.0;
};

/// Closed-form (p_t, q_t) for m vertices per cluster:
///   p_t = m^(t-1) [ (k-1)(p-q)^t + (p+(k-1)q)^t ] / k
///   q_t = m^(t-1) [ (p+(k-1)q)^t - (p-q)^t ] / k
/// t = 1 returns (p, q) exactly. Throws ConfigError for t < 1 or m < 1.
WalkProfile closed_walk_entries(std::size_t m, std::size_t k, double p,
                                double q, int t);

struct Step4Expectation {
  double same = 0.0;       // E[Y]: j and x in the same cluster
  double different = 0.0;  // E[Z]: j and x in different clusters
};

/// E[Y] = (p^2 + (k-1) q^2) r and E[Z] = (2pq + (k-2) q^2) r.
/// With per_cluster_scaling both are divided by k, which is what a
/// reference sample spread uniformly over k clusters actually yields.
Step4Expectation expected_step4_counts(double p, double q, std::size_t k,
                                       std::size_t reference_size,
                                       bool per_cluster_scaling = false);

/// Smallest gap p - q for which length-t walks separate clusters:
/// (4 k^(t-1) sqrt(ln n / n))^(1/t). Requires t >= 2 and n >= 2.
double gap_threshold(double n, std::size_t k, int t);

/// Largest vertex count matrix_power_oracle accepts.
inline constexpr std::size_t kOracleMaxVertices = 512;

/// Dense row-major A^t for the given labeling. Throws ConfigError when
/// truth.n() exceeds kOracleMaxVertices or t < 1.
std::vector<double> matrix_power_oracle(
    const GroundTruth& truth, double p, double q, int t,
    kernels::Backend backend = kernels::Backend::Parallel);

}  // namespace sgp
