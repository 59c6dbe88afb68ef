#include "sgpart/walk_theory.hpp"

#include <cmath>
#include <string>

namespace sgp {

WalkProfile closed_walk_entries(std::size_t m, std::size_t k, double p,
                                double q, int t) {
  if (t < 1) throw ConfigError("walk length must be at least 1");
  if (m < 1) throw ConfigError("cluster size must be at least 1");
  if (k < 1) throw ConfigError("cluster count must be at least 1");
  WalkProfile profile{t, p, q, m, k, p, q};
  if (t == 1) return profile;

  const double kk = static_cast<double>(k);
  const double scale = std::pow(static_cast<double>(m), t - 1) / kk;
  const double gap_term = std::pow(p - q, t);
  const double mass_term = std::pow(p + (kk - 1.0) * q, t);
  profile.p_t = scale * ((kk - 1.0) * gap_term + mass_term);
  profile.q_t = scale * (mass_term - gap_term);
  return profile;
}

Step4Expectation expected_step4_counts(double p, double q, std::size_t k,
                                       std::size_t reference_size,
                                       bool per_cluster_scaling) {
  const double kk = static_cast<double>(k);
  const double r = static_cast<double>(reference_size);
  Step4Expectation e;
  e.same = (p * p + (kk - 1.0) * q * q) * r;
  e.different = (2.0 * p * q + (kk - 2.0) * q * q) * r;
  if (per_cluster_scaling) {
    e.same /= kk;
    e.different /= kk;
  }
  return e;
}

double gap_threshold(double n, std::size_t k, int t) {
  if (t < 2) throw ConfigError("gap threshold needs t >= 2");
  if (!(n >= 2.0)) throw ConfigError("gap threshold needs n >= 2");
  const double noise = std::sqrt(std::log(n) / n);
  const double base =
      4.0 * std::pow(static_cast<double>(k), t - 1) * noise;
  return std::pow(base, 1.0 / t);
}

std::vector<double> matrix_power_oracle(const GroundTruth& truth, double p,
                                        double q, int t,
                                        kernels::Backend backend) {
  const std::size_t n = truth.n();
  if (n > kOracleMaxVertices)
    throw ConfigError("dense oracle limited to " +
                      std::to_string(kOracleMaxVertices) + " vertices");
  if (t < 1) throw ConfigError("walk length must be at least 1");

  std::vector<double> a(n * n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      a[u * n + v] = truth.psi[u] == truth.psi[v] ? p : q;

  std::vector<double> power = a;
  std::vector<double> next(n * n);
  for (int step = 1; step < t; ++step) {
    kernels::matmul(backend, power, a, next, n);
    power.swap(next);
  }
  return power;
}

}  // namespace sgp
