#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sgpart/egypt.hpp"
#include "sgpart/planted.hpp"
#include "sgpart/rng.hpp"
#include "sgpart/walk_theory.hpp"

using namespace sgp;

TEST_CASE("length-one walks return the model probabilities") {
  for (double p : {0.1, 0.3, 0.5, 0.77, 1.0})
    for (double q : {0.0, 0.05, 0.1}) {
      const WalkProfile w = closed_walk_entries(37, 3, p, q, 1);
      CHECK(w.p_t == p);
      CHECK(w.q_t == q);
    }
  CHECK_THROWS_AS(closed_walk_entries(10, 2, 0.5, 0.1, 0), ConfigError);
}

TEST_CASE("two-step walk entries") {
  const WalkProfile w = closed_walk_entries(50, 2, 0.5, 0.1, 2);
  CHECK(w.p_t == doctest::Approx(13.0));
  CHECK(w.q_t == doctest::Approx(5.0));
  const auto a = oracle::block_matrix(balanced_truth(100, 2).psi, 0.5, 0.1);
  const auto a2 = oracle::matrix_power(a, 100, 2);
  CHECK(a2[0 * 100 + 1] == doctest::Approx(13.0));
  CHECK(a2[0 * 100 + 99] == doctest::Approx(5.0));
}

TEST_CASE("closed form agrees with the dense power") {
  for (std::size_t k : {2u, 3u})
    for (std::size_t m : {1u, 4u, 9u})
      for (int t = 1; t <= 5; ++t) {
        const double p = 0.7, q = 0.2;
        const GroundTruth truth = balanced_truth(m * k, k);
        const auto dense = matrix_power_oracle(truth, p, q, t);
        const auto ref = oracle::matrix_power(oracle::block_matrix(truth.psi, p, q), m * k, t);
        const WalkProfile w = closed_walk_entries(m, k, p, q, t);
        const std::size_t n = m * k;
        for (std::size_t u = 0; u < n; ++u)
          for (std::size_t v = 0; v < n; ++v) {
            const double expect = truth.psi[u] == truth.psi[v] ? w.p_t : w.q_t;
            CHECK(dense[u * n + v] == doctest::Approx(expect).epsilon(1e-9));
            CHECK(ref[u * n + v] == doctest::Approx(expect).epsilon(1e-9));
          }
      }
}

TEST_CASE("walk gap is m^(t-1) (p-q)^t") {
  for (int t = 1; t <= 6; ++t) {
    const WalkProfile w = closed_walk_entries(20, 4, 0.6, 0.15, t);
    const double gap = std::pow(20.0, t - 1) * std::pow(0.45, t);
    CHECK(w.p_t - w.q_t == doctest::Approx(gap).epsilon(1e-12));
    CHECK(w.p_t > w.q_t);
  }
}

TEST_CASE("dense powers keep the block structure") {
  const GroundTruth truth = balanced_truth(30, 3);
  for (int t = 1; t <= 4; ++t) {
    const auto a = matrix_power_oracle(truth, 0.6, 0.2, t);
    std::vector<double> distinct;
    for (double x : a) {
      bool known = false;
      for (double d : distinct) known = known || std::abs(x - d) <= 1e-12 * std::abs(d);
      if (!known) distinct.push_back(x);
    }
    CHECK(distinct.size() == 2);
  }
  const auto once = matrix_power_oracle(truth, 0.6, 0.2, 1);
  CHECK(once == oracle::block_matrix(truth.psi, 0.6, 0.2));
  CHECK_THROWS_AS(matrix_power_oracle(balanced_truth(kOracleMaxVertices + 1, 2), 0.5, 0.1, 2),
                  ConfigError);
}

TEST_CASE("gap thresholds") {
  const double expect = std::sqrt(8 * std::sqrt(std::log(1e4) / 1e4));
  CHECK(gap_threshold(1e4, 2, 2) == doctest::Approx(expect));
  CHECK(gap_threshold(1e4, 2, 2) == doctest::Approx(0.4927).epsilon(1e-3));
  CHECK(gap_threshold(1e6, 2, 2) < gap_threshold(1e6, 2, 3));
  double prev = 1e9;
  for (double n : {1e3, 1e5, 1e7, 1e9, 1e12}) {
    const double g = gap_threshold(n, 2, 3);
    CHECK(g < prev);
    prev = g;
  }
  CHECK(gap_threshold(1e30, 2, 3) < 1e-2);
  for (std::size_t k : {2u, 4u})
    for (int t = 3; t <= 8; ++t) CHECK(gap_threshold(1e6, k, 2) < gap_threshold(1e6, k, t));
  CHECK_THROWS_AS(gap_threshold(1e4, 2, 1), ConfigError);
  CHECK_THROWS_AS(gap_threshold(1.0, 2, 2), ConfigError);
}

TEST_CASE("expected step-four counts") {
  const auto e = expected_step4_counts(0.5, 0.05, 2, 1000);
  CHECK(e.same == doctest::Approx(252.5));
  // (2pq + (k-2) q^2) r with k = 2 leaves only the 2pq term.
  CHECK(e.different == doctest::Approx(50.0));
  const auto flat = expected_step4_counts(0.2, 0.2, 4, 300);
  CHECK(flat.same == doctest::Approx(4 * 0.04 * 300));
  CHECK(flat.same == doctest::Approx(flat.different));
  const auto scaled = expected_step4_counts(0.5, 0.05, 2, 1000, true);
  CHECK(scaled.same == doctest::Approx(126.25));
  CHECK(scaled.different == doctest::Approx(25.0));
}

TEST_CASE("measured step-four counts follow the per-cluster convention") {
  // Per-instance means of Y and Z, then compared across instances.
  const std::size_t n = 2000, k = 2, b = 1000, r = 500;
  const double p = 0.5, q = 0.05;
  std::vector<double> ys, zs;
  for (std::uint64_t s = 0; s < 10; ++s) {
    PlantedConfig c{n, k, p, q, mix_seed(s, {41}), mix_seed(s, {42})};
    const auto [edges, truth] = generate(c);
    const IncidenceStream ev = stream(edges, c.order_seed);
    EgyptParams params;
    params.buffer = b;
    params.sample_size = 100;
    params.reference_size = r;
    params.disjoint_samples = true;
    params.sample_seed = mix_seed(s, {43});
    params = resolve_params(params, n, k);
    const BufferPhase buffer(std::span<const IncidenceEvent>(ev).first(b), n, params);
    double y = 0, z = 0;
    std::size_t ny = 0, nz = 0;
    std::vector<std::uint32_t> counts(buffer.sample().size());
    for (std::size_t i = b; i < b + 200; ++i) {
      buffer.sample_counts(buffer.reference_bits(ev[i].back_neighbors), counts,
                           kernels::Backend::Serial);
      for (std::size_t x = 0; x < counts.size(); ++x) {
        if (truth.psi[buffer.sample()[x]] == truth.psi[ev[i].vertex]) {
          y += counts[x];
          ++ny;
        } else {
          z += counts[x];
          ++nz;
        }
      }
    }
    ys.push_back(y / static_cast<double>(ny));
    zs.push_back(z / static_cast<double>(nz));
  }
  const auto scaled = expected_step4_counts(p, q, k, r, true);
  const auto literal = expected_step4_counts(p, q, k, r, false);
  const double se_y = std::sqrt(oracle::sample_variance(ys) / ys.size());
  const double se_z = std::sqrt(oracle::sample_variance(zs) / zs.size());
  CHECK(std::abs(oracle::mean(ys) - scaled.same) < 3 * se_y);
  CHECK(std::abs(oracle::mean(zs) - scaled.different) < 3 * se_z);
  CHECK(std::abs(oracle::mean(ys) - literal.same) > 10 * se_y);
}
