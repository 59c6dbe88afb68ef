#include <doctest.h>
#include <omp.h>

#include <bit>
#include <random>

#include "oracles.hpp"
#include "sgpart/kernels.hpp"

using namespace sgp::kernels;

namespace {

BitMatrix random_bits(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.3);
  BitMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (coin(rng)) m.set(r, c);
  return m;
}

}  // namespace

TEST_CASE("pack_bits sets the listed positions") {
  const std::vector<std::size_t> pos{0, 3, 64, 129};
  const auto bits = pack_bits(130, pos);
  REQUIRE(bits.size() == 3);
  CHECK(bits[0] == 0b1001);
  CHECK(bits[1] == 1);
  CHECK(bits[2] == 2);
  const std::vector<std::size_t> outside{130};
  CHECK_THROWS(pack_bits(130, outside));
}

TEST_CASE("and_popcount matches bitwise enumeration") {
  const BitMatrix rows = random_bits(40, 200, 1);
  const BitMatrix queries = random_bits(5, 200, 2);
  std::vector<std::uint32_t> out(40);
  for (std::size_t q = 0; q < 5; ++q) {
    and_popcount_serial(queries.row(q), rows, out);
    for (std::size_t r = 0; r < 40; ++r) {
      std::uint32_t expect = 0;
      for (std::size_t c = 0; c < 200; ++c) expect += queries.test(q, c) && rows.test(r, c);
      CHECK(out[r] == expect);
    }
  }
}

TEST_CASE("serial and parallel kernels agree") {
  omp_set_num_threads(4);

  SUBCASE("and_popcount") {
    const BitMatrix rows = random_bits(600, 3000, 3);
    const BitMatrix query = random_bits(1, 3000, 4);
    std::vector<std::uint32_t> a(600), b(600), c(600);
    and_popcount_serial(query.row(0), rows, a);
    and_popcount_parallel(query.row(0), rows, b);
    and_popcount(Backend::Parallel, query.row(0), rows, c);
    CHECK(a == b);
    CHECK(a == c);
  }

  SUBCASE("nearest") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    const std::size_t dim = 8, n = 2000;
    std::vector<double> base(n * dim);
    for (double& x : base) x = g(rng);
    // Duplicate rows force distance ties.
    for (std::size_t d = 0; d < dim; ++d) base[10 * dim + d] = base[20 * dim + d];
    for (std::size_t trial = 0; trial < 10; ++trial) {
      std::vector<double> query(base.begin() + 20 * dim, base.begin() + 21 * dim);
      if (trial > 0)
        for (double& x : query) x = g(rng);
      const auto s = nearest_serial(query, base, n, dim, 7);
      CHECK(s == nearest_parallel(query, base, n, dim, 7));
      CHECK(s == nearest(Backend::Parallel, query, base, n, dim, 7));
    }
  }

  SUBCASE("matmul is bitwise identical") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-1, 1);
    const std::size_t n = 96;
    std::vector<double> a(n * n), b(n * n), s(n * n), p(n * n);
    for (double& x : a) x = u(rng);
    for (double& x : b) x = u(rng);
    matmul_serial(a, b, s, n);
    matmul_parallel(a, b, p, n);
    CHECK(s == p);
    const auto ref = oracle::matmul(a, b, n);
    for (std::size_t i = 0; i < n * n; ++i) CHECK(s[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  }
}

TEST_CASE("nearest breaks distance ties by index") {
  // Points 1 and 2 are equidistant from the query at 0.
  const std::vector<double> base{0.0, 1.0, -1.0, 5.0};
  const std::vector<double> query{0.0};
  CHECK(nearest_serial(query, base, 4, 1, 3) == std::vector<std::size_t>{0, 1, 2});
  CHECK(nearest_serial(query, base, 3, 1, 5) == std::vector<std::size_t>{0, 1, 2});
}
