#include "sgpart/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

namespace sgp::kernels {

namespace {

// Below this many words of work the thread start-up dominates.
constexpr std::size_t kMinParallelWords = 1 << 14;

void check_popcount_shapes(std::span<const std::uint64_t> query,
                           const BitMatrix& rows,
                           std::span<std::uint32_t> out) {
  if (query.size() != rows.words_per_row())
    throw std::invalid_argument("query width does not match matrix");
  if (out.size() != rows.rows())
    throw std::invalid_argument("output length does not match matrix");
}

std::uint32_t and_popcount_row(std::span<const std::uint64_t> query,
                               std::span<const std::uint64_t> row) {
  std::uint32_t total = 0;
  for (std::size_t w = 0; w < row.size(); ++w)
    total += static_cast<std::uint32_t>(std::popcount(query[w] & row[w]));
  return total;
}

double squared_distance(std::span<const double> a, const double* b,
                        std::size_t dim) {
  double sum = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

void check_nearest_shapes(std::span<const double> query,
                          std::span<const double> base, std::size_t candidates,
                          std::size_t dim) {
  if (query.size() != dim) throw std::invalid_argument("query has wrong dim");
  if (base.size() < candidates * dim)
    throw std::invalid_argument("base holds fewer rows than candidates");
}

std::vector<std::size_t> select_nearest(const std::vector<double>& dist,
                                        std::size_t count) {
  std::vector<std::size_t> index(dist.size());
  std::iota(index.begin(), index.end(), std::size_t{0});
  const std::size_t take = std::min(count, index.size());
  auto closer = [&](std::size_t a, std::size_t b) {
    return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
  };
  std::partial_sort(index.begin(), index.begin() + take, index.end(), closer);
  index.resize(take);
  return index;
}

void check_square(std::span<const double> a, std::span<const double> b,
                  std::span<double> c, std::size_t n) {
  if (a.size() != n * n || b.size() != n * n || c.size() != n * n)
    throw std::invalid_argument("matmul expects n x n operands");
}

}  // namespace

std::vector<std::uint64_t> pack_bits(
    std::size_t length, std::span<const std::size_t> set_positions) {
  std::vector<std::uint64_t> bits((length + 63) / 64, 0);
  for (std::size_t pos : set_positions) {
    if (pos >= length) throw std::out_of_range("bit position out of range");
    bits[pos / 64] |= std::uint64_t{1} << (pos % 64);
  }
  return bits;
}

void and_popcount_serial(std::span<const std::uint64_t> query,
                         const BitMatrix& rows, std::span<std::uint32_t> out) {
  check_popcount_shapes(query, rows, out);
  for (std::size_t r = 0; r < rows.rows(); ++r)
    out[r] = and_popcount_row(query, rows.row(r));
}

void and_popcount_parallel(std::span<const std::uint64_t> query,
                           const BitMatrix& rows,
                           std::span<std::uint32_t> out) {
  check_popcount_shapes(query, rows, out);
  const auto n_rows = static_cast<std::ptrdiff_t>(rows.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < n_rows; ++r)
    out[r] = and_popcount_row(query, rows.row(static_cast<std::size_t>(r)));
}

void and_popcount(Backend backend, std::span<const std::uint64_t> query,
                  const BitMatrix& rows, std::span<std::uint32_t> out) {
  const std::size_t work = rows.rows() * rows.words_per_row();
  if (backend == Backend::Parallel && work >= kMinParallelWords &&
      omp_get_max_threads() > 1)
    and_popcount_parallel(query, rows, out);
  else
    and_popcount_serial(query, rows, out);
}

std::vector<std::size_t> nearest_serial(std::span<const double> query,
                                        std::span<const double> base,
                                        std::size_t candidates, std::size_t dim,
                                        std::size_t count) {
  check_nearest_shapes(query, base, candidates, dim);
  std::vector<double> dist(candidates);
  for (std::size_t i = 0; i < candidates; ++i)
    dist[i] = squared_distance(query, base.data() + i * dim, dim);
  return select_nearest(dist, count);
}

std::vector<std::size_t> nearest_parallel(std::span<const double> query,
                                          std::span<const double> base,
                                          std::size_t candidates,
                                          std::size_t dim, std::size_t count) {
  check_nearest_shapes(query, base, candidates, dim);
  std::vector<double> dist(candidates);
  const auto n = static_cast<std::ptrdiff_t>(candidates);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    dist[i] = squared_distance(query, base.data() + i * dim, dim);
  return select_nearest(dist, count);
}

std::vector<std::size_t> nearest(Backend backend, std::span<const double> query,
                                 std::span<const double> base,
                                 std::size_t candidates, std::size_t dim,
                                 std::size_t count) {
  if (backend == Backend::Parallel && candidates * dim >= kMinParallelWords &&
      omp_get_max_threads() > 1)
    return nearest_parallel(query, base, candidates, dim, count);
  return nearest_serial(query, base, candidates, dim, count);
}

void matmul_serial(std::span<const double> a, std::span<const double> b,
                   std::span<double> c, std::size_t n) {
  check_square(a, b, c, n);
  std::fill(c.begin(), c.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < n; ++l) {
      const double ail = a[i * n + l];
      for (std::size_t j = 0; j < n; ++j) c[i * n + j] += ail * b[l * n + j];
    }
}

void matmul_parallel(std::span<const double> a, std::span<const double> b,
                     std::span<double> c, std::size_t n) {
  check_square(a, b, c, n);
  const auto rows = static_cast<std::ptrdiff_t>(n);
  // Each thread owns whole rows of c, so the summation order per entry
  // matches the serial kernel exactly.
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    double* ci = c.data() + i * n;
    std::fill(ci, ci + n, 0.0);
    for (std::size_t l = 0; l < n; ++l) {
      const double ail = a[i * n + l];
      for (std::size_t j = 0; j < n; ++j) ci[j] += ail * b[l * n + j];
    }
  }
}

void matmul(Backend backend, std::span<const double> a,
            std::span<const double> b, std::span<double> c, std::size_t n) {
  if (backend == Backend::Parallel && omp_get_max_threads() > 1)
    matmul_parallel(a, b, c, n);
  else
    matmul_serial(a, b, c, n);
}

}  // namespace sgp::kernels
