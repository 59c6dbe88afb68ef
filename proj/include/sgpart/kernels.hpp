#pragma once

// Hot loops in two flavors: a serial reference and an OpenMP version. Both
// must produce identical results; the serial one is what the tests trust.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sgp::kernels {

enum class Backend { Serial, Parallel };

/// Row-major packed bit matrix.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows),
        cols_(cols),
        words_((cols + 63) / 64),
        data_(rows * words_, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t words_per_row() const { return words_; }

  void set(std::size_t r, std::size_t c) {
    data_[r * words_ + c / 64] |= std::uint64_t{1} << (c % 64);
  }
  bool test(std::size_t r, std::size_t c) const {
    return (data_[r * words_ + c / 64] >> (c % 64)) & 1U;
  }
  std::span<const std::uint64_t> row(std::size_t r) const {
    return {data_.data() + r * words_, words_};
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> data_;
};

/// Bit vector of the given length packed like a BitMatrix row.
std::vector<std::uint64_t> pack_bits(std::size_t length,
                                     std::span<const std::size_t> set_positions);

/// out[r] = popcount(query AND rows.row(r)) for every row.
void and_popcount_serial(std::span<const std::uint64_t> query,
                         const BitMatrix& rows, std::span<std::uint32_t> out);
void and_popcount_parallel(std::span<const std::uint64_t> query,
                           const BitMatrix& rows, std::span<std::uint32_t> out);
void and_popcount(Backend backend, std::span<const std::uint64_t> query,
                  const BitMatrix& rows, std::span<std::uint32_t> out);

/// Indices of the `count` candidates nearest to `query` by Euclidean
/// distance, nearest first, ties broken by smaller index. Candidates are the
/// first `candidates` rows of the row-major `base` with `dim` columns.
std::vector<std::size_t> nearest_serial(std::span<const double> query,
                                        std::span<const double> base,
                                        std::size_t candidates, std::size_t dim,
                                        std::size_t count);
std::vector<std::size_t> nearest_parallel(std::span<const double> query,
                                          std::span<const double> base,
                                          std::size_t candidates,
                                          std::size_t dim, std::size_t count);
std::vector<std::size_t> nearest(Backend backend, std::span<const double> query,
                                 std::span<const double> base,
                                 std::size_t candidates, std::size_t dim,
                                 std::size_t count);

/// c = a * b for square row-major matrices of order n.
void matmul_serial(std::span<const double> a, std::span<const double> b,
                   std::span<double> c, std::size_t n);
void matmul_parallel(std::span<const double> a, std::span<const double> b,
                     std::span<double> c, std::size_t n);
void matmul(Backend backend, std::span<const double> a,
            std::span<const double> b, std::span<double> c, std::size_t n);

}  // namespace sgp::kernels
