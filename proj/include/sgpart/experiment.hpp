#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "sgpart/egypt.hpp"
#include "sgpart/metrics.hpp"
#include "sgpart/planted.hpp"

namespace sgp {

enum class Algorithm { Egypt, Lwd, Hash };

std::string to_string(Algorithm algorithm);
/// Accepts "egypt", "lwd", "hash". Throws ConfigError otherwise.
Algorithm parse_algorithm(std::string_view name);

/// Seeds derived from one run seed.
struct RunSeeds {
  std::uint64_t graph = 0;
  std::uint64_t order = 0;
  std::uint64_t sample = 0;
};
RunSeeds derive_seeds(std::uint64_t seed);

struct RunSpec {
  std::string run_id = "run";
  std::size_t n = 2000;
  std::size_t k = 2;
  double p = 0.5;
  double q = 0.05;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::Egypt;
  /// Buffer and mode settings; the sample seed is taken from `seed`.
  EgyptParams egypt;
  double nu = 1.0;
};

/// Partitions a prepared stream with the chosen algorithm.
std::vector<Machine> partition_stream(const IncidenceStream& stream,
                                      std::size_t k, Algorithm algorithm,
                                      const EgyptParams& egypt,
                                      std::size_t capacity);

/// Generate, stream, partition and score one instance. wall_time_s covers
/// the partitioning pass only.
MetricsReport run_once(const RunSpec& spec);

struct SweepSpec {
  std::size_t n = 2000;
  double q = 0.05;
  std::vector<double> gaps = default_gaps();
  std::vector<std::size_t> ks = {2, 4, 8, 16};
  std::vector<std::size_t> buffers = {50,  100, 200, 300, 400, 500,
                                      600, 700, 800, 900, 1000};
  std::size_t repeats = 5;
  std::uint64_t base_seed = 0;
  std::vector<Algorithm> algorithms = {Algorithm::Egypt, Algorithm::Lwd};
  /// Template for EGyPT runs; buffer and sample seed are set per cell.
  EgyptParams egypt;
  double nu = 1.0;

  /// 0.05, 0.10, ..., 0.95.
  static std::vector<double> default_gaps();
  /// Throws ConfigError on an empty grid, repeats == 0 or q + gap > 1.
  void validate() const;
};

/// Aggregate over the repeats of one (algorithm, k, B, gap) cell.
struct CellSummary {
  std::string algorithm;
  std::size_t k = 0;
  std::size_t buffer = 0;
  double gap = 0.0;
  double p = 0.0;
  double q = 0.0;
  std::size_t runs = 0;
  double mean_lambda = 0.0;
  double var_lambda = 0.0;
  double mean_precision = 0.0;
  double var_precision = 0.0;
  double mean_rho = 0.0;
};

struct SweepResult {
  std::vector<MetricsReport> rows;
  std::vector<CellSummary> summary;
  std::vector<std::string> failures;
};

/// Seed shared by every algorithm and buffer size on one sampled graph.
std::uint64_t instance_seed(std::uint64_t base_seed, std::size_t gap_index,
                            std::size_t k, std::size_t repeat);

/// Runs every cell. Instances run in parallel; rows come back in grid order
/// (gap, k, repeat, algorithm, B). Baselines ignore B and report B = 0.
SweepResult sweep(const SweepSpec& spec);

/// Groups rows by (algorithm, k, B, gap); sample variance, 0 for one run.
std::vector<CellSummary> summarize(const std::vector<MetricsReport>& rows);

/// Parses a CSV with the csv_header() schema. Throws ParseError on an
/// empty input or a header mismatch.
std::vector<MetricsReport> read_rows(std::istream& in);
void write_rows(std::ostream& out, const std::vector<MetricsReport>& rows);

enum class ReportView {
  ByGap,     // metric vs gap for each B
  ByBuffer,  // metric vs B for each gap
};

std::string summary_header();
/// Writes the summary sorted for the requested view.
void write_summary(std::ostream& out, std::vector<CellSummary> cells,
                   ReportView view);

}  // namespace sgp
