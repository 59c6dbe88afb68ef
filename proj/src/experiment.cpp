#include "sgpart/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <tuple>

#include "sgpart/baselines.hpp"
#include "sgpart/rng.hpp"

namespace sgp {

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Egypt: return "egypt";
    case Algorithm::Lwd: return "lwd";
    case Algorithm::Hash: return "hash";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "egypt") return Algorithm::Egypt;
  if (name == "lwd") return Algorithm::Lwd;
  if (name == "hash") return Algorithm::Hash;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

RunSeeds derive_seeds(std::uint64_t seed) {
  return {mix_seed(seed, {1}), mix_seed(seed, {2}), mix_seed(seed, {3})};
}

std::vector<Machine> partition_stream(const IncidenceStream& stream,
                                      std::size_t k, Algorithm algorithm,
                                      const EgyptParams& egypt,
                                      std::size_t capacity) {
  switch (algorithm) {
    case Algorithm::Egypt:
      return run_egypt(stream, k, egypt, capacity).assignment;
    case Algorithm::Lwd:
      return lwd_run(stream, k, capacity);
    case Algorithm::Hash:
      return hash_run(stream, k);
  }
  throw ConfigError("unknown algorithm");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

MetricsReport score(const IncidenceStream& stream, const EdgeList& edges,
                    const GroundTruth& truth, std::size_t k,
                    Algorithm algorithm, const EgyptParams& egypt,
                    double nu) {
  const std::size_t capacity = capacity_for(truth.n(), k, nu);
  const auto start = Clock::now();
  const std::vector<Machine> assignment =
      partition_stream(stream, k, algorithm, egypt, capacity);
  const double elapsed = seconds_since(start);
  MetricsReport report = evaluate(assignment, k, edges, truth);
  report.wall_time_s = elapsed;
  report.algorithm = to_string(algorithm);
  report.buffer = algorithm == Algorithm::Egypt ? egypt.buffer : 0;
  return report;
}

}  // namespace

MetricsReport run_once(const RunSpec& spec) {
  const RunSeeds seeds = derive_seeds(spec.seed);
  PlantedConfig config{spec.n, spec.k, spec.p, spec.q, seeds.graph, seeds.order};
  try {
    const auto [edges, truth] = generate(config);
    const IncidenceStream events = stream(edges, seeds.order);
    EgyptParams egypt = spec.egypt;
    egypt.sample_seed = seeds.sample;
    MetricsReport report =
        score(events, edges, truth, spec.k, spec.algorithm, egypt, spec.nu);
    report.run_id = spec.run_id;
    report.p = spec.p;
    report.q = spec.q;
    report.seed = spec.seed;
    return report;
  } catch (const std::exception& e) {
    // Re-throw with the run id attached, keeping the error category.
    const std::string what = spec.run_id + ": " + e.what();
    if (dynamic_cast<const ConfigError*>(&e)) throw ConfigError(what);
    throw std::runtime_error(what);
  }
}

std::vector<double> SweepSpec::default_gaps() {
  std::vector<double> gaps;
  for (int i = 1; i <= 19; ++i) gaps.push_back(i / 20.0);
  return gaps;
}

void SweepSpec::validate() const {
  if (gaps.empty() || ks.empty() || algorithms.empty())
    throw ConfigError("sweep grid is empty");
  if (repeats == 0) throw ConfigError("repeats must be at least 1");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("q must lie in [0, 1]");
  for (double gap : gaps)
    if (!(gap >= 0.0) || q + gap > 1.0 + 1e-9)
      throw ConfigError("gap " + std::to_string(gap) + " pushes p above 1");
  const bool any_egypt = std::find(algorithms.begin(), algorithms.end(),
                                   Algorithm::Egypt) != algorithms.end();
  if (any_egypt && buffers.empty())
    throw ConfigError("EGyPT needs at least one buffer size");
  for (std::size_t k : ks)
    if (k < 2 || k > n) throw ConfigError("k must lie in [2, n]");
}

std::uint64_t instance_seed(std::uint64_t base_seed, std::size_t gap_index,
                            std::size_t k, std::size_t repeat) {
  return mix_seed(base_seed, {gap_index, k, repeat});
}

namespace {

struct Instance {
  std::size_t gap_index;
  std::size_t k;
  std::size_t repeat;
};

struct InstanceOutput {
  std::vector<MetricsReport> rows;
  std::vector<std::string> failures;
};

std::string cell_id(std::size_t gap_index, std::size_t k, std::size_t buffer,
                    Algorithm algorithm, std::size_t repeat) {
  return "g" + std::to_string(gap_index) + "-k" + std::to_string(k) + "-B" +
         std::to_string(buffer) + "-" + to_string(algorithm) + "-r" +
         std::to_string(repeat);
}

InstanceOutput run_instance(const SweepSpec& spec, const Instance& inst) {
  InstanceOutput out;
  const double gap = spec.gaps[inst.gap_index];
  const double p = std::min(1.0, spec.q + gap);
  const std::uint64_t seed =
      instance_seed(spec.base_seed, inst.gap_index, inst.k, inst.repeat);
  const RunSeeds seeds = derive_seeds(seed);

  EdgeList edges;
  GroundTruth truth;
  IncidenceStream events;
  try {
    std::tie(edges, truth) =
        generate({spec.n, inst.k, p, spec.q, seeds.graph, seeds.order});
    events = stream(edges, seeds.order);
  } catch (const std::exception& e) {
    out.failures.push_back(cell_id(inst.gap_index, inst.k, 0, Algorithm::Hash,
                                   inst.repeat) +
                           ": generation failed: " + e.what());
    return out;
  }

  for (Algorithm algorithm : spec.algorithms) {
    std::vector<std::size_t> buffers = {0};
    if (algorithm == Algorithm::Egypt) buffers = spec.buffers;
    for (std::size_t b : buffers) {
      const std::string id =
          cell_id(inst.gap_index, inst.k, b, algorithm, inst.repeat);
      try {
        EgyptParams egypt = spec.egypt;
        egypt.buffer = b;
        egypt.sample_seed = seeds.sample;
        // Cells already run in parallel.
        egypt.backend = kernels::Backend::Serial;
        MetricsReport report =
            score(events, edges, truth, inst.k, algorithm, egypt, spec.nu);
        report.run_id = id;
        report.p = p;
        report.q = spec.q;
        report.seed = seed;
        out.rows.push_back(std::move(report));
      } catch (const std::exception& e) {
        out.failures.push_back(id + ": " + e.what());
      }
    }
  }
  return out;
}

}  // namespace

SweepResult sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<Instance> instances;
  for (std::size_t g = 0; g < spec.gaps.size(); ++g)
    for (std::size_t k : spec.ks)
      for (std::size_t r = 0; r < spec.repeats; ++r)
        instances.push_back({g, k, r});

  std::vector<InstanceOutput> outputs(instances.size());
  const auto count = static_cast<std::ptrdiff_t>(instances.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i)
    outputs[i] = run_instance(spec, instances[i]);

  SweepResult result;
  for (InstanceOutput& out : outputs) {
    std::move(out.rows.begin(), out.rows.end(), std::back_inserter(result.rows));
    std::move(out.failures.begin(), out.failures.end(),
              std::back_inserter(result.failures));
  }
  result.summary = summarize(result.rows);
  return result;
}

std::vector<CellSummary> summarize(const std::vector<MetricsReport>& rows) {
  using Key = std::tuple<std::string, std::size_t, std::size_t, double, double>;
  std::map<Key, std::vector<const MetricsReport*>> groups;
  for (const MetricsReport& r : rows)
    groups[{r.algorithm, r.k, r.buffer, r.p, r.q}].push_back(&r);

  auto mean_var = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double var =
        xs.size() > 1 ? ss / static_cast<double>(xs.size() - 1) : 0.0;
    return std::pair{mean, var};
  };

  std::vector<CellSummary> cells;
  for (const auto& [key, members] : groups) {
    CellSummary cell;
    std::tie(cell.algorithm, cell.k, cell.buffer, cell.p, cell.q) = key;
    // Rounded so 0.05 + 0.30 reports as 0.3.
    cell.gap = std::round((cell.p - cell.q) * 1e9) / 1e9;
    cell.runs = members.size();
    std::vector<double> lambda, precision, rho;
    for (const MetricsReport* r : members) {
      lambda.push_back(r->lambda);
      precision.push_back(r->precision);
      rho.push_back(r->rho);
    }
    std::tie(cell.mean_lambda, cell.var_lambda) = mean_var(lambda);
    std::tie(cell.mean_precision, cell.var_precision) = mean_var(precision);
    cell.mean_rho = mean_var(rho).first;
    cells.push_back(std::move(cell));
  }
  return cells;
}

std::vector<MetricsReport> read_rows(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<MetricsReport> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!have_header) {
      if (line != csv_header())
        throw ParseError("schema mismatch: expected header '" + csv_header() +
                         "'");
      have_header = true;
      continue;
    }
    try {
      rows.push_back(parse_csv_row(line));
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw ParseError("results CSV is empty");
  if (rows.empty()) throw ParseError("results CSV has no data rows");
  return rows;
}

void write_rows(std::ostream& out, const std::vector<MetricsReport>& rows) {
  out << csv_header() << '\n';
  for (const MetricsReport& r : rows) out << csv_row(r) << '\n';
}

std::string summary_header() {
  return "algorithm,k,B,gap,p,q,runs,mean_lambda,var_lambda,mean_precision,"
         "var_precision,mean_rho";
}

void write_summary(std::ostream& out, std::vector<CellSummary> cells,
                   ReportView view) {
  auto by_gap = [](const CellSummary& a, const CellSummary& b) {
    return std::tie(a.algorithm, a.k, a.buffer, a.gap) <
           std::tie(b.algorithm, b.k, b.buffer, b.gap);
  };
  auto by_buffer = [](const CellSummary& a, const CellSummary& b) {
    return std::tie(a.algorithm, a.k, a.gap, a.buffer) <
           std::tie(b.algorithm, b.k, b.gap, b.buffer);
  };
  if (view == ReportView::ByGap)
    std::stable_sort(cells.begin(), cells.end(), by_gap);
  else
    std::stable_sort(cells.begin(), cells.end(), by_buffer);

  out << summary_header() << '\n';
  char buf[512];
  for (const CellSummary& c : cells) {
    std::snprintf(buf, sizeof buf,
                  "%s,%zu,%zu,%.10g,%.10g,%.10g,%zu,%.10g,%.10g,%.10g,%.10g,%.10g",
                  c.algorithm.c_str(), c.k, c.buffer, c.gap, c.p, c.q, c.runs,
                  c.mean_lambda, c.var_lambda, c.mean_precision,
                  c.var_precision, c.mean_rho);
    out << buf << '\n';
  }
}

}  // namespace sgp
