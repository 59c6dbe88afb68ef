// sgpart: streaming graph partitioning experiments.
//
//   sgpart gen      sample a planted partition graph, write stream + truth
//   sgpart run      partition one instance, print a metrics CSV row
//   sgpart sweep    run a (gap, k, B, algorithm, repeat) grid
//   sgpart knn      build a k'-NN incidence stream from labeled points
//   sgpart analyze  walk-count closed forms and gap thresholds
//   sgpart report   aggregate a sweep CSV into per-figure tables
//
// Exit codes: 0 ok, 1 usage error, 2 runtime error.

#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <span>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sgpart/baselines.hpp"
#include "sgpart/egypt.hpp"
#include "sgpart/experiment.hpp"
#include "sgpart/knn.hpp"
#include "sgpart/metrics.hpp"
#include "sgpart/planted.hpp"
#include "sgpart/walk_theory.hpp"

namespace {

using namespace sgp;

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// Output target: a file when a path is given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

struct EgyptFlags {
  std::size_t buffer = 500;
  std::size_t s_size = 0;
  std::size_t r_size = 0;
  Mode mode = Mode::Argmax;
  double p_hat = 0.0;
  double q_hat = 0.0;
  double m_scale = 1.0;
  std::optional<std::uint64_t> sample_seed;
  bool disjoint = false;
  bool estimate = false;

  EgyptParams params() const {
    EgyptParams p;
    p.buffer = buffer;
    p.sample_size = s_size;
    p.reference_size = r_size;
    p.mode = mode;
    p.p_hat = p_hat;
    p.q_hat = q_hat;
    p.m_scale = m_scale;
    p.sample_seed = sample_seed.value_or(0);
    p.disjoint_samples = disjoint;
    return p;
  }
};

void add_egypt_flags(CLI::App* cmd, EgyptFlags& f) {
  const std::map<std::string, Mode> modes{{"argmax", Mode::Argmax},
                                          {"threshold", Mode::Threshold}};
  cmd->add_option("--buffer,-B", f.buffer, "Buffer size B")->capture_default_str();
  cmd->add_option("--s-size", f.s_size, "Representative sample size (0: default)");
  cmd->add_option("--r-size", f.r_size, "Reference sample size (0: default)");
  cmd->add_option("--mode", f.mode, "Classification rule")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  cmd->add_option("--p-hat", f.p_hat, "Assumed p (threshold mode)");
  cmd->add_option("--q-hat", f.q_hat, "Assumed q (threshold mode)");
  cmd->add_option("--m-scale", f.m_scale, "Scale applied to the expected count M");
  cmd->add_option("--sample-seed", f.sample_seed, "Seed for the S and R samples");
  cmd->add_flag("--disjoint-samples", f.disjoint, "Draw R from the buffer minus S");
  cmd->add_flag("--estimate-probabilities", f.estimate,
                "Threshold mode: estimate p_hat, q_hat from the buffer (experimental)");
}

// Fills p_hat/q_hat from the buffered subgraph when requested.
EgyptParams finalize_egypt(const EgyptFlags& flags, const IncidenceStream& events,
                           std::size_t k, std::uint64_t fallback_seed) {
  EgyptParams params = flags.params();
  if (!flags.sample_seed) params.sample_seed = fallback_seed;
  if (flags.estimate) {
    EgyptParams probe = params;
    probe.mode = Mode::Argmax;
    probe = resolve_params(probe, events.size(), k);
    const BufferPhase buffer(std::span<const IncidenceEvent>(events).first(probe.buffer),
                             events.size(),
                             probe);
    const ProbabilityEstimate est = buffer.estimate_probabilities();
    params.p_hat = est.p_hat;
    params.q_hat = est.q_hat;
    std::cerr << "estimated p_hat=" << est.p_hat << " q_hat=" << est.q_hat << '\n';
  }
  return params;
}

const std::map<std::string, Algorithm>& algorithm_names() {
  static const std::map<std::string, Algorithm> names{
      {"egypt", Algorithm::Egypt}, {"lwd", Algorithm::Lwd}, {"hash", Algorithm::Hash}};
  return names;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming balanced graph partitioning experiments"};
  app.set_config("--config", "", "key=value configuration file");
  app.require_subcommand(1);
  app.fallthrough();

  // gen
  PlantedConfig gen_cfg;
  std::uint64_t gen_seed = 0;
  std::string gen_out, gen_truth_out;
  auto* gen = app.add_subcommand("gen", "Sample G(n,k,p,q) and write its incidence stream");
  gen->add_option("--n", gen_cfg.n, "Vertex count")->required();
  gen->add_option("--k", gen_cfg.k, "Cluster count")->capture_default_str();
  gen->add_option("--p", gen_cfg.p, "Intra-cluster edge probability")->capture_default_str();
  gen->add_option("--q", gen_cfg.q, "Inter-cluster edge probability")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Run seed")->required();
  gen->add_option("--out", gen_out, "Stream file (default stdout)");
  gen->add_option("--truth-out", gen_truth_out, "Ground-truth file");

  // run
  RunSpec run_spec;
  EgyptFlags run_egypt_flags;
  std::string run_stream, run_truth, run_out;
  auto* run = app.add_subcommand("run", "Partition one instance and print a metrics row");
  run->add_option("--n", run_spec.n, "Vertex count")->capture_default_str();
  run->add_option("--k", run_spec.k, "Cluster and machine count")->capture_default_str();
  run->add_option("--p", run_spec.p, "Intra-cluster edge probability")->capture_default_str();
  run->add_option("--q", run_spec.q, "Inter-cluster edge probability")->capture_default_str();
  run->add_option("--seed", run_spec.seed, "Run seed")->required();
  run->add_option("--algorithm", run_spec.algorithm, "egypt, lwd or hash")
      ->transform(CLI::CheckedTransformer(algorithm_names(), CLI::ignore_case));
  run->add_option("--nu", run_spec.nu, "Imbalance tolerance")->capture_default_str();
  run->add_option("--run-id", run_spec.run_id, "Row label")->capture_default_str();
  run->add_option("--stream", run_stream, "Read the stream from a file instead of generating");
  run->add_option("--truth", run_truth, "Ground truth for --stream");
  run->add_option("--out", run_out, "CSV output (default stdout)");
  add_egypt_flags(run, run_egypt_flags);

  // sweep
  SweepSpec sweep_spec;
  EgyptFlags sweep_egypt_flags;
  std::vector<std::string> sweep_algorithms{"egypt", "lwd"};
  std::string sweep_out, sweep_summary_out;
  int sweep_threads = 0;
  auto* sw = app.add_subcommand("sweep", "Run the (gap, k, B, algorithm, repeat) grid");
  sw->add_option("--n", sweep_spec.n, "Vertex count")->capture_default_str();
  sw->add_option("--q", sweep_spec.q, "Fixed inter-cluster probability")->capture_default_str();
  sw->add_option("--gaps", sweep_spec.gaps, "Gap grid p - q")->delimiter(',');
  sw->add_option("--ks", sweep_spec.ks, "k grid")->delimiter(',');
  sw->add_option("--bs", sweep_spec.buffers, "Buffer grid")->delimiter(',');
  sw->add_option("--repeats", sweep_spec.repeats, "Repeats per cell")->capture_default_str();
  sw->add_option("--seed", sweep_spec.base_seed, "Base seed")->required();
  sw->add_option("--algorithms", sweep_algorithms, "Algorithms")
      ->delimiter(',')
      ->check(CLI::IsMember({"egypt", "lwd", "hash"}));
  sw->add_option("--nu", sweep_spec.nu, "Imbalance tolerance")->capture_default_str();
  sw->add_option("--threads", sweep_threads, "OpenMP threads (0: runtime default)");
  sw->add_option("--out", sweep_out, "Per-run CSV (default stdout)");
  sw->add_option("--summary-out", sweep_summary_out, "Per-cell mean/variance CSV");
  add_egypt_flags(sw, sweep_egypt_flags);

  // knn
  std::string knn_points, knn_stream_out, knn_truth_out, knn_out;
  std::size_t knn_k_prime = 5, knn_b = 100;
  Reference knn_reference = Reference::FirstB;
  std::size_t gauss_n = 0, gauss_dim = 16, gauss_centers = 2;
  double gauss_separation = 10.0, gauss_sigma = 1.0;
  std::uint64_t knn_seed = 0;
  std::optional<Algorithm> knn_algorithm;
  EgyptFlags knn_egypt_flags;
  auto* knn = app.add_subcommand("knn", "Build a k'-NN incidence stream and report class conductances");
  knn->add_option("--points", knn_points, "CSV of label,v1,...,vd rows");
  knn->add_option("--gaussian-n", gauss_n, "Generate this many Gaussian points instead");
  knn->add_option("--dim", gauss_dim, "Gaussian dimension")->capture_default_str();
  knn->add_option("--centers", gauss_centers, "Gaussian cluster count")->capture_default_str();
  knn->add_option("--separation", gauss_separation, "Distance between consecutive centers")
      ->capture_default_str();
  knn->add_option("--sigma", gauss_sigma, "Gaussian noise")->capture_default_str();
  knn->add_option("--seed", knn_seed, "Seed for generated points and samples");
  knn->add_option("--k-prime", knn_k_prime, "Neighbors per point")->capture_default_str();
  knn->add_option("--reference", knn_reference, "first-b or all")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Reference>{{"first-b", Reference::FirstB},
                                           {"all", Reference::AllArrived}},
          CLI::ignore_case));
  knn->add_option("--b", knn_b, "Reference set size for first-b")->capture_default_str();
  knn->add_option("--stream-out", knn_stream_out, "Write the incidence stream");
  knn->add_option("--truth-out", knn_truth_out, "Write labels as a ground-truth file");
  knn->add_option("--algorithm", knn_algorithm, "Also partition the stream and print metrics")
      ->transform(CLI::CheckedTransformer(algorithm_names(), CLI::ignore_case));
  knn->add_option("--out", knn_out, "Conductance / metrics output (default stdout)");
  add_egypt_flags(knn, knn_egypt_flags);
  auto* knn_points_opt = knn->get_option("--points");
  knn_points_opt->excludes(knn->get_option("--gaussian-n"));

  // analyze
  std::size_t an_m = 50, an_k = 2;
  double an_p = 0.5, an_q = 0.1;
  int an_t_max = 5;
  std::vector<double> an_ns{1e4, 1e6};
  std::string an_out;
  auto* an = app.add_subcommand("analyze", "Print walk profiles and gap thresholds as CSV");
  an->add_option("--m", an_m, "Vertices per cluster")->capture_default_str();
  an->add_option("--k", an_k, "Cluster count")->capture_default_str();
  an->add_option("--p", an_p, "Intra-cluster probability")->capture_default_str();
  an->add_option("--q", an_q, "Inter-cluster probability")->capture_default_str();
  an->add_option("--t-max", an_t_max, "Largest walk length")->capture_default_str();
  an->add_option("--ns", an_ns, "Graph sizes for gap thresholds")->delimiter(',');
  an->add_option("--out", an_out, "CSV output (default stdout)");

  // report
  std::string rep_in, rep_out;
  ReportView rep_view = ReportView::ByGap;
  auto* rep = app.add_subcommand("report", "Aggregate a sweep CSV into per-figure tables");
  rep->add_option("--in", rep_in, "Sweep CSV")->required();
  rep->add_option("--view", rep_view, "gap: metric vs gap per B; b: metric vs B per gap")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, ReportView>{{"gap", ReportView::ByGap},
                                            {"b", ReportView::ByBuffer}},
          CLI::ignore_case));
  rep->add_option("--out", rep_out, "CSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) {
      const RunSeeds seeds = derive_seeds(gen_seed);
      gen_cfg.graph_seed = seeds.graph;
      gen_cfg.order_seed = seeds.order;
      const auto [edges, truth] = generate(gen_cfg);
      const IncidenceStream events = stream(edges, seeds.order);
      Sink out(gen_out);
      write_stream(out.get(), events, gen_cfg.n, gen_cfg.k);
      if (!gen_truth_out.empty()) {
        Sink truth_out(gen_truth_out);
        write_truth(truth_out.get(), truth);
      }
      std::cerr << "generated n=" << gen_cfg.n << " m=" << edges.size() << '\n';
    } else if (*run) {
      Sink out(run_out);
      if (!run_stream.empty()) {
        if (run_truth.empty()) {
          std::cerr << "--stream requires --truth\n";
          return kExitUsage;
        }
        auto stream_in = open_input(run_stream);
        const StreamFile file = read_stream(stream_in);
        auto truth_in = open_input(run_truth);
        const GroundTruth truth = read_truth(truth_in);
        if (truth.n() != file.n) throw ConfigError("stream and truth sizes differ");
        const std::size_t k = file.k;
        const EgyptParams egypt = finalize_egypt(
            run_egypt_flags, file.events, k, derive_seeds(run_spec.seed).sample);
        const EdgeList edges = edges_of(file.events, file.n);
        const auto start = std::chrono::steady_clock::now();
        const std::vector<Machine> assignment =
            partition_stream(file.events, k, run_spec.algorithm, egypt,
                             capacity_for(file.n, k, run_spec.nu));
        const double elapsed = std::chrono::duration<double>(
                                   std::chrono::steady_clock::now() - start)
                                   .count();
        MetricsReport report = evaluate(assignment, k, edges, truth);
        report.run_id = run_spec.run_id;
        report.algorithm = to_string(run_spec.algorithm);
        report.buffer = run_spec.algorithm == Algorithm::Egypt ? egypt.buffer : 0;
        report.seed = run_spec.seed;
        report.wall_time_s = elapsed;
        out.get() << csv_header() << '\n' << csv_row(report) << '\n';
      } else {
        run_spec.egypt = run_egypt_flags.params();
        if (run_egypt_flags.estimate) {
          // Regenerate the same stream run_once will see.
          const RunSeeds seeds = derive_seeds(run_spec.seed);
          const auto [edges, truth] = generate({run_spec.n, run_spec.k, run_spec.p,
                                                run_spec.q, seeds.graph, seeds.order});
          run_spec.egypt = finalize_egypt(run_egypt_flags, stream(edges, seeds.order),
                                          run_spec.k, seeds.sample);
        }
        const MetricsReport report = run_once(run_spec);
        out.get() << csv_header() << '\n' << csv_row(report) << '\n';
      }
    } else if (*sw) {
      if (sweep_threads > 0) omp_set_num_threads(sweep_threads);
      sweep_spec.algorithms.clear();
      for (const std::string& name : sweep_algorithms)
        sweep_spec.algorithms.push_back(parse_algorithm(name));
      sweep_spec.egypt = sweep_egypt_flags.params();
      const SweepResult result = sweep(sweep_spec);
      Sink out(sweep_out);
      write_rows(out.get(), result.rows);
      if (!sweep_summary_out.empty()) {
        Sink summary(sweep_summary_out);
        write_summary(summary.get(), result.summary, ReportView::ByGap);
      }
      for (const std::string& failure : result.failures)
        std::cerr << "cell failed: " << failure << '\n';
      if (!result.failures.empty()) return kExitRuntime;
    } else if (*knn) {
      PointSet points;
      if (!knn_points.empty()) {
        auto in = open_input(knn_points);
        points = load_points(in);
      } else if (gauss_n > 0) {
        std::vector<std::vector<double>> centers(gauss_centers,
                                                 std::vector<double>(gauss_dim, 0.0));
        for (std::size_t c = 0; c < gauss_centers; ++c)
          centers[c][0] = gauss_separation * static_cast<double>(c);
        points = gaussian_clusters(gauss_n, gauss_dim, centers, gauss_sigma, knn_seed);
      } else {
        std::cerr << "knn needs --points or --gaussian-n\n";
        return kExitUsage;
      }
      const IncidenceStream events =
          knn_stream(points, knn_k_prime, knn_reference, knn_b);
      const EdgeList edges = edges_of(events, points.size());
      const GroundTruth truth = points.truth();
      if (!knn_stream_out.empty()) {
        Sink s(knn_stream_out);
        write_stream(s.get(), events, points.size(), truth.k);
      }
      if (!knn_truth_out.empty()) {
        Sink s(knn_truth_out);
        write_truth(s.get(), truth);
      }
      Sink out(knn_out);
      if (knn_algorithm) {
        EgyptFlags flags = knn_egypt_flags;
        if (!knn->get_option("--buffer")->count()) flags.buffer = knn_b;
        const EgyptParams egypt =
            finalize_egypt(flags, events, truth.k, derive_seeds(knn_seed).sample);
        const auto assignment = partition_stream(
            events, truth.k, *knn_algorithm, egypt, capacity_for(points.size(), truth.k));
        MetricsReport report = evaluate(assignment, truth.k, edges, truth);
        report.run_id = "knn";
        report.algorithm = to_string(*knn_algorithm);
        report.buffer = *knn_algorithm == Algorithm::Egypt ? egypt.buffer : 0;
        report.seed = knn_seed;
        out.get() << csv_header() << '\n' << csv_row(report) << '\n';
      } else {
        out.get() << "class,size,conductance\n";
        const auto sizes = truth.cluster_sizes();
        const auto phis = class_conductances(truth, edges);
        for (std::size_t c = 0; c < phis.size(); ++c) {
          out.get() << c << ',' << sizes[c] << ',';
          if (phis[c])
            out.get() << *phis[c];
          else
            out.get() << "undefined";
          out.get() << '\n';
        }
      }
    } else if (*an) {
      Sink out(an_out);
      out.get() << "t,m,k,p,q,p_t,q_t,p_t_minus_q_t\n";
      char buf[256];
      for (int t = 1; t <= an_t_max; ++t) {
        const WalkProfile w = closed_walk_entries(an_m, an_k, an_p, an_q, t);
        std::snprintf(buf, sizeof buf, "%d,%zu,%zu,%.10g,%.10g,%.17g,%.17g,%.17g", w.t,
                      w.m, w.k, w.p, w.q, w.p_t, w.q_t, w.p_t - w.q_t);
        out.get() << buf << '\n';
      }
      out.get() << "\nn,k,t,gap_threshold\n";
      for (double n : an_ns)
        for (int t = 2; t <= std::max(2, an_t_max); ++t) {
          std::snprintf(buf, sizeof buf, "%.10g,%zu,%d,%.17g", n, an_k, t,
                        gap_threshold(n, an_k, t));
          out.get() << buf << '\n';
        }
    } else if (*rep) {
      auto in = open_input(rep_in);
      const std::vector<MetricsReport> rows = read_rows(in);
      Sink out(rep_out);
      write_summary(out.get(), summarize(rows), rep_view);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
