#include <doctest.h>

#include <set>
#include <sstream>

#include "oracles.hpp"
#include "sgpart/experiment.hpp"

using namespace sgp;

namespace {

RunSpec spec(std::size_t n, double p, double q, std::uint64_t seed, Algorithm alg,
             std::size_t buffer = 0) {
  RunSpec s;
  s.n = n;
  s.k = 2;
  s.p = p;
  s.q = q;
  s.seed = seed;
  s.algorithm = alg;
  s.egypt.buffer = buffer;
  return s;
}

SweepSpec small_sweep() {
  SweepSpec s;
  s.n = 300;
  s.gaps = {0.3, 0.6};
  s.ks = {2, 3};
  s.buffers = {50, 100};
  s.repeats = 2;
  s.base_seed = 17;
  s.algorithms = {Algorithm::Egypt, Algorithm::Lwd, Algorithm::Hash};
  return s;
}

MetricsReport row(std::string alg, std::size_t b, double p, double lambda, double precision) {
  MetricsReport r;
  r.run_id = "x";
  r.n = 100;
  r.k = 2;
  r.p = p;
  r.q = 0.05;
  r.buffer = b;
  r.algorithm = std::move(alg);
  r.lambda = lambda;
  r.rho = 1.0;
  r.precision = precision;
  return r;
}

}  // namespace

TEST_CASE("algorithm names") {
  for (Algorithm a : {Algorithm::Egypt, Algorithm::Lwd, Algorithm::Hash})
    CHECK(parse_algorithm(to_string(a)) == a);
  CHECK_THROWS_AS(parse_algorithm("metis"), ConfigError);
}

TEST_CASE("derived seeds are stable and distinct") {
  const RunSeeds a = derive_seeds(5), b = derive_seeds(5), c = derive_seeds(6);
  CHECK(a.graph == b.graph);
  CHECK(a.order == b.order);
  CHECK(a.sample == b.sample);
  CHECK(std::set<std::uint64_t>{a.graph, a.order, a.sample, c.graph}.size() == 4);
}

TEST_CASE("single run on disjoint cliques") {
  const MetricsReport r = run_once(spec(200, 1.0, 0.0, 3, Algorithm::Egypt, 50));
  CHECK(r.precision == 1.0);
  CHECK(r.lambda == 0.0);
  CHECK(r.buffer == 50);
  CHECK(r.algorithm == "egypt");
}

TEST_CASE("repeated runs agree apart from timing") {
  const RunSpec s = spec(500, 0.4, 0.05, 11, Algorithm::Egypt, 100);
  MetricsReport a = run_once(s), b = run_once(s);
  a.wall_time_s = b.wall_time_s = 0;
  CHECK(csv_row(a) == csv_row(b));
}

TEST_CASE("errors carry the run id") {
  RunSpec s = spec(100, 0.5, 0.05, 1, Algorithm::Egypt, 500);
  s.run_id = "cell-7";
  try {
    run_once(s);
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).rfind("cell-7: ", 0) == 0);
  }
}

TEST_CASE("EGyPT beats hashing at gap 0.45") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const double e = run_once(spec(2000, 0.5, 0.05, seed, Algorithm::Egypt, 500)).precision;
    const double h = run_once(spec(2000, 0.5, 0.05, seed, Algorithm::Hash)).precision;
    CHECK(e > h);
  }
}

TEST_CASE("sweep validation") {
  SweepSpec s = small_sweep();
  s.gaps = {0.99};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = small_sweep();
  s.repeats = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = small_sweep();
  s.ks = {};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  CHECK(SweepSpec::default_gaps().size() == 19);
  CHECK(SweepSpec::default_gaps().front() == doctest::Approx(0.05));
  CHECK(SweepSpec::default_gaps().back() == doctest::Approx(0.95));
}

TEST_CASE("sweep grid, provenance and determinism") {
  const SweepSpec s = small_sweep();
  const SweepResult a = sweep(s);
  CHECK(a.failures.empty());
  // Per instance: one row per buffer for EGyPT, one each for the baselines.
  CHECK(a.rows.size() == 2 * 2 * 2 * (2 + 2));
  std::set<std::string> ids;
  for (const auto& r : a.rows) {
    ids.insert(r.run_id);
    CHECK(r.n == 300);
    CHECK(r.q == 0.05);
    if (r.algorithm != "egypt") CHECK(r.buffer == 0);
  }
  CHECK(ids.size() == a.rows.size());

  const SweepResult b = sweep(s);
  REQUIRE(b.rows.size() == a.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    MetricsReport x = a.rows[i], y = b.rows[i];
    x.wall_time_s = y.wall_time_s = 0;
    CHECK(csv_row(x) == csv_row(y));
  }
  // Every algorithm and buffer on one instance shares the instance seed.
  CHECK(a.rows[0].seed == a.rows[1].seed);
  CHECK(a.rows[0].seed == instance_seed(17, 0, 2, 0));
  CHECK(a.summary.size() == 2 * 2 * 4);
}

TEST_CASE("failing cells are recorded and the sweep continues") {
  SweepSpec s = small_sweep();
  s.buffers = {100, 1000};  // 1000 > n
  const SweepResult r = sweep(s);
  CHECK(r.failures.size() == 2 * 2 * 2);
  CHECK(r.rows.size() == 2 * 2 * 2 * 3);
}

TEST_CASE("summaries match manual aggregation") {
  std::vector<MetricsReport> rows;
  const std::vector<double> lam{0.1, 0.12, 0.11, 0.13, 0.09};
  const std::vector<double> pre{0.9, 0.95, 1.0, 0.85, 0.97};
  for (std::size_t i = 0; i < 5; ++i) rows.push_back(row("egypt", 100, 0.35, lam[i], pre[i]));
  for (std::size_t i = 0; i < 5; ++i) rows.push_back(row("lwd", 0, 0.35, 0.5, 0.5 + 0.001 * i));
  const auto cells = summarize(rows);
  REQUIRE(cells.size() == 2);
  const CellSummary& e = cells[0];
  CHECK(e.algorithm == "egypt");
  CHECK(e.runs == 5);
  CHECK(e.gap == 0.3);
  CHECK(e.mean_lambda == doctest::Approx(oracle::mean(lam)));
  CHECK(e.var_lambda == doctest::Approx(oracle::sample_variance(lam)));
  CHECK(e.mean_precision == doctest::Approx(oracle::mean(pre)));
  CHECK(e.var_precision == doctest::Approx(oracle::sample_variance(pre)));
  CHECK(cells[1].mean_precision == doctest::Approx(0.502));
}

TEST_CASE("reports") {
  std::istringstream empty("");
  CHECK_THROWS_AS(read_rows(empty), ParseError);
  std::istringstream header_only(csv_header() + "\n");
  CHECK_THROWS_AS(read_rows(header_only), ParseError);
  std::istringstream wrong("a,b,c\n1,2,3\n");
  CHECK_THROWS_AS(read_rows(wrong), ParseError);

  std::stringstream one;
  write_rows(one, {row("egypt", 200, 0.5, 0.1, 0.99)});
  const auto rows = read_rows(one);
  REQUIRE(rows.size() == 1);
  std::ostringstream table;
  write_summary(table, summarize(rows), ReportView::ByBuffer);
  std::istringstream lines(table.str());
  std::string line;
  std::vector<std::string> all;
  while (std::getline(lines, line)) all.push_back(line);
  REQUIRE(all.size() == 2);
  CHECK(all[0] == summary_header());
  CHECK(all[1].rfind("egypt,2,200,0.45,", 0) == 0);
}

TEST_CASE("report views order the cells") {
  std::vector<MetricsReport> rows;
  for (double p : {0.35, 0.65})
    for (std::size_t b : {100u, 50u}) rows.push_back(row("egypt", b, p, 0.1, 0.9));
  std::ostringstream by_gap, by_b;
  write_summary(by_gap, summarize(rows), ReportView::ByGap);
  write_summary(by_b, summarize(rows), ReportView::ByBuffer);
  auto keys = [](const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    std::vector<std::string> out;
    while (std::getline(in, line)) out.push_back(line.substr(0, line.find(",0.05,")));
    return out;
  };
  CHECK(keys(by_gap.str()) == std::vector<std::string>{"egypt,2,50,0.3,0.35", "egypt,2,50,0.6,0.65",
                                                       "egypt,2,100,0.3,0.35",
                                                       "egypt,2,100,0.6,0.65"});
  CHECK(keys(by_b.str()) == std::vector<std::string>{"egypt,2,50,0.3,0.35", "egypt,2,100,0.3,0.35",
                                                     "egypt,2,50,0.6,0.65",
                                                     "egypt,2,100,0.6,0.65"});
}
