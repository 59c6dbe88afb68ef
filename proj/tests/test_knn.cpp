#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "sgpart/knn.hpp"
#include "sgpart/metrics.hpp"

using namespace sgp;

namespace {

PointSet two_blobs(std::size_t n, double separation, double sigma, std::uint64_t seed,
                   std::size_t dim = 4) {
  std::vector<std::vector<double>> centers(2, std::vector<double>(dim, 0.0));
  centers[1][0] = separation;
  return gaussian_clusters(n, dim, centers, sigma, seed);
}

std::set<std::pair<std::size_t, std::size_t>> edge_set(const EdgeList& edges) {
  std::set<std::pair<std::size_t, std::size_t>> s;
  for (const auto& e : edges.edges) s.emplace(e.u, e.v);
  return s;
}

}  // namespace

TEST_CASE("loading points") {
  std::istringstream in("0,1.5,2\n1,3,4\n0,-1,0.25\n");
  const PointSet ps = load_points(in);
  CHECK(ps.size() == 3);
  CHECK(ps.dim == 2);
  CHECK(ps.point(2)[1] == 0.25);
  CHECK(ps.labels == std::vector<ClusterId>{0, 1, 0});

  std::istringstream empty("");
  CHECK_THROWS_AS(load_points(empty), ParseError);
  std::istringstream ragged("0,1,2\n1,3\n");
  try {
    load_points(ragged);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::istringstream text("0,1,2\n1,3,abc\n");
  CHECK_THROWS_AS(load_points(text), ParseError);
}

TEST_CASE("point files round-trip") {
  const PointSet ps = two_blobs(200, 10, 0.7, 3);
  std::stringstream buf;
  write_points(buf, ps);
  const PointSet back = load_points(buf);
  CHECK(back.dim == ps.dim);
  CHECK(back.labels == ps.labels);
  CHECK(back.coords == ps.coords);
}

TEST_CASE("gaussian clusters") {
  const PointSet exact = two_blobs(10, 10, 0.0, 1, 3);
  for (std::size_t i = 0; i < exact.size(); ++i) {
    CHECK(exact.point(i)[0] == (exact.labels[i] == 0 ? 0.0 : 10.0));
    CHECK(exact.point(i)[1] == 0.0);
  }
  std::vector<std::vector<double>> three(3, std::vector<double>(2, 0.0));
  three[1][0] = 5;
  three[2][1] = 5;
  const PointSet ps = gaussian_clusters(101, 2, three, 1.0, 9);
  std::vector<std::size_t> counts(3, 0);
  for (ClusterId c : ps.labels) ++counts[c];
  CHECK(*std::max_element(counts.begin(), counts.end()) -
            *std::min_element(counts.begin(), counts.end()) <=
        1);
  CHECK_THROWS_AS(gaussian_clusters(10, 2, {{0.0, 0.0}}, 1.0, 1), ConfigError);
}

TEST_CASE("well separated points have same-label neighbors") {
  const PointSet ps = two_blobs(500, 10, 0.5, 4);
  std::vector<std::size_t> all(ps.size());
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j : oracle::knn(ps.coords, ps.dim, i, all, 5))
      CHECK(ps.labels[j] == ps.labels[i]);
}

TEST_CASE("collinear points linked to their nearest predecessor") {
  PointSet ps;
  ps.dim = 1;
  ps.coords = {0, 1, 3};
  ps.labels = {0, 0, 0};
  const IncidenceStream ev = knn_stream(ps, 1, Reference::AllArrived);
  REQUIRE(ev.size() == 3);
  CHECK(ev[0] == IncidenceEvent{0, {}});
  CHECK(ev[1] == IncidenceEvent{1, {0}});
  CHECK(ev[2] == IncidenceEvent{2, {1}});
}

TEST_CASE("full reference set gives the symmetric k-NN graph") {
  const PointSet ps = two_blobs(120, 3, 1.0, 5);
  std::vector<std::size_t> all(ps.size());
  std::iota(all.begin(), all.end(), 0);
  std::set<std::pair<std::size_t, std::size_t>> expect;
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j : oracle::knn(ps.coords, ps.dim, i, all, 4))
      expect.emplace(std::min(i, j), std::max(i, j));
  const IncidenceStream ev = knn_stream(ps, 4, Reference::FirstB, ps.size());
  for (std::size_t i = 0; i < ev.size(); ++i) CHECK(ev[i].vertex == i);
  CHECK(edge_set(edges_of(ev, ps.size())) == expect);
}

TEST_CASE("later points link to their nearest reference points") {
  const PointSet ps = two_blobs(300, 4, 1.0, 6);
  const std::size_t b = 50, kp = 5;
  const IncidenceStream ev = knn_stream(ps, kp, Reference::FirstB, b);
  std::vector<std::size_t> ref(b);
  std::iota(ref.begin(), ref.end(), 0);
  for (std::size_t i = b; i < ps.size(); ++i) {
    REQUIRE(ev[i].back_neighbors.size() == kp);
    auto nn = oracle::knn(ps.coords, ps.dim, i, ref, kp);
    std::sort(nn.begin(), nn.end());
    CHECK(std::equal(nn.begin(), nn.end(), ev[i].back_neighbors.begin()));
  }
  CHECK(knn_stream(ps, kp, Reference::FirstB, b) == ev);
  CHECK_THROWS_AS(knn_stream(ps, kp, Reference::FirstB, 301), ConfigError);
  CHECK_THROWS_AS(knn_stream(ps, kp, Reference::FirstB, 4), ConfigError);
}

TEST_CASE("all-arrived mode links each point to earlier neighbors") {
  const PointSet ps = two_blobs(150, 4, 1.0, 7);
  const IncidenceStream ev = knn_stream(ps, 3, Reference::AllArrived);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    std::vector<std::size_t> before(i);
    std::iota(before.begin(), before.end(), 0);
    auto nn = oracle::knn(ps.coords, ps.dim, i, before, 3);
    std::sort(nn.begin(), nn.end());
    REQUIRE(ev[i].back_neighbors.size() == nn.size());
    CHECK(std::equal(nn.begin(), nn.end(), ev[i].back_neighbors.begin()));
  }
}

TEST_CASE("class conductances") {
  const PointSet ps = two_blobs(1000, 10, 1.0, 8, 16);
  const IncidenceStream ev = knn_stream(ps, 5, Reference::FirstB, 100);
  const EdgeList edges = edges_of(ev, ps.size());
  for (const auto& phi : class_conductances(ps.truth(), edges)) {
    REQUIRE(phi.has_value());
    CHECK(*phi < 0.1);
  }

  // Two components matching the labels.
  EdgeList split{4, {{0, 1}, {2, 3}}};
  const GroundTruth two{2, {0, 0, 1, 1}};
  for (const auto& phi : class_conductances(two, split)) CHECK(*phi == 0.0);
  const GroundTruth one{1, {0, 0, 0, 0}};
  CHECK(*class_conductances(one, split)[0] == 0.0);
  EdgeList lonely{3, {{0, 1}}};
  const GroundTruth iso{2, {0, 0, 1}};
  CHECK_FALSE(class_conductances(iso, lonely)[1].has_value());

  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto inst = oracle::random_instance(s, 20, 3, 0.25);
    const GroundTruth t{3, inst.truth};
    const auto adj = oracle::adjacency(inst.edges);
    const auto phis = class_conductances(t, inst.edges);
    for (std::size_t c = 0; c < 3; ++c) {
      std::vector<char> mask(20);
      for (std::size_t v = 0; v < 20; ++v) mask[v] = inst.truth[v] == c;
      if (!phis[c]) continue;
      CHECK(*phis[c] == doctest::Approx(oracle::conductance(mask, adj)));
    }
  }
}
