#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "treespark/error.hpp"
#include "treespark/graph.hpp"
#include "treespark/spectral.hpp"

using namespace treespark;

TEST_CASE("construction validates its input") {
  CHECK_THROWS_AS(WeightedGraph(1, {}), GraphInvalid);
  CHECK_THROWS_AS(WeightedGraph(2, {{0, 0, 1.0}, {0, 1, 1.0}}), GraphInvalid);
  CHECK_THROWS_AS(WeightedGraph(2, {{0, 1, 0.0}}), GraphInvalid);
  CHECK_THROWS_AS(WeightedGraph(2, {{0, 1, -1.0}}), GraphInvalid);
  CHECK_THROWS_AS(WeightedGraph(2, {{0, 1, std::nan("")}}), GraphInvalid);
  CHECK_THROWS_AS(WeightedGraph(2, {{0, 2, 1.0}}), GraphInvalid);
  CHECK_THROWS_AS(WeightedGraph(4, {{0, 1, 1.0}, {2, 3, 1.0}}), GraphInvalid);
}

TEST_CASE("edges are stored head-first and parallel edges stay distinct") {
  const WeightedGraph g(3, {{2, 1, 1.0}, {1, 2, 2.0}, {0, 2, 1.0}});
  CHECK(g.num_edges() == 3);
  CHECK(g.edge(0).u == 1);
  CHECK(g.edge(0).v == 2);
  const auto b = incidence_row(g, 0);
  CHECK(b == std::vector<double>{0.0, 1.0, -1.0});
  CHECK(g.weighted_degree(2) == 4.0);
  CHECK(g.neighbors(2).size() == 3);
  CHECK(g.cumulative_weights(2).back() == 4.0);
}

TEST_CASE("Laplacian of the two-vertex path") {
  const Matrix l = laplacian(WeightedGraph(2, {{0, 1, 1.0}}));
  CHECK(l(0, 0) == 1.0);
  CHECK(l(0, 1) == -1.0);
  CHECK(l(1, 0) == -1.0);
  CHECK(l(1, 1) == 1.0);
}

TEST_CASE("K_n has lambda_max equal to n") {
  for (std::size_t n : {3u, 7u, 20u}) {
    const auto ev = eigvals_sym(laplacian(graph_from_source("k:" + std::to_string(n))));
    CHECK(ev.back() == doctest::Approx(static_cast<double>(n)).epsilon(1e-12));
  }
}

TEST_CASE("star with uniform weight n/2 has lambda_max (n/2)(d+1)") {
  const std::size_t n = 12, d = 5;
  std::vector<Edge> edges;
  for (std::size_t i = 1; i <= d; ++i) edges.push_back({0, static_cast<VertexId>(i), n / 2.0});
  const auto ev = eigvals_sym(laplacian(WeightedGraph(d + 1, edges)));
  CHECK(ev.back() == doctest::Approx(n / 2.0 * (d + 1)).epsilon(1e-12));
}

TEST_CASE("Laplacian rows sum to zero and the spectral gap is positive") {
  for (const char* src : {"k:6", "ring:9", "cliquestar:3,4", "er:30,0.2,5"}) {
    const WeightedGraph g = graph_from_source(src);
    const Matrix l = laplacian(g);
    for (std::size_t i = 0; i < l.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < l.size(); ++j) s += l(i, j);
      CHECK(std::abs(s) <= 1e-12 * l.max_abs());
    }
    CHECK(eigvals_sym(l)[1] > 1e-8);
  }
}

TEST_CASE("construction examples and edge counts") {
  CHECK(graph_from_source("k:3").num_edges() == 3);
  const WeightedGraph cs = graph_from_source("cliquestar:2,3");
  CHECK(cs.num_vertices() == 5);
  CHECK(cs.num_edges() == 6);
  CHECK(cs.weighted_degree(0) == 4.0);
  const WeightedGraph c10 = graph_from_source("cliquestar:10,10");
  CHECK(c10.num_vertices() == 91);
  CHECK(c10.num_edges() == 450);

  for (std::size_t n = 3; n <= 12; ++n) {
    ConstructionParams p;
    p.n = n;
    CHECK(build_construction(ConstructionKind::complete, p).num_edges() ==
          construction_edge_count(ConstructionKind::complete, p));
    CHECK(build_construction(ConstructionKind::ring, p).num_edges() == construction_edge_count(ConstructionKind::ring, p));
  }
  for (std::size_t l = 1; l <= 4; ++l)
    for (std::size_t s = 3; s <= 6; ++s) {
      ConstructionParams p;
      p.num_cliques = l;
      p.clique_size = s;
      const auto g = build_construction(ConstructionKind::clique_star, p);
      CHECK(g.num_edges() == construction_edge_count(ConstructionKind::clique_star, p));
      CHECK(g.num_edges() == l * s * (s - 1) / 2);
      CHECK(g.num_vertices() == l * (s - 1) + 1);
    }
  ConstructionParams er;
  er.n = 10;
  er.p = 0.3;
  CHECK_THROWS_AS(construction_edge_count(ConstructionKind::erdos_renyi_connected, er), InvalidParameter);
}

TEST_CASE("construction parameters out of range") {
  ConstructionParams p;
  p.n = 1;
  CHECK_THROWS_AS(build_construction(ConstructionKind::complete, p), InvalidParameter);
  p.n = 2;
  CHECK_THROWS_AS(build_construction(ConstructionKind::ring, p), InvalidParameter);
  p.num_cliques = 1;
  p.clique_size = 2;
  CHECK_THROWS_AS(build_construction(ConstructionKind::clique_star, p), InvalidParameter);
  CHECK_THROWS_AS(graph_from_source("er:10,1.5"), InvalidParameter);
  CHECK_THROWS_AS(graph_from_source("k:x"), InvalidParameter);
  CHECK_THROWS_AS(graph_from_source("cliquestar:3"), InvalidParameter);
}

TEST_CASE("Erdos-Renyi construction is seeded and connected") {
  const auto a = graph_from_source("er:40,0.1,11");
  const auto b = graph_from_source("er:40,0.1,11");
  const auto c = graph_from_source("er:40,0.1,12");
  CHECK(a.id() == b.id());
  CHECK(a.id() != c.id());
  CHECK(graph_from_source("er:40,0.1", 11).id() == a.id());
  // A probability this small almost never yields a connected graph.
  CHECK_THROWS_AS(graph_from_source("er:200,0.001,1"), InvalidParameter);
}

TEST_CASE("spec strings are recognised") {
  CHECK(is_construction_spec("k:5"));
  CHECK(is_construction_spec("cliquestar:2,3"));
  CHECK_FALSE(is_construction_spec("graph.txt"));
}

TEST_CASE("graph file round trip is bit faithful") {
  const WeightedGraph g(3, {{0, 1, 0.1}, {1, 2, 1.0 / 3.0}, {0, 2, 1e-300}});
  std::stringstream s;
  write_graph(s, g);
  const WeightedGraph h = read_graph(s);
  CHECK(h.id() == g.id());
  for (EdgeId e = 0; e < 3; ++e) CHECK(h.edge(e).w == g.edge(e).w);
}

TEST_CASE("malformed graph files are rejected") {
  for (const char* text : {"", "3", "3 2\n0 1 1\n", "3 1\n0 1\n", "2 1\n0 1 x\n", "2 1\n0 1 1\nextra\n"}) {
    std::stringstream s(text);
    CHECK_THROWS_AS(read_graph(s), IoError);
  }
  std::stringstream disconnected("4 2\n0 1 1\n2 3 1\n");
  CHECK_THROWS_AS(read_graph(disconnected), GraphInvalid);
  CHECK_THROWS_AS(read_graph_file("/nonexistent/graph.txt"), IoError);
  CHECK(read_graph_file(th::corpus("triangle_weighted.txt")).num_edges() == 3);
}

TEST_CASE("graph id tracks content") {
  const WeightedGraph a(2, {{0, 1, 1.0}});
  const WeightedGraph b(2, {{0, 1, 2.0}});
  CHECK(a.id() != b.id());
  CHECK(a.is_tree());
  CHECK_FALSE(graph_from_source("k:3").is_tree());
}
