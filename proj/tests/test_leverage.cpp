#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "oracle.hpp"
#include "treespark/error.hpp"
#include "treespark/leverage.hpp"

using namespace treespark;

TEST_CASE("weighted triangle leverage is (3/5, 3/5, 4/5)") {
  const WeightedGraph g = read_graph_file(th::corpus("triangle_weighted.txt"));
  const auto lev = leverage_scores(g);
  CHECK(lev.graph_id == g.id());
  CHECK(lev[0] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(lev[1] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(lev[2] == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(lev.sum() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(lev.max() == doctest::Approx(0.8));
}

TEST_CASE("leverage matches the rational oracle on the corpus") {
  for (const char* name : {"square_chord.txt", "parallel_triple.txt", "bowtie.txt", "k23.txt", "wheel5.txt",
                           "prism.txt", "barbell.txt", "petersen.txt", "grid4x4.txt", "star6.txt"}) {
    CAPTURE(name);
    const WeightedGraph g = read_graph_file(th::corpus(name));
    const auto lev = leverage_scores(g);
    const auto ref = oracle::leverage(static_cast<int>(g.num_vertices()), th::oracle_edges(g));
    for (std::size_t e = 0; e < g.num_edges(); ++e)
      CHECK(std::abs(lev.scores[e] - oracle::to_double(ref[e])) < 1e-12);
    CHECK(std::abs(lev.sum() - static_cast<double>(g.num_vertices() - 1)) < 1e-10);
  }
}

TEST_CASE("bridges and tree edges have leverage one") {
  const auto tree = leverage_scores(read_graph_file(th::corpus("path5.txt")));
  for (double l : tree.scores) CHECK(l == 1.0);
  const WeightedGraph bar = read_graph_file(th::corpus("barbell.txt"));
  const auto lev = leverage_scores(bar);
  for (std::size_t e = 0; e < bar.num_edges(); ++e)
    if ((bar.edge(static_cast<EdgeId>(e)).u == 3 && bar.edge(static_cast<EdgeId>(e)).v == 4) ||
        (bar.edge(static_cast<EdgeId>(e)).u == 4 && bar.edge(static_cast<EdgeId>(e)).v == 5))
      CHECK(lev.scores[e] == 1.0);
}

TEST_CASE("parallel edges split leverage by weight") {
  const WeightedGraph g(2, {{0, 1, 1.0}, {0, 1, 3.0}});
  const auto lev = leverage_scores(g);
  CHECK(lev[0] == doctest::Approx(0.25));
  CHECK(lev[1] == doctest::Approx(0.75));
}

TEST_CASE("biconnected blocks") {
  const auto blocks = biconnected_blocks(read_graph_file(th::corpus("bowtie.txt")));
  CHECK(blocks.size() == 2);
  std::size_t total = 0;
  for (const auto& b : blocks) {
    total += b.size();
    CHECK(std::is_sorted(b.begin(), b.end()));
  }
  CHECK(total == 6);
  CHECK(biconnected_blocks(graph_from_source("cliquestar:4,5")).size() == 4);
  CHECK(biconnected_blocks(read_graph_file(th::corpus("path5.txt"))).size() == 4);
}

TEST_CASE("clique star leverage equals leverage inside one clique") {
  const auto lev = leverage_scores(graph_from_source("cliquestar:6,7"));
  for (double l : lev.scores) CHECK(l == doctest::Approx(2.0 / 7.0).epsilon(1e-13));
}

TEST_CASE("effective resistance") {
  const WeightedGraph g = read_graph_file(th::corpus("path5.txt"));
  CHECK(effective_resistance(g, 0, 4) == doctest::Approx(1.0 + 0.4 + 2.0 + 1.0));
  CHECK(effective_resistance(g, 2, 2) == 0.0);
  const WeightedGraph k = graph_from_source("k:5");
  CHECK(effective_resistance(k, 1, 3) == doctest::Approx(0.4));
}

TEST_CASE("conditioning by contraction") {
  const WeightedGraph tri = read_graph_file(th::corpus("triangle_weighted.txt"));
  const auto q = conditional_marginals(tri, ContractionState::of(tri, std::vector<EdgeId>{0}));
  CHECK(q[0] == 1.0);
  CHECK(q[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(q[2] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

  const WeightedGraph unit = read_graph_file(th::corpus("triangle_unit.txt"));
  const auto qu = conditional_marginals(unit, ContractionState::of(unit, std::vector<EdgeId>{0}));
  CHECK(qu[2] == doctest::Approx(0.5).epsilon(1e-14));

  // Contracting two triangle edges turns the third into a self-loop.
  const auto full = conditional_marginals(unit, ContractionState::of(unit, std::vector<EdgeId>{0, 1}));
  CHECK(full == std::vector<double>{1.0, 1.0, 0.0});
  CHECK_THROWS_AS(ContractionState::of(unit, std::vector<EdgeId>{0, 1, 2}), InvalidConditioning);
}

TEST_CASE("conditional marginals match the rational oracle") {
  const WeightedGraph g = read_graph_file(th::corpus("wheel5.txt"));
  const auto edges = th::oracle_edges(g);
  const std::vector<std::vector<EdgeId>> sets{{}, {0}, {1, 5}, {4, 6, 7}};
  for (const auto& s : sets) {
    const auto q = conditional_marginals(g, ContractionState::of(g, s));
    const std::vector<int> si(s.begin(), s.end());
    for (std::size_t j = 0; j < g.num_edges(); ++j) {
      if (std::find(s.begin(), s.end(), static_cast<EdgeId>(j)) != s.end()) continue;
      CHECK(std::abs(q[j] - oracle::to_double(oracle::conditional_marginal(5, edges, si, static_cast<int>(j)))) < 1e-12);
    }
  }
}

TEST_CASE("contraction state bookkeeping") {
  const WeightedGraph g = graph_from_source("k:4");
  const ContractionState s0(g);
  CHECK(s0.contracted().empty());
  const auto s1 = s0.with(g, 5);
  CHECK(s1.contains(5));
  CHECK_FALSE(s0.contains(5));
  CHECK(s1.class_of(g.edge(5).v) == g.edge(5).u);
  CHECK_THROWS_AS(s1.with(g, 5), InvalidConditioning);
  CHECK_THROWS_AS(s0.with(g, 99), InvalidParameter);
  const WeightedGraph other = graph_from_source("k:5");
  CHECK_THROWS_AS(conditional_marginals(other, s1), InvalidParameter);
}

TEST_CASE("size guard on oversized blocks") {
  const WeightedGraph ring = graph_from_source("ring:4001");
  CHECK_THROWS_AS(leverage_scores(ring), SizeGuard);
  CHECK_THROWS_AS(effective_resistance(ring, 0, 1), SizeGuard);
  // A long path is all bridges and needs no dense solve.
  std::vector<Edge> path;
  for (VertexId v = 1; v < 5000; ++v) path.push_back({v - 1, v, 1.0});
  CHECK(leverage_scores(WeightedGraph(5000, path)).sum() == 4999.0);
}

TEST_CASE("Foster sum stays exact over many small scores") {
  // 124750 scores of 0.004: a naive running sum is off by about 1e-9.
  const auto lev = leverage_scores(graph_from_source("k:500"));
  CHECK(std::abs(lev.sum() - 499.0) < 1e-11);
}
