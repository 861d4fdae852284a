#include <doctest.h>

#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "treespark/error.hpp"
#include "treespark/experiments.hpp"

using namespace treespark;

TEST_CASE("tree count formula") {
  // ceil(eps^-2 (ln 200)^2) = ceil(112.29) = 113
  CHECK(sum_trees_count(200, 0.5, 1.0) == 113);
  CHECK(sum_trees_count(2, 0.99, 0.01) == 1);
  CHECK_THROWS_AS(sum_trees_count(10, 0.0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(sum_trees_count(10, 1.0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(sum_trees_count(10, 0.5, 0.0), InvalidParameter);
}

TEST_CASE("sum of trees on a tree graph is exact") {
  const WeightedGraph g = read_graph_file(th::corpus("star6.txt"));
  SumTreesParams p;
  p.eps = 0.1;
  p.t = 3;
  p.trials = 4;
  const auto r = run_sum_trees(g, "star6", p);
  CHECK(r.passed);
  for (const auto& t : r.per_trial) {
    CHECK(t.lambda_min_pos == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.lambda_max == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("sum of trees on K_60") {
  const WeightedGraph g = graph_from_source("k:60");
  SumTreesParams p;
  p.eps = 0.5;
  p.c_mult = 1.0;
  p.trials = 6;
  p.base_seed = 11;
  const auto r = run_sum_trees(g, "k:60", p);
  CHECK(r.t == sum_trees_count(60, 0.5, 1.0));
  CHECK(r.c_mult == 1.0);
  CHECK(r.seeds == std::vector<std::uint64_t>{11, 12, 13, 14, 15, 16});
  CHECK(r.pass_fraction >= 0.9);
  for (const auto& t : r.per_trial) CHECK(t.lambda_min_pos <= t.lambda_max);

  p.t = 1;
  const auto one = run_sum_trees(g, "k:60", p);
  CHECK(one.pass_fraction == 0.0);
  CHECK_FALSE(one.passed);
  CHECK(one.c_mult == 0.0);
}

TEST_CASE("reports are reproducible") {
  const WeightedGraph g = graph_from_source("er:40,0.2,3");
  SumTreesParams p;
  p.eps = 0.5;
  p.t = 20;
  p.trials = 5;
  p.base_seed = 77;
  const auto a = run_sum_trees(g, "", p);
  const auto b = run_sum_trees(g, "", p);
  for (std::size_t i = 0; i < a.per_trial.size(); ++i) {
    CHECK(a.per_trial[i].lambda_min_pos == b.per_trial[i].lambda_min_pos);
    CHECK(a.per_trial[i].lambda_max == b.per_trial[i].lambda_max);
  }
  p.trials = 0;
  CHECK_THROWS_AS(run_sum_trees(g, "", p), InvalidParameter);
}

TEST_CASE("deviation shrinks as t grows") {
  const auto r = run_t_trend(graph_from_source("k:50"), 0.5, 5, 6, 1);
  CHECK(r.t == std::vector<std::size_t>{5, 10, 20});
  CHECK(r.decreasing);
}

TEST_CASE("single tree upper bound") {
  const auto tree = run_single_tree_upper(read_graph_file(th::corpus("path5.txt")), "path5", 5, 0);
  for (double l : tree.lambda_max) CHECK(l == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tree.passed);

  const auto k = run_single_tree_upper(graph_from_source("k:100"), "k:100", 10, 0);
  CHECK(k.passed);
  CHECK(k.envelope == doctest::Approx(100.0 * std::log(100.0)));
  CHECK(k.median <= 3.0 * std::log(100.0));
  CHECK(k.log2_n == doctest::Approx(std::log2(100.0)));

  // On a ring one reweighted path is n/(n-1) times the path: lambda_max is
  // n/(n-1), and lambda_min_pos is of order 1/n.
  const auto ring = run_single_tree_upper(graph_from_source("ring:30"), "ring:30", 5, 0);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(ring.lambda_max[i] == doctest::Approx(30.0 / 29.0).epsilon(1e-10));
    CHECK(ring.lambda_min_pos[i] < 0.2);
  }
}

TEST_CASE("unweighted thin tree") {
  const auto tree = run_unweighted_thin_tree(read_graph_file(th::corpus("petersen.txt")), "petersen", 5, 0);
  CHECK(tree.passed);
  const auto k = run_unweighted_thin_tree(graph_from_source("k:80"), "k:80", 10, 0);
  CHECK(k.max_leverage == doctest::Approx(2.0 / 80.0));
  CHECK(k.passed);
  const auto path = run_unweighted_thin_tree(graph_from_source("ring:3"), "", 3, 0);
  CHECK(path.max_leverage == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(run_unweighted_thin_tree(read_graph_file(th::corpus("triangle_weighted.txt")), "", 3, 0),
                  InvalidParameter);
  const auto star = run_unweighted_thin_tree(graph_from_source("k:2"), "", 2, 0);
  CHECK(star.max_leverage == 1.0);
  CHECK(star.lambda_max[0] == doctest::Approx(1.0));
}

TEST_CASE("multi tree lower bound: window and formula") {
  MultiTreeLowerParams p;
  p.num_cliques = 4;
  p.clique_size = 20;
  p.eps = 0.4;
  p.trials = 3;
  const auto r = run_multi_tree_lower(p);
  // n = 77, t = max(1, floor(0.05 * 6.25 * ln 77)) = 1
  CHECK(r.n == 77);
  CHECK(r.t == 1);
  CHECK(r.degree_d == 19.0);
  p.eps = 0.5;
  CHECK_THROWS_AS(run_multi_tree_lower(p), InvalidParameter);
  p.eps = 0.6;
  CHECK_THROWS_AS(run_multi_tree_lower(p), InvalidParameter);
  p.eps = 0.4;
  p.clique_size = 10;  // 5/s = 0.5 > eps
  CHECK_THROWS_AS(run_multi_tree_lower(p), InvalidParameter);
  p.enforce_window = false;
  CHECK_NOTHROW(run_multi_tree_lower(p));
}

TEST_CASE("multi tree lower bound: many trees show no violation") {
  MultiTreeLowerParams p;
  p.num_cliques = 3;
  p.clique_size = 20;
  p.eps = 0.4;
  p.t = 3000;
  p.trials = 3;
  const auto r = run_multi_tree_lower(p);
  CHECK(r.violation_fraction == 0.0);
}

TEST_CASE("multi tree lower bound: large clique star violates") {
  MultiTreeLowerParams p;
  p.num_cliques = 20;
  p.clique_size = 40;
  p.eps = 0.4;
  p.trials = 10;
  const auto r = run_multi_tree_lower(p);
  CHECK(r.violation_fraction >= 0.95);
  CHECK(r.passed);
}

TEST_CASE("single K_4 with one tree: exact violation probability") {
  // Inverse-leverage weight 2 per tree edge against weighted degree 3:
  // only a vertex of tree degree 3 leaves [1.8, 4.2]. 4 of the 16 trees are stars.
  CHECK(exact_single_tree_violation_probability(graph_from_source("k:4"), 0.4) == doctest::Approx(0.25));
  MultiTreeLowerParams p;
  p.num_cliques = 1;
  p.clique_size = 4;
  p.eps = 0.4;
  p.trials = 4000;
  p.enforce_window = false;
  const auto r = run_multi_tree_lower(p);
  CHECK(r.t == 1);
  CHECK(std::abs(r.violation_fraction - 0.25) < 4.0 * std::sqrt(0.25 * 0.75 / 4000.0));
}

TEST_CASE("single tree lower bound") {
  const auto s3 = run_single_tree_lower(1, 3, 50, 0);
  CHECK(s3.max_degree <= 2);
  CHECK(s3.max_half_degree <= 1.0);
  CHECK(s3.all_certified);
  for (const auto& t : s3.per_trial) CHECK(t.vertex != 0);

  const auto c = run_single_tree_lower(6, 12, 100, 5);
  CHECK(c.all_certified);
  CHECK(c.ratio_threshold == doctest::Approx(std::log(12.0) / 2.0));
  CHECK(c.tail_upper >= c.tail_lower);
  CHECK(c.tail_consistent);
  CHECK_THROWS_AS(run_single_tree_lower(1, 5, 5, 0, 1), InvalidParameter);
  CHECK_THROWS_AS(run_single_tree_lower(1, 5, 0, 0), InvalidParameter);
}

TEST_CASE("Prufer degree law") {
  const auto pmf3 = prufer_degree_pmf(3);
  CHECK(pmf3[0] == 0.0);
  CHECK(pmf3[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(pmf3[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(std::accumulate(pmf3.begin(), pmf3.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  const auto ex3 = exhaustive_degree_pmf(3);
  for (std::size_t d = 0; d < 3; ++d) CHECK(ex3[d] == doctest::Approx(pmf3[d]).epsilon(1e-15));
  for (std::size_t n = 4; n <= 7; ++n) {
    const auto ex = exhaustive_degree_pmf(n);
    const auto ref = prufer_degree_pmf(n);
    for (std::size_t d = 0; d < n; ++d) CHECK(std::abs(ex[d] - ref[d]) < 1e-14);
  }
  CHECK_THROWS_AS(prufer_degree_pmf(2), InvalidParameter);
}

TEST_CASE("degree histogram") {
  const auto h = run_degree_dist(12, 20000, 4);
  CHECK(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}) == 20000);
  CHECK(h.counts[0] == 0);
  CHECK(h.passed);
  CHECK(h.gate == doctest::Approx(4.0 * std::sqrt(11.0 / 20000.0)));
  CHECK(h.tv < 0.02);
}
