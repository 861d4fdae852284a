#pragma once

// Desk-scale reproductions of the spanning-tree sparsification bounds. Each
// run returns a plain report struct; report.hpp serializes them.
//
// Seeding: trial j uses seed base_seed + j, and tree i inside a trial uses
// Philox stream i. Trials run in parallel and are stored by trial index, so
// every report is reproducible bit for bit.

#include <cstdint>
#include <string>
#include <vector>

#include "treespark/graph.hpp"

namespace treespark {

struct TrialExtremes {
  std::uint64_t seed = 0;
  double lambda_min_pos = 0.0;
  double lambda_max = 0.0;
  bool within = false;
};

// --- sum of trees ----------------------------------------------------------

struct SumTreesParams {
  double eps = 0.5;
  double c_mult = 1.0;
  std::size_t t = 0;  // nonzero overrides the c_mult formula
  std::size_t trials = 10;
  std::uint64_t base_seed = 0;
  double gate = 0.9;  // required pass fraction
};

struct SparsifierReport {
  std::string graph;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t t = 0;
  double eps_target = 0.0;
  double c_mult = 0.0;  // 0 when t was given explicitly
  std::size_t trials = 0;
  std::vector<TrialExtremes> per_trial;
  std::vector<std::uint64_t> seeds;
  double pass_fraction = 0.0;
  double gate = 0.0;
  bool passed = false;
};

// ceil(c_mult * eps^-2 * (ln n)^2), at least 1.
std::size_t sum_trees_count(std::size_t n, double eps, double c_mult);

SparsifierReport run_sum_trees(const WeightedGraph& g, const std::string& descriptor, const SumTreesParams& p);

// Mean over trials of max(|lambda_min_pos - 1|, |lambda_max - 1|) for
// t0, 2 t0 and 4 t0 trees; holds when the 4 t0 mean is below the t0 mean.
struct TrendReport {
  std::vector<std::size_t> t;
  std::vector<double> mean_deviation;
  bool decreasing = false;
};

TrendReport run_t_trend(const WeightedGraph& g, double eps, std::size_t t0, std::size_t trials, std::uint64_t base_seed);

// --- single tree upper bound -----------------------------------------------

struct SingleTreeUpperReport {
  std::string graph;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::uint64_t base_seed = 0;
  std::vector<double> lambda_max;
  std::vector<double> lambda_min_pos;  // the other side of the pencil, recorded only
  double max = 0.0;
  double median = 0.0;
  double envelope = 0.0;            // 100 ln n
  double empirical_constant = 0.0;  // max / ln n
  double ln_n = 0.0;
  double log2_n = 0.0;
  bool passed = false;
};

SingleTreeUpperReport run_single_tree_upper(const WeightedGraph& g, const std::string& descriptor,
                                            std::size_t trials, std::uint64_t base_seed);

// --- unweighted thin tree --------------------------------------------------

struct ThinTreeReport {
  std::string graph;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::uint64_t base_seed = 0;
  std::vector<double> lambda_max;
  double max = 0.0;
  double max_leverage = 0.0;
  double envelope = 0.0;  // 100 * max leverage * ln n
  bool passed = false;
};

// Requires unit weights (InvalidParameter otherwise).
ThinTreeReport run_unweighted_thin_tree(const WeightedGraph& g, const std::string& descriptor, std::size_t trials,
                                        std::uint64_t base_seed);

// --- multi tree lower bound on the clique star -----------------------------

struct MultiTreeLowerParams {
  std::size_t num_cliques = 100;
  std::size_t clique_size = 100;
  double eps = 0.4;
  std::size_t trials = 20;
  std::uint64_t base_seed = 0;
  std::size_t t = 0;           // nonzero overrides max(1, floor(0.05 eps^-2 ln n))
  bool enforce_window = true;  // refuse eps outside (5/s, 1/2)
  double gate = 0.95;          // required violation fraction
};

struct MultiTreeTrial {
  std::uint64_t seed = 0;
  std::size_t violating_vertices = 0;
  double max_relative_deviation = 0.0;  // max_v |wdeg_H(v)/wdeg_G(v) - 1|
};

struct MultiTreeLowerReport {
  std::size_t num_cliques = 0;
  std::size_t clique_size = 0;
  std::size_t n = 0;
  std::size_t t = 0;
  double eps = 0.0;
  double degree_d = 0.0;  // s - 1, the per-vertex degree playing the role of d
  double ln_n = 0.0;
  double log2_n = 0.0;
  std::vector<MultiTreeTrial> per_trial;
  double violation_fraction = 0.0;
  double gate = 0.0;
  bool passed = false;
  std::string leverage_method;
};

MultiTreeLowerReport run_multi_tree_lower(const MultiTreeLowerParams& p);

// Exact probability that a single inverse-leverage weighted tree violates the
// (1 +- eps) weighted-degree test somewhere, by enumeration (m <= 22).
double exact_single_tree_violation_probability(const WeightedGraph& g, double eps);

// --- single tree lower bound -----------------------------------------------

struct SingleTreeLowerTrial {
  std::uint64_t seed = 0;
  VertexId vertex = -1;   // non-central vertex of largest tree degree
  int degree = 0;         // d*
  double certified_ratio = 0.0;  // x^T L_T x / x^T L_G x for the star vector at `vertex`
};

struct SingleTreeLowerReport {
  std::size_t num_cliques = 0;
  std::size_t clique_size = 0;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::vector<SingleTreeLowerTrial> per_trial;
  int max_degree = 0;
  double max_half_degree = 0.0;       // max d*/2
  double max_certified_ratio = 0.0;
  double ratio_threshold = 0.0;       // (ln s)/2
  double fraction_above_threshold = 0.0;
  bool all_certified = false;         // certified ratio > d*/2 in every trial
  // Degree tail against 1 + Bin(s-2, 1/s): fraction of trials with d* >= degree_threshold.
  int degree_threshold = 0;
  double tail_observed = 0.0;
  double tail_lower = 0.0;  // single-vertex probability
  double tail_upper = 0.0;  // union bound over the non-central vertices
  bool tail_consistent = false;  // one-sided binomial tests at level 0.01 on both envelopes
  double ln_s = 0.0;
  double log2_s = 0.0;
};

SingleTreeLowerReport run_single_tree_lower(std::size_t num_cliques, std::size_t clique_size, std::size_t trials,
                                            std::uint64_t base_seed, int degree_threshold = 7);

// --- degree law ------------------------------------------------------------

struct DegreeHistogram {
  std::size_t n = 0;
  std::size_t samples = 0;
  std::uint64_t base_seed = 0;
  std::vector<std::size_t> counts;  // index = degree, 0..n-1
  std::vector<double> reference;    // pmf of 1 + Bin(n-2, 1/n)
  double tv = 0.0;
  double gate = 0.0;                // 4 sqrt(bins / samples), bins = n - 1
  bool passed = false;
};

// pmf of 1 + Bin(n-2, 1/n) on 0..n-1.
std::vector<double> prufer_degree_pmf(std::size_t n);

// Degree of vertex 0 in uniform spanning trees of K_n.
DegreeHistogram run_degree_dist(std::size_t n, std::size_t samples, std::uint64_t base_seed);

// Exact degree pmf of vertex 0 by enumerating the trees of K_n (n <= 7).
std::vector<double> exhaustive_degree_pmf(std::size_t n);

}  // namespace treespark
