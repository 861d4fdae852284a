#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "treespark/graph.hpp"
#include "treespark/leverage.hpp"
#include "treespark/rng.hpp"

namespace treespark {

enum class WeightMode { original, inverse_leverage };

// Spanning tree of a parent graph: n-1 edge ids (ascending) with one weight
// per edge.
struct SpanningTree {
  std::size_t num_vertices = 0;
  std::uint64_t graph_id = 0;
  std::vector<EdgeId> edges;
  std::vector<double> weights;
  WeightMode mode = WeightMode::original;
};

// Wilson's loop-erased random walk rooted at vertex 0. A walk at u steps
// along incident edge e with probability w_e / wdeg(u), drawn by inverse CDF
// over the adjacency list in edge-id order, so a seed fixes the tree.
class WilsonSampler {
 public:
  explicit WilsonSampler(const WeightedGraph& g) : g_(g) {}
  SpanningTree sample(Philox4x32& rng) const;

 private:
  const WeightedGraph& g_;
};

SpanningTree sample_tree_wilson(const WeightedGraph& g, std::uint64_t seed, std::uint64_t stream = 0);

struct TreeEntry {
  std::vector<EdgeId> edges;
  long double weight_product = 0.0L;
  long double probability = 0.0L;
};

struct TreeDistributionTable {
  std::vector<TreeEntry> trees;
  long double total_weight = 0.0L;  // sum of weight products
  long double matrix_tree_weight = 0.0L;  // reduced-Laplacian determinant

  // Pr[e in T] for every edge of the parent graph with m edges.
  std::vector<double> marginals(std::size_t m) const;
};

inline constexpr std::size_t kMaxEnumerationEdges = 22;

// Every spanning tree with its w-uniform probability. Refuses m > 22 with
// SizeGuard. The listing is cross-checked against the weighted matrix-tree
// determinant and throws ContractViolation if they disagree.
TreeDistributionTable enumerate_trees(const WeightedGraph& g);

// Weighted matrix-tree count: det of L with row/column 0 removed.
long double matrix_tree_determinant(const WeightedGraph& g);

// Original-weight tree from an edge set.
SpanningTree tree_from_edges(const WeightedGraph& g, std::vector<EdgeId> edges);

// Edge weights w_e / l_e, which make E[L_T] = L_G.
SpanningTree reweight_tree(const SpanningTree& t, const LeverageProfile& lev);

Matrix tree_laplacian(const WeightedGraph& g, const SpanningTree& t);

// (1/t) sum_i L_{T_i}. Throws InvalidParameter on an empty list, mixed weight
// modes, or trees from another graph.
Matrix average_trees(const WeightedGraph& g, std::span<const SpanningTree> trees);

// Number of tree edges at each vertex.
std::vector<int> tree_degrees(const WeightedGraph& g, const SpanningTree& t);

// Text line "n; e1 e2 ...; w1 w2 ..." with weights at 17 significant digits.
std::string format_tree_line(const SpanningTree& t);
SpanningTree parse_tree_line(const std::string& line);

}  // namespace treespark
