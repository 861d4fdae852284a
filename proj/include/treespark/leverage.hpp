#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "treespark/graph.hpp"

namespace treespark {

// Per-edge leverage scores l_e = w_e * R_eff(u, v); l_e is also the marginal
// probability that e lies in a w-uniform spanning tree.
struct LeverageProfile {
  std::vector<double> scores;
  std::uint64_t graph_id = 0;

  double operator[](EdgeId e) const { return scores[static_cast<std::size_t>(e)]; }
  std::size_t size() const { return scores.size(); }
  double sum() const;
  double max() const;
};

// Largest biconnected block handled with a dense pseudoinverse.
inline constexpr std::size_t kMaxDenseBlockVertices = 4000;

// Edge partition into biconnected blocks (bridges form singleton blocks).
std::vector<std::vector<EdgeId>> biconnected_blocks(const WeightedGraph& g);

// b_{uv}^T L^+ b_{uv}; zero when u == v. Dense pseudoinverse of the whole graph.
double effective_resistance(const WeightedGraph& g, VertexId u, VertexId v);

// Leverage of every edge. Resistance between the endpoints of an edge only
// depends on the edge's biconnected block, so each block gets its own dense
// pseudoinverse; bridges have leverage exactly 1. Throws SizeGuard if one
// block exceeds kMaxDenseBlockVertices.
LeverageProfile leverage_scores(const WeightedGraph& g);

// Conditioning a spanning-tree measure on a set S of edges being present,
// realized by contracting S. A value: copying is cheap and nothing is shared.
class ContractionState {
 public:
  explicit ContractionState(const WeightedGraph& g);

  // Adds one more edge; throws InvalidConditioning if its endpoints are
  // already merged (the edge closes a cycle with S).
  ContractionState with(const WeightedGraph& g, EdgeId e) const;

  static ContractionState of(const WeightedGraph& g, std::span<const EdgeId> edges);

  std::span<const EdgeId> contracted() const { return contracted_; }
  bool contains(EdgeId e) const;
  VertexId class_of(VertexId v) const { return label_[static_cast<std::size_t>(v)]; }
  std::uint64_t graph_id() const { return graph_id_; }

 private:
  std::uint64_t graph_id_;
  std::vector<EdgeId> contracted_;  // insertion order
  std::vector<VertexId> label_;     // smallest original vertex of each merged class
};

// Pr[e in T | S in T] for every edge: 1 on S, 0 on edges that became
// self-loops under the contraction, and the leverage in the contracted
// multigraph otherwise.
std::vector<double> conditional_marginals(const WeightedGraph& g, const ContractionState& state);

}  // namespace treespark
