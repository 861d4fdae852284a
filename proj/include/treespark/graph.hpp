#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "treespark/matrix.hpp"

namespace treespark {

using VertexId = std::int32_t;
using EdgeId = std::int32_t;

struct Edge {
  VertexId u;  // head, always the smaller id
  VertexId v;  // tail
  double w;
};

struct Neighbor {
  VertexId vertex;
  EdgeId edge;
};

// Connected weighted undirected multigraph. Edge ids 0..m-1 index the ground
// set of the spanning-tree measure; parallel edges stay distinct.
// Immutable after construction.
class WeightedGraph {
 public:
  // Throws GraphInvalid on self-loops, non-positive weights, out-of-range
  // endpoints, n < 2, or a disconnected edge set.
  WeightedGraph(std::size_t n, std::vector<Edge> edges);

  std::size_t num_vertices() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const Edge& edge(EdgeId e) const { return edges_[static_cast<std::size_t>(e)]; }
  std::span<const Edge> edges() const { return edges_; }

  // Incident edges in edge-id order, with the matching cumulative weights.
  std::span<const Neighbor> neighbors(VertexId v) const;
  std::span<const double> cumulative_weights(VertexId v) const;
  double weighted_degree(VertexId v) const;

  // Content hash of (n, edges, weights); ties derived objects to this graph.
  std::uint64_t id() const { return id_; }

  bool is_tree() const { return edges_.size() + 1 == n_; }

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<double> cumulative_;
  std::uint64_t id_;
};

// Signed incidence row of edge e: +1 at the head u, -1 at the tail v.
std::vector<double> incidence_row(const WeightedGraph& g, EdgeId e);

// L = sum_e w_e b_e b_e^T.
Matrix laplacian(const WeightedGraph& g);

// Laplacian of an edge subset with caller-supplied weights.
Matrix laplacian(std::size_t n, std::span<const Edge> edges);

enum class ConstructionKind { complete, ring, clique_star, erdos_renyi_connected };

struct ConstructionParams {
  std::size_t n = 0;
  std::size_t num_cliques = 0;
  std::size_t clique_size = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
};

// Unit-weight benchmark graphs:
//   complete {n}, ring {n}, clique_star {num_cliques, clique_size} sharing
//   vertex 0, erdos_renyi_connected {n, p, seed} resampled until connected.
WeightedGraph build_construction(ConstructionKind kind, const ConstructionParams& params);

// Closed-form edge count for a construction (erdos_renyi has none: throws).
std::size_t construction_edge_count(ConstructionKind kind, const ConstructionParams& params);

// Inline spec strings: "k:n", "ring:n", "cliquestar:L,s", "er:n,p[,seed]".
// Anything else is treated as a graph file path. `default_seed` feeds "er"
// when no seed is given.
WeightedGraph graph_from_source(const std::string& source, std::uint64_t default_seed = 0);

bool is_construction_spec(const std::string& source);

// Plain-text graph format: "n m" then m lines "u v w" (0-based ids).
// Weights are written with 17 significant digits so a round trip is exact.
void write_graph(std::ostream& out, const WeightedGraph& g);
WeightedGraph read_graph(std::istream& in);
WeightedGraph read_graph_file(const std::string& path);

}  // namespace treespark
