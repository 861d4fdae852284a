#pragma once

#include <string>
#include <vector>

#include "oracle.hpp"
#include "treespark/graph.hpp"
#include "treespark/matrix.hpp"
#include "treespark/rng.hpp"

namespace th {

inline std::string corpus(const std::string& name) { return std::string(TREESPARK_DATA_DIR) + "/corpus/" + name; }

inline std::vector<oracle::OEdge> oracle_edges(const treespark::WeightedGraph& g) {
  std::vector<oracle::OEdge> out;
  for (const auto& e : g.edges()) out.push_back({e.u, e.v, e.w});
  return out;
}

inline treespark::Matrix random_symmetric(std::size_t n, std::uint64_t seed, std::uint64_t stream = 0) {
  treespark::Philox4x32 rng(seed, stream);
  treespark::Matrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = 2.0 * rng.uniform() - 1.0;
  return a;
}

// Connected multigraph with n vertices and m >= n-1 edges: a random tree
// plus extra (possibly parallel) edges, weights from a small mixed set.
inline treespark::WeightedGraph random_connected(std::size_t n, std::size_t m, std::uint64_t seed) {
  treespark::Philox4x32 rng(seed, 99);
  static constexpr double ws[] = {0.5, 1.0, 1.5, 2.0, 3.0, 0.25};
  std::vector<treespark::Edge> edges;
  for (std::size_t v = 1; v < n; ++v)
    edges.push_back({static_cast<treespark::VertexId>(rng.below(v)), static_cast<treespark::VertexId>(v), ws[rng.below(6)]});
  while (edges.size() < m) {
    const auto u = static_cast<treespark::VertexId>(rng.below(n));
    const auto v = static_cast<treespark::VertexId>(rng.below(n));
    if (u != v) edges.push_back({u, v, ws[rng.below(6)]});
  }
  return treespark::WeightedGraph(n, edges);
}

}  // namespace th
