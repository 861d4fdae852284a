#include "treespark/treesample.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "treespark/error.hpp"

namespace treespark {

SpanningTree WilsonSampler::sample(Philox4x32& rng) const {
  const std::size_t n = g_.num_vertices();
  std::vector<char> in_tree(n, 0);
  std::vector<EdgeId> next(n, -1);
  SpanningTree t;
  t.num_vertices = n;
  t.graph_id = g_.id();
  t.edges.reserve(n - 1);
  in_tree[0] = 1;
  for (std::size_t start = 0; start < n; ++start) {
    auto u = static_cast<VertexId>(start);
    while (!in_tree[static_cast<std::size_t>(u)]) {
      const auto cum = g_.cumulative_weights(u);
      const double r = rng.uniform() * cum.back();
      auto k = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), r) - cum.begin());
      if (k >= cum.size()) k = cum.size() - 1;
      const Neighbor nb = g_.neighbors(u)[k];
      next[static_cast<std::size_t>(u)] = nb.edge;
      u = nb.vertex;
    }
    u = static_cast<VertexId>(start);
    while (!in_tree[static_cast<std::size_t>(u)]) {
      in_tree[static_cast<std::size_t>(u)] = 1;
      const EdgeId e = next[static_cast<std::size_t>(u)];
      t.edges.push_back(e);
      const Edge& ge = g_.edge(e);
      u = ge.u == u ? ge.v : ge.u;
    }
  }
  std::sort(t.edges.begin(), t.edges.end());
  t.weights.reserve(t.edges.size());
  for (EdgeId e : t.edges) t.weights.push_back(g_.edge(e).w);
  return t;
}

SpanningTree sample_tree_wilson(const WeightedGraph& g, std::uint64_t seed, std::uint64_t stream) {
  Philox4x32 rng(seed, stream);
  return WilsonSampler(g).sample(rng);
}

std::vector<double> TreeDistributionTable::marginals(std::size_t m) const {
  std::vector<long double> acc(m, 0.0L);
  for (const auto& t : trees)
    for (EdgeId e : t.edges) acc[static_cast<std::size_t>(e)] += t.probability;
  return {acc.begin(), acc.end()};
}

long double matrix_tree_determinant(const WeightedGraph& g) {
  const std::size_t n = g.num_vertices() - 1;
  std::vector<long double> a(n * n, 0.0L);
  auto at = [&](std::size_t i, std::size_t j) -> long double& { return a[i * n + j]; };
  for (const Edge& e : g.edges()) {
    const auto u = static_cast<std::size_t>(e.u);
    const auto v = static_cast<std::size_t>(e.v);
    const long double w = e.w;
    if (u > 0) at(u - 1, u - 1) += w;
    if (v > 0) at(v - 1, v - 1) += w;
    if (u > 0 && v > 0) {
      at(u - 1, v - 1) -= w;
      at(v - 1, u - 1) -= w;
    }
  }
  long double det = 1.0L;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(at(r, c)) > std::fabs(at(piv, c))) piv = r;
    if (at(piv, c) == 0.0L) return 0.0L;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(at(c, k), at(piv, k));
      det = -det;
    }
    det *= at(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      const long double f = at(r, c) / at(c, c);
      if (f == 0.0L) continue;
      for (std::size_t k = c; k < n; ++k) at(r, k) -= f * at(c, k);
    }
  }
  return det;
}

namespace {

// Union-find with undo, for backtracking over edge subsets.
class RollbackSets {
 public:
  explicit RollbackSets(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    history_.push_back(b);
    return true;
  }
  void undo() {
    const std::size_t b = history_.back();
    history_.pop_back();
    size_[parent_[b]] -= size_[b];
    parent_[b] = b;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::vector<std::size_t> history_;
};

void enumerate_from(const WeightedGraph& g, std::size_t next, RollbackSets& sets, std::vector<EdgeId>& chosen,
                    long double product, TreeDistributionTable& out) {
  const std::size_t need = g.num_vertices() - 1;
  if (chosen.size() == need) {
    out.trees.push_back({chosen, product, 0.0L});
    out.total_weight += product;
    return;
  }
  if (chosen.size() + (g.num_edges() - next) < need) return;
  const Edge& e = g.edge(static_cast<EdgeId>(next));
  if (sets.unite(static_cast<std::size_t>(e.u), static_cast<std::size_t>(e.v))) {
    chosen.push_back(static_cast<EdgeId>(next));
    enumerate_from(g, next + 1, sets, chosen, product * static_cast<long double>(e.w), out);
    chosen.pop_back();
    sets.undo();
  }
  enumerate_from(g, next + 1, sets, chosen, product, out);
}

}  // namespace

TreeDistributionTable enumerate_trees(const WeightedGraph& g) {
  if (g.num_edges() > kMaxEnumerationEdges)
    throw SizeGuard("enumerate_trees: " + std::to_string(g.num_edges()) + " edges exceeds the limit of " +
                    std::to_string(kMaxEnumerationEdges));
  TreeDistributionTable table;
  RollbackSets sets(g.num_vertices());
  std::vector<EdgeId> chosen;
  enumerate_from(g, 0, sets, chosen, 1.0L, table);
  for (auto& t : table.trees) t.probability = t.weight_product / table.total_weight;
  table.matrix_tree_weight = matrix_tree_determinant(g);
  const long double rel = std::fabs(table.matrix_tree_weight - table.total_weight) / table.total_weight;
  if (!(rel <= 1e-9L))
    throw ContractViolation("enumerate_trees: listing disagrees with the matrix-tree determinant");
  return table;
}

SpanningTree tree_from_edges(const WeightedGraph& g, std::vector<EdgeId> edges) {
  std::sort(edges.begin(), edges.end());
  if (edges.size() + 1 != g.num_vertices()) throw InvalidParameter("a spanning tree needs n-1 edges");
  RollbackSets sets(g.num_vertices());
  for (EdgeId e : edges) {
    if (e < 0 || static_cast<std::size_t>(e) >= g.num_edges()) throw InvalidParameter("edge id out of range");
    if (!sets.unite(static_cast<std::size_t>(g.edge(e).u), static_cast<std::size_t>(g.edge(e).v)))
      throw InvalidParameter("edge set contains a cycle");
  }
  SpanningTree t;
  t.num_vertices = g.num_vertices();
  t.graph_id = g.id();
  t.edges = std::move(edges);
  for (EdgeId e : t.edges) t.weights.push_back(g.edge(e).w);
  return t;
}

SpanningTree reweight_tree(const SpanningTree& t, const LeverageProfile& lev) {
  if (t.mode != WeightMode::original) throw InvalidParameter("reweight_tree: tree is already reweighted");
  if (t.graph_id != lev.graph_id) throw InvalidParameter("reweight_tree: leverage profile is for another graph");
  SpanningTree out = t;
  out.mode = WeightMode::inverse_leverage;
  for (std::size_t k = 0; k < out.edges.size(); ++k) out.weights[k] = t.weights[k] / lev[out.edges[k]];
  return out;
}

Matrix tree_laplacian(const WeightedGraph& g, const SpanningTree& t) {
  if (t.graph_id != g.id()) throw InvalidParameter("tree belongs to another graph");
  std::vector<Edge> edges;
  edges.reserve(t.edges.size());
  for (std::size_t k = 0; k < t.edges.size(); ++k) {
    const Edge& ge = g.edge(t.edges[k]);
    edges.push_back({ge.u, ge.v, t.weights[k]});
  }
  return laplacian(g.num_vertices(), edges);
}

Matrix average_trees(const WeightedGraph& g, std::span<const SpanningTree> trees) {
  if (trees.empty()) throw InvalidParameter("average_trees: no trees");
  Matrix acc(g.num_vertices());
  for (const auto& t : trees) {
    if (t.mode != trees.front().mode) throw InvalidParameter("average_trees: mixed weight modes");
    if (t.graph_id != g.id()) throw InvalidParameter("average_trees: tree belongs to another graph");
    for (std::size_t k = 0; k < t.edges.size(); ++k) {
      const Edge& ge = g.edge(t.edges[k]);
      const auto u = static_cast<std::size_t>(ge.u);
      const auto v = static_cast<std::size_t>(ge.v);
      const double w = t.weights[k];
      acc(u, u) += w;
      acc(v, v) += w;
      acc(u, v) -= w;
      acc(v, u) -= w;
    }
  }
  acc *= 1.0 / static_cast<double>(trees.size());
  return acc;
}

std::vector<int> tree_degrees(const WeightedGraph& g, const SpanningTree& t) {
  std::vector<int> deg(g.num_vertices(), 0);
  for (EdgeId e : t.edges) {
    ++deg[static_cast<std::size_t>(g.edge(e).u)];
    ++deg[static_cast<std::size_t>(g.edge(e).v)];
  }
  return deg;
}

std::string format_tree_line(const SpanningTree& t) {
  std::string s = std::to_string(t.num_vertices) + ";";
  for (EdgeId e : t.edges) s += " " + std::to_string(e);
  s += ";";
  char buf[64];
  for (double w : t.weights) {
    std::snprintf(buf, sizeof buf, " %.17g", w);
    s += buf;
  }
  return s;
}

SpanningTree parse_tree_line(const std::string& line) {
  const auto a = line.find(';');
  const auto b = a == std::string::npos ? a : line.find(';', a + 1);
  if (b == std::string::npos) throw IoError("tree line: expected 'n; edges; weights'");
  SpanningTree t;
  std::istringstream head(line.substr(0, a));
  if (!(head >> t.num_vertices)) throw IoError("tree line: bad vertex count");
  std::istringstream es(line.substr(a + 1, b - a - 1));
  for (EdgeId e; es >> e;) t.edges.push_back(e);
  if (!es.eof()) throw IoError("tree line: bad edge id");
  std::istringstream ws(line.substr(b + 1));
  for (double w; ws >> w;) t.weights.push_back(w);
  if (!ws.eof()) throw IoError("tree line: bad weight");
  if (t.edges.size() != t.weights.size() || t.edges.size() + 1 != t.num_vertices)
    throw IoError("tree line: edge and weight counts do not match n-1");
  return t;
}

}  // namespace treespark
