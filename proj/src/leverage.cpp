#include "treespark/leverage.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "treespark/error.hpp"
#include "treespark/spectral.hpp"

namespace treespark {

// Neumaier summation: a naive sum over ~5e5 small scores drifts by 1e-7.
double LeverageProfile::sum() const {
  double total = 0.0, carry = 0.0;
  for (double x : scores) {
    const double t = total + x;
    carry += std::abs(total) >= std::abs(x) ? (total - t) + x : (x - t) + total;
    total = t;
  }
  return total + carry;
}

double LeverageProfile::max() const {
  return scores.empty() ? 0.0 : *std::max_element(scores.begin(), scores.end());
}

std::vector<std::vector<EdgeId>> biconnected_blocks(const WeightedGraph& g) {
  const std::size_t n = g.num_vertices();
  std::vector<int> disc(n, -1);
  std::vector<int> low(n, 0);
  std::vector<EdgeId> edge_stack;
  std::vector<std::vector<EdgeId>> blocks;

  struct Frame {
    VertexId v;
    EdgeId via;
    std::size_t next;
  };
  std::vector<Frame> stack;
  int clock = 0;
  disc[0] = low[0] = clock++;
  stack.push_back({0, -1, 0});
  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto nbrs = g.neighbors(f.v);
    if (f.next < nbrs.size()) {
      const Neighbor nb = nbrs[f.next++];
      if (nb.edge == f.via) continue;
      const auto w = static_cast<std::size_t>(nb.vertex);
      const auto v = static_cast<std::size_t>(f.v);
      if (disc[w] < 0) {
        edge_stack.push_back(nb.edge);
        disc[w] = low[w] = clock++;
        stack.push_back({nb.vertex, nb.edge, 0});
      } else if (disc[w] < disc[v]) {
        edge_stack.push_back(nb.edge);
        low[v] = std::min(low[v], disc[w]);
      }
      continue;
    }
    const Frame done = f;
    stack.pop_back();
    if (stack.empty()) break;
    const auto child = static_cast<std::size_t>(done.v);
    const auto parent = static_cast<std::size_t>(stack.back().v);
    low[parent] = std::min(low[parent], low[child]);
    if (low[child] >= disc[parent]) {
      std::vector<EdgeId> block;
      while (true) {
        const EdgeId e = edge_stack.back();
        edge_stack.pop_back();
        block.push_back(e);
        if (e == done.via) break;
      }
      std::sort(block.begin(), block.end());
      blocks.push_back(std::move(block));
    }
  }
  return blocks;
}

double effective_resistance(const WeightedGraph& g, VertexId u, VertexId v) {
  if (u == v) return 0.0;
  if (g.num_vertices() > kMaxDenseBlockVertices) throw SizeGuard("effective_resistance: graph too large");
  const Matrix p = laplacian_pinv(laplacian(g));
  const auto a = static_cast<std::size_t>(u);
  const auto b = static_cast<std::size_t>(v);
  return p(a, a) + p(b, b) - 2.0 * p(a, b);
}

LeverageProfile leverage_scores(const WeightedGraph& g) {
  LeverageProfile out;
  out.graph_id = g.id();
  out.scores.assign(g.num_edges(), 0.0);
  std::vector<int> local(g.num_vertices(), -1);
  for (const auto& block : biconnected_blocks(g)) {
    if (block.size() == 1) {
      out.scores[static_cast<std::size_t>(block[0])] = 1.0;
      continue;
    }
    std::vector<VertexId> members;
    for (EdgeId e : block)
      for (VertexId x : {g.edge(e).u, g.edge(e).v})
        if (local[static_cast<std::size_t>(x)] < 0) {
          local[static_cast<std::size_t>(x)] = static_cast<int>(members.size());
          members.push_back(x);
        }
    if (members.size() > kMaxDenseBlockVertices)
      throw SizeGuard("leverage_scores: biconnected block with " + std::to_string(members.size()) +
                      " vertices exceeds the dense limit");
    std::vector<Edge> local_edges;
    local_edges.reserve(block.size());
    for (EdgeId e : block) {
      const Edge& ge = g.edge(e);
      local_edges.push_back({local[static_cast<std::size_t>(ge.u)], local[static_cast<std::size_t>(ge.v)], ge.w});
    }
    const Matrix p = laplacian_pinv(laplacian(members.size(), local_edges));
    for (std::size_t k = 0; k < block.size(); ++k) {
      const auto a = static_cast<std::size_t>(local_edges[k].u);
      const auto b = static_cast<std::size_t>(local_edges[k].v);
      out.scores[static_cast<std::size_t>(block[k])] = local_edges[k].w * (p(a, a) + p(b, b) - 2.0 * p(a, b));
    }
    for (VertexId x : members) local[static_cast<std::size_t>(x)] = -1;
  }
  return out;
}

ContractionState::ContractionState(const WeightedGraph& g) : graph_id_(g.id()), label_(g.num_vertices()) {
  std::iota(label_.begin(), label_.end(), 0);
}

ContractionState ContractionState::with(const WeightedGraph& g, EdgeId e) const {
  if (g.id() != graph_id_) throw InvalidParameter("contraction state belongs to a different graph");
  if (e < 0 || static_cast<std::size_t>(e) >= g.num_edges()) throw InvalidParameter("edge id out of range");
  const VertexId a = class_of(g.edge(e).u);
  const VertexId b = class_of(g.edge(e).v);
  if (a == b)
    throw InvalidConditioning("edge " + std::to_string(e) + " closes a cycle with the conditioned set");
  ContractionState next = *this;
  next.contracted_.push_back(e);
  const VertexId keep = std::min(a, b);
  const VertexId drop = std::max(a, b);
  for (VertexId& l : next.label_)
    if (l == drop) l = keep;
  return next;
}

ContractionState ContractionState::of(const WeightedGraph& g, std::span<const EdgeId> edges) {
  ContractionState s(g);
  for (EdgeId e : edges) s = s.with(g, e);
  return s;
}

bool ContractionState::contains(EdgeId e) const {
  return std::find(contracted_.begin(), contracted_.end(), e) != contracted_.end();
}

std::vector<double> conditional_marginals(const WeightedGraph& g, const ContractionState& state) {
  if (g.id() != state.graph_id()) throw InvalidParameter("contraction state belongs to a different graph");
  const std::size_t m = g.num_edges();
  std::vector<double> out(m, 0.0);
  for (EdgeId e : state.contracted()) out[static_cast<std::size_t>(e)] = 1.0;

  std::vector<int> compact(g.num_vertices(), -1);
  int classes = 0;
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    const auto c = static_cast<std::size_t>(state.class_of(static_cast<VertexId>(v)));
    if (compact[c] < 0) compact[c] = classes++;
  }
  if (classes < 2) return out;

  std::vector<Edge> quotient;
  std::vector<EdgeId> origin;
  for (std::size_t i = 0; i < m; ++i) {
    const auto e = static_cast<EdgeId>(i);
    if (out[i] == 1.0 && state.contains(e)) continue;
    const Edge& ge = g.edge(e);
    const int a = compact[static_cast<std::size_t>(state.class_of(ge.u))];
    const int b = compact[static_cast<std::size_t>(state.class_of(ge.v))];
    if (a == b) continue;  // self-loop after contraction
    quotient.push_back({a, b, ge.w});
    origin.push_back(e);
  }
  const WeightedGraph h(static_cast<std::size_t>(classes), std::move(quotient));
  const LeverageProfile lev = leverage_scores(h);
  for (std::size_t k = 0; k < origin.size(); ++k) out[static_cast<std::size_t>(origin[k])] = lev.scores[k];
  return out;
}

}  // namespace treespark
