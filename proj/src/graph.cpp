#include "treespark/graph.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "treespark/error.hpp"
#include "treespark/rng.hpp"

namespace treespark {

namespace {

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t x) {
  for (int b = 0; b < 8; ++b) {
    h ^= (x >> (8 * b)) & 0xFFu;
    h *= 0x100000001B3ull;
  }
  return h;
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

WeightedGraph::WeightedGraph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n_ < 2) throw GraphInvalid("graph needs at least 2 vertices");
  DisjointSets components(n_);
  std::size_t merged = 0;
  std::vector<std::size_t> degree(n_, 0);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    Edge& e = edges_[i];
    if (e.u < 0 || e.v < 0 || static_cast<std::size_t>(e.u) >= n_ || static_cast<std::size_t>(e.v) >= n_)
      throw GraphInvalid("edge " + std::to_string(i) + " has an endpoint out of range");
    if (e.u == e.v) throw GraphInvalid("edge " + std::to_string(i) + " is a self-loop");
    if (!(e.w > 0.0) || !std::isfinite(e.w))
      throw GraphInvalid("edge " + std::to_string(i) + " has a non-positive weight");
    if (e.u > e.v) std::swap(e.u, e.v);
    if (components.unite(static_cast<std::size_t>(e.u), static_cast<std::size_t>(e.v))) ++merged;
    ++degree[static_cast<std::size_t>(e.u)];
    ++degree[static_cast<std::size_t>(e.v)];
  }
  if (merged + 1 != n_) throw GraphInvalid("graph is disconnected");

  offsets_.assign(n_ + 1, 0);
  for (std::size_t v = 0; v < n_; ++v) offsets_[v + 1] = offsets_[v] + degree[v];
  adjacency_.resize(offsets_[n_]);
  cumulative_.resize(offsets_[n_]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    adjacency_[fill[static_cast<std::size_t>(e.u)]++] = {e.v, static_cast<EdgeId>(i)};
    adjacency_[fill[static_cast<std::size_t>(e.v)]++] = {e.u, static_cast<EdgeId>(i)};
  }
  for (std::size_t v = 0; v < n_; ++v) {
    double acc = 0.0;
    for (std::size_t k = offsets_[v]; k < offsets_[v + 1]; ++k) {
      acc += edges_[static_cast<std::size_t>(adjacency_[k].edge)].w;
      cumulative_[k] = acc;
    }
  }

  std::uint64_t h = 0xCBF29CE484222325ull;
  h = fnv1a(h, n_);
  for (const Edge& e : edges_) {
    h = fnv1a(h, static_cast<std::uint64_t>(e.u));
    h = fnv1a(h, static_cast<std::uint64_t>(e.v));
    h = fnv1a(h, std::bit_cast<std::uint64_t>(e.w));
  }
  id_ = h;
}

std::span<const Neighbor> WeightedGraph::neighbors(VertexId v) const {
  const auto i = static_cast<std::size_t>(v);
  return {adjacency_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

std::span<const double> WeightedGraph::cumulative_weights(VertexId v) const {
  const auto i = static_cast<std::size_t>(v);
  return {cumulative_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

double WeightedGraph::weighted_degree(VertexId v) const {
  auto c = cumulative_weights(v);
  return c.empty() ? 0.0 : c.back();
}

std::vector<double> incidence_row(const WeightedGraph& g, EdgeId e) {
  std::vector<double> b(g.num_vertices(), 0.0);
  b[static_cast<std::size_t>(g.edge(e).u)] = 1.0;
  b[static_cast<std::size_t>(g.edge(e).v)] = -1.0;
  return b;
}

Matrix laplacian(std::size_t n, std::span<const Edge> edges) {
  Matrix l(n);
  for (const Edge& e : edges) {
    const auto u = static_cast<std::size_t>(e.u);
    const auto v = static_cast<std::size_t>(e.v);
    l(u, u) += e.w;
    l(v, v) += e.w;
    l(u, v) -= e.w;
    l(v, u) -= e.w;
  }
  return l;
}

Matrix laplacian(const WeightedGraph& g) { return laplacian(g.num_vertices(), g.edges()); }

std::size_t construction_edge_count(ConstructionKind kind, const ConstructionParams& p) {
  switch (kind) {
    case ConstructionKind::complete:
      return p.n * (p.n - 1) / 2;
    case ConstructionKind::ring:
      return p.n;
    case ConstructionKind::clique_star:
      return p.num_cliques * p.clique_size * (p.clique_size - 1) / 2;
    case ConstructionKind::erdos_renyi_connected:
      break;
  }
  throw InvalidParameter("erdos_renyi_connected has no closed-form edge count");
}

WeightedGraph build_construction(ConstructionKind kind, const ConstructionParams& p) {
  std::vector<Edge> edges;
  switch (kind) {
    case ConstructionKind::complete: {
      if (p.n < 2) throw InvalidParameter("complete: need n >= 2");
      edges.reserve(p.n * (p.n - 1) / 2);
      for (std::size_t i = 0; i < p.n; ++i)
        for (std::size_t j = i + 1; j < p.n; ++j)
          edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(j), 1.0});
      return WeightedGraph(p.n, std::move(edges));
    }
    case ConstructionKind::ring: {
      if (p.n < 3) throw InvalidParameter("ring: need n >= 3");
      for (std::size_t i = 0; i < p.n; ++i)
        edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>((i + 1) % p.n), 1.0});
      return WeightedGraph(p.n, std::move(edges));
    }
    case ConstructionKind::clique_star: {
      if (p.num_cliques < 1) throw InvalidParameter("clique_star: need at least one clique");
      if (p.clique_size < 3) throw InvalidParameter("clique_star: clique size must be >= 3");
      const std::size_t s = p.clique_size;
      const std::size_t n = p.num_cliques * (s - 1) + 1;
      edges.reserve(construction_edge_count(kind, p));
      std::vector<VertexId> members(s);
      for (std::size_t c = 0; c < p.num_cliques; ++c) {
        members[0] = 0;
        for (std::size_t k = 1; k < s; ++k) members[k] = static_cast<VertexId>(c * (s - 1) + k);
        for (std::size_t i = 0; i < s; ++i)
          for (std::size_t j = i + 1; j < s; ++j) edges.push_back({members[i], members[j], 1.0});
      }
      return WeightedGraph(n, std::move(edges));
    }
    case ConstructionKind::erdos_renyi_connected: {
      if (p.n < 2) throw InvalidParameter("erdos_renyi: need n >= 2");
      if (!(p.p > 0.0 && p.p <= 1.0)) throw InvalidParameter("erdos_renyi: need p in (0, 1]");
      constexpr int kMaxAttempts = 1000;
      for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        Philox4x32 rng(p.seed, static_cast<std::uint64_t>(attempt));
        edges.clear();
        DisjointSets ds(p.n);
        std::size_t merged = 0;
        for (std::size_t i = 0; i < p.n; ++i)
          for (std::size_t j = i + 1; j < p.n; ++j)
            if (rng.uniform() < p.p) {
              edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(j), 1.0});
              if (ds.unite(i, j)) ++merged;
            }
        if (merged + 1 == p.n) return WeightedGraph(p.n, std::move(edges));
      }
      throw InvalidParameter("erdos_renyi: no connected sample in 1000 attempts");
    }
  }
  throw InvalidParameter("unknown construction kind");
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::size_t parse_size(const std::string& s) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw InvalidParameter("bad integer '" + s + "' in graph spec");
  }
  if (pos != s.size() || v < 0) throw InvalidParameter("bad integer '" + s + "' in graph spec");
  return static_cast<std::size_t>(v);
}

double parse_real(const std::string& s) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw InvalidParameter("bad number '" + s + "' in graph spec");
  }
  if (pos != s.size()) throw InvalidParameter("bad number '" + s + "' in graph spec");
  return v;
}

}  // namespace

bool is_construction_spec(const std::string& source) {
  const auto colon = source.find(':');
  if (colon == std::string::npos) return false;
  const std::string kind = source.substr(0, colon);
  return kind == "k" || kind == "ring" || kind == "cliquestar" || kind == "er";
}

WeightedGraph graph_from_source(const std::string& source, std::uint64_t default_seed) {
  if (!is_construction_spec(source)) return read_graph_file(source);
  const auto colon = source.find(':');
  const std::string kind = source.substr(0, colon);
  const auto args = split(source.substr(colon + 1), ',');
  ConstructionParams p;
  if (kind == "k" || kind == "ring") {
    if (args.size() != 1) throw InvalidParameter("expected " + kind + ":n");
    p.n = parse_size(args[0]);
    return build_construction(kind == "k" ? ConstructionKind::complete : ConstructionKind::ring, p);
  }
  if (kind == "cliquestar") {
    if (args.size() != 2) throw InvalidParameter("expected cliquestar:L,s");
    p.num_cliques = parse_size(args[0]);
    p.clique_size = parse_size(args[1]);
    return build_construction(ConstructionKind::clique_star, p);
  }
  if (args.size() != 2 && args.size() != 3) throw InvalidParameter("expected er:n,p[,seed]");
  p.n = parse_size(args[0]);
  p.p = parse_real(args[1]);
  p.seed = args.size() == 3 ? parse_size(args[2]) : default_seed;
  return build_construction(ConstructionKind::erdos_renyi_connected, p);
}

void write_graph(std::ostream& out, const WeightedGraph& g) {
  out << g.num_vertices() << ' ' << g.num_edges() << '\n';
  char buf[64];
  for (const Edge& e : g.edges()) {
    std::snprintf(buf, sizeof buf, "%.17g", e.w);
    out << e.u << ' ' << e.v << ' ' << buf << '\n';
  }
}

WeightedGraph read_graph(std::istream& in) {
  long long n = 0;
  long long m = 0;
  if (!(in >> n >> m) || n < 0 || m < 0) throw IoError("graph file: malformed header, expected 'n m'");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    long long u = 0;
    long long v = 0;
    double w = 0;
    if (!(in >> u >> v >> w)) throw IoError("graph file: malformed edge line " + std::to_string(i + 2));
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw IoError("graph file: vertex id out of range on line " + std::to_string(i + 2));
    edges.push_back({static_cast<VertexId>(u), static_cast<VertexId>(v), w});
  }
  std::string trailing;
  if (in >> trailing) throw IoError("graph file: unexpected trailing content");
  return WeightedGraph(static_cast<std::size_t>(n), std::move(edges));
}

WeightedGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file '" + path + "'");
  return read_graph(in);
}

}  // namespace treespark
