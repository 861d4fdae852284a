#include "treespark/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "treespark/error.hpp"
#include "treespark/leverage.hpp"
#include "treespark/spectral.hpp"
#include "treespark/srdiag.hpp"
#include "treespark/treesample.hpp"
#include "trial_loop.hpp"

namespace treespark {

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

void require_positive(std::size_t value, const char* what) {
  if (value == 0) throw InvalidParameter(std::string(what) + " must be positive");
}

// Average of t inverse-leverage trees drawn from streams 0..t-1 of one seed.
Matrix tree_average(const WeightedGraph& g, const LeverageProfile& lev, std::size_t t, std::uint64_t seed) {
  std::vector<SpanningTree> trees;
  trees.reserve(t);
  for (std::size_t i = 0; i < t; ++i) trees.push_back(reweight_tree(sample_tree_wilson(g, seed, i), lev));
  return average_trees(g, trees);
}

double quadratic_form(const WeightedGraph& g, std::span<const EdgeId> edges, std::span<const double> weights,
                      std::span<const double> x) {
  double s = 0.0;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Edge& e = g.edge(edges[k]);
    const double d = x[static_cast<std::size_t>(e.u)] - x[static_cast<std::size_t>(e.v)];
    s += weights[k] * d * d;
  }
  return s;
}

}  // namespace

std::size_t sum_trees_count(std::size_t n, double eps, double c_mult) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidParameter("eps must lie in (0, 1)");
  if (!(c_mult > 0.0)) throw InvalidParameter("c_mult must be positive");
  const double ln = std::log(static_cast<double>(n));
  const double t = std::ceil(c_mult * ln * ln / (eps * eps) - 1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(t));
}

SparsifierReport run_sum_trees(const WeightedGraph& g, const std::string& descriptor, const SumTreesParams& p) {
  require_positive(p.trials, "trials");
  SparsifierReport rep;
  rep.graph = descriptor;
  rep.n = g.num_vertices();
  rep.m = g.num_edges();
  rep.eps_target = p.eps;
  if (p.t > 0) {
    if (!(p.eps > 0.0 && p.eps < 1.0)) throw InvalidParameter("eps must lie in (0, 1)");
    rep.t = p.t;
  } else {
    rep.t = sum_trees_count(rep.n, p.eps, p.c_mult);
    rep.c_mult = p.c_mult;
  }
  rep.trials = p.trials;
  rep.gate = p.gate;

  const LeverageProfile lev = leverage_scores(g);
  const NormalizedFrame frame(laplacian(g));
  rep.per_trial.resize(p.trials);
  detail::for_each_trial(p.trials, [&](std::size_t j) {
    const std::uint64_t seed = p.base_seed + j;
    const PencilExtremes ex = frame.extremes(tree_average(g, lev, rep.t, seed));
    rep.per_trial[j] = {seed, ex.lambda_min_pos, ex.lambda_max, ex.within(p.eps)};
  });
  std::size_t ok = 0;
  for (const auto& tr : rep.per_trial) {
    rep.seeds.push_back(tr.seed);
    if (tr.within) ++ok;
  }
  rep.pass_fraction = static_cast<double>(ok) / static_cast<double>(p.trials);
  rep.passed = rep.pass_fraction >= p.gate;
  return rep;
}

TrendReport run_t_trend(const WeightedGraph& g, double eps, std::size_t t0, std::size_t trials,
                        std::uint64_t base_seed) {
  require_positive(t0, "t0");
  TrendReport rep;
  for (std::size_t t : {t0, 2 * t0, 4 * t0}) {
    SumTreesParams p;
    p.eps = eps;
    p.t = t;
    p.trials = trials;
    p.base_seed = base_seed;
    const auto r = run_sum_trees(g, "", p);
    double acc = 0.0;
    for (const auto& tr : r.per_trial)
      acc += std::max(std::abs(tr.lambda_min_pos - 1.0), std::abs(tr.lambda_max - 1.0));
    rep.t.push_back(t);
    rep.mean_deviation.push_back(acc / static_cast<double>(trials));
  }
  rep.decreasing = rep.mean_deviation.back() < rep.mean_deviation.front();
  return rep;
}

SingleTreeUpperReport run_single_tree_upper(const WeightedGraph& g, const std::string& descriptor,
                                            std::size_t trials, std::uint64_t base_seed) {
  require_positive(trials, "trials");
  SingleTreeUpperReport rep;
  rep.graph = descriptor;
  rep.n = g.num_vertices();
  rep.trials = trials;
  rep.base_seed = base_seed;
  rep.ln_n = std::log(static_cast<double>(rep.n));
  rep.log2_n = std::log2(static_cast<double>(rep.n));
  rep.envelope = 100.0 * rep.ln_n;

  const LeverageProfile lev = leverage_scores(g);
  const NormalizedFrame frame(laplacian(g));
  rep.lambda_max.resize(trials);
  rep.lambda_min_pos.resize(trials);
  detail::for_each_trial(trials, [&](std::size_t j) {
    const SpanningTree t = reweight_tree(sample_tree_wilson(g, base_seed + j), lev);
    const PencilExtremes ex = frame.extremes(tree_laplacian(g, t));
    rep.lambda_max[j] = ex.lambda_max;
    rep.lambda_min_pos[j] = ex.lambda_min_pos;
  });
  rep.max = *std::max_element(rep.lambda_max.begin(), rep.lambda_max.end());
  rep.median = median_of(rep.lambda_max);
  rep.empirical_constant = rep.max / rep.ln_n;
  rep.passed = rep.max <= rep.envelope;
  return rep;
}

ThinTreeReport run_unweighted_thin_tree(const WeightedGraph& g, const std::string& descriptor, std::size_t trials,
                                        std::uint64_t base_seed) {
  require_positive(trials, "trials");
  for (const Edge& e : g.edges())
    if (e.w != 1.0) throw InvalidParameter("thin tree experiment needs unit weights");
  ThinTreeReport rep;
  rep.graph = descriptor;
  rep.n = g.num_vertices();
  rep.trials = trials;
  rep.base_seed = base_seed;
  rep.max_leverage = leverage_scores(g).max();
  rep.envelope = 100.0 * rep.max_leverage * std::log(static_cast<double>(rep.n));

  const NormalizedFrame frame(laplacian(g));
  rep.lambda_max.resize(trials);
  detail::for_each_trial(trials, [&](std::size_t j) {
    const SpanningTree t = sample_tree_wilson(g, base_seed + j);
    rep.lambda_max[j] = frame.extremes(tree_laplacian(g, t)).lambda_max;
  });
  rep.max = *std::max_element(rep.lambda_max.begin(), rep.lambda_max.end());
  rep.passed = rep.max <= rep.envelope;
  return rep;
}

namespace {

struct DegreeCheck {
  std::size_t violating = 0;
  double max_dev = 0.0;
};

DegreeCheck weighted_degree_check(const WeightedGraph& g, std::span<const double> wdeg_h, double eps) {
  DegreeCheck c;
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    const double base = g.weighted_degree(static_cast<VertexId>(v));
    const double h = wdeg_h[v];
    if (h > (1.0 + eps) * base || h < (1.0 - eps) * base) ++c.violating;
    c.max_dev = std::max(c.max_dev, std::abs(h / base - 1.0));
  }
  return c;
}

void add_tree_degrees(const WeightedGraph& g, const SpanningTree& t, double scale, std::vector<double>& wdeg) {
  for (std::size_t k = 0; k < t.edges.size(); ++k) {
    const Edge& e = g.edge(t.edges[k]);
    wdeg[static_cast<std::size_t>(e.u)] += scale * t.weights[k];
    wdeg[static_cast<std::size_t>(e.v)] += scale * t.weights[k];
  }
}

}  // namespace

MultiTreeLowerReport run_multi_tree_lower(const MultiTreeLowerParams& p) {
  require_positive(p.trials, "trials");
  if (p.num_cliques < 1 || p.clique_size < 3) throw InvalidParameter("clique star needs L >= 1 and s >= 3");
  if (!(p.eps > 0.0 && p.eps < 1.0)) throw InvalidParameter("eps must lie in (0, 1)");
  const double s = static_cast<double>(p.clique_size);
  if (p.enforce_window && !(p.eps > 5.0 / s && p.eps < 0.5))
    throw InvalidParameter("eps outside the admissible window (5/s, 1/2)");

  ConstructionParams cp;
  cp.num_cliques = p.num_cliques;
  cp.clique_size = p.clique_size;
  const WeightedGraph g = build_construction(ConstructionKind::clique_star, cp);

  MultiTreeLowerReport rep;
  rep.num_cliques = p.num_cliques;
  rep.clique_size = p.clique_size;
  rep.n = g.num_vertices();
  rep.eps = p.eps;
  rep.degree_d = s - 1.0;
  rep.ln_n = std::log(static_cast<double>(rep.n));
  rep.log2_n = std::log2(static_cast<double>(rep.n));
  rep.t = p.t > 0 ? p.t
                  : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(0.05 * rep.ln_n / (p.eps * p.eps))));
  rep.gate = p.gate;
  rep.leverage_method =
      "per biconnected block: each clique together with the hub is one block, so its leverage is computed on the "
      "s-vertex clique alone";

  const LeverageProfile lev = leverage_scores(g);
  rep.per_trial.resize(p.trials);
  detail::for_each_trial(p.trials, [&](std::size_t j) {
    const std::uint64_t seed = p.base_seed + j;
    std::vector<double> wdeg(g.num_vertices(), 0.0);
    for (std::size_t i = 0; i < rep.t; ++i)
      add_tree_degrees(g, reweight_tree(sample_tree_wilson(g, seed, i), lev), 1.0 / static_cast<double>(rep.t), wdeg);
    const DegreeCheck c = weighted_degree_check(g, wdeg, p.eps);
    rep.per_trial[j] = {seed, c.violating, c.max_dev};
  });
  const auto hits = std::count_if(rep.per_trial.begin(), rep.per_trial.end(),
                                  [](const MultiTreeTrial& t) { return t.violating_vertices > 0; });
  rep.violation_fraction = static_cast<double>(hits) / static_cast<double>(p.trials);
  rep.passed = rep.violation_fraction >= p.gate;
  return rep;
}

double exact_single_tree_violation_probability(const WeightedGraph& g, double eps) {
  const TreeDistributionTable table = enumerate_trees(g);
  const LeverageProfile lev = leverage_scores(g);
  long double total = 0.0L;
  for (const auto& entry : table.trees) {
    std::vector<double> wdeg(g.num_vertices(), 0.0);
    add_tree_degrees(g, reweight_tree(tree_from_edges(g, entry.edges), lev), 1.0, wdeg);
    if (weighted_degree_check(g, wdeg, eps).violating > 0) total += entry.probability;
  }
  return static_cast<double>(total);
}

SingleTreeLowerReport run_single_tree_lower(std::size_t num_cliques, std::size_t clique_size, std::size_t trials,
                                            std::uint64_t base_seed, int degree_threshold) {
  require_positive(trials, "trials");
  if (degree_threshold < 2) throw InvalidParameter("degree threshold must be at least 2");
  ConstructionParams cp;
  cp.num_cliques = num_cliques;
  cp.clique_size = clique_size;
  const WeightedGraph g = build_construction(ConstructionKind::clique_star, cp);
  const LeverageProfile lev = leverage_scores(g);
  std::vector<EdgeId> all(g.num_edges());
  std::iota(all.begin(), all.end(), 0);
  std::vector<double> unit_w(g.num_edges());
  for (std::size_t e = 0; e < g.num_edges(); ++e) unit_w[e] = g.edge(static_cast<EdgeId>(e)).w;

  SingleTreeLowerReport rep;
  rep.num_cliques = num_cliques;
  rep.clique_size = clique_size;
  rep.n = g.num_vertices();
  rep.trials = trials;
  rep.ln_s = std::log(static_cast<double>(clique_size));
  rep.log2_s = std::log2(static_cast<double>(clique_size));
  rep.ratio_threshold = rep.ln_s / 2.0;
  rep.degree_threshold = degree_threshold;
  rep.per_trial.resize(trials);

  detail::for_each_trial(trials, [&](std::size_t j) {
    const std::uint64_t seed = base_seed + j;
    const SpanningTree t = reweight_tree(sample_tree_wilson(g, seed), lev);
    const auto deg = tree_degrees(g, t);
    VertexId best = 1;
    for (std::size_t v = 2; v < g.num_vertices(); ++v)
      if (deg[v] > deg[static_cast<std::size_t>(best)]) best = static_cast<VertexId>(v);
    const int d = deg[static_cast<std::size_t>(best)];
    // Star vector (d, -1, ..., -1)/sqrt(d^2 + d) on best and its tree neighbours.
    std::vector<double> x(g.num_vertices(), 0.0);
    const double norm = std::sqrt(static_cast<double>(d) * d + d);
    x[static_cast<std::size_t>(best)] = d / norm;
    for (EdgeId e : t.edges) {
      const Edge& ge = g.edge(e);
      if (ge.u == best) x[static_cast<std::size_t>(ge.v)] = -1.0 / norm;
      if (ge.v == best) x[static_cast<std::size_t>(ge.u)] = -1.0 / norm;
    }
    const double num = quadratic_form(g, t.edges, t.weights, x);
    const double den = quadratic_form(g, all, unit_w, x);
    rep.per_trial[j] = {seed, best, d, num / den};
  });

  std::size_t above = 0, tail_hits = 0;
  rep.all_certified = true;
  for (const auto& tr : rep.per_trial) {
    rep.max_degree = std::max(rep.max_degree, tr.degree);
    rep.max_certified_ratio = std::max(rep.max_certified_ratio, tr.certified_ratio);
    if (tr.certified_ratio >= rep.ratio_threshold) ++above;
    if (tr.degree >= degree_threshold) ++tail_hits;
    if (!(tr.certified_ratio > tr.degree / 2.0)) rep.all_certified = false;
  }
  rep.max_half_degree = rep.max_degree / 2.0;
  rep.fraction_above_threshold = static_cast<double>(above) / static_cast<double>(trials);
  rep.tail_observed = static_cast<double>(tail_hits) / static_cast<double>(trials);

  // Non-central degree in one clique is 1 + Bin(s-2, 1/s).
  const auto s = static_cast<std::uint64_t>(clique_size);
  const double p1 = std::exp(log_binomial_range(s - 2, 1.0 / static_cast<double>(s),
                                                static_cast<std::uint64_t>(degree_threshold - 1), s - 2));
  rep.tail_lower = p1;
  rep.tail_upper = std::min(1.0, static_cast<double>(num_cliques * (clique_size - 1)) * p1);
  const double level = std::log(0.01);
  const bool under_upper = rep.tail_upper >= 1.0 ||
                           (rep.tail_upper <= 0.0 ? tail_hits == 0
                                                  : log_binomial_range(trials, rep.tail_upper, tail_hits, trials) >= level);
  const bool over_lower = rep.tail_lower <= 0.0 || rep.tail_lower >= 1.0 ||
                          log_binomial_range(trials, rep.tail_lower, 0, tail_hits) >= level;
  rep.tail_consistent = under_upper && over_lower;
  return rep;
}

std::vector<double> prufer_degree_pmf(std::size_t n) {
  if (n < 3) throw InvalidParameter("degree law needs n >= 3");
  std::vector<double> pmf(n, 0.0);
  const double p = 1.0 / static_cast<double>(n);
  for (std::size_t d = 1; d < n; ++d)
    pmf[d] = std::exp(log_binomial_range(n - 2, p, d - 1, d - 1));
  return pmf;
}

DegreeHistogram run_degree_dist(std::size_t n, std::size_t samples, std::uint64_t base_seed) {
  require_positive(samples, "samples");
  DegreeHistogram h;
  h.n = n;
  h.samples = samples;
  h.base_seed = base_seed;
  h.reference = prufer_degree_pmf(n);
  ConstructionParams cp;
  cp.n = n;
  const WeightedGraph g = build_construction(ConstructionKind::complete, cp);
  std::vector<int> deg(samples);
  detail::for_each_trial(samples, [&](std::size_t j) {
    const SpanningTree t = sample_tree_wilson(g, base_seed + j);
    int d = 0;
    for (EdgeId e : t.edges)
      if (g.edge(e).u == 0) ++d;
    deg[j] = d;
  });
  h.counts.assign(n, 0);
  for (int d : deg) ++h.counts[static_cast<std::size_t>(d)];
  double tv = 0.0;
  for (std::size_t d = 0; d < n; ++d)
    tv += std::abs(static_cast<double>(h.counts[d]) / static_cast<double>(samples) - h.reference[d]);
  h.tv = 0.5 * tv;
  h.gate = 4.0 * std::sqrt(static_cast<double>(n - 1) / static_cast<double>(samples));
  h.passed = h.tv <= h.gate;
  return h;
}

std::vector<double> exhaustive_degree_pmf(std::size_t n) {
  if (n < 3) throw InvalidParameter("degree law needs n >= 3");
  ConstructionParams cp;
  cp.n = n;
  const WeightedGraph g = build_construction(ConstructionKind::complete, cp);
  const TreeDistributionTable table = enumerate_trees(g);
  std::vector<long double> pmf(n, 0.0L);
  for (const auto& t : table.trees) {
    std::size_t d = 0;
    for (EdgeId e : t.edges)
      if (g.edge(e).u == 0) ++d;
    pmf[d] += t.probability;
  }
  return {pmf.begin(), pmf.end()};
}

}  // namespace treespark
