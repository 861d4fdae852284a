#include "treespark/srdiag.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <utility>

#include "treespark/error.hpp"
#include "treespark/kernels.hpp"
#include "treespark/leverage.hpp"
#include "treespark/spectral.hpp"
#include "treespark/treesample.hpp"

namespace treespark {

namespace {

// Forest test by union-find, no path compression needed at these sizes.
bool is_forest(const WeightedGraph& g, std::span<const EdgeId> edges) {
  std::vector<std::size_t> parent(g.num_vertices());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x];
    return x;
  };
  for (EdgeId e : edges) {
    const auto a = find(static_cast<std::size_t>(g.edge(e).u));
    const auto b = find(static_cast<std::size_t>(g.edge(e).v));
    if (a == b) return false;
    parent[a] = b;
  }
  return true;
}

// Normalized edge vectors y_e with A_e = y_e y_e^T.
std::vector<std::vector<double>> normalized_edge_vectors(const WeightedGraph& g, const Matrix& root,
                                                         const LeverageProfile& lev) {
  const std::size_t n = g.num_vertices();
  std::vector<std::vector<double>> ys(g.num_edges(), std::vector<double>(n));
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(static_cast<EdgeId>(e));
    const double s = std::sqrt(ed.w / lev[static_cast<EdgeId>(e)]);
    for (std::size_t i = 0; i < n; ++i)
      ys[e][i] = s * (root(i, static_cast<std::size_t>(ed.u)) - root(i, static_cast<std::size_t>(ed.v)));
  }
  return ys;
}

void add_rank_one(Matrix& m, std::span<const double> y, double c) {
  const std::size_t n = m.size();
  // Upper triangle mirrored so the result stays exactly symmetric.
  for (std::size_t i = 0; i < n; ++i) {
    const double ci = c * y[i];
    for (std::size_t j = i; j < n; ++j) {
      const double v = ci * y[j];
      m(i, j) += v;
      if (j != i) m(j, i) += v;
    }
  }
}

Matrix weighted_sum(const std::vector<std::vector<double>>& ys, std::span<const double> q, std::size_t n) {
  Matrix m(n);
  for (std::size_t e = 0; e < ys.size(); ++e)
    if (q[e] != 0.0) add_rank_one(m, ys[e], q[e]);
  return m;
}

}  // namespace

ShrinkingMarginalsReport shrinking_marginals_suite(const WeightedGraph& g, double tol) {
  const std::size_t m = g.num_edges();
  if (m > kMaxShrinkingEdges)
    throw SizeGuard("shrinking marginals: m = " + std::to_string(m) + " exceeds " +
                    std::to_string(kMaxShrinkingEdges));
  const LeverageProfile lev = leverage_scores(g);
  ShrinkingMarginalsReport rep;
  rep.tol = tol;
  rep.worst_excess = -std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    std::vector<EdgeId> s;
    for (std::size_t e = 0; e < m; ++e)
      if (mask & (1u << e)) s.push_back(static_cast<EdgeId>(e));
    if (!is_forest(g, s)) continue;
    ++rep.forests;
    const auto q = conditional_marginals(g, ContractionState::of(g, s));
    for (std::size_t j = 0; j < m; ++j) {
      if (mask & (1u << j)) continue;
      ShrinkingMarginalsEntry entry{s, static_cast<EdgeId>(j), q[j], lev[static_cast<EdgeId>(j)]};
      const double excess = entry.conditional - entry.unconditional;
      rep.worst_excess = std::max(rep.worst_excess, excess);
      if (excess > tol) ++rep.violations;
      rep.entries.push_back(std::move(entry));
    }
  }
  rep.passed = rep.violations == 0;
  return rep;
}

MartingaleTrace martingale_trace_for_ordering(const WeightedGraph& g, std::span<const EdgeId> ordering) {
  const std::size_t n = g.num_vertices();
  if (n > kMaxTraceVertices)
    throw SizeGuard("martingale trace: n = " + std::to_string(n) + " exceeds " + std::to_string(kMaxTraceVertices));
  const SpanningTree tree = tree_from_edges(g, {ordering.begin(), ordering.end()});
  const LeverageProfile lev = leverage_scores(g);
  const NormalizedFrame frame(laplacian(g));
  const auto ys = normalized_edge_vectors(g, frame.pinv_sqrt(), lev);
  const std::size_t m = g.num_edges();

  MartingaleTrace t;
  t.k = n - 1;
  t.ordering.assign(ordering.begin(), ordering.end());
  for (const auto& y : ys) {
    double s = 0.0;
    for (double v : y) s += v * v;
    t.r = std::max(t.r, s);
  }
  t.mu = spectral_norm(weighted_sum(ys, lev.scores, n));

  ContractionState state(g);
  std::vector<double> q = lev.scores;
  t.m.push_back(weighted_sum(ys, q, n));
  t.m0_residual = spectral_norm(t.m[0] - centering_projection(n));
  Matrix w(n);

  for (std::size_t i = 1; i <= t.k; ++i) {
    const double remaining = static_cast<double>(t.k + 1 - i);
    const Matrix& prev = t.m.back();
    Matrix mean(n), second(n), expected_a(n);
    Matrix chosen_m;
    std::vector<double> chosen_q;
    const EdgeId pick = t.ordering[i - 1];
    for (std::size_t e = 0; e < m; ++e) {
      if (q[e] <= 0.0 || state.contains(static_cast<EdgeId>(e))) continue;
      const double p = q[e] / remaining;
      const ContractionState next = state.with(g, static_cast<EdgeId>(e));
      auto qn = conditional_marginals(g, next);
      Matrix me = weighted_sum(ys, qn, n);
      const Matrix x = me - prev;
      mean += p * x;
      second += p * kernels::serial::multiply(x, x);
      add_rank_one(expected_a, ys[e], p);
      if (static_cast<EdgeId>(e) == pick) {
        chosen_m = std::move(me);
        chosen_q = std::move(qn);
      }
    }
    if (chosen_q.empty()) throw ContractViolation("martingale trace: ordering picks a probability-zero edge");
    t.x_norms.push_back(spectral_norm(chosen_m - prev));
    t.zero_mean_residual.push_back(spectral_norm(mean));
    const auto ev = eigvals_sym(second);
    t.step_variance.push_back(ev.back());
    t.w_increment_min.push_back(ev.front());
    t.step_mean.push_back(spectral_norm(expected_a));
    w += second;
    t.w_norms.push_back(spectral_norm(w));
    state = state.with(g, pick);
    q = std::move(chosen_q);
    t.m.push_back(std::move(chosen_m));
  }

  const SpanningTree reweighted = reweight_tree(tree, lev);
  t.mk_residual = spectral_norm(t.m.back() - frame.apply(tree_laplacian(g, reweighted)));
  return t;
}

MartingaleTrace martingale_trace(const WeightedGraph& g, std::uint64_t seed) {
  if (g.num_vertices() > kMaxTraceVertices)
    throw SizeGuard("martingale trace: n = " + std::to_string(g.num_vertices()) + " exceeds " +
                    std::to_string(kMaxTraceVertices));
  const SpanningTree tree = sample_tree_wilson(g, seed, 0);
  std::vector<EdgeId> order = tree.edges;
  Philox4x32 rng(seed, 1);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  return martingale_trace_for_ordering(g, order);
}

double step_variance_bound(const MartingaleTrace& t, std::size_t i) {
  return 4.0 * t.mu * t.r / static_cast<double>(t.k + 1 - i);
}

double quadratic_variation_bound(const MartingaleTrace& t) {
  return 10.0 * t.mu * t.r * std::log(static_cast<double>(t.k));
}

bool check_step_variance_bound(const MartingaleTrace& t) {
  for (std::size_t i = 1; i <= t.k; ++i) {
    if (t.step_variance[i - 1] > step_variance_bound(t, i) + kTraceTol) return false;
    if (t.step_mean[i - 1] > t.mu / static_cast<double>(t.k + 1 - i) + kTraceTol) return false;
  }
  return true;
}

bool check_quadratic_variation(const MartingaleTrace& t) {
  for (std::size_t i = 0; i < t.k; ++i)
    if (t.w_increment_min[i] < -kTraceTol) return false;
  const double wk = t.w_norms.empty() ? 0.0 : t.w_norms.back();
  return wk <= quadratic_variation_bound(t) + kQuadraticVariationTol;
}

bool check_trace_invariants(const MartingaleTrace& t) {
  if (t.m0_residual > 1e-9 || t.mk_residual > 1e-9) return false;
  for (std::size_t i = 0; i < t.k; ++i) {
    if (t.zero_mean_residual[i] > kTraceTol) return false;
    if (t.x_norms[i] > t.r + kTraceTol) return false;
  }
  return true;
}

void write_trace_dump(std::ostream& out, const MartingaleTrace& t) {
  double bound = 0.0;
  char buf[160];
  for (std::size_t i = 1; i <= t.k; ++i) {
    bound += step_variance_bound(t, i);
    std::snprintf(buf, sizeof buf, "%zu %.12g %.12g %.12g\n", i, t.x_norms[i - 1], t.w_norms[i - 1], bound);
    out << buf;
  }
}

TailEnvelopeReport tail_envelope_report(const WeightedGraph& g, std::size_t samples, std::uint64_t base_seed,
                                        std::span<const double> eps_grid) {
  if (samples == 0) throw InvalidParameter("tail envelope: samples must be positive");
  const std::size_t n = g.num_vertices();
  const LeverageProfile lev = leverage_scores(g);
  const NormalizedFrame frame(laplacian(g));
  const Matrix pi = centering_projection(n);

  std::vector<double> dev(samples);
#pragma omp parallel for schedule(dynamic) num_threads(kernels::max_threads())
  for (std::size_t s = 0; s < samples; ++s) {
    const SpanningTree tree = reweight_tree(sample_tree_wilson(g, base_seed + s, 0), lev);
    dev[s] = eigvals_sym(frame.apply(tree_laplacian(g, tree)) - pi).back();
  }

  TailEnvelopeReport rep;
  rep.n = n;
  rep.k = n - 1;
  rep.samples = samples;
  rep.max_deviation = *std::max_element(dev.begin(), dev.end());
  rep.fitted_constant = std::numeric_limits<double>::infinity();
  const double logk = std::log(static_cast<double>(rep.k));
  // mu = R = 1 in the normalized frame.
  for (double eps : eps_grid) {
    const auto cnt = static_cast<std::size_t>(std::count_if(dev.begin(), dev.end(), [&](double d) { return d >= eps; }));
    const double uc = binomial_upper_confidence(cnt, samples, 0.01);
    rep.eps.push_back(eps);
    rep.exceed_count.push_back(cnt);
    rep.empirical.push_back(static_cast<double>(cnt) / static_cast<double>(samples));
    rep.upper_confidence.push_back(uc);
    rep.envelope_plain.push_back(static_cast<double>(n) * std::exp(-eps * eps / (logk + eps)));
    rep.envelope_freedman.push_back(static_cast<double>(n) * std::exp(-3.0 * eps * eps / (60.0 * logk + 2.0 * eps)));
    rep.fitted_constant = std::min(rep.fitted_constant, -std::log(uc / static_cast<double>(n)) * (logk + eps) / (eps * eps));
  }
  return rep;
}

MatrixFactReport matrix_fact_suite(std::size_t pairs, std::size_t max_dim, std::uint64_t seed) {
  if (pairs == 0 || max_dim == 0) throw InvalidParameter("matrix fact: pairs and max_dim must be positive");
  MatrixFactReport rep;
  rep.pairs = pairs;
  rep.max_dim = max_dim;
  rep.seed = seed;
  rep.worst_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pairs; ++i) {
    const std::size_t d = 1 + i % max_dim;
    Philox4x32 rng(seed, i);
    Matrix a(d), b(d);
    for (Matrix* x : {&a, &b})
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = r; c < d; ++c) (*x)(r, c) = (*x)(c, r) = 2.0 * rng.uniform() - 1.0;
    const PsdOrderVerdict v = symmetric_triangle_verdict(a, b);
    rep.worst_gap = std::min(rep.worst_gap, v.witness_gap);
    if (v.witness_gap < -kMatrixFactGapTol) ++rep.failures;
  }
  rep.passed = rep.failures == 0;
  return rep;
}

long double log_binomial_coefficient(std::uint64_t k, std::uint64_t l) {
  if (l > k) throw InvalidParameter("log_binomial_coefficient: l > k");
  if (k <= 66) {
    const std::uint64_t r = std::min(l, k - l);
    __extension__ using Wide = unsigned __int128;
    Wide c = 1;
    for (std::uint64_t i = 0; i < r; ++i) c = c * (k - i) / (i + 1);
    return std::log(static_cast<long double>(c));
  }
  return std::lgamma(static_cast<long double>(k) + 1.0L) - std::lgamma(static_cast<long double>(l) + 1.0L) -
         std::lgamma(static_cast<long double>(k - l) + 1.0L);
}

double log_binomial_range(std::uint64_t k, double p, std::uint64_t lo, std::uint64_t hi) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("binomial: p must lie in (0, 1)");
  constexpr long double kNegInf = -std::numeric_limits<long double>::infinity();
  hi = std::min(hi, k);
  if (lo > hi) return static_cast<double>(kNegInf);
  const long double lp = std::log(static_cast<long double>(p));
  const long double lq = std::log1p(-static_cast<long double>(p));
  std::vector<long double> terms;
  terms.reserve(hi - lo + 1);
  long double top = kNegInf;
  for (std::uint64_t i = lo; i <= hi; ++i) {
    const long double t = log_binomial_coefficient(k, i) + static_cast<long double>(i) * lp +
                          static_cast<long double>(k - i) * lq;
    terms.push_back(t);
    top = std::max(top, t);
  }
  // Neumaier-compensated sum of exp(t - top).
  long double sum = 0.0L, comp = 0.0L;
  for (long double t : terms) {
    const long double x = std::exp(t - top);
    const long double s = sum + x;
    comp += std::fabs(sum) >= std::fabs(x) ? (sum - s) + x : (x - s) + sum;
    sum = s;
  }
  return static_cast<double>(top + std::log(sum + comp));
}

namespace {

void validate(const BinomialTailQuery& q) {
  if (!(q.p > 0.0 && q.p <= 0.5)) throw InvalidParameter("binomial tail: p must lie in (0, 1/2]");
  if (q.threshold > q.k) throw InvalidParameter("binomial tail: threshold exceeds k");
}

}  // namespace

double log_binomial_tail(const BinomialTailQuery& q) {
  validate(q);
  return log_binomial_range(q.k, q.p, q.threshold, q.k);
}

double binomial_tail(const BinomialTailQuery& q) { return std::exp(log_binomial_tail(q)); }

double binomial_upper_confidence(std::uint64_t successes, std::uint64_t trials, double alpha) {
  if (trials == 0 || successes > trials) throw InvalidParameter("confidence bound: need successes <= trials, trials > 0");
  if (successes == trials) return 1.0;
  const double target = std::log(alpha);
  double lo = 0.0, hi = 1.0;
  // Pr[Bin(N, p) <= x] decreases in p.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= 0.0 || mid >= 1.0) break;
    if (log_binomial_range(trials, mid, 0, successes) > target)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

bool reverse_chernoff_admissible(std::uint64_t k, double p, double eps) {
  return eps > 0.0 && eps <= 0.5 && p > 0.0 && p <= 0.5 && k > 0 &&
         eps * eps * p * static_cast<double>(k) >= 3.0 - 1e-9;
}

ReverseChernoffResult reverse_chernoff(std::uint64_t k, double p, double eps) {
  if (!reverse_chernoff_admissible(k, p, eps))
    throw InvalidParameter("reverse Chernoff: need eps, p in (0, 1/2] and eps^2 p k >= 3");
  const double pk = p * static_cast<double>(k);
  ReverseChernoffResult r;
  r.upper_threshold = static_cast<std::uint64_t>(std::ceil((1.0 + eps) * pk - 1e-9));
  r.lower_threshold = static_cast<std::uint64_t>(std::floor((1.0 - eps) * pk + 1e-9));
  r.log_bound = -9.0 * eps * eps * pk;
  r.log_upper_tail = log_binomial_range(k, p, r.upper_threshold, k);
  r.log_lower_tail = log_binomial_range(k, p, 0, r.lower_threshold);
  r.upper_holds = r.log_upper_tail >= r.log_bound;
  r.lower_holds = r.log_lower_tail >= r.log_bound;
  return r;
}

bool reverse_chernoff_check(std::uint64_t k, double p, double eps) { return reverse_chernoff(k, p, eps).holds(); }

ReverseChernoffGridReport reverse_chernoff_default_grid() {
  static constexpr std::uint64_t ks[] = {10, 20, 50, 100, 200, 500, 1000, 2000, 5000};
  static constexpr double ps[] = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};
  static constexpr double es[] = {0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};
  ReverseChernoffGridReport rep;
  rep.min_log_margin = std::numeric_limits<double>::infinity();
  for (auto k : ks)
    for (double p : ps)
      for (double e : es) {
        if (!reverse_chernoff_admissible(k, p, e)) {
          ++rep.skipped;
          continue;
        }
        const auto r = reverse_chernoff(k, p, e);
        ++rep.evaluated;
        if (!r.holds()) ++rep.failures;
        rep.min_log_margin =
            std::min({rep.min_log_margin, r.log_upper_tail - r.log_bound, r.log_lower_tail - r.log_bound});
      }
  return rep;
}

bool check_stirling_binom_lower(std::uint64_t k, std::uint64_t l) {
  if (l < 1 || l + 1 > k) throw InvalidParameter("Stirling bound: need 1 <= l <= k-1");
  const auto kd = static_cast<long double>(k);
  const auto ld = static_cast<long double>(l);
  const long double rhs = -1.0L - 0.5L * std::log(2.0L * std::numbers::pi_v<long double> * ld) +
                          ld * std::log(kd / ld) + (kd - ld) * std::log(kd / (kd - ld));
  return log_binomial_coefficient(k, l) >= rhs;
}

}  // namespace treespark
