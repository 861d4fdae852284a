#pragma once

// Empirical checks of the negative-dependence machinery behind the
// spanning-tree concentration bounds: shrinking marginals under
// conditioning, the exact Doob matrix martingale of one sampled tree, and
// exact binomial tails for the reverse Chernoff bound.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "treespark/graph.hpp"
#include "treespark/matrix.hpp"

namespace treespark {

// --- shrinking marginals -------------------------------------------------

struct ShrinkingMarginalsEntry {
  std::vector<EdgeId> conditioned;
  EdgeId target = -1;
  double conditional = 0.0;
  double unconditional = 0.0;
};

struct ShrinkingMarginalsReport {
  std::vector<ShrinkingMarginalsEntry> entries;
  std::size_t forests = 0;
  double worst_excess = 0.0;  // max(conditional - unconditional) over all entries
  std::size_t violations = 0;
  double tol = 0.0;
  bool passed = false;
};

inline constexpr std::size_t kMaxShrinkingEdges = 10;

// Every forest S (including the empty set) and every edge j outside S.
// Throws SizeGuard when m exceeds kMaxShrinkingEdges.
ShrinkingMarginalsReport shrinking_marginals_suite(const WeightedGraph& g, double tol = 1e-10);

// --- Doob martingale -----------------------------------------------------

// One exact martingale trace in the normalized frame. With A_e the
// normalized inverse-leverage edge matrix and gamma the tree's edges in
// random order, M_i = E[sum_{e in T} A_e | gamma_1..gamma_i] is computed
// exactly from contracted-graph leverage scores.
struct MartingaleTrace {
  std::size_t k = 0;                 // n - 1
  std::vector<EdgeId> ordering;      // gamma_1..gamma_k
  std::vector<Matrix> m;             // M_0..M_k
  std::vector<double> x_norms;       // ||M_i - M_{i-1}||
  std::vector<double> w_norms;       // ||W_i||, W_i = sum_{j<=i} E[X_j^2 | past]
  std::vector<double> step_variance; // lambda_max(E[X_i^2 | past])
  std::vector<double> step_mean;     // ||E[A_{gamma_i} | past]||
  std::vector<double> zero_mean_residual;  // ||E[X_i | past]||
  std::vector<double> w_increment_min;     // lambda_min(W_i - W_{i-1})
  double r = 0.0;                    // max_e ||A_e||
  double mu = 0.0;                   // ||E[sum xi_e A_e]||
  double m0_residual = 0.0;          // ||M_0 - Pi||
  double mk_residual = 0.0;          // ||M_k - normalized L_T||
};

inline constexpr std::size_t kMaxTraceVertices = 12;

// Samples a tree with Wilson (seed, stream 0) and a uniform ordering of its
// edges (seed, stream 1). Throws SizeGuard for n > kMaxTraceVertices.
MartingaleTrace martingale_trace(const WeightedGraph& g, std::uint64_t seed);

// Trace for a given ordering of a spanning tree's edges.
MartingaleTrace martingale_trace_for_ordering(const WeightedGraph& g, std::span<const EdgeId> ordering);

inline constexpr double kTraceTol = 1e-8;
inline constexpr double kQuadraticVariationTol = 1e-6;

// Bound for step i (1-based): 4 mu R / (k + 1 - i).
double step_variance_bound(const MartingaleTrace& t, std::size_t i);
// 10 mu R ln k.
double quadratic_variation_bound(const MartingaleTrace& t);

// lambda_max(E[X_i^2 | past]) <= 4 mu R/(k+1-i) and
// ||E[A_{gamma_i} | past]|| <= mu/(k+1-i), each within 1e-8.
bool check_step_variance_bound(const MartingaleTrace& t);

// ||W_k|| <= 10 mu R ln k + 1e-6 and W_i nondecreasing in PSD order.
bool check_quadratic_variation(const MartingaleTrace& t);

// M_0 = Pi and M_k = normalized L_T within 1e-9, zero conditional mean and
// ||X_i|| <= R within 1e-8.
bool check_trace_invariants(const MartingaleTrace& t);

// One line per step: "i ||X_i|| ||W_i|| bound_i", where bound_i is the
// accumulated per-step variance bound sum_{j<=i} 4 mu R / (k+1-j).
void write_trace_dump(std::ostream& out, const MartingaleTrace& t);

// --- concentration envelope ----------------------------------------------

// Empirical upper-tail frequencies of lambda_max(M_k - Pi) over sampled trees
// next to the two Freedman-type envelopes
//   n exp(-eps^2 mu / (R (ln k + eps)))  and  n exp(-3 eps^2 mu / ((60 ln k + 2 eps) R)).
// The fitted constant is the largest c for which n exp(-c eps^2/(ln k + eps))
// stays above the 99% upper confidence bound of every empirical frequency.
struct TailEnvelopeReport {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t samples = 0;
  std::vector<double> eps;
  std::vector<std::size_t> exceed_count;
  std::vector<double> empirical;
  std::vector<double> upper_confidence;
  std::vector<double> envelope_plain;
  std::vector<double> envelope_freedman;
  double fitted_constant = 0.0;
  double max_deviation = 0.0;
};

TailEnvelopeReport tail_envelope_report(const WeightedGraph& g, std::size_t samples, std::uint64_t base_seed,
                                        std::span<const double> eps_grid);

// --- symmetric matrix fact ---------------------------------------------

struct MatrixFactReport {
  std::size_t pairs = 0;
  std::size_t max_dim = 0;
  std::uint64_t seed = 0;
  std::size_t failures = 0;
  double worst_gap = 0.0;  // most negative witness gap seen
  bool passed = false;
};

inline constexpr double kMatrixFactGapTol = 1e-9;

// (A-B)^2 <= 2A^2 + 2B^2 on random symmetric pairs. Pair i has dimension
// 1 + (i mod max_dim) and entries uniform in [-1, 1] drawn from stream i.
MatrixFactReport matrix_fact_suite(std::size_t pairs, std::size_t max_dim, std::uint64_t seed);

// --- binomial tails --------------------------------------------------------

struct BinomialTailQuery {
  std::uint64_t k = 0;
  double p = 0.0;              // in (0, 1/2]
  std::uint64_t threshold = 0; // 0 <= threshold <= k
};

// Pr[Bin(k, p) >= threshold], summed in log space with compensation.
double binomial_tail(const BinomialTailQuery& q);
double log_binomial_tail(const BinomialTailQuery& q);

// log Pr[lo <= Bin(k, p) <= hi] for any p in (0, 1); -inf for an empty range.
double log_binomial_range(std::uint64_t k, double p, std::uint64_t lo, std::uint64_t hi);

// One-sided (1 - alpha) Clopper-Pearson upper bound for a success rate.
double binomial_upper_confidence(std::uint64_t successes, std::uint64_t trials, double alpha);

struct ReverseChernoffResult {
  std::uint64_t upper_threshold = 0;  // ceil((1+eps) p k)
  std::uint64_t lower_threshold = 0;  // floor((1-eps) p k)
  double log_upper_tail = 0.0;
  double log_lower_tail = 0.0;
  double log_bound = 0.0;             // -9 eps^2 p k
  bool upper_holds = false;
  bool lower_holds = false;
  bool holds() const { return upper_holds && lower_holds; }
};

// Both tails of Bin(k, p)/k against exp(-9 eps^2 p k). Throws
// InvalidParameter unless eps, p in (0, 1/2] and eps^2 p k >= 3.
ReverseChernoffResult reverse_chernoff(std::uint64_t k, double p, double eps);
bool reverse_chernoff_check(std::uint64_t k, double p, double eps);
bool reverse_chernoff_admissible(std::uint64_t k, double p, double eps);

struct ReverseChernoffGridReport {
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // grid points failing the hypotheses
  std::size_t failures = 0;
  double min_log_margin = 0.0;  // min over points and sides of log tail - log bound
};

// k in {10..5000}, p in {0.05..0.5}, eps in {0.1..0.5}, filtered by the
// hypotheses.
ReverseChernoffGridReport reverse_chernoff_default_grid();

// C(k, l) >= (1/(e sqrt(2 pi l))) (k/l)^l (k/(k-l))^(k-l), checked in log
// space. Throws InvalidParameter unless 1 <= l <= k-1.
bool check_stirling_binom_lower(std::uint64_t k, std::uint64_t l);

// log C(k, l): exact integer arithmetic for k <= 66, lgamma beyond.
long double log_binomial_coefficient(std::uint64_t k, std::uint64_t l);

}  // namespace treespark
