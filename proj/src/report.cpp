#include "treespark/report.hpp"

#include <cstdio>
#include <ostream>

namespace treespark {

using nlohmann::json;

namespace {

json extremes_rows(const std::vector<TrialExtremes>& rows) {
  json a = json::array();
  for (const auto& t : rows)
    a.push_back({{"seed", t.seed}, {"lambda_min_pos", t.lambda_min_pos}, {"lambda_max", t.lambda_max},
                 {"within", t.within}});
  return a;
}

}  // namespace

json to_json(const SparsifierReport& r) {
  return {{"kind", "sum_trees"},
          {"graph", r.graph},
          {"n", r.n},
          {"m", r.m},
          {"t", r.t},
          {"eps_target", r.eps_target},
          {"c_mult", r.c_mult},
          {"trials", r.trials},
          {"seeds", r.seeds},
          {"per_trial", extremes_rows(r.per_trial)},
          {"pass_fraction", r.pass_fraction},
          {"gate", r.gate},
          {"gate_rule", "pass_fraction >= gate, a trial passes when both extremes lie in [1-eps, 1+eps]"},
          {"passed", r.passed}};
}

json to_json(const TrendReport& r) {
  return {{"kind", "t_trend"}, {"t", r.t}, {"mean_deviation", r.mean_deviation}, {"decreasing", r.decreasing}};
}

json to_json(const SingleTreeUpperReport& r) {
  return {{"kind", "single_tree_upper"},
          {"graph", r.graph},
          {"n", r.n},
          {"trials", r.trials},
          {"base_seed", r.base_seed},
          {"lambda_max", r.lambda_max},
          {"lambda_min_pos", r.lambda_min_pos},
          {"max", r.max},
          {"median", r.median},
          {"envelope", r.envelope},
          {"envelope_rule", "max <= 100 ln n"},
          {"empirical_constant", r.empirical_constant},
          {"ln_n", r.ln_n},
          {"log2_n", r.log2_n},
          {"passed", r.passed}};
}

json to_json(const ThinTreeReport& r) {
  return {{"kind", "unweighted_thin_tree"},
          {"graph", r.graph},
          {"n", r.n},
          {"trials", r.trials},
          {"base_seed", r.base_seed},
          {"lambda_max", r.lambda_max},
          {"max", r.max},
          {"max_leverage", r.max_leverage},
          {"envelope", r.envelope},
          {"envelope_rule", "max <= 100 * max leverage * ln n"},
          {"passed", r.passed}};
}

json to_json(const MultiTreeLowerReport& r) {
  json trials = json::array();
  for (const auto& t : r.per_trial)
    trials.push_back({{"seed", t.seed},
                      {"violating_vertices", t.violating_vertices},
                      {"max_relative_deviation", t.max_relative_deviation}});
  return {{"kind", "multi_tree_lower"},
          {"num_cliques", r.num_cliques},
          {"clique_size", r.clique_size},
          {"n", r.n},
          {"t", r.t},
          {"eps", r.eps},
          {"degree_d", r.degree_d},
          {"degree_d_reading", "d = s - 1, the degree of a non-central vertex"},
          {"ln_n", r.ln_n},
          {"log2_n", r.log2_n},
          {"per_trial", trials},
          {"violation_fraction", r.violation_fraction},
          {"gate", r.gate},
          {"passed", r.passed},
          {"leverage_method", r.leverage_method}};
}

json to_json(const SingleTreeLowerReport& r) {
  json trials = json::array();
  for (const auto& t : r.per_trial)
    trials.push_back(
        {{"seed", t.seed}, {"vertex", t.vertex}, {"degree", t.degree}, {"certified_ratio", t.certified_ratio}});
  return {{"kind", "single_tree_lower"},
          {"num_cliques", r.num_cliques},
          {"clique_size", r.clique_size},
          {"n", r.n},
          {"trials", r.trials},
          {"per_trial", trials},
          {"max_degree", r.max_degree},
          {"max_half_degree", r.max_half_degree},
          {"max_certified_ratio", r.max_certified_ratio},
          {"ratio_threshold", r.ratio_threshold},
          {"fraction_above_threshold", r.fraction_above_threshold},
          {"all_certified", r.all_certified},
          {"degree_threshold", r.degree_threshold},
          {"tail_observed", r.tail_observed},
          {"tail_lower", r.tail_lower},
          {"tail_upper", r.tail_upper},
          {"tail_consistent", r.tail_consistent},
          {"ln_s", r.ln_s},
          {"log2_s", r.log2_s}};
}

json to_json(const DegreeHistogram& r) {
  return {{"kind", "degree_dist"},
          {"n", r.n},
          {"samples", r.samples},
          {"base_seed", r.base_seed},
          {"counts", r.counts},
          {"reference", r.reference},
          {"tv", r.tv},
          {"gate", r.gate},
          {"gate_rule", "tv <= 4 sqrt((n-1)/samples)"},
          {"passed", r.passed}};
}

json to_json(const ShrinkingMarginalsReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"conditioned", e.conditioned},
                       {"target", e.target},
                       {"conditional", e.conditional},
                       {"unconditional", e.unconditional}});
  return {{"kind", "shrinking_marginals"}, {"forests", r.forests},   {"pairs", r.entries.size()},
          {"violations", r.violations},    {"worst_excess", r.worst_excess}, {"tol", r.tol},
          {"passed", r.passed},            {"entries", entries}};
}

json to_json(const ReverseChernoffGridReport& r) {
  return {{"kind", "reverse_chernoff"},   {"evaluated", r.evaluated},
          {"skipped", r.skipped},         {"failures", r.failures},
          {"min_log_margin", r.min_log_margin}, {"passed", r.failures == 0 && r.evaluated > 0}};
}

json to_json(const TailEnvelopeReport& r) {
  return {{"kind", "tail_envelope"},
          {"n", r.n},
          {"k", r.k},
          {"samples", r.samples},
          {"eps", r.eps},
          {"exceed_count", r.exceed_count},
          {"empirical", r.empirical},
          {"upper_confidence_99", r.upper_confidence},
          {"envelope_plain", r.envelope_plain},
          {"envelope_freedman", r.envelope_freedman},
          {"fitted_constant", r.fitted_constant},
          {"max_deviation", r.max_deviation}};
}

json to_json(const MatrixFactReport& r) {
  return {{"kind", "matrix_fact"},     {"pairs", r.pairs},         {"max_dim", r.max_dim},
          {"seed", r.seed},            {"failures", r.failures},   {"worst_gap", r.worst_gap},
          {"gap_tol", kMatrixFactGapTol}, {"passed", r.passed}};
}

json trace_summary(const MartingaleTrace& t) {
  return {{"kind", "martingale_trace"},
          {"k", t.k},
          {"ordering", t.ordering},
          {"R", t.r},
          {"mu", t.mu},
          {"m0_residual", t.m0_residual},
          {"mk_residual", t.mk_residual},
          {"x_norms", t.x_norms},
          {"w_norms", t.w_norms},
          {"step_variance", t.step_variance},
          {"step_mean", t.step_mean},
          {"zero_mean_residual", t.zero_mean_residual},
          {"quadratic_variation_bound", quadratic_variation_bound(t)},
          {"invariants", check_trace_invariants(t)},
          {"step_variance_bound", check_step_variance_bound(t)},
          {"quadratic_variation", check_quadratic_variation(t)}};
}

void write_extremes_csv(std::ostream& out, const SparsifierReport& r) {
  out << "trial,seed,lambda_min_pos,lambda_max,within\n";
  char buf[160];
  for (std::size_t i = 0; i < r.per_trial.size(); ++i) {
    const auto& t = r.per_trial[i];
    std::snprintf(buf, sizeof buf, "%zu,%llu,%.17g,%.17g,%d\n", i, static_cast<unsigned long long>(t.seed),
                  t.lambda_min_pos, t.lambda_max, t.within ? 1 : 0);
    out << buf;
  }
}

}  // namespace treespark
