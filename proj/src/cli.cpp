#include "treespark/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "treespark/error.hpp"
#include "treespark/experiments.hpp"
#include "treespark/kernels.hpp"
#include "treespark/report.hpp"
#include "treespark/srdiag.hpp"
#include "treespark/treesample.hpp"
#include "treespark/version.hpp"

namespace treespark {

using nlohmann::json;

json to_json(const RunConfig& c) {
  return {{"command", c.command},
          {"graph", c.graph},
          {"seed", c.seed},
          {"count", c.count},
          {"trials", c.trials},
          {"seeds", c.seeds},
          {"eps", c.eps},
          {"t", c.t},
          {"c_mult", c.c_mult},
          {"gate", c.gate},
          {"num_cliques", c.num_cliques},
          {"clique_size", c.clique_size},
          {"n", c.n},
          {"samples", c.samples},
          {"k", c.k},
          {"p", c.p},
          {"grid", c.grid},
          {"weights", c.weights},
          {"enforce_window", c.enforce_window},
          {"degree_threshold", c.degree_threshold},
          {"pairs", c.pairs},
          {"dim", c.dim},
          {"kmax", c.kmax},
          {"out", c.out},
          {"csv", c.csv},
          {"dump", c.dump},
          {"json", c.json_only},
          {"jobs", c.jobs}};
}

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t default_seed() {
  const char* env = std::getenv("TREESPARK_SEED");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0') throw InvalidParameter("TREESPARK_SEED is not an unsigned integer");
  return v;
}

class Runner {
 public:
  Runner(RunConfig& cfg, std::ostream& out, std::ostream& err) : cfg_(cfg), out_(out), err_(err) {}

  void status(const std::string& line) const {
    if (!cfg_.json_only) err_ << line << '\n';
  }

  // Writes text to --out when given, else to the output stream.
  void emit(const std::string& text) const {
    if (cfg_.out.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(cfg_.out, std::ios::binary);
    if (!f) throw IoError("cannot open output file: " + cfg_.out);
    f << text;
    if (!f) throw IoError("write failed: " + cfg_.out);
  }

  void emit_report(const json& report, Clock::time_point start) const {
    const json envelope = {
        {"schema_version", kReportSchemaVersion},
        {"version", kVersion},
        {"config", to_json(cfg_)},
        {"wall_clock_seconds", std::chrono::duration<double>(Clock::now() - start).count()},
        {"report", report}};
    emit(envelope.dump(2) + "\n");
  }

  void write_side_file(const std::string& path, const std::string& text) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open output file: " + path);
    f << text;
  }

  WeightedGraph graph() const {
    if (cfg_.graph.empty()) throw InvalidParameter("--graph is required");
    return graph_from_source(cfg_.graph, cfg_.seed);
  }

  int verdict(bool passed, const std::string& what) const {
    status(cfg_.command + ": " + what + (passed ? " PASS" : " FAIL"));
    return passed ? kExitPass : kExitGateFail;
  }

  int sample() {
    const auto start = Clock::now();
    const WeightedGraph g = graph();
    if (cfg_.count == 0) throw InvalidParameter("--count must be positive");
    const bool reweight = cfg_.weights == "inverse-leverage";
    if (!reweight && cfg_.weights != "original") throw InvalidParameter("--weights must be original or inverse-leverage");
    LeverageProfile lev;
    if (reweight) lev = leverage_scores(g);
    std::vector<std::string> lines;
    for (std::size_t i = 0; i < cfg_.count; ++i) {
      SpanningTree t = sample_tree_wilson(g, cfg_.seed, i);
      if (reweight) t = reweight_tree(t, lev);
      lines.push_back(format_tree_line(t));
    }
    if (cfg_.json_only) {
      emit_report({{"kind", "sample"}, {"graph_id", g.id()}, {"trees", lines}}, start);
    } else {
      std::string text;
      for (const auto& l : lines) text += l + "\n";
      emit(text);
    }
    return kExitPass;
  }

  int certify() {
    const auto start = Clock::now();
    if (cfg_.t > 0 && cfg_.c_mult > 0.0) throw InvalidParameter("give either --t or --cmult, not both");
    if (cfg_.t == 0 && cfg_.c_mult <= 0.0) throw InvalidParameter("one of --t or --cmult is required");
    const WeightedGraph g = graph();
    SumTreesParams p;
    p.eps = cfg_.eps;
    p.t = cfg_.t;
    p.c_mult = cfg_.c_mult > 0.0 ? cfg_.c_mult : 1.0;
    p.trials = cfg_.trials;
    p.base_seed = cfg_.seed;
    p.gate = cfg_.gate > 0.0 ? cfg_.gate : 0.9;
    const SparsifierReport r = run_sum_trees(g, cfg_.graph, p);
    emit_report(to_json(r), start);
    if (!cfg_.csv.empty()) {
      std::ostringstream s;
      write_extremes_csv(s, r);
      write_side_file(cfg_.csv, s.str());
    }
    return verdict(r.passed, "pass_fraction " + std::to_string(r.pass_fraction) + " with t = " + std::to_string(r.t) +
                                 " (gate pass_fraction >= " + std::to_string(r.gate) + ")");
  }

  int graph_cmd() {
    const WeightedGraph g = graph();
    std::ostringstream s;
    write_graph(s, g);
    emit(s.str());
    status("graph: n = " + std::to_string(g.num_vertices()) + ", m = " + std::to_string(g.num_edges()));
    return kExitPass;
  }

  int diag_marginals() {
    const auto start = Clock::now();
    const auto r = shrinking_marginals_suite(graph());
    emit_report(to_json(r), start);
    return verdict(r.passed, std::to_string(r.violations) + " violations over " + std::to_string(r.entries.size()) +
                                 " pairs");
  }

  int diag_martingale() {
    const auto start = Clock::now();
    const WeightedGraph g = graph();
    if (cfg_.seeds == 0) throw InvalidParameter("--seeds must be positive");
    if (g.num_vertices() > kMaxTraceVertices)
      throw SizeGuard("martingale trace: n = " + std::to_string(g.num_vertices()) + " exceeds " +
                      std::to_string(kMaxTraceVertices));
    std::vector<MartingaleTrace> traces(cfg_.seeds);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(kernels::max_threads())
    for (std::size_t i = 0; i < cfg_.seeds; ++i) {
      try {
        traces[i] = martingale_trace(g, cfg_.seed + i);
      } catch (...) {
#pragma omp critical(treespark_cli_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);

    json per = json::array();
    bool all = true;
    double max_x = 0.0, max_w = 0.0, max_resid = 0.0;
    std::ostringstream dump;
    for (std::size_t i = 0; i < traces.size(); ++i) {
      const auto& t = traces[i];
      const bool ok = check_trace_invariants(t) && check_step_variance_bound(t) && check_quadratic_variation(t);
      all = all && ok;
      for (double x : t.x_norms) max_x = std::max(max_x, x);
      for (double z : t.zero_mean_residual) max_resid = std::max(max_resid, z);
      if (!t.w_norms.empty()) max_w = std::max(max_w, t.w_norms.back());
      json s = trace_summary(t);
      s["seed"] = cfg_.seed + i;
      s["passed"] = ok;
      per.push_back(std::move(s));
      dump << "# seed " << cfg_.seed + i << "\n";
      write_trace_dump(dump, t);
    }
    if (!cfg_.dump.empty()) write_side_file(cfg_.dump, dump.str());
    emit_report({{"kind", "martingale"},
                 {"traces", traces.size()},
                 {"max_x_norm", max_x},
                 {"max_zero_mean_residual", max_resid},
                 {"max_w_norm", max_w},
                 {"quadratic_variation_bound", traces.empty() ? 0.0 : quadratic_variation_bound(traces.front())},
                 {"passed", all},
                 {"per_trace", per}},
                start);
    return verdict(all, std::to_string(traces.size()) + " traces, max ||W_k|| " + std::to_string(max_w));
  }

  int diag_reverse_chernoff() {
    const auto start = Clock::now();
    if (cfg_.k > 0) {
      const auto r = reverse_chernoff(cfg_.k, cfg_.p, cfg_.eps);
      emit_report({{"kind", "reverse_chernoff_point"},
                   {"k", cfg_.k},
                   {"p", cfg_.p},
                   {"eps", cfg_.eps},
                   {"upper_threshold", r.upper_threshold},
                   {"lower_threshold", r.lower_threshold},
                   {"log_upper_tail", r.log_upper_tail},
                   {"log_lower_tail", r.log_lower_tail},
                   {"log_bound", r.log_bound},
                   {"passed", r.holds()}},
                  start);
      return verdict(r.holds(), "both tails against exp(-9 eps^2 p k)");
    }
    if (cfg_.grid != "default") throw InvalidParameter("--grid accepts only 'default' (or give --k, --p, --eps)");
    const auto r = reverse_chernoff_default_grid();
    emit_report(to_json(r), start);
    return verdict(r.failures == 0 && r.evaluated > 0,
                   std::to_string(r.evaluated) + " admissible points, " + std::to_string(r.failures) + " failures");
  }

  int diag_stirling() {
    const auto start = Clock::now();
    const std::uint64_t kmax = cfg_.kmax > 0 ? cfg_.kmax : 60;
    std::size_t checked = 0, failures = 0;
    for (std::uint64_t k = 2; k <= kmax; ++k)
      for (std::uint64_t l = 1; l < k; ++l) {
        ++checked;
        if (!check_stirling_binom_lower(k, l)) ++failures;
      }
    emit_report({{"kind", "stirling"}, {"kmax", kmax}, {"checked", checked}, {"failures", failures},
                 {"passed", failures == 0}},
                start);
    return verdict(failures == 0, std::to_string(checked) + " pairs checked");
  }

  int diag_matrix_fact() {
    const auto start = Clock::now();
    const auto r = matrix_fact_suite(cfg_.pairs > 0 ? cfg_.pairs : 1000, cfg_.dim > 0 ? cfg_.dim : 16, cfg_.seed);
    emit_report(to_json(r), start);
    return verdict(r.passed, "worst witness gap " + std::to_string(r.worst_gap));
  }

  int diag_tail_envelope() {
    const auto start = Clock::now();
    const WeightedGraph g = graph();
    const std::vector<double> grid{0.25, 0.5, 1.0, 1.5, 2.0, 3.0};
    const auto r = tail_envelope_report(g, cfg_.samples > 0 ? cfg_.samples : 2000, cfg_.seed, grid);
    emit_report(to_json(r), start);
    status("tail-envelope: recorded, fitted constant " + std::to_string(r.fitted_constant));
    return kExitPass;
  }

  int exp_single_upper() {
    const auto start = Clock::now();
    const auto r = run_single_tree_upper(graph(), cfg_.graph, cfg_.trials, cfg_.seed);
    emit_report(to_json(r), start);
    return verdict(r.passed, "max lambda " + std::to_string(r.max) + " (gate <= 100 ln n = " +
                                 std::to_string(r.envelope) + ")");
  }

  int exp_thin_tree() {
    const auto start = Clock::now();
    const auto r = run_unweighted_thin_tree(graph(), cfg_.graph, cfg_.trials, cfg_.seed);
    emit_report(to_json(r), start);
    return verdict(r.passed, "max lambda " + std::to_string(r.max) + " (gate <= " + std::to_string(r.envelope) + ")");
  }

  int exp_multi_lower() {
    const auto start = Clock::now();
    MultiTreeLowerParams p;
    p.num_cliques = cfg_.num_cliques;
    p.clique_size = cfg_.clique_size;
    p.eps = cfg_.eps;
    p.trials = cfg_.trials;
    p.base_seed = cfg_.seed;
    p.t = cfg_.t;
    p.enforce_window = cfg_.enforce_window;
    if (cfg_.gate > 0.0) p.gate = cfg_.gate;
    const auto r = run_multi_tree_lower(p);
    emit_report(to_json(r), start);
    return verdict(r.passed, "violation fraction " + std::to_string(r.violation_fraction) + " with t = " +
                                 std::to_string(r.t) + " (gate >= " + std::to_string(r.gate) + ")");
  }

  int exp_single_lower() {
    const auto start = Clock::now();
    const auto r = run_single_tree_lower(cfg_.num_cliques, cfg_.clique_size, cfg_.trials, cfg_.seed,
                                         cfg_.degree_threshold);
    emit_report(to_json(r), start);
    return verdict(r.all_certified, "certified ratio above d*/2 in every trial; fraction >= (ln s)/2: " +
                                        std::to_string(r.fraction_above_threshold));
  }

  int exp_degree() {
    const auto start = Clock::now();
    const auto r = run_degree_dist(cfg_.n, cfg_.samples, cfg_.seed);
    emit_report(to_json(r), start);
    return verdict(r.passed, "tv " + std::to_string(r.tv) + " (gate " + std::to_string(r.gate) + ")");
  }

  int exp_trend() {
    const auto start = Clock::now();
    if (cfg_.t == 0) throw InvalidParameter("--t (the base tree count t0) is required");
    const auto r = run_t_trend(graph(), cfg_.eps, cfg_.t, cfg_.trials, cfg_.seed);
    emit_report(to_json(r), start);
    return verdict(r.decreasing, "mean deviation at 4 t0 below t0");
  }

 private:
  RunConfig& cfg_;
  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg.seed = default_seed();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  CLI::App app{"Random spanning tree sparsifiers: sampling, certification and diagnostics", "treespark"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", cfg.seed, "Base seed (default: $TREESPARK_SEED or 0)");
  app.add_option("--out", cfg.out, "Write the report to this file instead of stdout");
  app.add_flag("--json", cfg.json_only, "Machine-readable output only");
  app.add_option("--jobs", cfg.jobs, "Worker threads (default: all cores)")->check(CLI::NonNegativeNumber);

  auto graph_opt = [&](CLI::App* sub, bool required = true) {
    auto* o = sub->add_option("--graph", cfg.graph, "Graph file or construction spec (k:n, ring:n, cliquestar:L,s, er:n,p[,seed])");
    if (required) o->required();
  };

  std::function<int(Runner&)> action;
  auto bind = [&](CLI::App* sub, std::string name, int (Runner::*fn)()) {
    sub->callback([&action, &cfg, name = std::move(name), fn] {
      cfg.command = name;
      action = [fn](Runner& r) { return (r.*fn)(); };
    });
  };

  auto* sample = app.add_subcommand("sample", "Sample spanning trees with Wilson's algorithm");
  graph_opt(sample);
  sample->add_option("--count", cfg.count, "Number of trees; tree i uses stream i of the seed");
  sample->add_option("--weights", cfg.weights, "original or inverse-leverage");
  bind(sample, "sample", &Runner::sample);

  auto* certify = app.add_subcommand("certify", "Certify a (1 +- eps) sparsifier from averaged trees");
  graph_opt(certify);
  certify->add_option("--eps", cfg.eps, "Target accuracy in (0, 1)")->required();
  certify->add_option("--t", cfg.t, "Trees per trial");
  certify->add_option("--cmult", cfg.c_mult, "Tree count multiplier: t = ceil(c eps^-2 ln^2 n)");
  certify->add_option("--trials", cfg.trials, "Independent trials");
  certify->add_option("--gate", cfg.gate, "Required pass fraction (default 0.9)");
  certify->add_option("--csv", cfg.csv, "Also write per-trial extremes as CSV");
  bind(certify, "certify", &Runner::certify);

  auto* graph = app.add_subcommand("graph", "Write a graph (e.g. a construction) in the text format");
  graph_opt(graph);
  bind(graph, "graph", &Runner::graph_cmd);

  auto* diag = app.add_subcommand("diag", "Negative-dependence diagnostics");
  diag->require_subcommand(1);
  auto* marg = diag->add_subcommand("marginals", "Exhaustive shrinking-marginals check (m <= 10)");
  graph_opt(marg);
  bind(marg, "diag marginals", &Runner::diag_marginals);
  auto* mart = diag->add_subcommand("martingale", "Exact Doob martingale traces (n <= 12)");
  graph_opt(mart);
  mart->add_option("--seeds", cfg.seeds, "Number of traces, seeds seed..seed+N-1");
  mart->add_option("--dump", cfg.dump, "Write per-step trace lines to this file");
  bind(mart, "diag martingale", &Runner::diag_martingale);
  auto* rc = diag->add_subcommand("reverse-chernoff", "Exact binomial tails against exp(-9 eps^2 p k)");
  rc->add_option("--grid", cfg.grid, "Grid name (default)")->default_val("default");
  rc->add_option("--k", cfg.k, "Single point: trials");
  rc->add_option("--p", cfg.p, "Single point: success probability");
  rc->add_option("--eps", cfg.eps, "Single point: relative deviation");
  bind(rc, "diag reverse-chernoff", &Runner::diag_reverse_chernoff);
  auto* st = diag->add_subcommand("stirling", "Stirling lower bound on binomial coefficients");
  st->add_option("--kmax", cfg.kmax, "Largest k (default 60)");
  bind(st, "diag stirling", &Runner::diag_stirling);
  auto* mf = diag->add_subcommand("matrix-fact", "(A-B)^2 <= 2A^2 + 2B^2 on random symmetric pairs");
  mf->add_option("--pairs", cfg.pairs, "Number of pairs (default 1000)");
  mf->add_option("--dim", cfg.dim, "Largest dimension (default 16)");
  bind(mf, "diag matrix-fact", &Runner::diag_matrix_fact);
  auto* te = diag->add_subcommand("tail-envelope", "Empirical martingale tails next to the analytic envelopes");
  graph_opt(te);
  te->add_option("--samples", cfg.samples, "Sampled trees (default 2000)");
  bind(te, "diag tail-envelope", &Runner::diag_tail_envelope);

  auto* exp = app.add_subcommand("experiment", "Desk-scale reproductions");
  exp->require_subcommand(1);
  auto* su = exp->add_subcommand("single-upper", "Normalized lambda_max of one reweighted tree");
  graph_opt(su);
  su->add_option("--trials", cfg.trials);
  bind(su, "experiment single-upper", &Runner::exp_single_upper);
  auto* th = exp->add_subcommand("thin-tree", "Normalized lambda_max of one unweighted tree");
  graph_opt(th);
  th->add_option("--trials", cfg.trials);
  bind(th, "experiment thin-tree", &Runner::exp_thin_tree);
  auto* ml = exp->add_subcommand("multi-lower", "Weighted-degree violations on the clique star");
  ml->add_option("--cliques", cfg.num_cliques, "Number of cliques L")->required();
  ml->add_option("--size", cfg.clique_size, "Clique size s")->required();
  ml->add_option("--eps", cfg.eps)->required();
  ml->add_option("--trials", cfg.trials);
  ml->add_option("--t", cfg.t, "Override the tree count");
  ml->add_option("--gate", cfg.gate, "Required violation fraction (default 0.95)");
  ml->add_flag("!--no-window", cfg.enforce_window, "Allow eps outside (5/s, 1/2)");
  bind(ml, "experiment multi-lower", &Runner::exp_multi_lower);
  auto* sl = exp->add_subcommand("single-lower", "Star-vector certificates on the clique star");
  sl->add_option("--cliques", cfg.num_cliques)->required();
  sl->add_option("--size", cfg.clique_size)->required();
  sl->add_option("--trials", cfg.trials);
  sl->add_option("--degree-threshold", cfg.degree_threshold, "Degree for the tail frequency (default 7)");
  bind(sl, "experiment single-lower", &Runner::exp_single_lower);
  auto* dg = exp->add_subcommand("degree", "Degree law of a fixed vertex in uniform trees of K_n");
  dg->add_option("--n", cfg.n)->required();
  dg->add_option("--samples", cfg.samples)->required();
  bind(dg, "experiment degree", &Runner::exp_degree);
  auto* tr = exp->add_subcommand("trend", "Mean deviation at t0, 2 t0, 4 t0 trees");
  graph_opt(tr);
  tr->add_option("--eps", cfg.eps)->required();
  tr->add_option("--t", cfg.t, "Base tree count t0")->required();
  tr->add_option("--trials", cfg.trials);
  bind(tr, "experiment trend", &Runner::exp_trend);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  if (cfg.jobs > 0) kernels::set_threads(cfg.jobs);
  Runner runner(cfg, out, err);
  try {
    return action(runner);
  } catch (const InvalidParameter& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const GraphInvalid& e) {
    err << "error: graph invalid: " << e.what() << '\n';
    return kExitGraphInvalid;
  } catch (const SizeGuard& e) {
    err << "error: size guard: " << e.what() << '\n';
    return kExitSizeGuard;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitGateFail;
  }
}

}  // namespace treespark
