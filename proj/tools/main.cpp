#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "certipomdp/bench.hpp"
#include "certipomdp/envs.hpp"
#include "certipomdp/solvers.hpp"

using namespace certipomdp;

namespace {

struct PlanArgs {
  std::string env = "tiger";
  std::string solver = "db-pomcp";
  int horizon = 0;
  std::int64_t iterations = 10'000;
  std::int64_t time_budget_ms = 0;
  std::uint64_t seed = 1;
  double uct_c = 1.0;
  int episodes = 0;
  std::string output, trace_bounds, dump_tree_path, dump_model_path;
};

void add_common(CLI::App* cmd, PlanArgs& a) {
  cmd->add_option("--env", a.env, "environment {tiger|baby|lightdark|rocksample}");
  cmd->add_option("--solver", a.solver, "solver {pomcp|db-pomcp|rb-pomcp|udb-full|exact}");
  cmd->add_option("--horizon", a.horizon, "actions per episode (0: scenario default)");
  cmd->add_option("--iterations", a.iterations, "planning iteration budget per step");
  cmd->add_option("--time-budget-ms", a.time_budget_ms, "planning wall-clock budget per step");
  cmd->add_option("--seed", a.seed, "base random seed");
  cmd->add_option("--uct-c", a.uct_c, "UCT exploration constant (scaled by the value cap)");
}

void print_plan(const PlanResult& pr) {
  std::cout.precision(12);
  std::cout << "chosen_action: " << pr.chosen_action << "\n"
            << "root_interval: [" << pr.root_interval.lower << ", " << pr.root_interval.upper
            << "]\n"
            << "certified_optimal: " << (pr.certified_optimal ? "yes" : "no") << "\n"
            << "iterations: " << pr.iterations_used << "\n"
            << "wall_ms: " << pr.wall_ms << "\n";
  for (const auto& [a, iv] : pr.action_intervals)
    std::cout << "action " << a << ": [" << iv.lower << ", " << iv.upper << "]"
              << (pr.pruned.count(a) ? " pruned" : "") << "\n";
}

int cmd_plan(const PlanArgs& a) {
  TabularPomdp model = build_env(a.env, a.horizon);
  if (!a.dump_model_path.empty()) save_model_file(model, a.dump_model_path);

  SolverConfig cfg;
  cfg.kind = solver_kind_from_name(a.solver);
  cfg.iterations_max = a.iterations;
  cfg.time_budget_ms = a.time_budget_ms;
  cfg.uct_c = a.uct_c;
  cfg.seed = a.seed;

  std::ofstream trace_f, tree_f;
  if (!a.trace_bounds.empty()) {
    trace_f.open(a.trace_bounds);
    trace_f << "iter,node_depth,P_h,U,L\n";
    trace_f.precision(17);
    cfg.trace = [&trace_f](std::int64_t iter, int depth, double mass, double u, double l) {
      trace_f << iter << ',' << depth << ',' << mass << ',' << u << ',' << l << '\n';
    };
  }
  if (!a.dump_tree_path.empty()) {
    tree_f.open(a.dump_tree_path);
    cfg.inspect_tree = [&tree_f](const BeliefTree& tree) { dump_tree(tree, tree_f); };
  }

  PlanResult pr = plan(model, Belief::from_prior(model), cfg);
  print_plan(pr);

  if (a.episodes > 0) {
    BenchCell cell;
    cell.name = "cli";
    cell.env = a.env;
    cell.solver = cfg.kind;
    cell.horizon = a.horizon;
    cell.episodes = a.episodes;
    cell.iterations = a.iterations;
    cell.time_budget_ms = a.time_budget_ms;
    cell.uct_c = a.uct_c;
    cell.seed0 = a.seed;
    std::vector<EpisodeResult> rows;
    double sum = 0.0;
    int ok = 0;
    for (int i = 0; i < a.episodes; ++i) {
      rows.push_back(run_episode(model, cell, i));
      if (rows.back().status == "ok") {
        sum += rows.back().total_reward;
        ok++;
      }
    }
    std::cout << "episodes: " << a.episodes << " mean_reward: " << (ok ? sum / ok : 0.0)
              << "\n";
    if (!a.output.empty()) {
      std::ofstream csv(a.output);
      write_csv(rows, csv);
    }
  }
  return 0;
}

int cmd_bench(const std::string& suite, const std::string& out_dir) {
  auto cells = parse_suite_file(suite);
  BenchmarkReport report = run_benchmark(cells, out_dir);
  for (const CellSummary& s : report.cells) {
    std::cout << "[" << s.cell.name << "] " << s.cell.env << "/"
              << solver_kind_name(s.cell.solver) << " mean=" << s.mean;
    if (s.completed >= 2) std::cout << " stderr=" << s.stderr_;
    std::cout << " completed=" << s.completed << " failed=" << s.failed << "\n";
  }
  return report.any_failed ? 2 : 0;
}

int cmd_certify(const PlanArgs& a) {
  TabularPomdp model = build_env(a.env, a.horizon);
  SolverConfig cfg;
  cfg.kind = solver_kind_from_name(a.solver);
  cfg.iterations_max = a.iterations;
  cfg.time_budget_ms = a.time_budget_ms;
  cfg.uct_c = a.uct_c;
  cfg.seed = a.seed;
  PlanResult pr = plan(model, Belief::from_prior(model), cfg);
  OracleResult oracle = exact_optimal_value(model, Belief::from_prior(model));
  try {
    CertifyReport rep = certify(pr, oracle.value, oracle.action);
    std::cout << "certify: ok\n" << rep.details << "\n"
              << "lower_margin: " << rep.lower_margin << "\n"
              << "upper_margin: " << rep.upper_margin << "\n";
    return 0;
  } catch (const CertificationFailure& e) {
    std::cerr << "certify: FAILED\n" << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anytime POMDP planning with deterministic bound certificates"};
  app.require_subcommand(1);

  PlanArgs plan_args;
  CLI::App* plan_cmd = app.add_subcommand("plan", "plan at the prior belief / run episodes");
  add_common(plan_cmd, plan_args);
  plan_cmd->add_option("--episodes", plan_args.episodes, "also run this many seeded episodes");
  plan_cmd->add_option("--output", plan_args.output, "episode CSV path");
  plan_cmd->add_option("--trace-bounds", plan_args.trace_bounds,
                       "per-iteration root bound CSV path");
  plan_cmd->add_option("--dump-tree", plan_args.dump_tree_path, "search tree dump path");
  plan_cmd->add_option("--dump-model", plan_args.dump_model_path, "model text dump path");

  std::string suite, out_dir = "bench-out";
  CLI::App* bench_cmd = app.add_subcommand("bench", "run a benchmark suite");
  bench_cmd->add_option("--suite", suite, "suite file")->required();
  bench_cmd->add_option("--output", out_dir, "output directory");

  PlanArgs cert_args;
  CLI::App* cert_cmd = app.add_subcommand("certify", "run a solver and check it vs the oracle");
  add_common(cert_cmd, cert_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan_cmd->parsed()) return cmd_plan(plan_args);
    if (bench_cmd->parsed()) return cmd_bench(suite, out_dir);
    if (cert_cmd->parsed()) return cmd_certify(cert_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
