#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "certipomdp/model.hpp"
#include "certipomdp/solvers.hpp"

namespace certipomdp {

struct EpisodeResult {
  std::string env;
  std::string solver;
  int horizon = 0;
  std::uint64_t seed = 0;
  int episode = 0;
  double total_reward = 0.0;
  int steps = 0;
  int certified_count = 0;
  std::vector<double> step_wall_ms;
  std::string status = "ok";
};

/// One benchmark cell: a (env, solver, budget) grid point run for a number
/// of seeded episodes.
struct BenchCell {
  std::string name;
  std::string env;
  SolverKind solver = SolverKind::kDbPomcp;
  int horizon = 0;  // <= 0: scenario default
  int episodes = 10;
  std::int64_t iterations = 10'000;
  std::int64_t time_budget_ms = 0;
  double uct_c = 1.0;
  std::uint64_t seed0 = 1;
};

struct CellSummary {
  BenchCell cell;
  int completed = 0;
  int failed = 0;
  double mean = 0.0;
  double stderr_ = 0.0;  // emitted only with >= 2 episodes
  double mean_certified = 0.0;
};

struct BenchmarkReport {
  std::vector<CellSummary> cells;
  std::string git_describe;
  std::string timestamp;
  bool any_failed = false;
};

/// Runs one seeded episode: sample the true state from the prior, then
/// plan / act / observe / update until the horizon. The seed fully
/// determines both the environment draws and the per-step planning streams.
EpisodeResult run_episode(const TabularPomdp& m, const BenchCell& cell, int episode_index);

/// Parses the plain-text suite format: `[cell]` sections of key=value lines
/// (env, solver, horizon, episodes, iterations, time_budget_ms, uct_c, seed0).
std::vector<BenchCell> parse_suite(std::istream& in);
std::vector<BenchCell> parse_suite_file(const std::string& path);

/// Runs every cell (episodes in parallel up to CERTIPOMDP_THREADS), writes
/// results.csv and report.json under out_dir.
BenchmarkReport run_benchmark(const std::vector<BenchCell>& cells, const std::string& out_dir);

/// Streams episode rows as CSV with the fixed column order
/// env,solver,horizon,seed,episode,total_reward,steps,certified_count,wall_ms,status.
void write_csv(const std::vector<EpisodeResult>& rows, std::ostream& out);

struct TimeToCertifiedRow {
  std::string env;
  int horizon = 0;
  std::string solver;
  double uct_c = 1.0;
  double seconds = 0.0;
  bool capped = false;
  std::int64_t iterations = 0;
};

/// Wall time until a certified action per (instance, solver); capped runs
/// are marked rather than timed.
std::vector<TimeToCertifiedRow> time_to_certified(
    const std::vector<std::pair<std::string, int>>& instances,
    const std::vector<SolverKind>& solvers, double cap_s, double uct_c, std::uint64_t seed);

}  // namespace certipomdp
