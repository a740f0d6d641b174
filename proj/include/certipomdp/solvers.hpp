#pragma once

#include <map>
#include <set>
#include <string>

#include "certipomdp/bounds.hpp"
#include "certipomdp/model.hpp"
#include "certipomdp/oracle.hpp"
#include "certipomdp/rng.hpp"
#include "certipomdp/tree.hpp"

namespace certipomdp {

enum class SolverKind { kPomcp, kDbPomcp, kRbPomcp, kUdbFull, kExact };

SolverKind solver_kind_from_name(const std::string& name);
std::string solver_kind_name(SolverKind k);

struct SolverConfig {
  SolverKind kind = SolverKind::kDbPomcp;
  std::int64_t iterations_max = 10'000;
  std::int64_t time_budget_ms = 0;  // 0: no wall-clock cap
  double uct_c = 1.0;               // scaled by vmax_per_t(0)
  std::uint64_t seed = 0;
  BoundConfig bound_cfg;  // empty callables: defaults(model) applied at plan time
  bool stop_on_certified = true;
  double target_width = -1.0;  // >= 0: stop once the root interval is this tight

  // observability hooks (may stay empty): per-iteration root bound trace and
  // a look at the finished search tree (tree-based solvers only)
  std::function<void(std::int64_t iter, int depth, double mass, double upper, double lower)>
      trace;
  std::function<void(const BeliefTree&)> inspect_tree;
};

struct PlanResult {
  ActionId chosen_action = 0;
  BoundInterval root_interval;  // over unpruned root actions, with prior slack
  bool certified_optimal = false;
  std::int64_t iterations_used = 0;
  double wall_ms = 0.0;
  std::map<ActionId, BoundInterval> action_intervals;
  std::set<ActionId> pruned;
};

/// UCT baseline: explores by mean return plus exploration bonus, picks the
/// action with the best mean. Deterministic bounds are maintained alongside
/// but do not influence the search.
PlanResult pomcp_plan(const TabularPomdp& m, const Belief& b0, const SolverConfig& cfg);

/// UCT exploration, but the final action is the one with the highest
/// deterministic lower bound; root actions whose interval falls below the
/// best lower bound are pruned from search and selection.
PlanResult db_pomcp_plan(const TabularPomdp& m, const Belief& b0, const SolverConfig& cfg);

/// Bound-guided search: in-tree action selection by the highest upper bound,
/// descent biased toward unresolved subtrees, pruning and certification at
/// the root. Converges to the exact optimum in finitely many iterations.
PlanResult rb_pomcp_plan(const TabularPomdp& m, const Belief& b0, const SolverConfig& cfg);

/// Full-belief planner: exact posteriors per node, all actions expanded,
/// exploration by the upper deterministic bound, observation subsets grown
/// by descending one-step marginal. Throws TooLarge past the expansion guard.
PlanResult udb_full_belief_plan(const TabularPomdp& m, const Belief& b0, const SolverConfig& cfg);

/// Dispatch by cfg.kind (kExact runs the oracle and returns a point interval).
PlanResult plan(const TabularPomdp& m, const Belief& b0, const SolverConfig& cfg);

struct CertifyReport {
  bool sandwich_ok = false;
  bool action_ok = false;  // meaningful when the result is certified
  double lower_margin = 0.0;  // oracle V* - L
  double upper_margin = 0.0;  // U - oracle V*
  std::string details;
};

/// Checks a plan result against the exact oracle: the root interval must
/// bracket V*, and a certified choice must be the oracle action. Throws
/// CertificationFailure on violation.
CertifyReport certify(const PlanResult& result, double oracle_value, ActionId oracle_action);

}  // namespace certipomdp
