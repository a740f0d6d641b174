#pragma once

#include <functional>
#include <map>
#include <set>
#include <vector>

#include "certipomdp/model.hpp"
#include "certipomdp/oracle.hpp"

namespace certipomdp {

/// Per-time-step caps on any continuation value. vmax_per_t(t) must upper
/// bound the total reward collectible from step t through horizon_T
/// inclusive; vmin_per_t symmetrically below. Defaults use
/// r_max * (number of remaining actions).
struct BoundConfig {
  std::function<double(int)> vmax_per_t;
  std::function<double(int)> vmin_per_t;
  double discount = 1.0;
  // When set, a history node's bound maximization also covers actions that
  // were never expanded (needed when bounding the *optimal* value). Policy
  // evaluation trees carry exactly one action per node and turn this off.
  bool cover_unexpanded = true;

  static BoundConfig defaults(const TabularPomdp& m);
};

struct BoundInterval {
  double lower = 0.0;
  double upper = 0.0;
  double width() const { return upper - lower; }
};

/// Per-history retained observation subsets, mirroring a policy tree. A
/// retained observation without a child entry keeps nothing below it.
struct ObsSubsets {
  std::set<ObsId> retained;
  std::map<ObsId, ObsSubsets> children;

  const ObsSubsets* child(ObsId z) const {
    auto it = children.find(z);
    return it == children.end() ? nullptr : &it->second;
  }
  /// Retains every observation down to the given depth (full retention).
  static ObsSubsets full(const TabularPomdp& m, int depth);
};

/// Deterministic gap bound between the theoretical and simplified values of
/// pi at b: r_max * sum over future slices of the unretained joint
/// observation mass. Lies in [0, r_max * (horizon_T - b.time_t)].
double epsilon_obs(const TabularPomdp& m, const Belief& b, const PolicyTree& pi,
                   const ObsSubsets& zbar);

/// Same gap with the first step forced to action a; pi governs the steps
/// after the first observation.
double epsilon_obs_action(const TabularPomdp& m, const Belief& b, ActionId a,
                          const PolicyTree& pi, const ObsSubsets& zbar);

/// Simplified (unnormalized) value of pi at b: expected reward summed over
/// retained observation branches only.
double simplified_value(const TabularPomdp& m, const Belief& b, const PolicyTree& pi,
                        const ObsSubsets& zbar);

/// Simplified action-value: first step forced to a, pi thereafter.
double simplified_q(const TabularPomdp& m, const Belief& b, ActionId a, const PolicyTree& pi,
                    const ObsSubsets& zbar);

/// Upper deterministic bound: simplified_q + epsilon_obs_action. With no
/// retained children this degenerates to r(b,a) plus full continuation slack.
double udb(const TabularPomdp& m, const Belief& b, ActionId a, const PolicyTree& pi,
           const ObsSubsets& zbar);

/// udb with the greedy-by-upper-bound continuation: first step forced to a,
/// later actions chosen to maximize the bound at each retained branch. This
/// upper-bounds the optimal Q(b, a) for any retained subsets.
double udb_optimal(const TabularPomdp& m, const Belief& b, ActionId a, const ObsSubsets& zbar);

/// The policy induced by the greedy-by-upper-bound recursion (ties to the
/// lowest action id).
PolicyTree udb_greedy_policy(const TabularPomdp& m, const Belief& b, const ObsSubsets& zbar);

/// Closed-form root bounds from a prefix-closed retained trajectory set:
/// simplified value plus continuation caps applied to the mass lost at each
/// time slice. Duplicate trajectory ids are counted once. Throws
/// PrefixViolation when a retained trajectory's prefix is missing.
BoundInterval root_bounds_closed(const TabularPomdp& m, const PolicyTree& pi,
                                 const std::vector<Trajectory>& retained,
                                 const BoundConfig& cfg);

/// Actions whose upper bound falls strictly below the best lower bound
/// (with slack toward retention). Never prunes every action.
std::set<ActionId> prune_decision(const std::map<ActionId, BoundInterval>& intervals);

}  // namespace certipomdp
