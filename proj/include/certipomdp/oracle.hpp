#pragma once

#include <map>
#include <memory>
#include <vector>

#include "certipomdp/model.hpp"

namespace certipomdp {

/// Explicit policy tree: the action taken at this history plus one subtree
/// per observation. Leaves stop prescribing actions.
struct PolicyTree {
  ActionId action = 0;
  std::map<ObsId, PolicyTree> children;
};

inline constexpr std::size_t kOracleExpansionGuard = 1'000'000;

/// Exact finite-horizon optimal value at belief b via full Bellman recursion.
/// Ties break toward the lowest action id. Throws TooLarge past the
/// expansion guard.
struct OracleResult {
  double value = 0.0;
  ActionId action = 0;
  PolicyTree policy;
};
OracleResult exact_optimal_value(const TabularPomdp& m, const Belief& b);

/// Exact V^pi(b) by full expansion of the policy tree. Throws
/// IncompletePolicy when a positive-probability branch has no subtree.
double exact_policy_value(const TabularPomdp& m, const Belief& b, const PolicyTree& pi);

/// All positive-weight trajectories under pi for every length 0..t_max,
/// starting from the prior. Weights within one time slice sum to 1.
std::vector<Trajectory> enumerate_trajectories(const TabularPomdp& m, const PolicyTree& pi,
                                               int t_max);

}  // namespace certipomdp
