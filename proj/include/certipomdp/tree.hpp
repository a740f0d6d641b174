#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <unordered_set>

#include "certipomdp/bounds.hpp"
#include "certipomdp/model.hpp"

namespace certipomdp {

struct ActionNode;

/// History node: cumulative retained trajectory mass, dedup fingerprints,
/// action children, cached bounds. depth is the time step of the next action.
struct HistoryNode {
  int depth = 0;
  double mass = 0.0;  // sum of unique retained trajectory weights reaching h
  // dedup registry: trajectory id -> (last state, weight); the state/weight
  // let bound-guided search re-extend a retained trajectory later
  std::map<TrajId, std::pair<StateId, double>> trajs;
  std::vector<TrajId> order;  // insertion order, scanned by bound-guided search
  std::map<ActionId, ActionNode> children;
  BoundInterval bounds;
  std::int64_t visits = 0;

  /// Adds the trajectory's weight to the node mass if unseen. Returns
  /// whether it was new.
  bool record(const Trajectory& tau);
};

struct ActionNode {
  ActionId action = 0;
  double rbar = 0.0;  // sum of unique weights times immediate reward
  double mass = 0.0;  // trajectory mass that contributed to rbar
  std::unordered_set<TrajId> traj_ids;
  std::map<ObsId, HistoryNode> children;
  BoundInterval bounds;
  std::int64_t visits = 0;
  double qsum = 0.0;  // running sum of sampled returns
  bool pruned = false;
  std::size_t scan_cursor = 0;  // parent->order prefix known fully extended

  double qmean() const { return visits > 0 ? qsum / visits : 0.0; }
};

struct BeliefTree {
  const TabularPomdp* model = nullptr;
  BoundConfig cfg;
  HistoryNode root;

  BeliefTree() = default;
  BeliefTree(const TabularPomdp& m, BoundConfig c) : model(&m), cfg(std::move(c)) {}
};

/// Algorithm step for one trajectory passing through (h, a, z): credits the
/// immediate reward to ha once per unique trajectory, extends the trajectory
/// with x', and records the extension at haz. Returns the extended
/// trajectory. The parent history itself is recorded via HistoryNode::record.
Trajectory fwd_update(const TabularPomdp& m, ActionNode& ha, HistoryNode& haz,
                      const Trajectory& tau, ObsId z, StateId xp);

/// Recomputes the bounds of every action child of h from the cached child
/// subtree bounds, then sets h's bounds to the best action's. Mass that h
/// holds but an action (or its observation children) has not absorbed is
/// covered with the per-step value caps. Unexpanded actions are covered by a
/// fallback interval of full slack.
void bwd_update(const TabularPomdp& m, HistoryNode& h, const BoundConfig& cfg);

/// Bottom-up bwd_update over the whole tree (test/recompute path; the
/// solvers update incrementally along the sampled path).
void backup_all(const TabularPomdp& m, HistoryNode& h, const BoundConfig& cfg);

/// Deterministic root-value interval: the root node bounds plus slack for
/// prior mass never sampled into the tree.
BoundInterval root_interval(const BeliefTree& tree);

/// Per-action intervals at the root, each widened by the unsampled prior
/// mass slack; input to prune_decision and certification.
std::map<ActionId, BoundInterval> root_action_intervals(const BeliefTree& tree);

/// Per-action raw bound snapshot of any node (no root slack).
std::map<ActionId, BoundInterval> node_intervals(const HistoryNode& h);

/// Threads a complete trajectory through the tree, creating nodes along its
/// history and replaying fwd_update at every step. Prefix weights are
/// recomputed from the model tables. final_action >= 0 additionally credits
/// that action's immediate reward at the deepest node (the action taken at
/// the trajectory's last slice).
void insert_trajectory(BeliefTree& tree, const Trajectory& tau, ActionId final_action = -1);

/// Depth-indented dump: `h|a depth mass rbar U L N pruned` per line.
void dump_tree(const BeliefTree& tree, std::ostream& out);

}  // namespace certipomdp
