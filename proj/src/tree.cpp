#include "certipomdp/tree.hpp"

#include <algorithm>
#include <ostream>

namespace certipomdp {

bool HistoryNode::record(const Trajectory& tau) {
  if (tau.weight <= 0.0) return false;
  if (!trajs.emplace(tau.id, std::make_pair(tau.states.back(), tau.weight)).second)
    return false;
  order.push_back(tau.id);
  mass += tau.weight;
  return true;
}

Trajectory fwd_update(const TabularPomdp& m, ActionNode& ha, HistoryNode& haz,
                      const Trajectory& tau, ObsId z, StateId xp) {
  if (tau.weight > 0.0 && ha.traj_ids.insert(tau.id).second) {
    ha.rbar += tau.weight * m.rew(tau.states.back(), ha.action);
    ha.mass += tau.weight;
  }
  Trajectory ext = trajectory_extend(m, tau, ha.action, z, xp);
  haz.record(ext);
  return ext;
}

void bwd_update(const TabularPomdp& m, HistoryNode& h, const BoundConfig& cfg) {
  (void)m;
  const int t = h.depth;
  const double g = cfg.discount;
  const double vmax_t = cfg.vmax_per_t(t), vmin_t = cfg.vmin_per_t(t);
  double best_u = 0.0, best_l = 0.0;
  bool have = false;
  if (cfg.cover_unexpanded && h.children.size() < static_cast<std::size_t>(m.num_actions)) {
    // unexpanded actions are covered by the pure-slack interval
    best_u = vmax_t * h.mass;
    best_l = vmin_t * h.mass;
    have = true;
  }
  for (auto& [a, ha] : h.children) {
    (void)a;
    double child_mass = 0.0, sum_u = 0.0, sum_l = 0.0;
    for (const auto& [z, haz] : ha.children) {
      (void)z;
      child_mass += haz.mass;
      sum_u += haz.bounds.upper;
      sum_l += haz.bounds.lower;
    }
    double gap0 = std::max(0.0, h.mass - ha.mass);
    double gap1 = std::max(0.0, ha.mass - child_mass);
    ha.bounds.upper = ha.rbar + g * sum_u + vmax_t * gap0 + g * cfg.vmax_per_t(t + 1) * gap1;
    ha.bounds.lower = ha.rbar + g * sum_l + vmin_t * gap0 + g * cfg.vmin_per_t(t + 1) * gap1;
    best_u = have ? std::max(best_u, ha.bounds.upper) : ha.bounds.upper;
    best_l = have ? std::max(best_l, ha.bounds.lower) : ha.bounds.lower;
    have = true;
  }
  if (!have) {  // no actions at all: pure slack
    best_u = vmax_t * h.mass;
    best_l = vmin_t * h.mass;
  }
  h.bounds.upper = best_u;
  h.bounds.lower = best_l;
}

void backup_all(const TabularPomdp& m, HistoryNode& h, const BoundConfig& cfg) {
  for (auto& [a, ha] : h.children) {
    (void)a;
    for (auto& [z, haz] : ha.children) {
      (void)z;
      backup_all(m, haz, cfg);
    }
  }
  bwd_update(m, h, cfg);
}

BoundInterval root_interval(const BeliefTree& tree) {
  double gap = std::max(0.0, 1.0 - tree.root.mass);
  BoundInterval iv;
  iv.upper = tree.root.bounds.upper + tree.cfg.vmax_per_t(tree.root.depth) * gap;
  iv.lower = tree.root.bounds.lower + tree.cfg.vmin_per_t(tree.root.depth) * gap;
  return iv;
}

std::map<ActionId, BoundInterval> root_action_intervals(const BeliefTree& tree) {
  double gap = std::max(0.0, 1.0 - tree.root.mass);
  double du = tree.cfg.vmax_per_t(tree.root.depth) * gap;
  double dl = tree.cfg.vmin_per_t(tree.root.depth) * gap;
  std::map<ActionId, BoundInterval> out;
  for (const auto& [a, ha] : tree.root.children)
    out[a] = {ha.bounds.lower + dl, ha.bounds.upper + du};
  return out;
}

std::map<ActionId, BoundInterval> node_intervals(const HistoryNode& h) {
  std::map<ActionId, BoundInterval> out;
  for (const auto& [a, ha] : h.children) out[a] = ha.bounds;
  return out;
}

void insert_trajectory(BeliefTree& tree, const Trajectory& tau, ActionId final_action) {
  const TabularPomdp& m = *tree.model;
  Trajectory cur = Trajectory::start(tau.states[0], m.prior[tau.states[0]]);
  HistoryNode* h = &tree.root;
  h->record(cur);
  const int t = tau.time();
  for (int k = 0; k < t; ++k) {
    ActionId a = tau.history.actions[k];
    ObsId z = tau.history.observations[k];
    StateId xp = tau.states[k + 1];
    ActionNode& ha = h->children[a];
    ha.action = a;
    HistoryNode& haz = ha.children[z];
    haz.depth = h->depth + 1;
    cur = fwd_update(m, ha, haz, cur, z, xp);
    h = &haz;
  }
  if (final_action >= 0) {
    ActionNode& ha = h->children[final_action];
    ha.action = final_action;
    if (cur.weight > 0.0 && ha.traj_ids.insert(cur.id).second) {
      ha.rbar += cur.weight * m.rew(cur.states.back(), final_action);
      ha.mass += cur.weight;
    }
  }
}

namespace {

void dump_history(const HistoryNode& h, std::ostream& out, int indent) {
  for (int i = 0; i < indent; ++i) out << ' ';
  out << "h " << h.depth << ' ' << h.mass << " - " << h.bounds.upper << ' ' << h.bounds.lower
      << ' ' << h.visits << " -\n";
  for (const auto& [a, ha] : h.children) {
    (void)a;
    for (int i = 0; i < indent + 2; ++i) out << ' ';
    out << "a " << ha.action << ' ' << ha.mass << ' ' << ha.rbar << ' ' << ha.bounds.upper << ' '
        << ha.bounds.lower << ' ' << ha.visits << ' ' << (ha.pruned ? 1 : 0) << '\n';
    for (const auto& [z, haz] : ha.children) {
      (void)z;
      dump_history(haz, out, indent + 4);
    }
  }
}

}  // namespace

void dump_tree(const BeliefTree& tree, std::ostream& out) {
  auto old = out.precision(17);
  dump_history(tree.root, out, 0);
  out.precision(old);
}

}  // namespace certipomdp
