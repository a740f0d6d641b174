#include "certipomdp/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace certipomdp {

SolverKind solver_kind_from_name(const std::string& name) {
  if (name == "pomcp") return SolverKind::kPomcp;
  if (name == "db-pomcp") return SolverKind::kDbPomcp;
  if (name == "rb-pomcp") return SolverKind::kRbPomcp;
  if (name == "udb-full") return SolverKind::kUdbFull;
  if (name == "exact") return SolverKind::kExact;
  throw ParamError("unknown solver: " + name);
}

std::string solver_kind_name(SolverKind k) {
  switch (k) {
    case SolverKind::kPomcp: return "pomcp";
    case SolverKind::kDbPomcp: return "db-pomcp";
    case SolverKind::kRbPomcp: return "rb-pomcp";
    case SolverKind::kUdbFull: return "udb-full";
    case SolverKind::kExact: return "exact";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Particle {
  StateId x = 0;
  double w = 0.0;
  TrajId id = 0;
};

Trajectory stub(const Particle& p) {
  Trajectory t;
  t.states.push_back(p.x);
  t.weight = p.w;
  t.id = p.id;
  return t;
}

BoundConfig resolve_bounds(const TabularPomdp& m, const SolverConfig& cfg) {
  BoundConfig bc = cfg.bound_cfg;
  BoundConfig def = BoundConfig::defaults(m);
  if (!bc.vmax_per_t) bc.vmax_per_t = def.vmax_per_t;
  if (!bc.vmin_per_t) bc.vmin_per_t = def.vmin_per_t;
  return bc;
}

/// Shared tree-search driver for the three particle planners. The variants
/// differ in the in-tree action rule, the descent rule, and the final
/// action rule.
class TreeSearch {
 public:
  TreeSearch(const TabularPomdp& m, const Belief& b0, const SolverConfig& cfg, bool bound_guided,
             bool use_pruning)
      : m_(m),
        cfg_(cfg),
        bc_(resolve_bounds(m, cfg)),
        tree_(m, bc_),
        b0_(b0),
        rng_(cfg.seed),
        bound_guided_(bound_guided),
        use_pruning_(use_pruning) {
    tree_.root.depth = b0.time_t;
    // the root slice is known exactly: record every prior-support state
    for (const auto& [x, p] : b0.probs) tree_.root.record(Trajectory::start(x, p));
    uct_scale_ = cfg_.uct_c * bc_.vmax_per_t(tree_.root.depth);
  }

  PlanResult run() {
    auto t0 = Clock::now();
    PlanResult res;
    std::int64_t iters = 0;
    while (true) {
      if (cfg_.iterations_max > 0 && iters >= cfg_.iterations_max) break;
      if (cfg_.time_budget_ms > 0 && ms_since(t0) >= static_cast<double>(cfg_.time_budget_ms))
        break;
      Particle p = sample_root_particle();
      simulate(tree_.root, p, tree_.root.depth);
      ++iters;
      if (use_pruning_) refresh_pruning();
      if (cfg_.trace) {
        BoundInterval iv = unpruned_root_interval();
        cfg_.trace(iters, tree_.root.depth, tree_.root.mass, iv.upper, iv.lower);
      }
      if (should_stop()) break;
    }
    finalize(res);
    if (cfg_.inspect_tree) cfg_.inspect_tree(tree_);
    res.iterations_used = iters;
    res.wall_ms = ms_since(t0);
    return res;
  }

 private:
  Particle sample_root_particle() {
    StateId x = sample_belief(b0_, rng_);
    return {x, b0_.at(x), trajectory_root_id(x)};
  }

  bool root_fully_armed() const {
    return tree_.root.children.size() == static_cast<std::size_t>(m_.num_actions);
  }

  std::map<ActionId, BoundInterval> intervals_with_virtual() const {
    auto out = root_action_intervals(tree_);
    double gap = std::max(0.0, 1.0 - tree_.root.mass);
    int t = tree_.root.depth;
    double vu = bc_.vmax_per_t(t) * tree_.root.mass + bc_.vmax_per_t(t) * gap;
    double vl = bc_.vmin_per_t(t) * tree_.root.mass + bc_.vmin_per_t(t) * gap;
    for (ActionId a = 0; a < m_.num_actions; ++a)
      if (!out.count(a)) out[a] = {vl, vu};
    return out;
  }

  void refresh_pruning() {
    auto iv = intervals_with_virtual();
    for (ActionId a : pruned_) iv.erase(a);
    auto newly = prune_decision(iv);
    for (ActionId a : newly) {
      pruned_.insert(a);
      auto it = tree_.root.children.find(a);
      if (it != tree_.root.children.end()) it->second.pruned = true;
    }
  }

  bool should_stop() const {
    if (!use_pruning_) return false;
    std::size_t unpruned = static_cast<std::size_t>(m_.num_actions) - pruned_.size();
    if (cfg_.stop_on_certified && unpruned == 1) return true;
    if (cfg_.target_width >= 0.0 && root_fully_armed()) {
      BoundInterval iv = unpruned_root_interval();
      if (iv.width() <= cfg_.target_width) return true;
    }
    return false;
  }

  BoundInterval unpruned_root_interval() const {
    auto iv = intervals_with_virtual();
    bool have = false;
    BoundInterval out{0.0, 0.0};
    for (const auto& [a, i] : iv) {
      if (pruned_.count(a)) continue;
      out.upper = have ? std::max(out.upper, i.upper) : i.upper;
      out.lower = have ? std::max(out.lower, i.lower) : i.lower;
      have = true;
    }
    if (!have) return root_interval(tree_);
    return out;
  }

  void finalize(PlanResult& res) {
    res.action_intervals = intervals_with_virtual();
    if (use_pruning_) refresh_pruning();
    else {
      // bounds ride along; report what the interval test would have pruned
      auto would = prune_decision(res.action_intervals);
      pruned_ = would;
    }
    res.action_intervals = intervals_with_virtual();
    res.pruned = pruned_;
    res.root_interval = unpruned_root_interval();
    res.certified_optimal =
        root_fully_armed() && pruned_.size() + 1 == static_cast<std::size_t>(m_.num_actions);
    res.chosen_action = choose_final();
  }

  ActionId choose_final() {
    if (tree_.root.children.empty()) return 0;
    if (!bound_guided_ && !use_pruning_) {  // pomcp: best mean
      ActionId best = tree_.root.children.begin()->first;
      double bq = tree_.root.children.begin()->second.qmean();
      for (const auto& [a, ha] : tree_.root.children)
        if (ha.qmean() > bq) {
          bq = ha.qmean();
          best = a;
        }
      return best;
    }
    // highest lower bound among unpruned; ties to higher upper, then lowest id
    auto iv = intervals_with_virtual();
    ActionId best = -1;
    BoundInterval bi{0.0, 0.0};
    for (const auto& [a, i] : iv) {
      if (pruned_.count(a)) continue;
      if (best < 0 || i.lower > bi.lower + 1e-15 ||
          (i.lower >= bi.lower - 1e-15 && i.upper > bi.upper + 1e-15)) {
        best = a;
        bi = i;
      }
    }
    return best < 0 ? tree_.root.children.begin()->first : best;
  }

  // ---- simulation ----

  double simulate(HistoryNode& h, Particle p, int t) {
    h.visits++;
    if (bound_guided_) bwd_update(m_, h, bc_);  // arm bounds track the grown node mass
    ActionId a = select_action(h, t);
    ActionNode& ha = h.children[a];
    ha.action = a;
    double r = m_.rew(p.x, a);
    double ret;
    if (t >= m_.horizon_T) {
      credit_leaf(h, ha, p);
      ret = r;
    } else {
      Particle src = p;
      StateId xp;
      ObsId z;
      pick_extension(h, ha, p, src, xp, z);
      HistoryNode& haz = ha.children[z];
      haz.depth = t + 1;
      Trajectory ext = fwd_update(m_, ha, haz, stub(src), z, xp);
      ret = r + m_.discount * simulate(haz, {xp, ext.weight, ext.id}, t + 1);
    }
    ha.visits++;
    ha.qsum += ret;
    bwd_update(m_, h, bc_);
    return ret;
  }

  ActionId select_action(HistoryNode& h, int t) {
    bool at_root = (&h == &tree_.root);
    if (!bound_guided_) {
      // UCT with unvisited actions first
      for (ActionId a = 0; a < m_.num_actions; ++a) {
        if (at_root && use_pruning_ && pruned_.count(a)) continue;
        auto it = h.children.find(a);
        if (it == h.children.end() || it->second.visits == 0) return a;
      }
      ActionId best = -1;
      double bs = 0.0;
      double logn = std::log(static_cast<double>(std::max<std::int64_t>(1, h.visits)));
      for (const auto& [a, ha] : h.children) {
        if (at_root && use_pruning_ && pruned_.count(a)) continue;
        double s = ha.qmean() + uct_scale_ * std::sqrt(logn / static_cast<double>(ha.visits));
        if (best < 0 || s > bs) {
          bs = s;
          best = a;
        }
      }
      return best < 0 ? 0 : best;
    }
    // bound-guided: highest upper bound; unexpanded actions carry full slack
    double slack_u = bc_.vmax_per_t(t) * h.mass;
    ActionId best = -1;
    double bs = 0.0;
    for (ActionId a = 0; a < m_.num_actions; ++a) {
      if (at_root && use_pruning_ && pruned_.count(a)) continue;
      auto it = h.children.find(a);
      double s = it == h.children.end() ? slack_u : it->second.bounds.upper;
      if (best < 0 || s > bs) {
        bs = s;
        best = a;
      }
    }
    return best < 0 ? 0 : best;
  }

  void credit_leaf(HistoryNode& h, ActionNode& ha, const Particle& p) {
    if (p.w > 0.0 && ha.traj_ids.insert(p.id).second) {
      ha.rbar += p.w * m_.rew(p.x, ha.action);
      ha.mass += p.w;
    }
    if (!bound_guided_) return;
    // sweep the rest of the registry so the leaf arm absorbs all node mass
    while (ha.scan_cursor < h.order.size()) {
      TrajId id = h.order[ha.scan_cursor++];
      const auto& [x, w] = h.trajs[id];
      if (w > 0.0 && ha.traj_ids.insert(id).second) {
        ha.rbar += w * m_.rew(x, ha.action);
        ha.mass += w;
      }
    }
  }

  // Chooses (source trajectory, next state, observation) for the descent.
  // Bound-guided search first exhausts extensions missing from the tree
  // (this is what makes certification finite-time), then walks toward
  // unresolved children; the baselines sample from the model.
  void pick_extension(HistoryNode& h, ActionNode& ha, const Particle& p, Particle& src,
                      StateId& xp, ObsId& z) {
    if (bound_guided_ && find_gap(h, ha, src, xp, z)) return;
    src = p;
    if (bound_guided_) {
      // prefer the widest unresolved child compatible with this particle
      ObsId zbest = -1;
      double wbest = kRuntimeTol;
      for (const auto& [zc, haz] : ha.children) {
        double width = haz.bounds.width();
        if (width > wbest && reachable(p.x, ha.action, zc)) {
          wbest = width;
          zbest = zc;
        }
      }
      if (zbest >= 0) {
        z = zbest;
        xp = sample_conditional(p.x, ha.action, z);
        return;
      }
    }
    xp = sample_next_state(m_, rng_, p.x, ha.action);
    z = sample_obs(m_, rng_, xp);
  }

  bool reachable(StateId x, ActionId a, ObsId z) const {
    for (StateId xp = 0; xp < m_.num_states; ++xp)
      if (m_.trans(x, a, xp) * m_.obs(xp, z) > 0.0) return true;
    return false;
  }

  StateId sample_conditional(StateId x, ActionId a, ObsId z) {
    std::vector<double> w(m_.num_states, 0.0);
    for (StateId xp = 0; xp < m_.num_states; ++xp) w[xp] = m_.trans(x, a, xp) * m_.obs(xp, z);
    return rng_.categorical(w);
  }

  // Scans the node registry (amortized via the arm's cursor) for a retained
  // trajectory with an extension the tree has not recorded yet.
  bool find_gap(HistoryNode& h, ActionNode& ha, Particle& src, StateId& xp, ObsId& z) {
    while (ha.scan_cursor < h.order.size()) {
      TrajId id = h.order[ha.scan_cursor];
      const auto& [x, w] = h.trajs[id];
      if (w > 0.0) {
        for (ObsId zc = 0; zc < m_.num_obs; ++zc) {
          auto it = ha.children.find(zc);
          const HistoryNode* haz = it == ha.children.end() ? nullptr : &it->second;
          for (StateId xc = 0; xc < m_.num_states; ++xc) {
            if (m_.trans(x, ha.action, xc) * m_.obs(xc, zc) <= 0.0) continue;
            TrajId ext = trajectory_extend_id(id, ha.action, zc, xc);
            if (!haz || !haz->trajs.count(ext)) {
              src = {x, w, id};
              xp = xc;
              z = zc;
              return true;
            }
          }
        }
      }
      ha.scan_cursor++;  // fully extended through this action
    }
    return false;
  }

  const TabularPomdp& m_;
  const SolverConfig& cfg_;
  BoundConfig bc_;
  BeliefTree tree_;
  Belief b0_;
  Rng rng_;
  bool bound_guided_;
  bool use_pruning_;
  double uct_scale_ = 0.0;
  std::set<ActionId> pruned_;
};

}  // namespace

PlanResult pomcp_plan(const TabularPomdp& m, const Belief& b0, const SolverConfig& cfg) {
  return TreeSearch(m, b0, cfg, false, false).run();
}

PlanResult db_pomcp_plan(const TabularPomdp& m, const Belief& b0, const SolverConfig& cfg) {
  return TreeSearch(m, b0, cfg, false, true).run();
}

PlanResult rb_pomcp_plan(const TabularPomdp& m, const Belief& b0, const SolverConfig& cfg) {
  return TreeSearch(m, b0, cfg, true, true).run();
}

PlanResult plan(const TabularPomdp& m, const Belief& b0, const SolverConfig& cfg) {
  switch (cfg.kind) {
    case SolverKind::kPomcp: return pomcp_plan(m, b0, cfg);
    case SolverKind::kDbPomcp: return db_pomcp_plan(m, b0, cfg);
    case SolverKind::kRbPomcp: return rb_pomcp_plan(m, b0, cfg);
    case SolverKind::kUdbFull: return udb_full_belief_plan(m, b0, cfg);
    case SolverKind::kExact: {
      auto t0 = Clock::now();
      OracleResult o = exact_optimal_value(m, b0);
      PlanResult res;
      res.chosen_action = o.action;
      res.root_interval = {o.value, o.value};
      res.certified_optimal = true;
      res.wall_ms = ms_since(t0);
      return res;
    }
  }
  throw ParamError("unhandled solver kind");
}

CertifyReport certify(const PlanResult& result, double oracle_value, ActionId oracle_action) {
  CertifyReport rep;
  rep.lower_margin = oracle_value - result.root_interval.lower;
  rep.upper_margin = result.root_interval.upper - oracle_value;
  rep.sandwich_ok = rep.lower_margin >= -kRuntimeTol && rep.upper_margin >= -kRuntimeTol;
  rep.action_ok = !result.certified_optimal || result.chosen_action == oracle_action;
  rep.details = "V*=" + std::to_string(oracle_value) + " interval=[" +
                std::to_string(result.root_interval.lower) + ", " +
                std::to_string(result.root_interval.upper) + "] chosen=" +
                std::to_string(result.chosen_action) + " oracle=" +
                std::to_string(oracle_action) +
                (result.certified_optimal ? " certified" : "");
  if (!rep.sandwich_ok)
    throw CertificationFailure("root interval does not bracket the oracle value: " + rep.details);
  if (!rep.action_ok)
    throw CertificationFailure("certified action differs from the oracle: " + rep.details);
  return rep;
}

}  // namespace certipomdp
