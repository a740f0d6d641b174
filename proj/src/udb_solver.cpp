#include <algorithm>
#include <chrono>
#include <memory>
#include <vector>

#include "certipomdp/solvers.hpp"

namespace certipomdp {

namespace {

using Clock = std::chrono::steady_clock;

struct UdbNode;

struct UdbArm {
  double r = 0.0;  // expected immediate reward
  // unretained observations, ordered by descending one-step marginal
  // (ties ascending id); grown from the front
  std::vector<std::pair<ObsId, double>> frontier;
  struct Kid {
    double marginal = 0.0;
    std::unique_ptr<UdbNode> node;
  };
  std::map<ObsId, Kid> kids;
  double upper = 0.0;
  double lower = 0.0;
  bool pruned = false;
};

struct UdbNode {
  Belief b;
  int t = 0;
  std::vector<UdbArm> arms;
  double upper = 0.0;
  double lower = 0.0;
  double width() const { return upper - lower; }
};

class UdbSolver {
 public:
  UdbSolver(const TabularPomdp& m, const Belief& b0, const SolverConfig& cfg)
      : m_(m), cfg_(cfg) {
    root_ = make_node(b0);
  }

  PlanResult run() {
    auto t0 = Clock::now();
    std::int64_t iters = 0;
    while (true) {
      if (cfg_.iterations_max > 0 && iters >= cfg_.iterations_max) break;
      if (cfg_.time_budget_ms > 0 &&
          std::chrono::duration<double, std::milli>(Clock::now() - t0).count() >=
              static_cast<double>(cfg_.time_budget_ms))
        break;
      if (!descend(*root_)) break;  // fully resolved
      ++iters;
      refresh_pruning();
      if (cfg_.trace) {
        BoundInterval iv = unpruned_interval();
        cfg_.trace(iters, root_->t, 1.0, iv.upper, iv.lower);
      }
      if (should_stop()) break;
    }
    refresh_pruning();
    PlanResult res;
    res.iterations_used = iters;
    res.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    fill_result(res);
    return res;
  }

 private:
  std::unique_ptr<UdbNode> make_node(const Belief& b) {
    if (++expansions_ > kOracleExpansionGuard)
      throw TooLarge("full-belief planner expansion guard exceeded");
    auto n = std::make_unique<UdbNode>();
    n->b = b;
    n->t = b.time_t;
    n->arms.resize(m_.num_actions);
    for (ActionId a = 0; a < m_.num_actions; ++a) {
      UdbArm& arm = n->arms[a];
      arm.r = belief_reward(m_, b, a);
      if (n->t < m_.horizon_T) {
        for (ObsId z = 0; z < m_.num_obs; ++z) {
          double marginal = one_step_marginal(b, a, z);
          if (marginal > 0.0) arm.frontier.emplace_back(z, marginal);
        }
        std::stable_sort(arm.frontier.begin(), arm.frontier.end(),
                         [](const auto& l, const auto& r) { return l.second > r.second; });
      }
      recompute_arm(*n, arm);
    }
    recompute_node(*n);
    return n;
  }

  double one_step_marginal(const Belief& b, ActionId a, ObsId z) const {
    double marginal = 0.0;
    for (const auto& [x, p] : b.probs)
      for (StateId xp = 0; xp < m_.num_states; ++xp)
        marginal += p * m_.trans(x, a, xp) * m_.obs(xp, z);
    return marginal;
  }

  void recompute_arm(const UdbNode& n, UdbArm& arm) const {
    double retained = 0.0, up = 0.0, low = 0.0;
    for (const auto& [z, kid] : arm.kids) {
      (void)z;
      retained += kid.marginal;
      up += kid.marginal * kid.node->upper;
      low += kid.marginal * kid.node->lower;
    }
    double steps = static_cast<double>(m_.horizon_T - n.t);
    double slack = n.t < m_.horizon_T ? m_.r_max * steps * std::max(0.0, 1.0 - retained) : 0.0;
    arm.upper = arm.r + m_.discount * up + slack;
    arm.lower = arm.r + m_.discount * low - slack;
  }

  void recompute_node(UdbNode& n) const {
    n.upper = n.arms[0].upper;
    n.lower = n.arms[0].lower;
    for (const UdbArm& arm : n.arms) {
      n.upper = std::max(n.upper, arm.upper);
      n.lower = std::max(n.lower, arm.lower);
    }
  }

  /// One planning step: walk down by the highest upper bound, grow the
  /// chosen arm's observation subset (or recurse into its least resolved
  /// retained child), then refresh bounds on the way back up. Returns false
  /// when the subtree is fully resolved.
  bool descend(UdbNode& n) {
    if (n.t >= m_.horizon_T) return false;
    ActionId best = -1;
    for (ActionId a = 0; a < m_.num_actions; ++a) {
      if (&n == root_.get() && n.arms[a].pruned) continue;
      if (best < 0 || n.arms[a].upper > n.arms[best].upper) best = a;
    }
    if (best < 0) return false;
    UdbArm& arm = n.arms[best];
    bool progressed = false;
    if (!arm.frontier.empty()) {
      auto [z, marginal] = arm.frontier.front();
      arm.frontier.erase(arm.frontier.begin());
      auto [post, mz] = belief_update(m_, n.b, best, z);
      UdbArm::Kid kid;
      kid.marginal = mz;
      kid.node = make_node(post);
      arm.kids.emplace(z, std::move(kid));
      progressed = true;
    } else {
      // recurse into the retained child with the widest weighted interval
      UdbNode* target = nullptr;
      double score = kRuntimeTol;
      for (auto& [z, kid] : arm.kids) {
        (void)z;
        double s = kid.marginal * kid.node->width();
        if (s > score) {
          score = s;
          target = kid.node.get();
        }
      }
      if (target) progressed = descend(*target);
    }
    recompute_arm(n, arm);
    recompute_node(n);
    return progressed;
  }

  void refresh_pruning() {
    std::map<ActionId, BoundInterval> iv;
    for (ActionId a = 0; a < m_.num_actions; ++a) {
      if (root_->arms[a].pruned) continue;
      iv[a] = {root_->arms[a].lower, root_->arms[a].upper};
    }
    for (ActionId a : prune_decision(iv)) root_->arms[a].pruned = true;
  }

  bool should_stop() const {
    std::size_t unpruned = 0;
    for (const UdbArm& arm : root_->arms)
      if (!arm.pruned) ++unpruned;
    if (cfg_.stop_on_certified && unpruned == 1) return true;
    if (cfg_.target_width >= 0.0) {
      BoundInterval iv = unpruned_interval();
      if (iv.width() <= cfg_.target_width) return true;
    }
    return false;
  }

  BoundInterval unpruned_interval() const {
    BoundInterval out{0.0, 0.0};
    bool have = false;
    for (const UdbArm& arm : root_->arms) {
      if (arm.pruned) continue;
      out.upper = have ? std::max(out.upper, arm.upper) : arm.upper;
      out.lower = have ? std::max(out.lower, arm.lower) : arm.lower;
      have = true;
    }
    return out;
  }

  void fill_result(PlanResult& res) const {
    std::size_t unpruned = 0;
    ActionId best = -1;
    for (ActionId a = 0; a < m_.num_actions; ++a) {
      const UdbArm& arm = root_->arms[a];
      res.action_intervals[a] = {arm.lower, arm.upper};
      if (arm.pruned) {
        res.pruned.insert(a);
        continue;
      }
      ++unpruned;
      if (best < 0 || arm.lower > root_->arms[best].lower + 1e-15 ||
          (arm.lower >= root_->arms[best].lower - 1e-15 &&
           arm.upper > root_->arms[best].upper + 1e-15))
        best = a;
    }
    res.chosen_action = best < 0 ? 0 : best;
    res.root_interval = unpruned_interval();
    res.certified_optimal = unpruned == 1;
  }

  const TabularPomdp& m_;
  const SolverConfig& cfg_;
  std::unique_ptr<UdbNode> root_;
  std::size_t expansions_ = 0;
};

}  // namespace

PlanResult udb_full_belief_plan(const TabularPomdp& m, const Belief& b0, const SolverConfig& cfg) {
  return UdbSolver(m, b0, cfg).run();
}

}  // namespace certipomdp
