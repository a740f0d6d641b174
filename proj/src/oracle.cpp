#include "certipomdp/oracle.hpp"

#include <string>

namespace certipomdp {

namespace {

struct Counter {
  std::size_t n = 0;
  void tick() {
    if (++n > kOracleExpansionGuard) throw TooLarge("oracle expansion guard exceeded");
  }
};

double optimal_rec(const TabularPomdp& m, const Belief& b, Counter& cnt, ActionId* best_a,
                   PolicyTree* out) {
  cnt.tick();
  double best = 0.0;
  bool have = false;
  for (ActionId a = 0; a < m.num_actions; ++a) {
    double v = belief_reward(m, b, a);
    PolicyTree sub;
    sub.action = a;
    if (b.time_t < m.horizon_T) {
      for (ObsId z = 0; z < m.num_obs; ++z) {
        Belief post;
        double marginal;
        try {
          std::tie(post, marginal) = belief_update(m, b, a, z);
        } catch (const ZeroLikelihood&) {
          continue;
        }
        PolicyTree child;
        double cv = optimal_rec(m, post, cnt, nullptr, &child);
        v += m.discount * marginal * cv;
        sub.children.emplace(z, std::move(child));
      }
    }
    if (!have || v > best) {
      have = true;
      best = v;
      if (best_a) *best_a = a;
      if (out) *out = std::move(sub);
    }
  }
  return best;
}

double policy_rec(const TabularPomdp& m, const Belief& b, const PolicyTree& pi, Counter& cnt) {
  cnt.tick();
  ActionId a = pi.action;
  double v = belief_reward(m, b, a);
  if (b.time_t < m.horizon_T) {
    for (ObsId z = 0; z < m.num_obs; ++z) {
      Belief post;
      double marginal;
      try {
        std::tie(post, marginal) = belief_update(m, b, a, z);
      } catch (const ZeroLikelihood&) {
        continue;
      }
      auto it = pi.children.find(z);
      if (it == pi.children.end())
        throw IncompletePolicy("policy misses observation " + std::to_string(z) +
                               " reachable at t=" + std::to_string(b.time_t));
      v += m.discount * marginal * policy_rec(m, post, it->second, cnt);
    }
  }
  return v;
}

}  // namespace

OracleResult exact_optimal_value(const TabularPomdp& m, const Belief& b) {
  Counter cnt;
  OracleResult res;
  res.value = optimal_rec(m, b, cnt, &res.action, &res.policy);
  return res;
}

double exact_policy_value(const TabularPomdp& m, const Belief& b, const PolicyTree& pi) {
  Counter cnt;
  return policy_rec(m, b, pi, cnt);
}

std::vector<Trajectory> enumerate_trajectories(const TabularPomdp& m, const PolicyTree& pi,
                                               int t_max) {
  std::vector<Trajectory> out;
  // frontier of (trajectory, policy node governing its next action)
  std::vector<std::pair<Trajectory, const PolicyTree*>> frontier;
  for (StateId x0 = 0; x0 < m.num_states; ++x0)
    if (m.prior[x0] > 0.0) frontier.emplace_back(Trajectory::start(x0, m.prior[x0]), &pi);
  for (const auto& [tau, node] : frontier) {
    (void)node;
    out.push_back(tau);
  }
  for (int t = 0; t < t_max; ++t) {
    std::vector<std::pair<Trajectory, const PolicyTree*>> next;
    for (const auto& [tau, node] : frontier) {
      ActionId a = node->action;
      StateId x = tau.states.back();
      for (ObsId z = 0; z < m.num_obs; ++z) {
        for (StateId xp = 0; xp < m.num_states; ++xp) {
          if (m.trans(x, a, xp) <= 0.0 || m.obs(xp, z) <= 0.0) continue;
          Trajectory ext = trajectory_extend(m, tau, a, z, xp);
          const PolicyTree* child = nullptr;
          if (t + 1 < t_max) {
            auto it = node->children.find(z);
            if (it == node->children.end())
              throw IncompletePolicy("policy misses observation " + std::to_string(z) +
                                     " at t=" + std::to_string(t + 1));
            child = &it->second;
          }
          next.emplace_back(std::move(ext), child);
          if (out.size() + next.size() > kOracleExpansionGuard)
            throw TooLarge("trajectory enumeration guard exceeded");
        }
      }
    }
    for (auto& [tau, node] : next) {
      (void)node;
      out.push_back(tau);
    }
    frontier = std::move(next);
  }
  return out;
}

}  // namespace certipomdp
