#pragma once

// Shared helpers for the test binaries: random model / policy / subset
// generators and slow reference implementations that deliberately avoid the
// code paths under test.

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "certipomdp/bounds.hpp"
#include "certipomdp/envs.hpp"
#include "certipomdp/model.hpp"
#include "certipomdp/oracle.hpp"
#include "certipomdp/rng.hpp"

namespace certipomdp::testing {

inline std::vector<double> random_simplex(Rng& rng, int n) {
  std::vector<double> v(n);
  double s = 0.0;
  for (double& x : v) {
    x = -std::log(1.0 - rng.uniform());
    s += x;
  }
  for (double& x : v) x /= s;
  return v;
}

inline TabularPomdp random_pomdp(Rng& rng, int ns, int na, int nz, int T,
                                 double discount = 1.0) {
  TabularPomdp m;
  m.num_states = ns;
  m.num_actions = na;
  m.num_obs = nz;
  m.horizon_T = T;
  m.discount = discount;
  m.resize_tables();
  for (StateId x = 0; x < ns; ++x) {
    for (ActionId a = 0; a < na; ++a) {
      auto row = random_simplex(rng, ns);
      for (StateId xp = 0; xp < ns; ++xp) m.trans_ref(x, a, xp) = row[xp];
      m.rew_ref(x, a) = 2.0 * rng.uniform() - 1.0;
    }
    auto row = random_simplex(rng, nz);
    for (ObsId z = 0; z < nz; ++z) m.obs_ref(x, z) = row[z];
  }
  m.prior = random_simplex(rng, ns);
  m.refresh_r_max();
  return m;
}

/// Random complete policy tree from time t down to the horizon.
inline PolicyTree random_policy(Rng& rng, const TabularPomdp& m, int t) {
  PolicyTree pi;
  pi.action = rng.below(m.num_actions);
  if (t < m.horizon_T)
    for (ObsId z = 0; z < m.num_obs; ++z) pi.children.emplace(z, random_policy(rng, m, t + 1));
  return pi;
}

/// Random observation subsets from time t down: each observation retained
/// with probability p_keep.
inline ObsSubsets random_subsets(Rng& rng, const TabularPomdp& m, int t, double p_keep) {
  ObsSubsets s;
  if (t >= m.horizon_T) return s;
  for (ObsId z = 0; z < m.num_obs; ++z) {
    if (rng.uniform() < p_keep) {
      s.retained.insert(z);
      s.children.emplace(z, random_subsets(rng, m, t + 1, p_keep));
    }
  }
  return s;
}

/// Slow reference for the observation-simplification gap bound: explicit
/// enumeration of every (state path, observation path) pair, accumulating
/// the retained joint mass per future time slice.
inline double slow_epsilon(const TabularPomdp& m, const Belief& b, ActionId first_action,
                           const PolicyTree& pi, const ObsSubsets& zbar) {
  const int T = m.horizon_T;
  const int t0 = b.time_t;
  std::vector<double> slice_mass(static_cast<std::size_t>(std::max(0, T - t0)) + 1, 0.0);
  struct Item {
    StateId x;
    double w;
    const PolicyTree* pol;  // provides the action at the *next* step
    const ObsSubsets* sub;
  };
  std::vector<Item> frontier;
  for (const auto& [x, p] : b.probs) frontier.push_back({x, p, nullptr, &zbar});
  for (int t = t0; t < T; ++t) {
    std::vector<Item> next;
    for (const Item& it : frontier) {
      ActionId a = (t == t0) ? first_action : it.pol->action;
      if (!it.sub) continue;
      for (ObsId z : it.sub->retained) {
        const PolicyTree* cpol = nullptr;
        if (t + 1 <= T) {
          const PolicyTree& src = (t == t0) ? pi : *it.pol;
          auto ch = src.children.find(z);
          if (ch == src.children.end()) throw IncompletePolicy("test policy incomplete");
          cpol = &ch->second;
        }
        for (StateId xp = 0; xp < m.num_states; ++xp) {
          double w = it.w * m.trans(it.x, a, xp) * m.obs(xp, z);
          if (w <= 0.0) continue;
          slice_mass[t - t0 + 1] += w;
          next.push_back({xp, w, cpol, it.sub->child(z)});
        }
      }
    }
    frontier = std::move(next);
  }
  double eps = 0.0;
  for (int s = 1; s <= T - t0; ++s) eps += m.r_max * (1.0 - slice_mass[s]);
  return eps;
}

/// Slow simplified value: reward mass along retained branches, enumerated
/// explicitly.
inline double slow_simplified_value(const TabularPomdp& m, const Belief& b, ActionId first_action,
                                    const PolicyTree& pi, const ObsSubsets& zbar) {
  const int T = m.horizon_T;
  const int t0 = b.time_t;
  struct Item {
    StateId x;
    double w;
    const PolicyTree* pol;
    const ObsSubsets* sub;
  };
  std::vector<Item> frontier;
  for (const auto& [x, p] : b.probs) frontier.push_back({x, p, nullptr, &zbar});
  double value = 0.0;
  double gamma = 1.0;
  for (int t = t0; t <= T; ++t) {
    std::vector<Item> next;
    for (const Item& it : frontier) {
      ActionId a = (t == t0) ? first_action : it.pol->action;
      value += gamma * it.w * m.rew(it.x, a);
      if (t == T || !it.sub) continue;
      for (ObsId z : it.sub->retained) {
        const PolicyTree& src = (t == t0) ? pi : *it.pol;
        auto ch = src.children.find(z);
        if (ch == src.children.end()) throw IncompletePolicy("test policy incomplete");
        for (StateId xp = 0; xp < m.num_states; ++xp) {
          double w = it.w * m.trans(it.x, a, xp) * m.obs(xp, z);
          if (w <= 0.0) continue;
          next.push_back({xp, w, &ch->second, it.sub->child(z)});
        }
      }
    }
    gamma *= m.discount;
    frontier = std::move(next);
  }
  return value;
}

/// Samples a prefix-closed subset of the full trajectory set of a policy:
/// the root slice is kept with probability p_keep, and each extension is
/// kept only when its parent was kept.
inline std::vector<Trajectory> random_prefix_closed(Rng& rng, const TabularPomdp& m,
                                                    const PolicyTree& pi, double p_keep) {
  std::vector<Trajectory> all = enumerate_trajectories(m, pi, m.horizon_T);
  std::set<TrajId> kept_ids;
  std::vector<Trajectory> kept;
  for (const Trajectory& tau : all) {
    if (tau.weight <= 0.0) continue;
    bool parent_ok = true;
    if (tau.time() > 0) {
      // recompute the parent id from the path prefix
      TrajId pid = trajectory_root_id(tau.states[0]);
      for (int k = 1; k < tau.time(); ++k)
        pid = trajectory_extend_id(pid, tau.history.actions[k - 1],
                                   tau.history.observations[k - 1], tau.states[k]);
      parent_ok = kept_ids.count(pid) > 0;
    }
    if (parent_ok && rng.uniform() < p_keep) {
      kept_ids.insert(tau.id);
      kept.push_back(tau);
    }
  }
  return kept;
}

/// Number of positive-weight trajectories over *all* action sequences up to
/// t_max (the search tree's full support).
inline std::size_t count_positive_trajectories(const TabularPomdp& m, int t_max) {
  struct Item {
    StateId x;
    double w;
  };
  std::vector<Item> frontier;
  for (StateId x = 0; x < m.num_states; ++x)
    if (m.prior[x] > 0.0) frontier.push_back({x, m.prior[x]});
  std::size_t total = frontier.size();
  for (int t = 0; t < t_max; ++t) {
    std::vector<Item> next;
    for (const Item& it : frontier)
      for (ActionId a = 0; a < m.num_actions; ++a)
        for (ObsId z = 0; z < m.num_obs; ++z)
          for (StateId xp = 0; xp < m.num_states; ++xp) {
            double w = it.w * m.trans(it.x, a, xp) * m.obs(xp, z);
            if (w > 0.0) next.push_back({xp, w});
          }
    total += next.size();
    frontier = std::move(next);
  }
  return total;
}

/// Oracle Q value of a fixed first action (optimal continuation).
inline double oracle_q(const TabularPomdp& m, const Belief& b, ActionId a) {
  double q = belief_reward(m, b, a);
  if (b.time_t < m.horizon_T)
    for (ObsId z = 0; z < m.num_obs; ++z) {
      try {
        auto [post, marginal] = belief_update(m, b, a, z);
        q += m.discount * marginal * exact_optimal_value(m, post).value;
      } catch (const ZeroLikelihood&) {
      }
    }
  return q;
}

}  // namespace certipomdp::testing
