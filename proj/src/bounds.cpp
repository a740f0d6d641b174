#include "certipomdp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace certipomdp {

BoundConfig BoundConfig::defaults(const TabularPomdp& m) {
  BoundConfig cfg;
  const int T = m.horizon_T;
  const double rmax = m.r_max;
  cfg.vmax_per_t = [T, rmax](int t) { return rmax * std::max(0, T - t + 1); };
  cfg.vmin_per_t = [T, rmax](int t) { return -rmax * std::max(0, T - t + 1); };
  cfg.discount = m.discount;
  return cfg;
}

ObsSubsets ObsSubsets::full(const TabularPomdp& m, int depth) {
  ObsSubsets s;
  if (depth <= 0) return s;
  for (ObsId z = 0; z < m.num_obs; ++z) {
    s.retained.insert(z);
    if (depth > 1) s.children.emplace(z, full(m, depth - 1));
  }
  return s;
}

namespace {

using Alpha = std::vector<double>;  // unnormalized distribution over states

Alpha propagate(const TabularPomdp& m, const Alpha& alpha, ActionId a) {
  Alpha pred(m.num_states, 0.0);
  for (StateId x = 0; x < m.num_states; ++x) {
    if (alpha[x] == 0.0) continue;
    for (StateId xp = 0; xp < m.num_states; ++xp) pred[xp] += m.trans(x, a, xp) * alpha[x];
  }
  return pred;
}

Alpha belief_alpha(const TabularPomdp& m, const Belief& b) {
  Alpha alpha(m.num_states, 0.0);
  for (const auto& [x, p] : b.probs) alpha[x] = p;
  return alpha;
}

double alpha_mass(const Alpha& a) {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

const PolicyTree* pi_child(const PolicyTree& pi, ObsId z, int next_t, int T) {
  auto it = pi.children.find(z);
  if (it != pi.children.end()) return &it->second;
  if (next_t <= T)
    throw IncompletePolicy("policy misses retained observation " + std::to_string(z) +
                           " at t=" + std::to_string(next_t));
  return nullptr;
}

// Slack for steps t+1..T after taking action a at time t, with continuation
// actions taken from cont's observation children.
double eps_step(const TabularPomdp& m, const Alpha& alpha, ActionId a, const PolicyTree& cont,
                const ObsSubsets* zb, int t) {
  const int T = m.horizon_T;
  if (t >= T) return 0.0;
  Alpha pred = propagate(m, alpha, a);
  double retained_mass = 0.0, child_eps = 0.0;
  if (zb) {
    for (ObsId z : zb->retained) {
      Alpha az(m.num_states, 0.0);
      double mz = 0.0;
      for (StateId xp = 0; xp < m.num_states; ++xp) {
        az[xp] = pred[xp] * m.obs(xp, z);
        mz += az[xp];
      }
      retained_mass += mz;
      if (mz > 0.0 && t + 1 < T) {
        const PolicyTree* sub = pi_child(cont, z, t + 1, T);
        child_eps += eps_step(m, az, sub->action, *sub, zb->child(z), t + 1);
      }
    }
  }
  double lost = alpha_mass(alpha) - retained_mass;
  return m.r_max * (T - t) * lost + child_eps;
}

// Simplified (unnormalized) value: rewards along retained branches only.
double val_step(const TabularPomdp& m, const Alpha& alpha, ActionId a, const PolicyTree& cont,
                const ObsSubsets* zb, int t) {
  const int T = m.horizon_T;
  double v = 0.0;
  for (StateId x = 0; x < m.num_states; ++x)
    if (alpha[x] != 0.0) v += alpha[x] * m.rew(x, a);
  if (t >= T || !zb) return v;
  Alpha pred = propagate(m, alpha, a);
  for (ObsId z : zb->retained) {
    Alpha az(m.num_states, 0.0);
    double mz = 0.0;
    for (StateId xp = 0; xp < m.num_states; ++xp) {
      az[xp] = pred[xp] * m.obs(xp, z);
      mz += az[xp];
    }
    if (mz <= 0.0) continue;
    const PolicyTree* sub = pi_child(cont, z, t + 1, T);
    v += m.discount * val_step(m, az, sub->action, *sub, zb->child(z), t + 1);
  }
  return v;
}

// Greedy-by-upper-bound recursion; returns the bound and (optionally) the
// induced policy subtree.
double greedy_rec(const TabularPomdp& m, const Belief& b, const ObsSubsets* zb, int t,
                  ActionId forced, PolicyTree* out) {
  const int T = m.horizon_T;
  double best = 0.0;
  bool have = false;
  ActionId a0 = forced >= 0 ? forced : 0;
  ActionId a1 = forced >= 0 ? forced + 1 : m.num_actions;
  for (ActionId a = a0; a < a1; ++a) {
    double u = belief_reward(m, b, a);
    PolicyTree sub;
    sub.action = a;
    if (t < T) {
      double retained_mass = 0.0;
      if (zb) {
        for (ObsId z : zb->retained) {
          Belief post;
          double mz = 0.0;
          try {
            std::tie(post, mz) = belief_update(m, b, a, z);
          } catch (const ZeroLikelihood&) {
            continue;
          }
          PolicyTree cpol;
          double cu = greedy_rec(m, post, zb->child(z), t + 1, -1, &cpol);
          u += m.discount * mz * cu;
          retained_mass += mz;
          sub.children.emplace(z, std::move(cpol));
        }
      }
      u += m.r_max * (T - t) * (1.0 - retained_mass);
    }
    if (!have || u > best) {
      have = true;
      best = u;
      if (out) *out = std::move(sub);
    }
  }
  return best;
}

}  // namespace

double epsilon_obs(const TabularPomdp& m, const Belief& b, const PolicyTree& pi,
                   const ObsSubsets& zbar) {
  return eps_step(m, belief_alpha(m, b), pi.action, pi, &zbar, b.time_t);
}

double epsilon_obs_action(const TabularPomdp& m, const Belief& b, ActionId a,
                          const PolicyTree& pi, const ObsSubsets& zbar) {
  return eps_step(m, belief_alpha(m, b), a, pi, &zbar, b.time_t);
}

double simplified_value(const TabularPomdp& m, const Belief& b, const PolicyTree& pi,
                        const ObsSubsets& zbar) {
  return val_step(m, belief_alpha(m, b), pi.action, pi, &zbar, b.time_t);
}

double simplified_q(const TabularPomdp& m, const Belief& b, ActionId a, const PolicyTree& pi,
                    const ObsSubsets& zbar) {
  return val_step(m, belief_alpha(m, b), a, pi, &zbar, b.time_t);
}

double udb(const TabularPomdp& m, const Belief& b, ActionId a, const PolicyTree& pi,
           const ObsSubsets& zbar) {
  return simplified_q(m, b, a, pi, zbar) + epsilon_obs_action(m, b, a, pi, zbar);
}

double udb_optimal(const TabularPomdp& m, const Belief& b, ActionId a, const ObsSubsets& zbar) {
  return greedy_rec(m, b, &zbar, b.time_t, a, nullptr);
}

PolicyTree udb_greedy_policy(const TabularPomdp& m, const Belief& b, const ObsSubsets& zbar) {
  PolicyTree pi;
  greedy_rec(m, b, &zbar, b.time_t, -1, &pi);
  return pi;
}

BoundInterval root_bounds_closed(const TabularPomdp& m, const PolicyTree& pi,
                                 const std::vector<Trajectory>& retained,
                                 const BoundConfig& cfg) {
  const int T = m.horizon_T;
  std::set<TrajId> ids;
  std::vector<const Trajectory*> unique;
  for (const auto& tau : retained)
    if (ids.insert(tau.id).second) unique.push_back(&tau);

  std::vector<double> mass(static_cast<std::size_t>(T) + 1, 0.0);
  double vbar = 0.0;
  for (const Trajectory* tau : unique) {
    int t = tau->time();
    if (t > T) throw PrefixViolation("retained trajectory exceeds the horizon");
    // every proper prefix must itself be retained
    TrajId pid = trajectory_root_id(tau->states[0]);
    if (t > 0 && !ids.count(pid)) throw PrefixViolation("missing trajectory prefix at t=0");
    for (int k = 1; k < t; ++k) {
      pid = trajectory_extend_id(pid, tau->history.actions[k - 1],
                                 tau->history.observations[k - 1], tau->states[k]);
      if (!ids.count(pid)) throw PrefixViolation("missing trajectory prefix");
    }
    mass[t] += tau->weight;

    // action at slice t comes from the policy at this history
    const PolicyTree* node = &pi;
    for (int k = 0; k < t; ++k) {
      auto it = node->children.find(tau->history.observations[k]);
      if (it == node->children.end())
        throw IncompletePolicy("policy misses a retained branch");
      node = &it->second;
    }
    vbar += std::pow(cfg.discount, t) * tau->weight * m.rew(tau->states.back(), node->action);
  }
  if (mass[0] > 1.0 + kRuntimeTol) throw PrefixViolation("root slice mass exceeds 1");

  BoundInterval out;
  out.upper = vbar + cfg.vmax_per_t(0) * (1.0 - mass[0]);
  out.lower = vbar + cfg.vmin_per_t(0) * (1.0 - mass[0]);
  double gamma = 1.0;
  for (int t = 0; t < T; ++t) {
    double gap = mass[t] - mass[t + 1];
    if (gap < -kRuntimeTol) throw PrefixViolation("slice mass increases at t=" + std::to_string(t));
    gamma *= cfg.discount;
    out.upper += gamma * cfg.vmax_per_t(t + 1) * gap;
    out.lower += gamma * cfg.vmin_per_t(t + 1) * gap;
  }
  return out;
}

std::set<ActionId> prune_decision(const std::map<ActionId, BoundInterval>& intervals) {
  std::set<ActionId> pruned;
  if (intervals.empty()) return pruned;
  ActionId keeper = intervals.begin()->first;
  double max_lower = intervals.begin()->second.lower;
  for (const auto& [a, iv] : intervals)
    if (iv.lower > max_lower) {
      max_lower = iv.lower;
      keeper = a;
    }
  for (const auto& [a, iv] : intervals)
    if (a != keeper && iv.upper < max_lower - 1e-12) pruned.insert(a);
  return pruned;
}

}  // namespace certipomdp
