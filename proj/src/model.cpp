#include "certipomdp/model.hpp"

#include <cmath>
#include <sstream>

namespace certipomdp {

void TabularPomdp::refresh_r_max() {
  double m = 0.0;
  for (double r : reward) m = std::max(m, std::fabs(r));
  r_max = m;
}

Belief Belief::from_prior(const TabularPomdp& m) {
  Belief b;
  for (StateId x = 0; x < m.num_states; ++x)
    if (m.prior[x] > 0.0) b.probs[x] = m.prior[x];
  b.time_t = 0;
  return b;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

namespace {
inline std::uint64_t fp_mix(std::uint64_t h, std::uint64_t v) {
  return splitmix64(h ^ (v * 0x9e3779b97f4a7c15ull));
}
}  // namespace

TrajId trajectory_root_id(StateId x0) {
  return fp_mix(0x7c15bf58476d1ce4ull, static_cast<std::uint64_t>(x0) + 1);
}

TrajId trajectory_extend_id(TrajId parent, ActionId a, ObsId z, StateId xp) {
  std::uint64_t h = fp_mix(parent, static_cast<std::uint64_t>(a) + 1);
  h = fp_mix(h, static_cast<std::uint64_t>(z) + 0x10001);
  return fp_mix(h, static_cast<std::uint64_t>(xp) + 0x20001);
}

std::pair<Belief, double> belief_update(const TabularPomdp& m, const Belief& b,
                                        ActionId a, ObsId z) {
  Belief post;
  post.time_t = b.time_t + 1;
  double marginal = 0.0;
  // propagate then condition
  std::vector<double> pred(m.num_states, 0.0);
  for (const auto& [x, p] : b.probs)
    for (StateId xp = 0; xp < m.num_states; ++xp) pred[xp] += m.trans(x, a, xp) * p;
  for (StateId xp = 0; xp < m.num_states; ++xp) {
    double w = pred[xp] * m.obs(xp, z);
    if (w > 0.0) {
      post.probs[xp] = w;
      marginal += w;
    }
  }
  if (marginal == 0.0)
    throw ZeroLikelihood("observation " + std::to_string(z) +
                         " has zero likelihood under (b, a=" + std::to_string(a) + ")");
  for (auto& [x, p] : post.probs) p /= marginal;
  return {std::move(post), marginal};
}

double belief_reward(const TabularPomdp& m, const Belief& b, ActionId a) {
  double r = 0.0;
  for (const auto& [x, p] : b.probs) r += p * m.rew(x, a);
  return r;
}

Trajectory trajectory_extend(const TabularPomdp& m, const Trajectory& tau,
                             ActionId a, ObsId z, StateId xp) {
  Trajectory out = tau;
  StateId x = out.states.back();
  out.states.push_back(xp);
  out.history.actions.push_back(a);
  out.history.observations.push_back(z);
  out.weight *= m.trans(x, a, xp) * m.obs(xp, z);
  out.id = trajectory_extend_id(tau.id, a, z, xp);
  return out;
}

std::vector<std::string> validate_model(const TabularPomdp& m) {
  std::vector<std::string> out;
  auto fail = [&out](const std::string& s) { out.push_back(s); };
  std::ostringstream ss;
  if (m.num_states <= 0) fail("num_states must be positive");
  if (m.num_actions <= 0) fail("num_actions must be positive");
  if (m.num_obs <= 0) fail("num_obs must be positive");
  if (m.horizon_T < 0) fail("horizon_T must be non-negative");
  if (m.discount <= 0.0 || m.discount > 1.0) fail("discount must lie in (0,1]");
  if (m.num_states <= 0 || m.num_actions <= 0 || m.num_obs <= 0) return out;

  const std::size_t ns = m.num_states, na = m.num_actions, nz = m.num_obs;
  if (m.transition.size() != ns * na * ns || m.observation.size() != ns * nz ||
      m.reward.size() != ns * na || m.prior.size() != ns) {
    fail("table dimensions do not match declared sizes");
    return out;
  }

  for (StateId x = 0; x < m.num_states; ++x) {
    for (ActionId a = 0; a < m.num_actions; ++a) {
      double s = 0.0;
      bool neg = false;
      for (StateId xp = 0; xp < m.num_states; ++xp) {
        double p = m.trans(x, a, xp);
        s += p;
        neg |= p < 0.0;
      }
      if (neg || std::fabs(s - 1.0) > kModelTol) {
        ss.str("");
        ss << "transition row (x=" << x << ", a=" << a << ") sums to " << s;
        fail(ss.str());
      }
    }
  }
  for (StateId x = 0; x < m.num_states; ++x) {
    double s = 0.0;
    bool neg = false;
    for (ObsId z = 0; z < m.num_obs; ++z) {
      double p = m.obs(x, z);
      s += p;
      neg |= p < 0.0;
    }
    if (neg || std::fabs(s - 1.0) > kModelTol) {
      ss.str("");
      ss << "observation row (x=" << x << ") sums to " << s;
      fail(ss.str());
    }
  }
  {
    double s = 0.0;
    for (StateId x = 0; x < m.num_states; ++x) {
      if (m.prior[x] < 0.0) {
        ss.str("");
        ss << "prior entry for state " << x << " is negative";
        fail(ss.str());
      }
      s += m.prior[x];
    }
    if (std::fabs(s - 1.0) > kModelTol) {
      ss.str("");
      ss << "prior sums to " << s;
      fail(ss.str());
    }
  }
  for (StateId x = 0; x < m.num_states; ++x)
    for (ActionId a = 0; a < m.num_actions; ++a)
      if (std::fabs(m.rew(x, a)) > m.r_max + kModelTol) {
        ss.str("");
        ss << "reward (x=" << x << ", a=" << a << ") exceeds r_max";
        fail(ss.str());
      }
  return out;
}

}  // namespace certipomdp
