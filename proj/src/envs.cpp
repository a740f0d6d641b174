#include "certipomdp/envs.hpp"

#include <cmath>
#include <cstdlib>

namespace certipomdp {

TabularPomdp build_tiger(const TigerParams& p) {
  if (!(p.listen_accuracy > 0.5 && p.listen_accuracy <= 1.0))
    throw ParamError("listen_accuracy must lie in (0.5, 1]");
  if (p.horizon < 1) throw ParamError("horizon must be >= 1");
  TabularPomdp m;
  m.num_states = 2;
  m.num_actions = 3;
  m.num_obs = 2;
  m.horizon_T = p.horizon - 1;
  m.resize_tables();
  const ActionId kOpenLeft = 0, kOpenRight = 1, kListen = 2;
  for (StateId x = 0; x < 2; ++x) {
    // opening resets the tiger uniformly; listening leaves it in place
    for (ActionId a : {kOpenLeft, kOpenRight}) {
      m.trans_ref(x, a, 0) = 0.5;
      m.trans_ref(x, a, 1) = 0.5;
    }
    m.trans_ref(x, kListen, x) = 1.0;
    m.obs_ref(x, x) = p.listen_accuracy;
    m.obs_ref(x, 1 - x) = 1.0 - p.listen_accuracy;
    m.rew_ref(x, kListen) = p.r_listen;
    m.prior[x] = 0.5;
  }
  m.rew_ref(0, kOpenLeft) = p.r_tiger;
  m.rew_ref(0, kOpenRight) = p.r_treasure;
  m.rew_ref(1, kOpenLeft) = p.r_treasure;
  m.rew_ref(1, kOpenRight) = p.r_tiger;
  m.refresh_r_max();
  return m;
}

TabularPomdp build_baby(const BabyParams& p) {
  for (double q : {p.p_cry_hunger, p.p_cry_discomfort, p.p_cry_no_need})
    if (q < 0.0 || q > 1.0) throw ParamError("cry probabilities must lie in [0,1]");
  if (p.horizon < 1) throw ParamError("horizon must be >= 1");
  TabularPomdp m;
  m.num_states = 3;  // hunger, discomfort, no-need
  m.num_actions = 3;  // feed, change, nothing
  m.num_obs = 2;      // cry, quiet
  m.horizon_T = p.horizon - 1;
  m.resize_tables();
  const StateId kHunger = 0, kDiscomfort = 1, kNoNeed = 2;
  const ActionId kFeed = 0, kChange = 1, kNothing = 2;
  // addressing the right need resolves it; the wrong action leaves it;
  // from no-need a fresh need can arise while doing nothing
  m.trans_ref(kHunger, kFeed, kNoNeed) = 1.0;
  m.trans_ref(kDiscomfort, kFeed, kDiscomfort) = 1.0;
  m.trans_ref(kNoNeed, kFeed, kNoNeed) = 1.0;
  m.trans_ref(kHunger, kChange, kHunger) = 1.0;
  m.trans_ref(kDiscomfort, kChange, kNoNeed) = 1.0;
  m.trans_ref(kNoNeed, kChange, kNoNeed) = 1.0;
  m.trans_ref(kHunger, kNothing, kHunger) = 1.0;
  m.trans_ref(kDiscomfort, kNothing, kDiscomfort) = 1.0;
  m.trans_ref(kNoNeed, kNothing, kHunger) = 0.2;
  m.trans_ref(kNoNeed, kNothing, kDiscomfort) = 0.1;
  m.trans_ref(kNoNeed, kNothing, kNoNeed) = 0.7;

  double p_cry[3] = {p.p_cry_hunger, p.p_cry_discomfort, p.p_cry_no_need};
  for (StateId x = 0; x < 3; ++x) {
    m.obs_ref(x, 0) = p_cry[x];
    m.obs_ref(x, 1) = 1.0 - p_cry[x];
    for (ActionId a = 0; a < 3; ++a)
      m.rew_ref(x, a) = (x == a) ? p.r_correct : p.r_wrong;
    m.prior[x] = 1.0 / 3.0;
  }
  m.refresh_r_max();
  if (m.r_max == 0.0) m.r_max = std::fabs(p.r_wrong);
  return m;
}

TabularPomdp build_light_dark(const LightDarkParams& p) {
  if (p.light_cell == p.goal_cell) throw ParamError("light_cell must differ from goal_cell");
  if (!(p.dark_obs_noise > 0.0 && p.dark_obs_noise < 1.0))
    throw ParamError("dark_obs_noise must lie in (0,1)");
  if (p.grid_len < 2 || p.light_cell < 0 || p.light_cell >= p.grid_len ||
      p.goal_cell < 0 || p.goal_cell >= p.grid_len || p.horizon < 1)
    throw ParamError("bad light-dark geometry");
  TabularPomdp m;
  m.num_states = p.grid_len;
  m.num_actions = 2;  // left, right
  m.num_obs = p.grid_len;
  m.horizon_T = p.horizon - 1;
  m.resize_tables();
  for (StateId x = 0; x < p.grid_len; ++x) {
    StateId left = x > 0 ? x - 1 : 0;
    StateId right = x < p.grid_len - 1 ? x + 1 : p.grid_len - 1;
    m.trans_ref(x, 0, left) = 1.0;
    m.trans_ref(x, 1, right) = 1.0;
    if (x == p.light_cell) {
      m.obs_ref(x, x) = 1.0;
    } else {
      // noise mass spread over the neighbouring cells
      m.obs_ref(x, x) = 1.0 - p.dark_obs_noise;
      int nbr = (x > 0 ? 1 : 0) + (x < p.grid_len - 1 ? 1 : 0);
      if (x > 0) m.obs_ref(x, x - 1) += p.dark_obs_noise / nbr;
      if (x < p.grid_len - 1) m.obs_ref(x, x + 1) += p.dark_obs_noise / nbr;
    }
    for (ActionId a = 0; a < 2; ++a)
      m.rew_ref(x, a) = (x == p.goal_cell) ? p.r_goal : p.r_step;
  }
  // start somewhere in the middle of the dark region
  StateId c = p.grid_len / 2;
  m.prior[c - 1] = m.prior[c] = m.prior[c + 1 < p.grid_len ? c + 1 : c - 2] = 1.0 / 3.0;
  m.refresh_r_max();
  return m;
}

TabularPomdp build_rock_sample(const RockSampleParams& p) {
  if (p.num_rocks < 1 || p.num_rocks > 4) throw ParamError("num_rocks must lie in [1,4]");
  if (p.grid_n < 2 || p.grid_n > 5) throw ParamError("grid_n must lie in [2,5]");
  if (p.horizon < 1) throw ParamError("horizon must be >= 1");
  const int cells = p.grid_n * p.grid_n;
  const int combos = 1 << p.num_rocks;
  static const int kRockCells[4][2] = {{0, 0}, {2, 2}, {0, 2}, {2, 0}};
  auto rock_cell = [&](int k) {
    int r = kRockCells[k][0] % p.grid_n, c = kRockCells[k][1] % p.grid_n;
    return r * p.grid_n + c;
  };
  auto dist = [&](int cell_a, int cell_b) {
    return std::abs(cell_a / p.grid_n - cell_b / p.grid_n) +
           std::abs(cell_a % p.grid_n - cell_b % p.grid_n);
  };

  TabularPomdp m;
  m.num_states = cells * combos;  // robot cell x rock goodness bits
  m.num_actions = 5;              // N, S, E, W, sample
  m.num_obs = 2;                  // good-reading, bad-reading of nearest rock
  m.horizon_T = p.horizon - 1;
  m.resize_tables();
  auto sid = [&](int cell, int bits) { return cell * combos + bits; };

  for (int cell = 0; cell < cells; ++cell) {
    int r = cell / p.grid_n, c = cell % p.grid_n;
    int moves[4] = {r > 0 ? cell - p.grid_n : cell, r < p.grid_n - 1 ? cell + p.grid_n : cell,
                    c < p.grid_n - 1 ? cell + 1 : cell, c > 0 ? cell - 1 : cell};
    for (int bits = 0; bits < combos; ++bits) {
      StateId x = sid(cell, bits);
      for (ActionId a = 0; a < 4; ++a) m.trans_ref(x, a, sid(moves[a], bits)) = 1.0;
      // sampling a good rock under the robot turns it bad
      int here = -1;
      for (int k = 0; k < p.num_rocks; ++k)
        if (rock_cell(k) == cell) here = k;
      if (here >= 0 && (bits & (1 << here)))
        m.trans_ref(x, 4, sid(cell, bits & ~(1 << here))) = 1.0;
      else
        m.trans_ref(x, 4, x) = 1.0;
      m.rew_ref(x, 4) = (here >= 0 && (bits & (1 << here))) ? 10.0 : -10.0;

      // sensor reads the nearest rock (ties to the lowest index)
      int best = 0, bd = dist(cell, rock_cell(0));
      for (int k = 1; k < p.num_rocks; ++k) {
        int d = dist(cell, rock_cell(k));
        if (d < bd) best = k, bd = d;
      }
      double acc = 0.5 + 0.5 * p.sensor_efficiency * std::pow(2.0, -bd);
      bool good = bits & (1 << best);
      m.obs_ref(x, 0) = good ? acc : 1.0 - acc;
      m.obs_ref(x, 1) = good ? 1.0 - acc : acc;
    }
  }
  // robot starts at the center; rock goodness iid uniform
  int start = (p.grid_n / 2) * p.grid_n + p.grid_n / 2;
  for (int bits = 0; bits < combos; ++bits) m.prior[sid(start, bits)] = 1.0 / combos;
  m.refresh_r_max();
  return m;
}

TabularPomdp build_env(const std::string& name, int horizon) {
  if (name == "tiger") {
    TigerParams p;
    if (horizon > 0) p.horizon = horizon;
    return build_tiger(p);
  }
  if (name == "baby") {
    BabyParams p;
    if (horizon > 0) p.horizon = horizon;
    return build_baby(p);
  }
  if (name == "lightdark") {
    LightDarkParams p;
    if (horizon > 0) p.horizon = horizon;
    return build_light_dark(p);
  }
  if (name == "rocksample") {
    RockSampleParams p;
    if (horizon > 0) p.horizon = horizon;
    return build_rock_sample(p);
  }
  throw ParamError("unknown environment: " + name);
}

}  // namespace certipomdp
