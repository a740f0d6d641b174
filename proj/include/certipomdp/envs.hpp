#pragma once

#include <string>

#include "certipomdp/model.hpp"

namespace certipomdp {

// Benchmark scenario builders. The "horizon" parameter counts actions per
// episode; built models have horizon_T = horizon - 1.

struct TigerParams {
  double listen_accuracy = 0.85;
  double r_listen = -1.0;
  double r_tiger = -100.0;
  double r_treasure = 10.0;
  int horizon = 5;
};

struct BabyParams {
  double p_cry_hunger = 0.8;
  double p_cry_discomfort = 0.9;
  double p_cry_no_need = 0.1;
  double r_correct = 0.0;
  double r_wrong = -5.0;
  int horizon = 5;
};

struct LightDarkParams {
  int grid_len = 7;
  int light_cell = 5;
  int goal_cell = 0;
  double dark_obs_noise = 0.4;
  double r_step = -1.0;
  double r_goal = 10.0;
  int horizon = 5;
};

struct RockSampleParams {
  int grid_n = 3;
  int num_rocks = 2;
  double sensor_efficiency = 1.0;  // accuracy at distance 0; decays by 2^-dist
  int horizon = 5;
};

// Tiger: states {0: tiger-left, 1: tiger-right}, actions {0: open-left,
// 1: open-right, 2: listen}, observations {0: hear-left, 1: hear-right}.
// Opening a door resets the tiger position uniformly.
TabularPomdp build_tiger(const TigerParams& p = {});

// Baby: states {0: hunger, 1: discomfort, 2: no-need}, actions {0: feed,
// 1: change, 2: nothing}, observations {0: cry, 1: quiet}.
TabularPomdp build_baby(const BabyParams& p = {});

// Light Dark: 1D grid, states = cells, actions {0: left, 1: right},
// observations = perceived cell. Exact observation in the light cell.
TabularPomdp build_light_dark(const LightDarkParams& p = {});

// Rock Sample (desk-scale variant): state = robot cell x rock goodness bits,
// actions {N,S,E,W,sample}, observations {good-reading, bad-reading} of the
// nearest rock, accuracy decaying with distance by 2^-dist.
TabularPomdp build_rock_sample(const RockSampleParams& p = {});

/// Builds an environment by name {tiger|baby|lightdark|rocksample}; horizon
/// <= 0 keeps the scenario default.
TabularPomdp build_env(const std::string& name, int horizon = 0);

}  // namespace certipomdp
