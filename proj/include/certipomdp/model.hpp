#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace certipomdp {

using StateId = int;
using ActionId = int;
using ObsId = int;
using TrajId = std::uint64_t;

// Tolerances: model tables are validated tightly, runtime accumulation over
// multi-step horizons gets the looser one.
inline constexpr double kModelTol = 1e-12;
inline constexpr double kRuntimeTol = 1e-9;

struct ZeroLikelihood : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IncompletePolicy : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PrefixViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParamError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CertificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Discrete POMDP given as explicit probability tables with dense integer
/// ids. Actions are taken at time steps 0..horizon_T; each action a_t is
/// followed by an observation z_{t+1}. Immutable after construction.
struct TabularPomdp {
  int num_states = 0;
  int num_actions = 0;
  int num_obs = 0;
  int horizon_T = 0;  // last time step at which an action is taken
  std::vector<double> transition;   // [x][a][x'] = P(x'|x,a)
  std::vector<double> observation;  // [x][z]     = P(z|x)
  std::vector<double> reward;       // [x][a]
  std::vector<double> prior;        // b_0
  double r_max = 0.0;
  double discount = 1.0;

  double trans(StateId x, ActionId a, StateId xp) const {
    return transition[(static_cast<std::size_t>(x) * num_actions + a) * num_states + xp];
  }
  double obs(StateId x, ObsId z) const {
    return observation[static_cast<std::size_t>(x) * num_obs + z];
  }
  double rew(StateId x, ActionId a) const {
    return reward[static_cast<std::size_t>(x) * num_actions + a];
  }
  double& trans_ref(StateId x, ActionId a, StateId xp) {
    return transition[(static_cast<std::size_t>(x) * num_actions + a) * num_states + xp];
  }
  double& obs_ref(StateId x, ObsId z) {
    return observation[static_cast<std::size_t>(x) * num_obs + z];
  }
  double& rew_ref(StateId x, ActionId a) {
    return reward[static_cast<std::size_t>(x) * num_actions + a];
  }

  /// Number of actions remaining for a belief at time t (t <= horizon_T).
  int steps_remaining(int t) const { return horizon_T - t + 1; }

  void resize_tables() {
    transition.assign(static_cast<std::size_t>(num_states) * num_actions * num_states, 0.0);
    observation.assign(static_cast<std::size_t>(num_states) * num_obs, 0.0);
    reward.assign(static_cast<std::size_t>(num_states) * num_actions, 0.0);
    prior.assign(num_states, 0.0);
  }
  /// Recomputes r_max from the reward table.
  void refresh_r_max();
};

/// Sparse normalized belief over states; zero-mass states are absent.
struct Belief {
  std::map<StateId, double> probs;
  int time_t = 0;

  double at(StateId x) const {
    auto it = probs.find(x);
    return it == probs.end() ? 0.0 : it->second;
  }
  static Belief point_mass(StateId x, int t = 0) {
    Belief b;
    b.probs[x] = 1.0;
    b.time_t = t;
    return b;
  }
  static Belief from_prior(const TabularPomdp& m);
};

/// Action/observation sequence. A posterior history has equal action and
/// observation counts; a propagated history has one extra action.
struct History {
  std::vector<ActionId> actions;
  std::vector<ObsId> observations;

  bool operator==(const History&) const = default;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Incremental 64-bit trajectory fingerprint. The root id depends on x0;
/// every extension folds in (action, observation, next state).
TrajId trajectory_root_id(StateId x0);
TrajId trajectory_extend_id(TrajId parent, ActionId a, ObsId z, StateId xp);

/// A concrete state path with its history and unnormalized probability
/// P(tau) = b0(x0) * prod_k O(z_k|x_k) T(x_k|x_{k-1},a_{k-1}).
struct Trajectory {
  std::vector<StateId> states;
  History history;
  double weight = 0.0;
  TrajId id = 0;

  int time() const { return static_cast<int>(states.size()) - 1; }
  static Trajectory start(StateId x0, double prior_mass) {
    Trajectory t;
    t.states.push_back(x0);
    t.weight = prior_mass;
    t.id = trajectory_root_id(x0);
    return t;
  }
};

/// Exact Bayes update. Returns the normalized posterior and the normalizer
/// P(z | b, a). Throws ZeroLikelihood when the observation has zero mass.
std::pair<Belief, double> belief_update(const TabularPomdp& m, const Belief& b,
                                        ActionId a, ObsId z);

/// Expected immediate reward sum_x b(x) r(x,a).
double belief_reward(const TabularPomdp& m, const Belief& b, ActionId a);

/// Appends (a, z, x') to a trajectory, scaling its weight by O(z|x')T(x'|x,a).
Trajectory trajectory_extend(const TabularPomdp& m, const Trajectory& tau,
                             ActionId a, ObsId z, StateId xp);

/// Checks every TabularPomdp invariant; returns human-readable violations.
std::vector<std::string> validate_model(const TabularPomdp& m);

// Plain-text "pomdp v1" tabular format; decimal round-trip stable at 17
// significant digits.
void save_model(const TabularPomdp& m, std::ostream& out);
void save_model_file(const TabularPomdp& m, const std::string& path);
TabularPomdp load_model(std::istream& in);
TabularPomdp load_model_file(const std::string& path);

}  // namespace certipomdp
