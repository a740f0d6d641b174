#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "support.hpp"

using namespace certipomdp;
using namespace certipomdp::testing;

namespace {

// fixed listen-always policy of a given depth
PolicyTree listen_policy(const TabularPomdp& m, int t) {
  PolicyTree pi;
  pi.action = 2;
  if (t < m.horizon_T)
    for (ObsId z = 0; z < m.num_obs; ++z) pi.children.emplace(z, listen_policy(m, t + 1));
  return pi;
}

PolicyTree constant_policy(const TabularPomdp& m, ActionId a, int t) {
  PolicyTree pi;
  pi.action = a;
  if (t < m.horizon_T)
    for (ObsId z = 0; z < m.num_obs; ++z) pi.children.emplace(z, constant_policy(m, a, t + 1));
  return pi;
}

}  // namespace

TEST_CASE("base case: belief at the final step maximizes immediate reward") {
  TabularPomdp m = build_tiger();
  Belief b = Belief::point_mass(1, m.horizon_T);  // tiger right, last action
  OracleResult r = exact_optimal_value(m, b);
  CHECK(r.value == doctest::Approx(10.0));
  CHECK(r.action == 0);  // open left
  CHECK(r.policy.children.empty());
}

TEST_CASE("tiger one action from the uniform prior: listen") {
  TabularPomdp m = build_tiger({0.85, -1, -100, 10, 1});
  OracleResult r = exact_optimal_value(m, Belief::from_prior(m));
  CHECK(r.value == doctest::Approx(-1.0));
  CHECK(r.action == 2);
}

TEST_CASE("tiger two actions: V* = -2 (listen twice beats guessing)") {
  TabularPomdp m = build_tiger({0.85, -1, -100, 10, 2});
  OracleResult r = exact_optimal_value(m, Belief::from_prior(m));
  CHECK(r.value == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(r.action == 2);
}

TEST_CASE("zero rewards give zero value and the lowest-id action") {
  TabularPomdp m = build_tiger();
  for (double& r : m.reward) r = 0.0;
  m.refresh_r_max();
  OracleResult r = exact_optimal_value(m, Belief::from_prior(m));
  CHECK(r.value == doctest::Approx(0.0));
  CHECK(r.action == 0);
}

TEST_CASE("policy evaluation: always open-left over two steps") {
  TabularPomdp m = build_tiger({0.85, -1, -100, 10, 2});
  PolicyTree pi = constant_policy(m, 0, 0);
  // each step costs (-100 + 10)/2 from the uniform (re-reset) belief
  CHECK(exact_policy_value(m, Belief::from_prior(m), pi) == doctest::Approx(-90.0));
}

TEST_CASE("policy evaluation matches the optimum for the optimal tree") {
  for (int horizon : {1, 2, 3}) {
    TabularPomdp m = build_tiger({0.85, -1, -100, 10, horizon});
    Belief b = Belief::from_prior(m);
    OracleResult r = exact_optimal_value(m, b);
    CHECK(exact_policy_value(m, b, r.policy) == doctest::Approx(r.value).epsilon(1e-12));
  }
}

TEST_CASE("no random policy beats the oracle") {
  Rng rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    TabularPomdp m = random_pomdp(rng, 3, 2, 2, 2);
    Belief b = Belief::from_prior(m);
    double vstar = exact_optimal_value(m, b).value;
    PolicyTree pi = random_policy(rng, m, 0);
    CHECK(exact_policy_value(m, b, pi) <= vstar + 1e-9);
  }
}

TEST_CASE("policy evaluation rejects missing positive-probability branches") {
  TabularPomdp m = build_tiger({0.85, -1, -100, 10, 2});
  PolicyTree pi;
  pi.action = 2;  // listen but no reaction subtree
  CHECK_THROWS_AS(exact_policy_value(m, Belief::from_prior(m), pi), IncompletePolicy);
}

TEST_CASE("trajectory enumeration under listen-listen") {
  TabularPomdp m = build_tiger({0.85, -1, -100, 10, 3});
  PolicyTree pi = listen_policy(m, 0);
  std::vector<Trajectory> taus = enumerate_trajectories(m, pi, 2);
  // slices: 2 roots, 4 at t=1 (listen keeps the state), 8 at t=2
  std::map<int, int> count;
  std::map<int, double> mass;
  for (const Trajectory& tau : taus) {
    count[tau.time()]++;
    mass[tau.time()] += tau.weight;
  }
  CHECK(count[0] == 2);
  CHECK(count[1] == 4);
  CHECK(count[2] == 8);
  for (int t = 0; t <= 2; ++t) CHECK(mass[t] == doctest::Approx(1.0).epsilon(1e-12));
  // a specific weight: stay left, hear left twice = .5 * .85 * .85
  bool found = false;
  for (const Trajectory& tau : taus)
    if (tau.time() == 2 && tau.states == std::vector<StateId>{0, 0, 0} &&
        tau.history.observations == std::vector<ObsId>{0, 0}) {
      CHECK(tau.weight == doctest::Approx(0.36125).epsilon(1e-12));
      found = true;
    }
  CHECK(found);
}

TEST_CASE("every enumerated slice sums to one for random models and policies") {
  Rng rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    TabularPomdp m = random_pomdp(rng, 3, 2, 3, 3);
    PolicyTree pi = random_policy(rng, m, 0);
    std::map<int, double> mass;
    for (const Trajectory& tau : enumerate_trajectories(m, pi, 3)) {
      CHECK(tau.weight > 0.0);
      mass[tau.time()] += tau.weight;
    }
    for (int t = 0; t <= 3; ++t) CHECK(mass[t] == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("oracle value equals the trajectory-sum of rewards under its policy") {
  Rng rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    TabularPomdp m = random_pomdp(rng, 3, 2, 2, 3);
    Belief b = Belief::from_prior(m);
    OracleResult r = exact_optimal_value(m, b);
    // V = sum over slices of expected reward of the slice's prescribed action
    double v = 0.0;
    for (const Trajectory& tau : enumerate_trajectories(m, r.policy, m.horizon_T)) {
      const PolicyTree* node = &r.policy;
      for (int k = 0; k < tau.time(); ++k)
        node = &node->children.at(tau.history.observations[k]);
      v += tau.weight * m.rew(tau.states.back(), node->action);
    }
    CHECK(v == doctest::Approx(r.value).epsilon(1e-9));
  }
}

TEST_CASE("expansion guard trips on an intractable instance") {
  Rng rng(3);
  TabularPomdp m = random_pomdp(rng, 5, 4, 5, 12);
  CHECK_THROWS_AS(exact_optimal_value(m, Belief::from_prior(m)), TooLarge);
}
