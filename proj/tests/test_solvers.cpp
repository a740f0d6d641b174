#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "certipomdp/solvers.hpp"
#include "support.hpp"

using namespace certipomdp;
using namespace certipomdp::testing;

namespace {

SolverConfig basic(SolverKind kind, std::int64_t iters, std::uint64_t seed) {
  SolverConfig cfg;
  cfg.kind = kind;
  cfg.iterations_max = iters;
  cfg.seed = seed;
  return cfg;
}

bool same_result(const PlanResult& a, const PlanResult& b) {
  if (a.chosen_action != b.chosen_action) return false;
  if (a.certified_optimal != b.certified_optimal) return false;
  if (a.iterations_used != b.iterations_used) return false;
  if (a.root_interval.lower != b.root_interval.lower) return false;
  if (a.root_interval.upper != b.root_interval.upper) return false;
  if (a.pruned != b.pruned) return false;
  if (a.action_intervals.size() != b.action_intervals.size()) return false;
  for (const auto& [act, iv] : a.action_intervals) {
    auto it = b.action_intervals.find(act);
    if (it == b.action_intervals.end()) return false;
    if (iv.lower != it->second.lower || iv.upper != it->second.upper) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("solver names round-trip") {
  for (const char* n : {"pomcp", "db-pomcp", "rb-pomcp", "udb-full", "exact"})
    CHECK(solver_kind_name(solver_kind_from_name(n)) == n);
  CHECK_THROWS_AS(solver_kind_from_name("magic"), ParamError);
}

TEST_CASE("single-action model: every solver picks it and brackets its value") {
  TabularPomdp m;
  m.num_states = 2;
  m.num_actions = 1;
  m.num_obs = 2;
  m.horizon_T = 2;
  m.resize_tables();
  for (StateId x = 0; x < 2; ++x) {
    m.trans_ref(x, 0, x) = 1.0;
    m.obs_ref(x, x) = 0.7;
    m.obs_ref(x, 1 - x) = 0.3;
    m.rew_ref(x, 0) = x == 0 ? 1.0 : -1.0;
  }
  m.prior = {0.5, 0.5};
  m.refresh_r_max();
  double vstar = exact_optimal_value(m, Belief::from_prior(m)).value;
  CHECK(vstar == doctest::Approx(0.0));
  for (SolverKind k :
       {SolverKind::kPomcp, SolverKind::kDbPomcp, SolverKind::kRbPomcp, SolverKind::kUdbFull}) {
    PlanResult pr = plan(m, Belief::from_prior(m), basic(k, 500, 3));
    CHECK(pr.chosen_action == 0);
    CHECK(pr.root_interval.lower <= vstar + kRuntimeTol);
    CHECK(pr.root_interval.upper >= vstar - kRuntimeTol);
  }
}

TEST_CASE("uct variants visit every action before revisiting any") {
  TabularPomdp m = build_tiger({0.85, -1, -100, 10, 2});
  SolverConfig cfg = basic(SolverKind::kPomcp, 3, 5);
  int root_children = 0;
  std::int64_t max_visits = 0;
  cfg.inspect_tree = [&](const BeliefTree& tree) {
    root_children = static_cast<int>(tree.root.children.size());
    for (const auto& [a, ha] : tree.root.children) {
      (void)a;
      max_visits = std::max(max_visits, ha.visits);
    }
  };
  pomcp_plan(m, Belief::from_prior(m), cfg);
  // after exactly num_actions iterations each root action was tried once
  CHECK(root_children == 3);
  CHECK(max_visits == 1);
}

TEST_CASE("tiger with five actions: all solvers choose listen first") {
  TabularPomdp m = build_tiger();
  Belief b = Belief::from_prior(m);
  OracleResult oracle = exact_optimal_value(m, b);
  CHECK(oracle.action == 2);
  CHECK(db_pomcp_plan(m, b, basic(SolverKind::kDbPomcp, 4000, 7)).chosen_action == 2);
  CHECK(rb_pomcp_plan(m, b, basic(SolverKind::kRbPomcp, 20000, 7)).chosen_action == 2);
  CHECK(pomcp_plan(m, b, basic(SolverKind::kPomcp, 4000, 7)).chosen_action == 2);
}

TEST_CASE("db-pomcp certifies listen on the two-step tiger") {
  TabularPomdp m = build_tiger({0.85, -1, -100, 10, 2});
  PlanResult pr = db_pomcp_plan(m, Belief::from_prior(m), basic(SolverKind::kDbPomcp, 50000, 11));
  CHECK(pr.certified_optimal);
  CHECK(pr.chosen_action == 2);
  CHECK(pr.pruned == std::set<ActionId>{0, 1});
  certify(pr, -2.0, 2);  // throws on violation
}

TEST_CASE("rb-pomcp collapses to the oracle at tight target widths") {
  for (int horizon : {1, 2, 3}) {
    TabularPomdp m = build_tiger({0.85, -1, -100, 10, horizon});
    Belief b = Belief::from_prior(m);
    OracleResult oracle = exact_optimal_value(m, b);
    SolverConfig cfg = basic(SolverKind::kRbPomcp, 1'000'000, 13);
    cfg.stop_on_certified = false;
    cfg.target_width = 1e-9;
    PlanResult pr = rb_pomcp_plan(m, b, cfg);
    INFO("horizon ", horizon);
    CHECK(pr.root_interval.width() <= 1e-9);
    CHECK(pr.root_interval.lower <= oracle.value + kRuntimeTol);
    CHECK(pr.root_interval.upper >= oracle.value - kRuntimeTol);
    CHECK(pr.chosen_action == oracle.action);
  }
}

TEST_CASE("rb-pomcp certifies within a small multiple of the trajectory count") {
  BabyParams p;
  p.horizon = 3;
  TabularPomdp m = build_baby(p);
  std::size_t count = count_positive_trajectories(m, m.horizon_T);
  SolverConfig cfg = basic(SolverKind::kRbPomcp, static_cast<std::int64_t>(10 * count), 17);
  cfg.stop_on_certified = false;
  cfg.target_width = 1e-6;
  PlanResult pr = rb_pomcp_plan(m, Belief::from_prior(m), cfg);
  CHECK(pr.root_interval.width() <= 1e-6);
  CHECK(pr.iterations_used <= static_cast<std::int64_t>(10 * count));
  OracleResult oracle = exact_optimal_value(m, Belief::from_prior(m));
  certify(pr, oracle.value, oracle.action);
}

TEST_CASE("a single iteration still yields a sound (wide) interval") {
  TabularPomdp m = build_tiger();
  OracleResult oracle = exact_optimal_value(m, Belief::from_prior(m));
  PlanResult pr = rb_pomcp_plan(m, Belief::from_prior(m), basic(SolverKind::kRbPomcp, 1, 19));
  CHECK(pr.iterations_used == 1);
  CHECK(pr.root_interval.lower <= oracle.value + kRuntimeTol);
  CHECK(pr.root_interval.upper >= oracle.value - kRuntimeTol);
  CHECK(!pr.certified_optimal);
  CHECK(pr.action_intervals.size() == 3);  // unexpanded arms carry slack intervals
}

TEST_CASE("full-belief planner collapses onto the oracle") {
  for (const char* env : {"tiger", "lightdark"}) {
    for (int horizon : {1, 2, 3}) {
      TabularPomdp m = build_env(env, horizon);
      Belief b = Belief::from_prior(m);
      OracleResult oracle = exact_optimal_value(m, b);
      SolverConfig cfg = basic(SolverKind::kUdbFull, 100000, 1);
      cfg.stop_on_certified = false;
      cfg.target_width = 1e-9;
      PlanResult pr = udb_full_belief_plan(m, b, cfg);
      INFO(env, " horizon ", horizon);
      CHECK(pr.root_interval.width() <= 1e-9);
      CHECK(pr.root_interval.lower <= oracle.value + kRuntimeTol);
      CHECK(pr.root_interval.upper >= oracle.value - kRuntimeTol);
      CHECK(pr.chosen_action == oracle.action);
    }
  }
}

TEST_CASE("full-belief planner certifies early when one arm dominates") {
  TabularPomdp m = build_tiger({0.85, -1, -100, 10, 2});
  SolverConfig cfg = basic(SolverKind::kUdbFull, 100000, 1);
  PlanResult pr = udb_full_belief_plan(m, Belief::from_prior(m), cfg);
  CHECK(pr.certified_optimal);
  CHECK(pr.chosen_action == 2);
  CHECK(pr.iterations_used < 100);  // certification needs only a handful of expansions
}

TEST_CASE("one-observation model makes the search effectively open-loop") {
  TabularPomdp m = build_tiger({0.85, -1, -100, 10, 2});
  // merge the two observations into one uninformative signal
  for (StateId x = 0; x < m.num_states; ++x) {
    m.obs_ref(x, 0) = 1.0;
    m.obs_ref(x, 1) = 0.0;
  }
  double vstar = exact_optimal_value(m, Belief::from_prior(m)).value;
  SolverConfig cfg = basic(SolverKind::kUdbFull, 100000, 1);
  cfg.stop_on_certified = false;
  cfg.target_width = 1e-9;
  PlanResult pr = udb_full_belief_plan(m, Belief::from_prior(m), cfg);
  CHECK(pr.root_interval.upper == doctest::Approx(vstar).epsilon(1e-9));
  CHECK(pr.root_interval.lower == doctest::Approx(vstar).epsilon(1e-9));
}

TEST_CASE("certify flags intervals that miss the oracle value") {
  PlanResult good;
  good.chosen_action = 2;
  good.root_interval = {-3.0, -1.0};
  good.certified_optimal = true;
  CertifyReport rep = certify(good, -2.0, 2);
  CHECK(rep.sandwich_ok);
  CHECK(rep.action_ok);
  CHECK(rep.lower_margin == doctest::Approx(1.0));
  CHECK(rep.upper_margin == doctest::Approx(1.0));

  PlanResult bad_interval = good;
  bad_interval.root_interval = {-1.5, -1.0};  // lower bound above V*
  CHECK_THROWS_AS(certify(bad_interval, -2.0, 2), CertificationFailure);

  PlanResult bad_action = good;
  bad_action.chosen_action = 0;
  CHECK_THROWS_AS(certify(bad_action, -2.0, 2), CertificationFailure);

  // an uncertified wrong action is not an error: only certificates bind
  bad_action.certified_optimal = false;
  CHECK_NOTHROW(certify(bad_action, -2.0, 2));
}

TEST_CASE("identical configurations reproduce identical plans bit for bit") {
  for (SolverKind k : {SolverKind::kPomcp, SolverKind::kDbPomcp, SolverKind::kRbPomcp}) {
    TabularPomdp m = build_baby();
    SolverConfig cfg = basic(k, 700, 23);
    PlanResult one = plan(m, Belief::from_prior(m), cfg);
    PlanResult two = plan(m, Belief::from_prior(m), cfg);
    CHECK(same_result(one, two));
  }
}

TEST_CASE("per-iteration root bounds always bracket the oracle value") {
  struct Case {
    const char* env;
    int horizon;
  };
  for (Case c : {Case{"tiger", 2}, Case{"tiger", 3}, Case{"baby", 3}, Case{"lightdark", 2}}) {
    TabularPomdp m = build_env(c.env, c.horizon);
    Belief b = Belief::from_prior(m);
    double vstar = exact_optimal_value(m, b).value;
    SolverConfig cfg = basic(SolverKind::kRbPomcp, 3000, 29);
    int violations = 0;
    cfg.trace = [&](std::int64_t, int, double, double u, double l) {
      if (l > vstar + kRuntimeTol || u < vstar - kRuntimeTol) ++violations;
    };
    rb_pomcp_plan(m, b, cfg);
    INFO(c.env, " horizon ", c.horizon);
    CHECK(violations == 0);
  }
}

TEST_CASE("pruning never removes an oracle-optimal action (spot sample)") {
  Rng rng(41);
  for (int rep = 0; rep < 60; ++rep) {
    TabularPomdp m = random_pomdp(rng, 3, 3, 2, 2);
    Belief b = Belief::from_prior(m);
    OracleResult oracle = exact_optimal_value(m, b);
    // collect every action tied with the optimum
    std::set<ActionId> best;
    for (ActionId a = 0; a < m.num_actions; ++a)
      if (oracle_q(m, b, a) >= oracle.value - 1e-9) best.insert(a);
    SolverConfig cfg = basic(SolverKind::kRbPomcp, 50 + static_cast<std::int64_t>(rep) * 7,
                             1000 + static_cast<std::uint64_t>(rep));
    PlanResult pr = rb_pomcp_plan(m, b, cfg);
    for (ActionId a : pr.pruned) CHECK(!best.count(a));
  }
}
