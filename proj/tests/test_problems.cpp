#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "helpers.hpp"
#include "sgbs/cvrp.hpp"
#include "sgbs/ffsp.hpp"
#include "sgbs/generator.hpp"
#include "sgbs/tsp.hpp"

using namespace sgbs;
using sgbs::testing::random_solution;
using sgbs::testing::random_state;
using sgbs::testing::unit_square_corners;

namespace {

FfspInstance tiny_ffsp() {
  // 3 jobs, 2 stages x 2 machines.
  FfspStage s0{{{3, 2, 4}, {2, 5, 3}}};
  FfspStage s1{{{4, 3, 2}, {3, 2, 5}}};
  return FfspInstance(3, {s0, s1});
}

}  // namespace

TEST_CASE("tsp feasible actions are the unvisited complement") {
  TspInstance inst = unit_square_corners();
  TspState s = TspProblem::initial_state(inst);
  s = TspProblem::apply_action(s, 1);
  std::vector<Action> acts;
  TspProblem::feasible_actions(s, acts);
  CHECK(acts == std::vector<Action>{2, 3});
}

TEST_CASE("tsp apply_action tracks current node and depth") {
  TspInstance inst = unit_square_corners();
  TspState s = TspProblem::initial_state(inst);
  TspState next = TspProblem::apply_action(s, 3);
  CHECK(next.assigned == std::vector<Action>{3});
  CHECK(next.current == 3);
  CHECK(next.depth() == 1);
  CHECK(s.depth() == 0);  // immutability
  CHECK_THROWS_AS(TspProblem::apply_action(next, 3), std::invalid_argument);
}

TEST_CASE("tsp reward: unit square perimeter and infeasible tuples") {
  TspInstance inst = unit_square_corners();
  CHECK(TspProblem::reward(inst, std::vector<Action>{1, 2, 3}) == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(TspProblem::reward(inst, std::vector<Action>{1, 1, 3}) == kInfeasibleReward);
  CHECK(TspProblem::reward(inst, std::vector<Action>{1, 2}) == kInfeasibleReward);
  CHECK(TspProblem::reward(inst, std::vector<Action>{1, 2, 9}) == kInfeasibleReward);
}

TEST_CASE("tsp reward is invariant under tour rotation and reversal") {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    TspInstance inst = generate_tsp({8}, 101, rep);
    Solution sol = random_solution<TspProblem>(inst, rng);
    // Rebuild the node cycle, rotate, re-root at node 0, compare rewards.
    std::vector<int> cycle{0};
    cycle.insert(cycle.end(), sol.actions.begin(), sol.actions.end());
    const int n = static_cast<int>(cycle.size());
    for (int shift = 1; shift < n; ++shift) {
      std::vector<int> rot(cycle.begin(), cycle.end());
      std::rotate(rot.begin(), rot.begin() + shift, rot.end());
      auto zero = std::find(rot.begin(), rot.end(), 0);
      std::rotate(rot.begin(), zero, rot.end());
      std::vector<Action> acts(rot.begin() + 1, rot.end());
      CHECK(TspProblem::reward(inst, acts) == doctest::Approx(sol.reward).epsilon(1e-12));
    }
    std::vector<Action> rev(sol.actions.rbegin(), sol.actions.rend());
    CHECK(TspProblem::reward(inst, rev) == doctest::Approx(sol.reward).epsilon(1e-12));
  }
}

TEST_CASE("tsp replay consistency: cached state equals recomputation from assigned") {
  Rng rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    TspInstance inst = generate_tsp({10}, 55, rep);
    TspState s = random_state<TspProblem>(inst, static_cast<int>(rng.next_int(0, 9)), rng);
    std::set<int> expect_visited{0};
    for (Action a : s.assigned) expect_visited.insert(a);
    CHECK(s.visited_count == static_cast<int>(expect_visited.size()));
    for (int j = 0; j < inst.size(); ++j)
      CHECK(static_cast<bool>(s.visited[j]) == (expect_visited.count(j) > 0));
    CHECK(s.current == (s.assigned.empty() ? 0 : s.assigned.back()));
    CHECK(s.depth() == static_cast<int>(s.assigned.size()));
  }
}

TEST_CASE("cvrp feasible actions respect capacity, depot excluded at depot") {
  // Demands {5, 2, 4}, capacity 7. Serving customer 3 leaves load 3 with
  // unvisited demands {5, 2}: only the depot and the demand-2 customer fit.
  CvrpInstance inst({0, 0}, {{0.2, 0.2}, {0.8, 0.8}, {0.5, 0.1}}, {5, 2, 4}, 7);
  CvrpState s = CvrpProblem::initial_state(inst);
  std::vector<Action> acts;
  CvrpProblem::feasible_actions(s, acts);
  CHECK(acts == std::vector<Action>{1, 2, 3});  // at depot: no depot action
  s = CvrpProblem::apply_action(s, 3);
  CHECK(s.load == 3);
  CvrpProblem::feasible_actions(s, acts);
  CHECK(acts == std::vector<Action>{0, 2});
}

TEST_CASE("cvrp apply: serving a customer reduces load, depot restores it") {
  CvrpInstance inst({0.5, 0.5}, {{0.1, 0.1}, {0.9, 0.9}, {0.2, 0.8}}, {4, 3, 2}, 10);
  CvrpState s = CvrpProblem::initial_state(inst);
  s = CvrpProblem::apply_action(s, 1);
  CHECK(s.load == 6);
  s = CvrpProblem::apply_action(s, 0);
  CHECK(s.load == 10);
  CHECK(s.current == 0);
  CHECK_THROWS_AS(CvrpProblem::apply_action(s, 0), std::invalid_argument);
}

TEST_CASE("cvrp reward: out-and-back single customer") {
  CvrpInstance inst({0, 0}, {{0.5, 0.5}}, {3}, 30);
  const double expect = -std::sqrt(2.0) * 0.5 * 2.0;  // 2 * d(depot, c) with d = sqrt(0.5)
  CHECK(CvrpProblem::reward(inst, std::vector<Action>{1}) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("cvrp reward: capacity breach and uncovered customers are infeasible") {
  CvrpInstance inst({0, 0}, {{0.1, 0.1}, {0.9, 0.9}}, {6, 6}, 10);
  CHECK(CvrpProblem::reward(inst, std::vector<Action>{1, 2}) == kInfeasibleReward);  // 12 > 10
  CHECK(CvrpProblem::reward(inst, std::vector<Action>{1}) == kInfeasibleReward);     // 2 unserved
  CHECK(is_feasible_reward(CvrpProblem::reward(inst, std::vector<Action>{1, 0, 2})));
}

TEST_CASE("cvrp reward equals per-route decomposition; depot-depot never improves") {
  Rng rng(21);
  for (int rep = 0; rep < 30; ++rep) {
    CvrpInstance inst = generate_cvrp({6}, 77, rep);
    Solution sol = random_solution<CvrpProblem>(inst, rng);
    // Decompose at depot markers and re-add per-route out-and-back legs.
    double total = 0.0;
    std::vector<int> route;
    auto flush = [&]() {
      if (route.empty()) return;
      total += inst.d(0, route.front());
      for (std::size_t i = 0; i + 1 < route.size(); ++i) total += inst.d(route[i], route[i + 1]);
      total += inst.d(route.back(), 0);
      route.clear();
    };
    for (Action a : sol.actions) {
      if (a == 0)
        flush();
      else
        route.push_back(a);
    }
    flush();
    CHECK(sol.reward == doctest::Approx(-total).epsilon(1e-12));

    // Insert a redundant depot-depot step right after an existing depot visit.
    for (std::size_t i = 0; i < sol.actions.size(); ++i) {
      if (sol.actions[i] == 0) {
        std::vector<Action> padded = sol.actions;
        padded.insert(padded.begin() + static_cast<std::ptrdiff_t>(i), 0);
        CHECK(CvrpProblem::reward(inst, padded) <= sol.reward + 1e-12);
        break;
      }
    }
  }
}

TEST_CASE("cvrp replay consistency") {
  Rng rng(31);
  for (int rep = 0; rep < 50; ++rep) {
    CvrpInstance inst = generate_cvrp({8}, 31, rep);
    CvrpState s = random_state<CvrpProblem>(inst, static_cast<int>(rng.next_int(0, 12)), rng);
    int load = inst.capacity;
    int cur = 0;
    std::set<int> visited;
    for (Action a : s.assigned) {
      if (a == 0) {
        load = inst.capacity;
      } else {
        load -= inst.demand(a);
        visited.insert(a);
      }
      cur = a;
    }
    CHECK(s.load == load);
    CHECK(s.current == cur);
    CHECK(s.visited_count == static_cast<int>(visited.size()));
  }
}

TEST_CASE("ffsp precedence: job not finished at previous stage is not schedulable") {
  FfspInstance inst = tiny_ffsp();
  FfspState s = FfspProblem::initial_state(inst);
  // Schedule stage 0 fully: machine 0 gets job 0, machine 1 gets job 1, then job 2.
  s = FfspProblem::apply_action(s, 0);
  s = FfspProblem::apply_action(s, 1);
  s = FfspProblem::apply_action(s, 2);
  CHECK(s.stage == 1);
  // Stage 1 machines start at 0; no job has finished stage 0 by t=0, so
  // only the no-op is available until the machines advance.
  std::vector<Action> acts;
  FfspProblem::feasible_actions(s, acts);
  CHECK(acts == std::vector<Action>{3});  // no-op token == num_jobs
}

TEST_CASE("ffsp no-op advances the cursor machine to the next event") {
  FfspInstance inst = tiny_ffsp();
  FfspState s = FfspProblem::initial_state(inst);
  s = FfspProblem::apply_action(s, 0);  // machine 0 busy until t=3
  // Cursor now machine 1 (t=0). Events: machine 0 at t=3. No-op advances to 3.
  CHECK(s.cursor_machine == 1);
  FfspState after = FfspProblem::apply_action(s, 3);
  CHECK(after.machine_avail[1] == 3);
}

TEST_CASE("ffsp makespan equals max final-stage completion") {
  Rng rng(41);
  for (int rep = 0; rep < 30; ++rep) {
    FfspInstance inst = generate_ffsp({4, {2, 2}, 2, 9}, 13, rep);
    Solution sol = random_solution<FfspProblem>(inst, rng);
    REQUIRE(is_feasible_reward(sol.reward));
    FfspState end = replay_state<FfspProblem>(inst, sol.actions);
    REQUIRE(FfspProblem::is_terminal(end));
    int makespan = 0;
    for (int c : end.ready) makespan = std::max(makespan, c);
    CHECK(sol.reward == doctest::Approx(-static_cast<double>(makespan)));
  }
}

TEST_CASE("ffsp schedules satisfy machine-exclusivity and stage precedence") {
  // Re-derive per-action intervals by replay and validate the schedule
  // against the problem definition, independent of the step() internals.
  Rng rng(43);
  for (int rep = 0; rep < 25; ++rep) {
    FfspInstance inst = generate_ffsp({5, {2, 3}, 2, 9}, 99, rep);
    Solution sol = random_solution<FfspProblem>(inst, rng);
    struct Interval {
      int stage, machine, job, start, end;
    };
    std::vector<Interval> ivs;
    std::vector<std::vector<int>> job_end(inst.num_stages(), std::vector<int>(inst.num_jobs, -1));
    FfspState s = FfspProblem::initial_state(inst);
    for (Action a : sol.actions) {
      const int stage = s.stage;
      const int m = s.cursor_machine;
      const int before = s.machine_avail[m];
      FfspState next = FfspProblem::apply_action(s, a);
      if (a < inst.num_jobs) {
        const int end = before + inst.proc_time(stage, m, a);
        ivs.push_back({stage, m, a, before, end});
        job_end[stage][a] = end;
      }
      s = std::move(next);
    }
    // Every job scheduled exactly once per stage.
    for (int k = 0; k < inst.num_stages(); ++k)
      for (int j = 0; j < inst.num_jobs; ++j) REQUIRE(job_end[k][j] >= 0);
    // Machine exclusivity within each (stage, machine).
    for (std::size_t i = 0; i < ivs.size(); ++i)
      for (std::size_t j = i + 1; j < ivs.size(); ++j) {
        if (ivs[i].stage == ivs[j].stage && ivs[i].machine == ivs[j].machine) {
          const bool disjoint = ivs[i].end <= ivs[j].start || ivs[j].end <= ivs[i].start;
          CHECK(disjoint);
        }
      }
    // Precedence: stage-k start >= stage-(k-1) completion.
    for (const auto& iv : ivs)
      if (iv.stage > 0) CHECK(iv.start >= job_end[iv.stage - 1][iv.job]);
  }
}

TEST_CASE("feasibility closure: constructed solutions always have finite reward") {
  Rng rng(7);
  for (int rep = 0; rep < 40; ++rep) {
    TspInstance tsp = generate_tsp({7}, 1, rep);
    CHECK(is_feasible_reward(random_solution<TspProblem>(tsp, rng).reward));
    CvrpInstance cvrp = generate_cvrp({6}, 2, rep);
    CHECK(is_feasible_reward(random_solution<CvrpProblem>(cvrp, rng).reward));
    FfspInstance ffsp = generate_ffsp({3, {2, 2}, 2, 9}, 3, rep);
    CHECK(is_feasible_reward(random_solution<FfspProblem>(ffsp, rng).reward));
  }
}

TEST_CASE("terminal states reject feasible_actions") {
  TspInstance inst = unit_square_corners();
  TspState s = TspProblem::initial_state(inst);
  for (Action a : {1, 2, 3}) s = TspProblem::apply_action(s, a);
  REQUIRE(TspProblem::is_terminal(s));
  std::vector<Action> acts;
  CHECK_THROWS_AS(TspProblem::feasible_actions(s, acts), std::logic_error);
}
