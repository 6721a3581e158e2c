#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "helpers.hpp"
#include "sgbs/generator.hpp"
#include "sgbs/oracle.hpp"

using namespace sgbs;
using sgbs::testing::random_solution;
using sgbs::testing::unit_square_corners;

TEST_CASE("held-karp: unit square corners have a length-4 optimum") {
  const Solution opt = brute_force_optimum(unit_square_corners());
  CHECK(-opt.reward == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(opt.actions == std::vector<Action>{1, 2, 3});  // lexicographic tie-break
}

TEST_CASE("held-karp: n=3 tours are all equal") {
  const TspInstance inst = generate_tsp({3}, 17, 0);
  const Solution opt = brute_force_optimum(inst);
  CHECK(opt.reward == doctest::Approx(TspProblem::reward(inst, std::vector<Action>{1, 2})));
  CHECK(opt.reward == doctest::Approx(TspProblem::reward(inst, std::vector<Action>{2, 1})));
  CHECK(opt.actions == std::vector<Action>{1, 2});
}

TEST_CASE("held-karp agrees with full permutation enumeration") {
  for (int rep = 0; rep < 10; ++rep) {
    const TspInstance inst = generate_tsp({7}, 23, rep);
    std::vector<Action> perm{1, 2, 3, 4, 5, 6};
    double best = kInfeasibleReward;
    do {
      best = std::max(best, TspProblem::reward(inst, perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
    const Solution opt = brute_force_optimum(inst);
    // Reversed tours sum the same legs in a different order, so optima can
    // differ in the last ulp between enumeration and the DP; 1e-12 covers it.
    CHECK(opt.reward == doctest::Approx(best).epsilon(1e-12));
    CHECK(TspProblem::reward(inst, opt.actions) == opt.reward);
    const Solution again = brute_force_optimum(inst);
    CHECK(again.actions == opt.actions);
  }
}

TEST_CASE("cvrp oracle: hand-checkable collinear fixture") {
  // Depot at 0, customers on a line; one route serves both within capacity.
  const CvrpInstance inst({0, 0}, {{0.5, 0.0}, {1.0, 0.0}}, {2, 2}, 4);
  const Solution opt = brute_force_optimum(inst);
  CHECK(-opt.reward == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(opt.actions == std::vector<Action>{1, 2});
}

TEST_CASE("cvrp oracle agrees with random-solution fuzz (dominance)") {
  Rng rng(71);
  for (int rep = 0; rep < 15; ++rep) {
    const CvrpInstance inst = generate_cvrp({6}, 29, rep);
    const Solution opt = brute_force_optimum(inst);
    REQUIRE(is_feasible_reward(opt.reward));
    for (int k = 0; k < 40; ++k) {
      const Solution s = random_solution<CvrpProblem>(inst, rng);
      CHECK(opt.reward >= s.reward - 1e-12);
    }
  }
}

TEST_CASE("tsp and ffsp oracles dominate sampled feasible solutions") {
  Rng rng(72);
  for (int rep = 0; rep < 10; ++rep) {
    const TspInstance tsp = generate_tsp({8}, 37, rep);
    const Solution t_opt = brute_force_optimum(tsp);
    for (int k = 0; k < 30; ++k)
      CHECK(t_opt.reward >= random_solution<TspProblem>(tsp, rng).reward - 1e-12);

    const FfspInstance ffsp = generate_ffsp({4, {2, 2}, 2, 9}, 38, rep);
    const Solution f_opt = brute_force_optimum(ffsp);
    REQUIRE(is_feasible_reward(f_opt.reward));
    for (int k = 0; k < 30; ++k)
      CHECK(f_opt.reward >= random_solution<FfspProblem>(ffsp, rng).reward);
  }
}

TEST_CASE("ffsp oracle respects the critical-path lower bound") {
  for (int rep = 0; rep < 8; ++rep) {
    const FfspInstance inst = generate_ffsp({4, {2, 2}, 2, 9}, 53, rep);
    const Solution opt = brute_force_optimum(inst);
    int lb = 0;
    for (int j = 0; j < inst.num_jobs; ++j) {
      int path = 0;
      for (int k = 0; k < inst.num_stages(); ++k) {
        int fastest = inst.proc_time(k, 0, j);
        for (int m = 1; m < inst.machines_at(k); ++m)
          fastest = std::min(fastest, inst.proc_time(k, m, j));
        path += fastest;
      }
      lb = std::max(lb, path);
    }
    CHECK(-opt.reward >= static_cast<double>(lb));
  }
}

TEST_CASE("frozen fixture: mean held-karp optimum of the n=8 benchmark set") {
  // Computed once with the Held-Karp oracle over 50 instances (seed 7)
  // and frozen; guards the generator and the oracle together.
  double mean = 0.0;
  for (int i = 0; i < 50; ++i) mean += -brute_force_optimum(generate_tsp({8}, 7, i)).reward;
  mean /= 50.0;
  CHECK(mean == doctest::Approx(2.6871842575128437).epsilon(1e-12));
}

TEST_CASE("frozen fixture: cvrp n=5 oracle cost") {
  const CvrpInstance inst = generate_cvrp({5}, 223, 0);
  const Solution opt = brute_force_optimum(inst);
  CHECK(-opt.reward == doctest::Approx(1.9937016600447113).epsilon(1e-12));
  CHECK(CvrpProblem::reward(inst, opt.actions) == opt.reward);
}

TEST_CASE("oracle size caps are enforced") {
  CHECK_THROWS_AS(brute_force_optimum(generate_tsp({14}, 1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(brute_force_optimum(generate_cvrp({9}, 1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(brute_force_optimum(generate_ffsp({6, {2, 2}, 2, 9}, 1, 0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(brute_force_optimum(generate_ffsp({4, {2, 2, 2}, 2, 9}, 1, 0)),
                  std::invalid_argument);
}
