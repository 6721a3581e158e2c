#include <doctest.h>

#include <cmath>
#include <limits>
#include <tuple>

#include "helpers.hpp"
#include "sgbs/beam.hpp"
#include "sgbs/generator.hpp"
#include "sgbs/oracle.hpp"
#include "sgbs/rollout.hpp"
#include "sgbs/sgbs.hpp"

using namespace sgbs;
using sgbs::testing::nearest_neighbor_cycle;

namespace {

constexpr std::int64_t kBigBudget = 1'000'000'000;

Policy nn_policy(int features) { return Policy{default_policy(features), std::nullopt}; }

// Two unvisited nodes at logit gap ln(0.7/0.3): probabilities exactly (0.7, 0.3).
TspInstance two_action_fixture() {
  const double gap = 0.1 * std::log(0.7 / 0.3);
  return TspInstance({{0.0, 0.0}, {0.1, 0.0}, {0.1 + gap, 0.0}});
}

}  // namespace

TEST_CASE("greedy_rollout is a fixed point on terminal states") {
  const TspInstance inst = sgbs::testing::unit_square_corners();
  TspState s = TspProblem::initial_state(inst);
  for (Action a : {2, 1, 3}) s = TspProblem::apply_action(s, a);
  REQUIRE(TspProblem::is_terminal(s));
  const Solution sol = greedy_rollout<TspProblem>(nn_policy(3), s);
  CHECK(sol.actions == std::vector<Action>{2, 1, 3});
}

TEST_CASE("greedy_rollout with the nearest-neighbor policy emits the NN tour") {
  for (int rep = 0; rep < 20; ++rep) {
    const TspInstance inst = generate_tsp({15}, 404, rep);
    const Solution sol = greedy_rollout<TspProblem>(nn_policy(3), TspProblem::initial_state(inst));
    const std::vector<int> nn = nearest_neighbor_cycle(inst);
    REQUIRE(sol.actions.size() == nn.size() - 1);
    for (std::size_t i = 0; i < sol.actions.size(); ++i) CHECK(sol.actions[i] == nn[i + 1]);
    const Solution again = greedy_rollout<TspProblem>(nn_policy(3), TspProblem::initial_state(inst));
    CHECK(again.actions == sol.actions);
  }
}

TEST_CASE("sampling at vanishing temperature coincides with greedy") {
  const TspInstance inst = generate_tsp({12}, 11, 3);
  Policy pol = nn_policy(3);
  pol.base.temperature = 1e-6;
  const Solution greedy = greedy_rollout<TspProblem>(pol, TspProblem::initial_state(inst));
  Rng rng(99);
  for (int i = 0; i < 5; ++i) {
    const Solution s = sample_trajectory<TspProblem>(pol, TspProblem::initial_state(inst), rng);
    CHECK(s.actions == greedy.actions);
  }
}

TEST_CASE("sampling matches the policy distribution empirically") {
  const TspInstance inst = two_action_fixture();
  const TspState root = TspProblem::initial_state(inst);
  const ActionDistribution dist = eval_policy<TspProblem>(default_policy(3), nullptr, root);
  REQUIRE(dist.probs[0] == doctest::Approx(0.7).epsilon(1e-9));
  Policy pol = nn_policy(3);
  Rng rng(2024);
  int first = 0;
  const int m = 10000;
  for (int i = 0; i < m; ++i) {
    const Solution s = sample_trajectory<TspProblem>(pol, root, rng);
    if (s.actions.front() == dist.actions[0]) ++first;
  }
  CHECK(std::abs(first / static_cast<double>(m) - 0.7) < 0.02);
}

TEST_CASE("same seed gives an identical sample batch") {
  const TspInstance inst = generate_tsp({10}, 5, 1);
  Policy pol = nn_policy(3);
  Rng a(42), b(42);
  const auto batch1 = sample_rollouts<TspProblem>(pol, TspProblem::initial_state(inst), 16, a);
  const auto batch2 = sample_rollouts<TspProblem>(pol, TspProblem::initial_state(inst), 16, b);
  REQUIRE(batch1.size() == batch2.size());
  for (std::size_t i = 0; i < batch1.size(); ++i) CHECK(batch1[i].actions == batch2[i].actions);
}

TEST_CASE("nlp beam search with width 1 is the greedy chain") {
  const TspInstance inst = generate_tsp({12}, 606, 0);
  const Solution greedy = greedy_rollout<TspProblem>(nn_policy(3), TspProblem::initial_state(inst));
  const Solution beam = nlp_beam_search<TspProblem>(nn_policy(3), inst, 1);
  CHECK(beam.actions == greedy.actions);
}

TEST_CASE("nlp beam search with full width finds the optimum on tiny instances") {
  for (int rep = 0; rep < 5; ++rep) {
    const TspInstance inst = generate_tsp({5}, 707, rep);
    const Solution opt = brute_force_optimum(inst);
    const Solution beam = nlp_beam_search<TspProblem>(nn_policy(3), inst, 24);  // 4! leaves
    CHECK(beam.reward == doctest::Approx(opt.reward).epsilon(1e-12));
  }
}

TEST_CASE("nlp beam search log-prob bookkeeping matches an independent replay") {
  const TspInstance inst = generate_tsp({9}, 808, 0);
  double logp = 0.0;
  const Solution sol = nlp_beam_search<TspProblem>(nn_policy(3), inst, 16, nullptr, &logp);
  double replayed = 0.0;
  TspState s = TspProblem::initial_state(inst);
  for (Action a : sol.actions) {
    const ActionDistribution dist = eval_policy<TspProblem>(default_policy(3), nullptr, s);
    replayed += dist.log_prob_at(dist.index_of(a));
    s = TspProblem::apply_action(s, a);
  }
  CHECK(std::abs(logp - replayed) < 1e-9);
}

TEST_CASE("sgbs with beta=gamma=1 reproduces the greedy rollout") {
  const TspInstance inst = generate_tsp({14}, 909, 0);
  SearchLog log(kBigBudget);
  const Solution sol = sgbs<TspProblem>(nn_policy(3), inst, {1, 1, true}, log);
  const Solution greedy = greedy_rollout<TspProblem>(nn_policy(3), TspProblem::initial_state(inst));
  CHECK(sol.actions == greedy.actions);
  CHECK(log.consumed() == 1);  // one root rollout, every argmax child inherits
}

TEST_CASE("sgbs rollout accounting: per-level elision bound") {
  const TspInstance inst = generate_tsp({30}, 111, 0);
  SearchLog log(kBigBudget);
  SgbsStats stats;
  const SgbsConfig cfg{4, 4, true};
  (void)sgbs<TspProblem>(nn_policy(3), inst, cfg, log, &stats);
  REQUIRE(!stats.fresh_per_level.empty());
  CHECK(stats.fresh_per_level[0] == 4);  // gamma fresh rollouts at the root
  for (std::size_t l = 1; l < stats.fresh_per_level.size(); ++l)
    CHECK(stats.fresh_per_level[l] <= 4 * 3);  // beta * (gamma - 1)
  CHECK(stats.rollouts == log.consumed());
  // 29 decisions: the root level plus 28 non-root levels.
  CHECK(static_cast<int>(stats.fresh_per_level.size()) == 29);
  CHECK(stats.rollouts >= 4 + 29 * 3);
  CHECK(stats.rollouts <= 4 + 28 * 12);
}

TEST_CASE("sgbs in the exhaustive limit recovers the brute-force optimum") {
  for (int rep = 0; rep < 5; ++rep) {
    const TspInstance tsp = generate_tsp({7}, 222, rep);
    SearchLog log(kBigBudget);
    const Solution sol = sgbs<TspProblem>(nn_policy(3), tsp, {1000, 7, true}, log);
    CHECK(std::abs(sol.reward - brute_force_optimum(tsp).reward) < 1e-9);

    const CvrpInstance cvrp = generate_cvrp({5}, 223, rep);
    SearchLog log2(kBigBudget);
    const Solution sol2 = sgbs<CvrpProblem>(nn_policy(5), cvrp, {20000, 7, true}, log2);
    CHECK(std::abs(sol2.reward - brute_force_optimum(cvrp).reward) < 1e-9);

    const FfspInstance ffsp = generate_ffsp({3, {2, 2}, 2, 9}, 224, rep);
    SearchLog log3(kBigBudget);
    const Solution sol3 = sgbs<FfspProblem>(nn_policy(3), ffsp, {20000, 4, true}, log3);
    CHECK(std::abs(sol3.reward - brute_force_optimum(ffsp).reward) < 1e-9);
  }
}

TEST_CASE("sgbs dominates greedy with incumbent tracking on") {
  Rng fuzz(31337);
  for (int rep = 0; rep < 30; ++rep) {
    PolicyParams params = default_policy(3);
    params.theta[0] = fuzz.next_normal();
    params.theta[1] = fuzz.next_normal() * 0.5;
    params.theta[2] = fuzz.next_normal() * 0.5;
    params.temperature = 0.05 + fuzz.next_double();
    const Policy pol{params, std::nullopt};
    const TspInstance inst = generate_tsp({12}, 333, rep);
    const SgbsConfig cfg{1 + static_cast<int>(fuzz.next_int(0, 3)),
                         1 + static_cast<int>(fuzz.next_int(0, 3)), true};
    SearchLog log(kBigBudget);
    const Solution sol = sgbs<TspProblem>(pol, inst, cfg, log);
    const Solution greedy = greedy_rollout<TspProblem>(pol, TspProblem::initial_state(inst));
    CHECK(sol.reward >= greedy.reward);
  }
}

TEST_CASE("sgbs literal mode returns the final-beam best, tracking mode the global best") {
  const TspInstance inst = generate_tsp({12}, 444, 0);
  SearchLog log_a(kBigBudget);
  const Solution tracked = sgbs<TspProblem>(nn_policy(3), inst, {3, 3, true}, log_a);
  SearchLog log_b(kBigBudget);
  const Solution literal = sgbs<TspProblem>(nn_policy(3), inst, {3, 3, false}, log_b);
  CHECK(tracked.reward >= literal.reward);
  CHECK(tracked.reward == log_a.incumbent().reward);
}

TEST_CASE("sgbs determinism: identical inputs give identical traces") {
  const CvrpInstance inst = generate_cvrp({10}, 555, 0);
  auto run = [&]() {
    SearchLog log(kBigBudget);
    SgbsStats stats;
    const Solution sol = sgbs<CvrpProblem>(nn_policy(5), inst, {4, 4, true}, log, &stats);
    return std::tuple{sol.actions, log.consumed(), stats.fresh_per_level, log.history().size()};
  };
  CHECK(run() == run());
}

TEST_CASE("sgbs truncates on budget exhaustion and flags the trace") {
  const TspInstance inst = generate_tsp({20}, 666, 0);
  SearchLog log(10);
  const Solution sol = sgbs<TspProblem>(nn_policy(3), inst, {4, 4, true}, log);
  CHECK(log.truncated);
  CHECK(log.consumed() <= 10);
  CHECK(sol.reward == log.incumbent().reward);
  CHECK(is_feasible_reward(sol.reward));  // the root simulations fit in 10 units
}

TEST_CASE("incumbent curve is non-increasing in cost") {
  const TspInstance inst = generate_tsp({15}, 777, 0);
  SearchLog log(kBigBudget);
  (void)sgbs<TspProblem>(nn_policy(3), inst, {4, 4, true}, log);
  double prev = std::numeric_limits<double>::infinity();
  for (const TracePoint& p : log.history()) {
    CHECK(p.incumbent_cost <= prev);
    prev = p.incumbent_cost;
  }
}
