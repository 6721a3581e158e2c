#ifndef SGBS_PROBLEM_HPP
#define SGBS_PROBLEM_HPP

#include <cmath>
#include <concepts>
#include <span>
#include <vector>

#include "sgbs/common.hpp"

namespace sgbs {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

/// A complete assignment of all decision variables plus its cached reward.
/// The reward is kInfeasibleReward for infeasible externally supplied
/// tuples; construction through feasible actions never produces that.
struct Solution {
  std::vector<Action> actions;
  double reward = kInfeasibleReward;
};

/**
 * @brief Problem adapter contract.
 *
 * Each problem exposes an immutable Instance, an immutable State (partial
 * solution with cached derived data), and static transition/reward/feature
 * functions. States are values: apply_action returns a new state, so
 * concurrent rollouts can share prefixes freely.
 */
template <typename P>
concept ProblemAdapter = requires(const typename P::Instance& inst,
                                  const typename P::State& s, Action a,
                                  std::vector<Action>& acts,
                                  std::span<const Action> sol,
                                  std::span<double> feat) {
  { P::kFeatureCount } -> std::convertible_to<int>;
  { P::initial_state(inst) } -> std::same_as<typename P::State>;
  { P::is_terminal(s) } -> std::same_as<bool>;
  { P::feasible_actions(s, acts) } -> std::same_as<void>;
  { P::apply_action(s, a) } -> std::same_as<typename P::State>;
  { P::reward(inst, sol) } -> std::same_as<double>;
  { P::features(s, a, feat) } -> std::same_as<void>;
};

/// Folds apply_action over an action tuple. Throws if any step is
/// infeasible; used for replay-consistency checks and gradient replays.
template <typename P>
typename P::State replay_state(const typename P::Instance& inst,
                               std::span<const Action> actions) {
  typename P::State s = P::initial_state(inst);
  for (Action a : actions) s = P::apply_action(s, a);
  return s;
}

/// Builds a Solution from an action tuple, evaluating the reward once.
template <typename P>
Solution make_solution(const typename P::Instance& inst, std::vector<Action> actions) {
  Solution sol;
  sol.reward = P::reward(inst, actions);
  sol.actions = std::move(actions);
  return sol;
}

}  // namespace sgbs

#endif  // SGBS_PROBLEM_HPP
