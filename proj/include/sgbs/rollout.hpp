#ifndef SGBS_ROLLOUT_HPP
#define SGBS_ROLLOUT_HPP

#include <optional>
#include <vector>

#include "sgbs/budget.hpp"
#include "sgbs/policy.hpp"
#include "sgbs/problem.hpp"

namespace sgbs {

/// Immutable (theta, psi) snapshot shared by concurrent rollouts.
struct Policy {
  PolicyParams base;
  std::optional<EasParams> eas;

  const EasParams* adapter() const { return eas ? &*eas : nullptr; }
};

/// Completes a partial solution by repeatedly applying the argmax action
/// (ties to the lowest action index). Deterministic; a terminal input is
/// returned unchanged with zero new steps.
template <typename P>
Solution greedy_rollout(const Policy& policy, typename P::State state) {
  while (!P::is_terminal(state)) {
    const ActionDistribution dist = eval_policy<P>(policy.base, policy.adapter(), state);
    state = P::apply_action(state, dist.actions[dist.argmax()]);
  }
  return make_solution<P>(*state.inst, std::move(state.assigned));
}

/// Samples one trajectory action-by-action from the policy distribution.
template <typename P>
Solution sample_trajectory(const Policy& policy, typename P::State state, Rng& rng) {
  while (!P::is_terminal(state)) {
    const ActionDistribution dist = eval_policy<P>(policy.base, policy.adapter(), state);
    const double u = rng.next_double();
    double acc = 0.0;
    int pick = static_cast<int>(dist.probs.size()) - 1;
    for (std::size_t i = 0; i < dist.probs.size(); ++i) {
      acc += dist.probs[i];
      if (u < acc) {
        pick = static_cast<int>(i);
        break;
      }
    }
    state = P::apply_action(state, dist.actions[pick]);
  }
  return make_solution<P>(*state.inst, std::move(state.assigned));
}

/**
 * Draws `count` independent trajectories. Per-sample seeds are derived
 * sequentially from `rng` before the (optionally parallel) map, so the
 * batch is identical for any worker count, and drawing one batch of M
 * consumes the same seed stream as M batches of one.
 */
template <typename P>
std::vector<Solution> sample_rollouts(const Policy& policy, const typename P::State& state,
                                      int count, Rng& rng) {
  std::vector<std::uint64_t> seeds(count);
  for (auto& s : seeds) s = rng.next_u64();
  std::vector<Solution> out(count);
  parallel_for(static_cast<std::size_t>(count), worker_count(), [&](std::size_t i) {
    Rng local(seeds[i]);
    out[i] = sample_trajectory<P>(policy, state, local);
  });
  return out;
}

}  // namespace sgbs

#endif  // SGBS_ROLLOUT_HPP
