#ifndef SGBS_TESTS_HELPERS_HPP
#define SGBS_TESTS_HELPERS_HPP

#include <vector>

#include "sgbs/cvrp.hpp"
#include "sgbs/generator.hpp"
#include "sgbs/problem.hpp"
#include "sgbs/tsp.hpp"

namespace sgbs::testing {

/// Independent nearest-neighbor reference: the cycle from node 0, always
/// moving to the closest unvisited node (ties to the lowest index).
inline std::vector<int> nearest_neighbor_cycle(const TspInstance& inst) {
  const int n = inst.size();
  std::vector<int> cycle{0};
  std::vector<char> seen(n, 0);
  seen[0] = 1;
  int cur = 0;
  for (int step = 1; step < n; ++step) {
    int best = -1;
    for (int j = 0; j < n; ++j) {
      if (seen[j]) continue;
      if (best < 0 || inst.d(cur, j) < inst.d(cur, best)) best = j;
    }
    seen[best] = 1;
    cycle.push_back(best);
    cur = best;
  }
  return cycle;
}

/// Random reachable state: applies `steps` uniformly random feasible
/// actions (fewer if the episode terminates first).
template <typename P>
typename P::State random_state(const typename P::Instance& inst, int steps, Rng& rng) {
  typename P::State s = P::initial_state(inst);
  std::vector<Action> acts;
  for (int i = 0; i < steps && !P::is_terminal(s); ++i) {
    P::feasible_actions(s, acts);
    const auto pick = rng.next_int(0, static_cast<std::int64_t>(acts.size()) - 1);
    s = P::apply_action(s, acts[static_cast<std::size_t>(pick)]);
  }
  return s;
}

/// Random complete solution through feasible actions only.
template <typename P>
Solution random_solution(const typename P::Instance& inst, Rng& rng) {
  typename P::State s = P::initial_state(inst);
  std::vector<Action> acts;
  while (!P::is_terminal(s)) {
    P::feasible_actions(s, acts);
    const auto pick = rng.next_int(0, static_cast<std::int64_t>(acts.size()) - 1);
    s = P::apply_action(s, acts[static_cast<std::size_t>(pick)]);
  }
  return make_solution<P>(inst, s.assigned);
}

inline TspInstance unit_square_corners() {
  return TspInstance({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
}

}  // namespace sgbs::testing

#endif  // SGBS_TESTS_HELPERS_HPP
