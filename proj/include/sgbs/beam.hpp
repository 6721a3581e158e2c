#ifndef SGBS_BEAM_HPP
#define SGBS_BEAM_HPP

#include <algorithm>
#include <utility>
#include <vector>

#include "sgbs/budget.hpp"
#include "sgbs/policy.hpp"
#include "sgbs/rollout.hpp"

namespace sgbs {

/**
 * @brief Probability-product beam search.
 *
 * Partial solutions are ranked by cumulative log-probability from the
 * root; every child of each beam entry competes and the top `width`
 * survive. Terminal entries ride along unchanged until the whole beam is
 * terminal; the best of those terminals by reward is returned. One budget
 * unit is consumed per terminal solution evaluated.
 */
template <typename P>
Solution nlp_beam_search(const Policy& policy, const typename P::Instance& inst, int width,
                         SearchLog* log = nullptr, double* returned_log_prob = nullptr) {
  if (width < 1) throw std::invalid_argument("nlp_beam_search: width must be >= 1");

  struct Entry {
    typename P::State state;
    double logp = 0.0;
    bool terminal = false;
  };

  std::vector<Entry> beam;
  beam.push_back(Entry{P::initial_state(inst), 0.0, false});
  beam.back().terminal = P::is_terminal(beam.back().state);

  auto by_logp = [](const Entry& a, const Entry& b) {
    if (a.logp != b.logp) return a.logp > b.logp;
    return a.state.assigned < b.state.assigned;
  };

  bool any_open = !beam.front().terminal;
  while (any_open) {
    std::vector<Entry> next;
    next.reserve(beam.size() * 4);
    for (Entry& e : beam) {
      if (e.terminal) {
        next.push_back(std::move(e));
        continue;
      }
      const ActionDistribution dist = eval_policy<P>(policy.base, policy.adapter(), e.state);
      for (std::size_t i = 0; i < dist.actions.size(); ++i) {
        Entry child;
        child.state = P::apply_action(e.state, dist.actions[i]);
        child.logp = e.logp + dist.log_prob_at(static_cast<int>(i));
        child.terminal = P::is_terminal(child.state);
        next.push_back(std::move(child));
      }
    }
    if (static_cast<int>(next.size()) > width) {
      std::nth_element(next.begin(), next.begin() + width - 1, next.end(), by_logp);
      next.resize(width);
    }
    std::sort(next.begin(), next.end(), by_logp);
    beam = std::move(next);
    any_open = false;
    for (const Entry& e : beam)
      if (!e.terminal) {
        any_open = true;
        break;
      }
  }

  Solution best;
  double best_logp = 0.0;
  for (const Entry& e : beam) {
    if (log) {
      if (log->exhausted()) {
        log->truncated = true;
        break;
      }
    }
    Solution sol = make_solution<P>(inst, e.state.assigned);
    if (log) log->record(sol.actions, sol.reward, "beam");
    if (sol.reward > best.reward ||
        (sol.reward == best.reward && sol.actions < best.actions)) {
      best = std::move(sol);
      best_logp = e.logp;
    }
  }
  if (returned_log_prob) *returned_log_prob = best_logp;
  return best;
}

}  // namespace sgbs

#endif  // SGBS_BEAM_HPP
