#ifndef SGBS_SGBS_HPP
#define SGBS_SGBS_HPP

#include <algorithm>
#include <memory>
#include <numeric>
#include <utility>
#include <vector>

#include "sgbs/budget.hpp"
#include "sgbs/policy.hpp"
#include "sgbs/rollout.hpp"

namespace sgbs {

struct SgbsConfig {
  int beam_width = 4;       // beta
  int expansion_factor = 4; // gamma
  /// On: return the best complete solution among all simulated rollouts.
  /// Off: return the best terminal in the final beam (the literal
  /// pseudocode behaviour); the trace still tracks the incumbent.
  bool track_incumbent = true;
};

/// Per-call accounting used by the rollout-elision tests.
struct SgbsStats {
  std::int64_t rollouts = 0;                 // fresh candidate evaluations
  std::vector<std::int64_t> fresh_per_level; // level 0 is the root expansion
};

/**
 * @brief Simulation-guided beam search.
 *
 * Breadth-first over the decision tree. Per level: Expansion keeps the
 * top `gamma` children of each beam node by policy probability (each node
 * ranked independently); Simulation attaches a greedy-rollout reward to
 * every expanded child; Pruning keeps the `beta` children with the best
 * simulated rewards. Terminal beam nodes carry forward unchanged.
 *
 * Each node's attached rollout equals the greedy completion of its own
 * state, so the argmax child of a non-root node inherits its parent's
 * rollout instead of recomputing it: a level costs at most
 * beta*(gamma-1) fresh rollouts (gamma at the root).
 *
 * Ties break deterministically: expansion by (probability, action index),
 * pruning by (simulated reward, cumulative log-prob, action tuple).
 */
template <typename P>
Solution sgbs(const Policy& policy, const typename P::Instance& inst, const SgbsConfig& cfg,
              SearchLog& log, SgbsStats* stats = nullptr) {
  if (cfg.beam_width < 1 || cfg.expansion_factor < 1)
    throw std::invalid_argument("sgbs: beam width and expansion factor must be >= 1");

  struct Node {
    typename P::State state;
    double logp = 0.0;
    bool terminal = false;
    std::shared_ptr<const Solution> sim;  // greedy completion of `state`
  };

  auto record_candidate = [&](const Solution& sol) {
    log.record(sol.actions, sol.reward, "sgbs");
  };

  std::vector<Node> beam;
  {
    Node root;
    root.state = P::initial_state(inst);
    root.terminal = P::is_terminal(root.state);
    beam.push_back(std::move(root));
  }
  if (beam.front().terminal) {
    Solution sol = make_solution<P>(inst, beam.front().state.assigned);
    if (!log.exhausted()) record_candidate(sol);
    return sol;
  }

  bool root_level = true;
  bool open = true;
  while (open) {
    // Expansion: each beam node proposes up to gamma children.
    struct Child {
      typename P::State state;
      double logp = 0.0;
      bool terminal = false;
      bool inherits = false;
      std::shared_ptr<const Solution> inherited;
      std::shared_ptr<const Solution> sim;
    };
    std::vector<Child> children;
    std::vector<std::size_t> fresh_idx;
    for (Node& node : beam) {
      if (node.terminal) {
        // A terminal node expands to itself; its rollout is itself and was
        // already evaluated when the node entered the beam.
        Child c;
        c.state = node.state;
        c.logp = node.logp;
        c.terminal = true;
        c.inherits = true;
        c.inherited = node.sim;
        children.push_back(std::move(c));
        continue;
      }
      const ActionDistribution dist = eval_policy<P>(policy.base, policy.adapter(), node.state);
      const int n_children = static_cast<int>(dist.actions.size());
      std::vector<int> order(n_children);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (dist.probs[a] != dist.probs[b]) return dist.probs[a] > dist.probs[b];
        return dist.actions[a] < dist.actions[b];
      });
      const int take = std::min(cfg.expansion_factor, n_children);
      for (int r = 0; r < take; ++r) {
        const int i = order[r];
        Child c;
        c.state = P::apply_action(node.state, dist.actions[i]);
        c.logp = node.logp + dist.log_prob_at(i);
        c.terminal = P::is_terminal(c.state);
        // The argmax child retraces the parent's greedy completion.
        if (r == 0 && !root_level) {
          c.inherits = true;
          c.inherited = node.sim;
        } else {
          fresh_idx.push_back(children.size());
        }
        children.push_back(std::move(c));
      }
    }

    // Simulation: fresh rollouts only, budget-gated, deterministic order.
    const std::int64_t allowed = std::min<std::int64_t>(
        static_cast<std::int64_t>(fresh_idx.size()), log.remaining());
    if (allowed < static_cast<std::int64_t>(fresh_idx.size())) log.truncated = true;
    std::vector<Solution> sims(static_cast<std::size_t>(allowed));
    parallel_for(static_cast<std::size_t>(allowed), worker_count(), [&](std::size_t k) {
      const Child& c = children[fresh_idx[k]];
      sims[k] = c.terminal ? make_solution<P>(inst, c.state.assigned)
                           : greedy_rollout<P>(policy, c.state);
    });
    for (std::size_t k = 0; k < sims.size(); ++k) {
      record_candidate(sims[k]);
      children[fresh_idx[k]].sim = std::make_shared<const Solution>(std::move(sims[k]));
    }
    if (stats) {
      stats->rollouts += allowed;
      stats->fresh_per_level.push_back(allowed);
    }
    if (log.truncated) return log.incumbent_solution();
    for (Child& c : children)
      if (c.inherits) c.sim = std::move(c.inherited);

    // Pruning: keep the beta best children by simulated reward.
    std::vector<std::size_t> keep(children.size());
    std::iota(keep.begin(), keep.end(), std::size_t{0});
    auto better = [&](std::size_t a, std::size_t b) {
      const double ra = children[a].sim->reward;
      const double rb = children[b].sim->reward;
      if (ra != rb) return ra > rb;
      if (children[a].logp != children[b].logp) return children[a].logp > children[b].logp;
      return children[a].state.assigned < children[b].state.assigned;
    };
    const std::size_t width = std::min<std::size_t>(cfg.beam_width, keep.size());
    std::partial_sort(keep.begin(), keep.begin() + width, keep.end(), better);
    keep.resize(width);

    std::vector<Node> next;
    next.reserve(width);
    open = false;
    for (std::size_t idx : keep) {
      Child& c = children[idx];
      if (!c.terminal) open = true;
      next.push_back(Node{std::move(c.state), c.logp, c.terminal, std::move(c.sim)});
    }
    beam = std::move(next);
    root_level = false;
  }

  if (cfg.track_incumbent) return log.incumbent_solution();
  // Literal mode: best terminal in the final beam.
  const Node* best = &beam.front();
  for (const Node& n : beam) {
    if (n.sim->reward > best->sim->reward ||
        (n.sim->reward == best->sim->reward && n.state.assigned < best->state.assigned))
      best = &n;
  }
  return *best->sim;
}

}  // namespace sgbs

#endif  // SGBS_SGBS_HPP
