#ifndef SGBS_MCTS_HPP
#define SGBS_MCTS_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "sgbs/budget.hpp"
#include "sgbs/policy.hpp"
#include "sgbs/rollout.hpp"

namespace sgbs {

struct MctsConfig {
  double c_puct = 1.0;
  int simulations_per_depth = 12;
  double denominator_offset = 0.1;
};

/// Exploration bonus: U(s,a) = c_puct * P(s,a) * sqrt(sum_b N(s,b)) / (offset + N(s,a)).
inline double mcts_u_value(double c_puct, double prior, std::int64_t total_visits,
                           std::int64_t child_visits, double offset) {
  return c_puct * prior * std::sqrt(static_cast<double>(total_visits)) /
         (offset + static_cast<double>(child_visits));
}

struct MctsStats {
  struct DepthStats {
    std::int64_t visits = 0;  // sum of root-child visit counts at commit time
    double q_lo = 0.0;        // min/max mean Q over visited children
    double q_hi = 0.0;
  };
  std::vector<DepthStats> depths;
  double reward_lo = 0.0;  // observed rollout reward range
  double reward_hi = 0.0;
};

/**
 * @brief Move-commitment MCTS baseline.
 *
 * At each committed depth the tree is grown for `simulations_per_depth`
 * iterations: select children by argmax of normalized Q plus the U bonus
 * (ties by prior, then action index), expand the first unexpanded node,
 * score it with one greedy rollout, and backpropagate the raw reward as a
 * running mean. The child of the committed node with the most visits
 * becomes the next root. Q values are normalized to [0,1] by the min/max
 * rollout reward observed so far in this search; unvisited children use 0.
 */
template <typename P>
Solution mcts_search(const Policy& policy, const typename P::Instance& inst,
                     const MctsConfig& cfg, SearchLog& log, MctsStats* stats = nullptr) {
  if (cfg.c_puct <= 0.0) throw std::invalid_argument("mcts: c_puct must be > 0");
  if (cfg.denominator_offset <= 0.0) throw std::invalid_argument("mcts: offset must be > 0");
  if (cfg.simulations_per_depth < 1) throw std::invalid_argument("mcts: simulations must be >= 1");

  struct TNode {
    typename P::State state;
    bool terminal = false;
    bool expanded = false;
    std::vector<Action> acts;
    std::vector<double> prior;
    std::vector<std::int64_t> n;
    std::vector<double> q_sum;
    std::vector<int> child;  // arena index, -1 until materialized
  };

  double reward_lo = std::numeric_limits<double>::infinity();
  double reward_hi = -std::numeric_limits<double>::infinity();
  bool any_reward = false;

  auto evaluate = [&](const typename P::State& state) -> double {
    Solution sol = P::is_terminal(state) ? make_solution<P>(inst, state.assigned)
                                         : greedy_rollout<P>(policy, state);
    log.record(sol.actions, sol.reward, "mcts");
    reward_lo = std::min(reward_lo, sol.reward);
    reward_hi = std::max(reward_hi, sol.reward);
    any_reward = true;
    return sol.reward;
  };

  auto q_norm = [&](double q_mean) -> double {
    if (!any_reward || reward_hi == reward_lo) return 0.5;
    return (q_mean - reward_lo) / (reward_hi - reward_lo);
  };

  typename P::State root_state = P::initial_state(inst);
  while (!P::is_terminal(root_state)) {
    std::vector<TNode> arena;
    auto materialize = [&](typename P::State s) -> int {
      TNode node;
      node.terminal = P::is_terminal(s);
      node.state = std::move(s);
      arena.push_back(std::move(node));
      return static_cast<int>(arena.size()) - 1;
    };
    auto expand = [&](int id) {
      TNode& node = arena[id];
      const ActionDistribution dist = eval_policy<P>(policy.base, policy.adapter(), node.state);
      node.acts = dist.actions;
      node.prior = dist.probs;
      node.n.assign(dist.actions.size(), 0);
      node.q_sum.assign(dist.actions.size(), 0.0);
      node.child.assign(dist.actions.size(), -1);
      node.expanded = true;
    };

    const int root = materialize(root_state);
    expand(root);

    for (int sim = 0; sim < cfg.simulations_per_depth; ++sim) {
      if (log.exhausted()) {
        log.truncated = true;
        return log.incumbent_solution();
      }
      // Selection down to the first unexpanded or terminal node.
      std::vector<std::pair<int, int>> path;  // (node id, child slot)
      int cur = root;
      while (arena[cur].expanded && !arena[cur].terminal) {
        TNode& node = arena[cur];
        std::int64_t total = 0;
        for (std::int64_t v : node.n) total += v;
        int best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < node.acts.size(); ++i) {
          const double q = node.n[i] > 0 ? q_norm(node.q_sum[i] / node.n[i]) : 0.0;
          const double u = mcts_u_value(cfg.c_puct, node.prior[i], total, node.n[i],
                                        cfg.denominator_offset);
          const double score = q + u;
          const bool wins =
              score > best_score ||
              (score == best_score && node.prior[i] > node.prior[best]);
          if (i == 0 || wins) {
            best = static_cast<int>(i);
            best_score = score;
          }
        }
        path.emplace_back(cur, best);
        if (node.child[best] < 0) {
          const int id = materialize(P::apply_action(node.state, node.acts[best]));
          arena[cur].child[best] = id;  // arena may have reallocated; re-index
        }
        cur = arena[cur].child[best];
        if (!arena[cur].expanded && !arena[cur].terminal) {
          expand(cur);
          break;  // evaluate the newly expanded node
        }
      }
      const double v = evaluate(arena[cur].state);
      for (auto [id, slot] : path) {
        arena[id].n[slot] += 1;
        arena[id].q_sum[slot] += v;
      }
    }

    // Commit the most-visited child (ties to the lower action index).
    TNode& r = arena[root];
    int commit = 0;
    for (std::size_t i = 1; i < r.acts.size(); ++i)
      if (r.n[i] > r.n[commit]) commit = static_cast<int>(i);
    if (stats) {
      MctsStats::DepthStats d;
      bool seen = false;
      for (std::size_t i = 0; i < r.acts.size(); ++i) {
        d.visits += r.n[i];
        if (r.n[i] > 0) {
          const double q = r.q_sum[i] / r.n[i];
          d.q_lo = seen ? std::min(d.q_lo, q) : q;
          d.q_hi = seen ? std::max(d.q_hi, q) : q;
          seen = true;
        }
      }
      stats->depths.push_back(d);
      stats->reward_lo = reward_lo;
      stats->reward_hi = reward_hi;
    }
    root_state = P::apply_action(r.state, r.acts[commit]);
  }

  // The incumbent is the best rollout seen across all depth phases.
  if (!log.incumbent().has_solution()) {
    // Degenerate budget: fall back to the committed construction.
    return make_solution<P>(inst, root_state.assigned);
  }
  return log.incumbent_solution();
}

}  // namespace sgbs

#endif  // SGBS_MCTS_HPP
