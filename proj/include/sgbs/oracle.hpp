#ifndef SGBS_ORACLE_HPP
#define SGBS_ORACLE_HPP

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "sgbs/cvrp.hpp"
#include "sgbs/ffsp.hpp"
#include "sgbs/problem.hpp"
#include "sgbs/tsp.hpp"

namespace sgbs {

/**
 * Desk-scale exact solvers. Size caps keep runtimes in seconds:
 * TSP n <= 13 (Held-Karp), CVRP n <= 8 (partition enumeration with exact
 * per-route orders), FFSP <= 5 jobs, <= 2 stages, <= 2 machines per stage
 * (exhaustive enumeration of the construction tree). Ties are broken by
 * the lexicographically smallest action tuple.
 */

inline Solution brute_force_optimum(const TspInstance& inst) {
  const int n = inst.size();
  if (n > 13) throw std::invalid_argument("brute_force_optimum(tsp): n > 13");
  const int m = n - 1;  // nodes 1..n-1, bit i-1 <-> node i
  const std::size_t full = (std::size_t{1} << m) - 1;
  // cost_to_go[S][j-1]: standing at node j with S visited (j's bit set),
  // cheapest way to visit the rest and return to node 0.
  std::vector<std::vector<double>> cost_to_go(full + 1, std::vector<double>(m, 0.0));
  for (int j = 1; j <= m; ++j) cost_to_go[full][j - 1] = inst.d(j, 0);
  for (std::size_t s = full - 1; s + 1 > 0; --s) {
    for (int j = 1; j <= m; ++j) {
      if (!(s >> (j - 1) & 1)) continue;
      double best = std::numeric_limits<double>::infinity();
      for (int k = 1; k <= m; ++k) {
        if (s >> (k - 1) & 1) continue;
        const double c = inst.d(j, k) + cost_to_go[s | (std::size_t{1} << (k - 1))][k - 1];
        if (c < best) best = c;
      }
      cost_to_go[s][j - 1] = best;
    }
    if (s == 0) break;
  }
  // Forward walk choosing the smallest next node that attains the optimum.
  std::vector<Action> actions;
  actions.reserve(m);
  std::size_t s = 0;
  int cur = 0;
  double best_total = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= m; ++k) {
    const double c = inst.d(0, k) + cost_to_go[std::size_t{1} << (k - 1)][k - 1];
    if (c < best_total) best_total = c;
  }
  while (static_cast<int>(actions.size()) < m) {
    const double target = actions.empty() ? best_total : cost_to_go[s][cur - 1];
    for (int k = 1; k <= m; ++k) {
      if (s >> (k - 1) & 1) continue;
      const std::size_t ns = s | (std::size_t{1} << (k - 1));
      if (inst.d(cur, k) + cost_to_go[ns][k - 1] == target) {
        actions.push_back(k);
        s = ns;
        cur = k;
        break;
      }
    }
  }
  return make_solution<TspProblem>(inst, std::move(actions));
}

namespace detail {

struct CvrpRoute {
  double cost = 0.0;
  std::vector<Action> order;  // lexicographically smallest min-cost order
};

// Exact open-route solver for one customer subset by permutation search.
inline CvrpRoute best_route(const CvrpInstance& inst, const std::vector<int>& members) {
  std::vector<int> perm = members;  // ascending -> next_permutation covers all, in lex order
  CvrpRoute best;
  best.cost = std::numeric_limits<double>::infinity();
  do {
    double c = inst.d(0, perm.front());
    for (std::size_t i = 0; i + 1 < perm.size(); ++i) c += inst.d(perm[i], perm[i + 1]);
    c += inst.d(perm.back(), 0);
    if (c < best.cost) {
      best.cost = c;
      best.order.assign(perm.begin(), perm.end());
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace detail

inline Solution brute_force_optimum(const CvrpInstance& inst) {
  const int n = inst.num_customers();
  if (n > 8) throw std::invalid_argument("brute_force_optimum(cvrp): n > 8");
  const std::size_t full = (std::size_t{1} << n) - 1;
  // Optimal order for every capacity-feasible customer subset.
  std::vector<detail::CvrpRoute> routes(full + 1);
  std::vector<char> feasible(full + 1, 0);
  for (std::size_t s = 1; s <= full; ++s) {
    int dem = 0;
    std::vector<int> members;
    for (int i = 1; i <= n; ++i) {
      if (s >> (i - 1) & 1) {
        dem += inst.demand(i);
        members.push_back(i);
      }
    }
    if (dem > inst.capacity) continue;
    feasible[s] = 1;
    routes[s] = detail::best_route(inst, members);
  }
  // Enumerate partitions into feasible routes; the block containing the
  // lowest unassigned customer anchors each recursion level.
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<Action> best_tuple;
  std::vector<std::size_t> chosen;
  auto assemble = [&](double cost) {
    std::vector<const detail::CvrpRoute*> rs;
    rs.reserve(chosen.size());
    for (std::size_t s : chosen) rs.push_back(&routes[s]);
    std::sort(rs.begin(), rs.end(), [](const detail::CvrpRoute* a, const detail::CvrpRoute* b) {
      return a->order.front() < b->order.front();
    });
    std::vector<Action> tuple;
    for (std::size_t i = 0; i < rs.size(); ++i) {
      if (i > 0) tuple.push_back(0);
      tuple.insert(tuple.end(), rs[i]->order.begin(), rs[i]->order.end());
    }
    if (cost < best_cost || (cost == best_cost && tuple < best_tuple)) {
      best_cost = cost;
      best_tuple = std::move(tuple);
    }
  };
  auto recurse = [&](auto&& self, std::size_t remaining, double cost) -> void {
    if (remaining == 0) {
      assemble(cost);
      return;
    }
    if (cost > best_cost) return;
    int anchor = 0;
    while (!(remaining >> anchor & 1)) ++anchor;
    const std::size_t anchor_bit = std::size_t{1} << anchor;
    const std::size_t rest = remaining & ~anchor_bit;
    // All subsets of `rest`, each joined with the anchor customer.
    std::size_t sub = rest;
    while (true) {
      const std::size_t block = sub | anchor_bit;
      if (feasible[block]) {
        chosen.push_back(block);
        self(self, remaining & ~block, cost + routes[block].cost);
        chosen.pop_back();
      }
      if (sub == 0) break;
      sub = (sub - 1) & rest;
    }
  };
  recurse(recurse, full, 0.0);
  return make_solution<CvrpProblem>(inst, std::move(best_tuple));
}

inline Solution brute_force_optimum(const FfspInstance& inst) {
  if (inst.num_jobs > 5 || inst.num_stages() > 2)
    throw std::invalid_argument("brute_force_optimum(ffsp): size above cap");
  for (int k = 0; k < inst.num_stages(); ++k)
    if (inst.machines_at(k) > 2)
      throw std::invalid_argument("brute_force_optimum(ffsp): size above cap");
  double best_reward = kInfeasibleReward;
  std::vector<Action> best_tuple;
  std::int64_t nodes = 0;
  // DFS in ascending action order: the first solution at any makespan is
  // the lexicographically smallest, so only strict improvements replace.
  auto dfs = [&](auto&& self, const FfspState& s) -> void {
    if (++nodes > 50'000'000)
      throw std::runtime_error("brute_force_optimum(ffsp): search exploded");
    if (FfspProblem::is_terminal(s)) {
      const double r = FfspProblem::reward(*s.inst, s.assigned);
      if (r > best_reward) {
        best_reward = r;
        best_tuple = s.assigned;
      }
      return;
    }
    if (is_feasible_reward(best_reward)) {
      int lb = 0;
      for (int t : s.machine_avail) lb = std::max(lb, t);
      for (int t : s.ready) lb = std::max(lb, t);
      for (int t : s.completed) lb = std::max(lb, t);
      if (-static_cast<double>(lb) <= best_reward) return;
    }
    std::vector<Action> acts;
    FfspProblem::feasible_actions(s, acts);
    for (Action a : acts) self(self, FfspProblem::apply_action(s, a));
  };
  dfs(dfs, FfspProblem::initial_state(inst));
  return make_solution<FfspProblem>(inst, std::move(best_tuple));
}

}  // namespace sgbs

#endif  // SGBS_ORACLE_HPP
