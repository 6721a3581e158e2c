#ifndef SGBS_CVRP_HPP
#define SGBS_CVRP_HPP

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sgbs/common.hpp"
#include "sgbs/problem.hpp"

namespace sgbs {

/**
 * @brief Capacitated VRP with a single depot and integer demands.
 *
 * Node indexing: 0 is the depot, customers are 1..n. Action 0 is a depot
 * return; action i>0 serves customer i. Construction starts at the depot
 * with a full vehicle and is terminal once every customer is served; the
 * closing leg back to the depot is added by the reward.
 */
struct CvrpInstance {
  Vec2 depot;
  std::vector<Vec2> coords;    // customers, index 1..n maps to coords[i-1]
  std::vector<int> demands;    // per customer
  int capacity = 0;
  std::vector<double> dist;    // (n+1)^2, node 0 = depot

  CvrpInstance(Vec2 depot_pos, std::vector<Vec2> customers, std::vector<int> dem, int cap)
      : depot(depot_pos), coords(std::move(customers)), demands(std::move(dem)), capacity(cap) {
    const std::size_t n = coords.size();
    if (n < 1) throw std::invalid_argument("CvrpInstance: need at least 1 customer");
    if (demands.size() != n) throw std::invalid_argument("CvrpInstance: demand count mismatch");
    if (capacity <= 0) throw std::invalid_argument("CvrpInstance: capacity must be positive");
    for (int d : demands)
      if (d <= 0 || d > capacity)
        throw std::invalid_argument("CvrpInstance: demand must be in [1, capacity]");
    const std::size_t m = n + 1;
    dist.resize(m * m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        dist[i * m + j] = distance(node(static_cast<int>(i)), node(static_cast<int>(j)));
  }

  int num_customers() const { return static_cast<int>(coords.size()); }
  const Vec2& node(int i) const { return i == 0 ? depot : coords[i - 1]; }
  double d(int i, int j) const {
    return dist[static_cast<std::size_t>(i) * (coords.size() + 1) + j];
  }
  int demand(int i) const { return demands[i - 1]; }
};

struct CvrpState {
  const CvrpInstance* inst = nullptr;
  std::vector<Action> assigned;
  std::vector<std::uint8_t> visited;  // per customer, index 1..n -> visited[i-1]
  int visited_count = 0;
  int current = 0;  // 0 = depot
  int load = 0;

  int depth() const { return static_cast<int>(assigned.size()); }
};

struct CvrpProblem {
  using Instance = CvrpInstance;
  using State = CvrpState;
  static constexpr int kFeatureCount = 5;
  static constexpr const char* kName = "cvrp";

  static State initial_state(const Instance& inst) {
    State s;
    s.inst = &inst;
    s.visited.assign(inst.coords.size(), 0);
    s.current = 0;
    s.load = inst.capacity;
    return s;
  }

  static bool is_terminal(const State& s) {
    return s.visited_count == s.inst->num_customers();
  }

  /// Depot (action 0, only away from the depot), then every unvisited
  /// customer whose demand fits the remaining load, ascending.
  static void feasible_actions(const State& s, std::vector<Action>& out) {
    if (is_terminal(s)) throw std::logic_error("feasible_actions: terminal state");
    out.clear();
    if (s.current != 0) out.push_back(0);
    const int n = s.inst->num_customers();
    for (int i = 1; i <= n; ++i)
      if (!s.visited[i - 1] && s.inst->demand(i) <= s.load) out.push_back(i);
  }

  static State apply_action(const State& s, Action a) {
    const int n = s.inst->num_customers();
    if (a < 0 || a > n) throw std::invalid_argument("cvrp apply_action: action out of range");
    State next = s;
    next.assigned.push_back(a);
    if (a == 0) {
      if (s.current == 0)
        throw std::invalid_argument("cvrp apply_action: depot return while at depot");
      next.current = 0;
      next.load = s.inst->capacity;
    } else {
      if (s.visited[a - 1] || s.inst->demand(a) > s.load)
        throw std::invalid_argument("cvrp apply_action: infeasible customer");
      next.visited[a - 1] = 1;
      ++next.visited_count;
      next.current = a;
      next.load = s.load - s.inst->demand(a);
    }
    return next;
  }

  /// Negative total route length including the final depot leg. Revisits,
  /// capacity breaches and uncovered customers map to kInfeasibleReward.
  /// A depot-depot step is legal and adds zero length.
  static double reward(const Instance& inst, std::span<const Action> actions) {
    const int n = inst.num_customers();
    std::vector<std::uint8_t> seen(n, 0);
    int covered = 0;
    int cur = 0;
    int load = inst.capacity;
    double len = 0.0;
    for (Action a : actions) {
      if (a < 0 || a > n) return kInfeasibleReward;
      len += inst.d(cur, a);
      if (a == 0) {
        load = inst.capacity;
      } else {
        if (seen[a - 1]) return kInfeasibleReward;
        if (inst.demand(a) > load) return kInfeasibleReward;
        seen[a - 1] = 1;
        ++covered;
        load -= inst.demand(a);
      }
      cur = a;
    }
    if (covered != n) return kInfeasibleReward;
    len += inst.d(cur, 0);
    return -len;
  }

  /// f0 = d(current, j); f1 = d(j, depot); f2 = mean distance from j to
  /// the remaining unvisited customers; f3 = demand(j)/capacity (0 for the
  /// depot); f4 = remaining load / capacity before the action.
  static void features(const State& s, Action a, std::span<double> out) {
    const CvrpInstance& inst = *s.inst;
    const int n = inst.num_customers();
    out[0] = inst.d(s.current, a);
    out[1] = inst.d(a, 0);
    double sum = 0.0;
    int cnt = 0;
    for (int k = 1; k <= n; ++k) {
      if (!s.visited[k - 1] && k != a) {
        sum += inst.d(a, k);
        ++cnt;
      }
    }
    out[2] = cnt > 0 ? sum / cnt : 0.0;
    out[3] = a == 0 ? 0.0 : static_cast<double>(inst.demand(a)) / inst.capacity;
    out[4] = static_cast<double>(s.load) / inst.capacity;
  }
};

}  // namespace sgbs

#endif  // SGBS_CVRP_HPP
