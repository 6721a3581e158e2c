#ifndef SGBS_TSP_HPP
#define SGBS_TSP_HPP

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sgbs/common.hpp"
#include "sgbs/problem.hpp"

namespace sgbs {

/**
 * @brief Euclidean TSP on points in the unit square.
 *
 * Construction always starts at node 0, so a complete solution is the
 * ordered tuple of the remaining n-1 nodes. The tour cost counts the
 * closing leg back to node 0.
 */
struct TspInstance {
  std::vector<Vec2> coords;
  std::vector<double> dist;  // row-major n*n distance matrix

  explicit TspInstance(std::vector<Vec2> points) : coords(std::move(points)) {
    const std::size_t n = coords.size();
    if (n < 3) throw std::invalid_argument("TspInstance: need at least 3 nodes");
    for (const Vec2& p : coords) {
      if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0))
        throw std::invalid_argument("TspInstance: coordinate outside unit square");
    }
    dist.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        dist[i * n + j] = distance(coords[i], coords[j]);
  }

  int size() const { return static_cast<int>(coords.size()); }
  double d(int i, int j) const { return dist[static_cast<std::size_t>(i) * coords.size() + j]; }
};

/// Length of a closed tour given as a node cycle (closing leg included).
inline double tour_length(const TspInstance& inst, std::span<const int> cycle) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < cycle.size(); ++i) len += inst.d(cycle[i], cycle[i + 1]);
  if (!cycle.empty()) len += inst.d(cycle.back(), cycle.front());
  return len;
}

struct TspState {
  const TspInstance* inst = nullptr;
  std::vector<Action> assigned;
  std::vector<std::uint8_t> visited;
  int visited_count = 0;
  int current = 0;

  int depth() const { return static_cast<int>(assigned.size()); }
};

struct TspProblem {
  using Instance = TspInstance;
  using State = TspState;
  static constexpr int kFeatureCount = 3;
  static constexpr const char* kName = "tsp";

  static State initial_state(const Instance& inst) {
    State s;
    s.inst = &inst;
    s.visited.assign(inst.coords.size(), 0);
    s.visited[0] = 1;
    s.visited_count = 1;
    s.current = 0;
    return s;
  }

  static bool is_terminal(const State& s) {
    return s.visited_count == s.inst->size();
  }

  /// Unvisited nodes in ascending index order.
  static void feasible_actions(const State& s, std::vector<Action>& out) {
    if (is_terminal(s)) throw std::logic_error("feasible_actions: terminal state");
    out.clear();
    const int n = s.inst->size();
    for (int j = 0; j < n; ++j)
      if (!s.visited[j]) out.push_back(j);
  }

  static State apply_action(const State& s, Action a) {
    const int n = s.inst->size();
    if (a < 0 || a >= n || s.visited[a])
      throw std::invalid_argument("tsp apply_action: infeasible action");
    State next = s;
    next.assigned.push_back(a);
    next.visited[a] = 1;
    ++next.visited_count;
    next.current = a;
    return next;
  }

  /// Negative tour length; kInfeasibleReward on revisit / wrong length.
  static double reward(const Instance& inst, std::span<const Action> actions) {
    const int n = inst.size();
    if (static_cast<int>(actions.size()) != n - 1) return kInfeasibleReward;
    std::vector<std::uint8_t> seen(n, 0);
    seen[0] = 1;
    double len = 0.0;
    int cur = 0;
    for (Action a : actions) {
      if (a < 0 || a >= n || seen[a]) return kInfeasibleReward;
      seen[a] = 1;
      len += inst.d(cur, a);
      cur = a;
    }
    len += inst.d(cur, 0);
    return -len;
  }

  /// f0 = d(current, j); f1 = d(j, start node); f2 = mean distance from j
  /// to the other unvisited nodes (0 when j is the last one).
  static void features(const State& s, Action a, std::span<double> out) {
    const TspInstance& inst = *s.inst;
    const int n = inst.size();
    out[0] = inst.d(s.current, a);
    out[1] = inst.d(a, 0);
    double sum = 0.0;
    int cnt = 0;
    for (int k = 0; k < n; ++k) {
      if (!s.visited[k] && k != a) {
        sum += inst.d(a, k);
        ++cnt;
      }
    }
    out[2] = cnt > 0 ? sum / cnt : 0.0;
  }
};

}  // namespace sgbs

#endif  // SGBS_TSP_HPP
