#ifndef SGBS_BUDGET_HPP
#define SGBS_BUDGET_HPP

#include <chrono>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgbs/common.hpp"
#include "sgbs/problem.hpp"

namespace sgbs {

/// Best complete feasible solution seen so far in a run. The reward never
/// decreases across offers.
struct IncumbentStore {
  std::vector<Action> actions;
  double reward = kInfeasibleReward;
  std::int64_t found_at_count = 0;
  int iteration = -1;
  std::string source;

  bool has_solution() const { return is_feasible_reward(reward); }

  /// Returns true when the offer strictly improved the incumbent.
  bool offer(std::span<const Action> acts, double r, std::int64_t count, int iter,
             std::string_view src) {
    if (r <= reward) return false;
    actions.assign(acts.begin(), acts.end());
    reward = r;
    found_at_count = count;
    iteration = iter;
    source = src;
    return true;
  }
};

/// One row of the incumbent-vs-candidate-count curve.
struct TracePoint {
  std::int64_t candidate_count = 0;
  double incumbent_cost = 0.0;
  std::int64_t wall_nanos = 0;
  std::string phase;
};

/**
 * @brief Shared candidate-solution budget and run trace.
 *
 * One budget unit is one complete solution evaluated (a greedy rollout,
 * a sample, or a terminal node scored); partial rollouts never consume
 * budget. Composed searches (SGBS inside the adaptation loop) share one
 * ledger so fair-budget comparisons count every candidate exactly once.
 */
class SearchLog {
 public:
  explicit SearchLog(std::int64_t budget)
      : budget_(budget), start_(std::chrono::steady_clock::now()) {
    if (budget < 0) throw std::invalid_argument("SearchLog: negative budget");
  }

  std::int64_t budget() const { return budget_; }
  std::int64_t consumed() const { return consumed_; }
  std::int64_t remaining() const { return budget_ - consumed_; }
  bool exhausted() const { return consumed_ >= budget_; }

  bool truncated = false;
  int iteration = 0;  // set by adaptation loops for incumbent bookkeeping

  /// Records one evaluated candidate. Call only after checking remaining().
  void record(std::span<const Action> actions, double reward, std::string_view phase) {
    if (consumed_ >= budget_) throw std::logic_error("SearchLog: budget overrun");
    ++consumed_;
    if (is_feasible_reward(reward) && incumbent_.offer(actions, reward, consumed_, iteration, phase)) {
      const auto now = std::chrono::steady_clock::now();
      history_.push_back(TracePoint{
          consumed_, -reward,
          std::chrono::duration_cast<std::chrono::nanoseconds>(now - start_).count(),
          std::string(phase)});
    }
  }

  const IncumbentStore& incumbent() const { return incumbent_; }
  const std::vector<TracePoint>& history() const { return history_; }

  Solution incumbent_solution() const {
    Solution s;
    s.actions = incumbent_.actions;
    s.reward = incumbent_.reward;
    return s;
  }

 private:
  std::int64_t budget_ = 0;
  std::int64_t consumed_ = 0;
  IncumbentStore incumbent_;
  std::vector<TracePoint> history_;
  std::chrono::steady_clock::time_point start_;
};

/// Curve CSV contract consumed by the harness: one row per incumbent
/// improvement. Wall-clock values vary run to run; every other column is
/// deterministic for a fixed seed.
inline void write_trace_csv(std::ostream& out, const SearchLog& log) {
  out << "candidate_count,incumbent_cost,wall_nanos,phase\n";
  for (const TracePoint& p : log.history())
    out << p.candidate_count << "," << format_double(p.incumbent_cost) << "," << p.wall_nanos
        << "," << p.phase << "\n";
}

}  // namespace sgbs

#endif  // SGBS_BUDGET_HPP
