#ifndef SGBS_FFSP_HPP
#define SGBS_FFSP_HPP

#include <algorithm>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sgbs/common.hpp"
#include "sgbs/problem.hpp"

namespace sgbs {

/**
 * @brief Flexible flow shop: jobs pass through stages in series, each
 * stage has parallel machines with per-job processing times.
 *
 * Scheduling is constructive, stage by stage. Within a stage the cursor
 * always sits on the machine with the earliest available time (ties by
 * machine index); the policy assigns it a ready job, or the no-op token
 * (action == num_jobs) which advances that machine to the next event
 * time. The no-op is only offered while a strictly later event exists
 * (another machine, or a job still finishing the previous stage), which
 * bounds every construction episode.
 */
struct FfspStage {
  std::vector<std::vector<int>> proc;  // proc[machine][job]
};

struct FfspInstance {
  int num_jobs = 0;
  std::vector<FfspStage> stages;
  int max_proc = 0;
  std::vector<std::vector<double>> rem_work;  // rem_work[stage][job], mean over machines of later stages

  FfspInstance(int jobs, std::vector<FfspStage> stage_list)
      : num_jobs(jobs), stages(std::move(stage_list)) {
    if (num_jobs < 1) throw std::invalid_argument("FfspInstance: need at least 1 job");
    if (stages.empty()) throw std::invalid_argument("FfspInstance: need at least 1 stage");
    for (const FfspStage& st : stages) {
      if (st.proc.empty()) throw std::invalid_argument("FfspInstance: stage with no machines");
      for (const auto& row : st.proc) {
        if (static_cast<int>(row.size()) != num_jobs)
          throw std::invalid_argument("FfspInstance: processing-time row size mismatch");
        for (int p : row) {
          if (p <= 0) throw std::invalid_argument("FfspInstance: processing time must be positive");
          max_proc = std::max(max_proc, p);
        }
      }
    }
    const int s = static_cast<int>(stages.size());
    rem_work.assign(s, std::vector<double>(num_jobs, 0.0));
    for (int k = s - 2; k >= 0; --k) {
      for (int j = 0; j < num_jobs; ++j) {
        const FfspStage& next = stages[k + 1];
        double mean = 0.0;
        for (const auto& row : next.proc) mean += row[j];
        mean /= static_cast<double>(next.proc.size());
        rem_work[k][j] = rem_work[k + 1][j] + mean;
      }
    }
  }

  int num_stages() const { return static_cast<int>(stages.size()); }
  int machines_at(int stage) const { return static_cast<int>(stages[stage].proc.size()); }
  int proc_time(int stage, int machine, int job) const { return stages[stage].proc[machine][job]; }
  double horizon() const { return static_cast<double>(num_stages()) * max_proc; }
};

struct FfspState {
  const FfspInstance* inst = nullptr;
  std::vector<Action> assigned;
  int stage = 0;
  std::vector<int> ready;          // per job: completion time at the previous stage
  std::vector<int> completed;      // per job: completion time in the current stage (0 = pending)
  std::vector<std::uint8_t> done;  // per job: scheduled in the current stage
  int scheduled_in_stage = 0;
  std::vector<int> machine_avail;  // machines of the current stage
  int cursor_machine = 0;

  int depth() const { return static_cast<int>(assigned.size()); }
  int noop_action() const { return inst->num_jobs; }
};

struct FfspProblem {
  using Instance = FfspInstance;
  using State = FfspState;
  static constexpr int kFeatureCount = 3;
  static constexpr const char* kName = "ffsp";

  static State initial_state(const Instance& inst) {
    State s;
    s.inst = &inst;
    s.ready.assign(inst.num_jobs, 0);
    s.completed.assign(inst.num_jobs, 0);
    s.done.assign(inst.num_jobs, 0);
    s.machine_avail.assign(inst.machines_at(0), 0);
    s.cursor_machine = 0;
    return s;
  }

  static bool is_terminal(const State& s) { return s.stage >= s.inst->num_stages(); }

  /// Ready unscheduled jobs (ascending), then the no-op token when a
  /// strictly later event exists.
  static void feasible_actions(const State& s, std::vector<Action>& out) {
    if (is_terminal(s)) throw std::logic_error("feasible_actions: terminal state");
    out.clear();
    const int now = s.machine_avail[s.cursor_machine];
    for (int j = 0; j < s.inst->num_jobs; ++j)
      if (!s.done[j] && s.ready[j] <= now) out.push_back(j);
    if (has_later_event(s)) out.push_back(s.noop_action());
  }

  static State apply_action(const State& s, Action a) {
    if (is_terminal(s)) throw std::logic_error("apply_action: terminal state");
    State next = s;
    if (!step(next, a)) throw std::invalid_argument("ffsp apply_action: infeasible action");
    return next;
  }

  /// Negative makespan; kInfeasibleReward if the tuple does not replay to
  /// exactly one terminal state.
  static double reward(const Instance& inst, std::span<const Action> actions) {
    State s = initial_state(inst);
    for (Action a : actions) {
      if (is_terminal(s)) return kInfeasibleReward;
      if (!step(s, a)) return kInfeasibleReward;
    }
    if (!is_terminal(s)) return kInfeasibleReward;
    int makespan = 0;
    for (int c : s.ready) makespan = std::max(makespan, c);
    return -static_cast<double>(makespan);
  }

  /// f0 = processing time on the cursor machine / max processing time;
  /// f1 = mean remaining work across later stages / horizon; f2 = no-op flag.
  static void features(const State& s, Action a, std::span<double> out) {
    const FfspInstance& inst = *s.inst;
    if (a == s.noop_action()) {
      out[0] = 0.0;
      out[1] = 0.0;
      out[2] = 1.0;
      return;
    }
    out[0] = static_cast<double>(inst.proc_time(s.stage, s.cursor_machine, a)) / inst.max_proc;
    out[1] = inst.rem_work[s.stage][a] / inst.horizon();
    out[2] = 0.0;
  }

  /// Earliest event strictly after the cursor machine's available time:
  /// another machine of the stage, or an unscheduled job's ready time.
  /// Returns -1 when none exists.
  static int next_event(const State& s) {
    const int now = s.machine_avail[s.cursor_machine];
    int best = -1;
    for (int m = 0; m < static_cast<int>(s.machine_avail.size()); ++m) {
      if (m == s.cursor_machine) continue;
      const int t = s.machine_avail[m];
      if (t > now && (best < 0 || t < best)) best = t;
    }
    for (int j = 0; j < s.inst->num_jobs; ++j) {
      if (s.done[j]) continue;
      const int t = s.ready[j];
      if (t > now && (best < 0 || t < best)) best = t;
    }
    return best;
  }

 private:
  static bool has_later_event(const State& s) { return next_event(s) >= 0; }

  static void recompute_cursor(State& s) {
    int best = 0;
    for (int m = 1; m < static_cast<int>(s.machine_avail.size()); ++m)
      if (s.machine_avail[m] < s.machine_avail[best]) best = m;
    s.cursor_machine = best;
  }

  // Mutating transition; returns false on infeasible input.
  static bool step(State& s, Action a) {
    const FfspInstance& inst = *s.inst;
    const int noop = inst.num_jobs;
    if (a < 0 || a > noop) return false;
    const int now = s.machine_avail[s.cursor_machine];
    if (a == noop) {
      const int t = next_event(s);
      if (t < 0) return false;
      s.machine_avail[s.cursor_machine] = t;
      s.assigned.push_back(a);
      recompute_cursor(s);
      return true;
    }
    if (s.done[a] || s.ready[a] > now) return false;
    const int completion = now + inst.proc_time(s.stage, s.cursor_machine, a);
    s.machine_avail[s.cursor_machine] = completion;
    s.completed[a] = completion;
    s.done[a] = 1;
    ++s.scheduled_in_stage;
    s.assigned.push_back(a);
    if (s.scheduled_in_stage == inst.num_jobs) {
      ++s.stage;
      s.ready = s.completed;
      if (s.stage < inst.num_stages()) {
        std::fill(s.completed.begin(), s.completed.end(), 0);
        std::fill(s.done.begin(), s.done.end(), 0);
        s.scheduled_in_stage = 0;
        s.machine_avail.assign(inst.machines_at(s.stage), 0);
        s.cursor_machine = 0;
        return true;
      }
    }
    recompute_cursor(s);
    return true;
  }
};

}  // namespace sgbs

#endif  // SGBS_FFSP_HPP
