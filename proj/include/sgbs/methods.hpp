#ifndef SGBS_METHODS_HPP
#define SGBS_METHODS_HPP

#include <chrono>
#include <string>

#include "sgbs/adapt.hpp"
#include "sgbs/beam.hpp"
#include "sgbs/budget.hpp"
#include "sgbs/mcts.hpp"
#include "sgbs/rollout.hpp"
#include "sgbs/sgbs.hpp"

namespace sgbs {

enum class Method {
  kGreedy,
  kSampling,
  kBeam,
  kMcts,
  kSgbs,
  kActiveSearch,
  kEas,
  kSgbsEas,
};

inline const char* method_name(Method m) {
  switch (m) {
    case Method::kGreedy: return "greedy";
    case Method::kSampling: return "sampling";
    case Method::kBeam: return "beam";
    case Method::kMcts: return "mcts";
    case Method::kSgbs: return "sgbs";
    case Method::kActiveSearch: return "active-search";
    case Method::kEas: return "eas";
    case Method::kSgbsEas: return "sgbs-eas";
  }
  return "?";
}

inline bool parse_method(const std::string& name, Method& out) {
  if (name == "greedy") out = Method::kGreedy;
  else if (name == "sampling") out = Method::kSampling;
  else if (name == "beam") out = Method::kBeam;
  else if (name == "mcts") out = Method::kMcts;
  else if (name == "sgbs") out = Method::kSgbs;
  else if (name == "active-search" || name == "active_search") out = Method::kActiveSearch;
  else if (name == "eas") out = Method::kEas;
  else if (name == "sgbs-eas" || name == "sgbs+eas" || name == "sgbs_eas") out = Method::kSgbsEas;
  else return false;
  return true;
}

/// One method entry of an experiment; engine-specific knobs bundled.
struct MethodSpec {
  Method method = Method::kGreedy;
  SgbsConfig sgbs_config;
  MctsConfig mcts_config;
  EasConfig eas_config;
  int beam_width = 0;  // 0: use the whole budget as the width
};

/// Outcome of one (method, instance) run under a candidate budget.
struct MethodRun {
  Solution solution;
  std::int64_t consumed = 0;
  bool truncated = false;
  bool diverged = false;
  std::string divergence_message;
  std::vector<TracePoint> curve;
  std::vector<AdaptTraceRow> adapt_rows;
  double wall_seconds = 0.0;
};

/**
 * Runs one method on one instance under a shared candidate-solution
 * budget: every complete solution evaluated moves one counter, and the
 * method halts (or truncates) when the counter reaches the budget. The
 * report carries the incumbent-vs-count curve.
 */
template <typename P>
MethodRun run_with_budget(const MethodSpec& spec, const PolicyParams& params,
                          const typename P::Instance& inst, std::int64_t budget,
                          std::uint64_t seed) {
  MethodRun run;
  SearchLog log(budget);
  Rng rng(seed);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (spec.method) {
      case Method::kGreedy: {
        if (!log.exhausted()) {
          const Solution s =
              greedy_rollout<P>(Policy{params, std::nullopt}, P::initial_state(inst));
          log.record(s.actions, s.reward, "greedy");
        }
        run.solution = log.incumbent_solution();
        break;
      }
      case Method::kSampling: {
        const Policy pol{params, std::nullopt};
        const typename P::State root = P::initial_state(inst);
        while (!log.exhausted()) {
          const int batch = static_cast<int>(std::min<std::int64_t>(256, log.remaining()));
          const std::vector<Solution> samples = sample_rollouts<P>(pol, root, batch, rng);
          for (const Solution& s : samples) log.record(s.actions, s.reward, "sample");
        }
        run.solution = log.incumbent_solution();
        break;
      }
      case Method::kBeam: {
        const std::int64_t width =
            spec.beam_width > 0 ? std::min<std::int64_t>(spec.beam_width, budget) : budget;
        run.solution = nlp_beam_search<P>(Policy{params, std::nullopt}, inst,
                                          static_cast<int>(width), &log);
        break;
      }
      case Method::kMcts:
        run.solution = mcts_search<P>(Policy{params, std::nullopt}, inst, spec.mcts_config, log);
        break;
      case Method::kSgbs:
        run.solution = sgbs<P>(Policy{params, std::nullopt}, inst, spec.sgbs_config, log);
        break;
      case Method::kActiveSearch: {
        AdaptResult res = active_search<P>(params, inst, spec.eas_config, log, rng);
        run.solution = std::move(res.solution);
        run.adapt_rows = std::move(res.rows);
        break;
      }
      case Method::kEas: {
        AdaptResult res = eas<P>(params, inst, spec.eas_config, log, rng);
        run.solution = std::move(res.solution);
        run.adapt_rows = std::move(res.rows);
        break;
      }
      case Method::kSgbsEas: {
        EasConfig cfg = spec.eas_config;
        cfg.sgbs_config = spec.sgbs_config;
        AdaptResult res = sgbs_eas<P>(params, inst, cfg, log, rng);
        run.solution = std::move(res.solution);
        run.adapt_rows = std::move(res.rows);
        break;
      }
    }
  } catch (const DivergenceError& e) {
    run.diverged = true;
    run.divergence_message = e.what();
    run.solution = log.incumbent_solution();
  }
  run.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  run.consumed = log.consumed();
  run.truncated = log.truncated;
  run.curve = log.history();
  return run;
}

}  // namespace sgbs

#endif  // SGBS_METHODS_HPP
