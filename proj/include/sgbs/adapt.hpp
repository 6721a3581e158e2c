#ifndef SGBS_ADAPT_HPP
#define SGBS_ADAPT_HPP

#include <chrono>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "sgbs/budget.hpp"
#include "sgbs/policy.hpp"
#include "sgbs/rollout.hpp"
#include "sgbs/sgbs.hpp"

namespace sgbs {

/// Raised when an adaptation loop produces non-finite parameters.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EasConfig {
  double alpha = 0.1;             // learning rate
  double imitation_weight = 1.0;  // lambda, weight of the J_IL term
  int samples_per_iter = 32;      // M
  double entropy_coeff = 0.0;     // lambda_2 (entropy regularization)
  int max_iterations = std::numeric_limits<int>::max();
  double timeout_seconds = std::numeric_limits<double>::infinity();
  SgbsConfig sgbs_config;    // embedded SGBS call (sgbs_eas only)
  int eas_steps_per_sgbs = 1;
  int adapter_hidden = kDefaultAdapterHidden;
};

/// One row per parameter update; the adaptation trace CSV contract.
struct AdaptTraceRow {
  int iteration = 0;
  std::int64_t candidate_count = 0;
  double sgbs_cost = std::numeric_limits<double>::quiet_NaN();
  double best_sample_cost = std::numeric_limits<double>::quiet_NaN();
  double incumbent_cost = std::numeric_limits<double>::quiet_NaN();
  double grad_norm_jrl = 0.0;
  double grad_norm_jil = 0.0;
  double entropy_mean = 0.0;
  int psi_version_used_by_sgbs = -1;
};

struct AdaptResult {
  Solution solution;
  std::vector<AdaptTraceRow> rows;
  Policy final_policy;
};

inline void write_adapt_trace_csv(std::ostream& out, const std::vector<AdaptTraceRow>& rows) {
  out << "iteration,candidate_count,sgbs_cost,best_sample_cost,incumbent_cost,"
         "grad_norm_JRL,grad_norm_JIL,entropy_mean\n";
  for (const AdaptTraceRow& r : rows)
    out << r.iteration << "," << r.candidate_count << "," << format_double(r.sgbs_cost) << ","
        << format_double(r.best_sample_cost) << "," << format_double(r.incumbent_cost) << ","
        << format_double(r.grad_norm_jrl) << "," << format_double(r.grad_norm_jil) << ","
        << format_double(r.entropy_mean) << "\n";
}

/**
 * Policy-gradient term of the adaptation loss on a frozen sample batch:
 *   (1/M) sum_i (R(s^i) - baseline) sum_d grad log pi(a^i_d | s^i_d)
 * plus, when entropy_coeff > 0, (entropy_coeff/M) sum_i sum_d grad H(pi(.|s^i_d)).
 * Gradients flow into psi and/or theta depending on which outputs are given.
 */
template <typename P>
void grad_jrl_into(const PolicyParams& base, const EasParams* eas,
                   const typename P::Instance& inst, std::span<const Solution> samples,
                   double baseline, double entropy_coeff, PsiGrad* psi,
                   std::vector<double>* theta, double* entropy_mean_out = nullptr) {
  if (samples.size() < 2) throw std::invalid_argument("grad_jrl: need at least 2 samples");
  const double inv_m = 1.0 / static_cast<double>(samples.size());
  double entropy_sum = 0.0;
  std::int64_t entropy_states = 0;
  std::vector<double> weights;
  for (const Solution& sample : samples) {
    if (!is_feasible_reward(sample.reward))
      throw std::invalid_argument("grad_jrl: infeasible sample");
    const double advantage = (sample.reward - baseline) * inv_m;
    typename P::State state = P::initial_state(inst);
    for (Action a : sample.actions) {
      const ActionDistribution dist = eval_policy<P>(base, eas, state);
      const int idx = dist.index_of(a);
      if (idx < 0) throw std::invalid_argument("grad_jrl: sample action infeasible on replay");
      const double h_val = entropy(dist);
      entropy_sum += h_val;
      ++entropy_states;
      weights.assign(dist.actions.size(), 0.0);
      for (std::size_t k = 0; k < weights.size(); ++k) {
        const double d_logp = (static_cast<int>(k) == idx ? 1.0 : 0.0) - dist.probs[k];
        double w = advantage * d_logp;
        if (entropy_coeff > 0.0) {
          const double d_h = -dist.probs[k] * (dist.log_prob_at(static_cast<int>(k)) + h_val);
          w += entropy_coeff * inv_m * d_h;
        }
        weights[k] = w;
      }
      detail::chain_logit_weights<P>(base, eas, state, dist, weights, psi, theta);
      state = P::apply_action(state, a);
    }
  }
  if (entropy_mean_out)
    *entropy_mean_out = entropy_states > 0 ? entropy_sum / entropy_states : 0.0;
}

template <typename P>
PsiGrad grad_jrl(const PolicyParams& base, const EasParams& eas,
                 const typename P::Instance& inst, std::span<const Solution> samples,
                 double baseline, double entropy_coeff = 0.0) {
  PsiGrad g = PsiGrad::zeros(eas);
  grad_jrl_into<P>(base, &eas, inst, samples, baseline, entropy_coeff, &g, nullptr);
  return g;
}

/// Imitation term: sum_d grad_psi log pi(a*_d | s*_d) along the incumbent.
/// Throws if the stored incumbent does not replay feasibly.
template <typename P>
PsiGrad grad_jil(const PolicyParams& base, const EasParams& eas,
                 const typename P::Instance& inst, std::span<const Action> incumbent) {
  PsiGrad g = PsiGrad::zeros(eas);
  typename P::State state = P::initial_state(inst);
  std::vector<double> weights;
  for (Action a : incumbent) {
    if (P::is_terminal(state)) throw std::runtime_error("grad_jil: incumbent overruns terminal");
    const ActionDistribution dist = eval_policy<P>(base, &eas, state);
    const int idx = dist.index_of(a);
    if (idx < 0) throw std::runtime_error("grad_jil: incumbent action infeasible (corrupted store)");
    weights.assign(dist.actions.size(), 0.0);
    for (std::size_t k = 0; k < weights.size(); ++k)
      weights[k] = (static_cast<int>(k) == idx ? 1.0 : 0.0) - dist.probs[k];
    detail::chain_logit_weights<P>(base, &eas, state, dist, weights, &g, nullptr);
    state = P::apply_action(state, a);
  }
  return g;
}

namespace detail {

inline double cost_of(const Solution& s) { return -s.reward; }

template <typename P>
double mean_reward(std::span<const Solution> samples) {
  double m = 0.0;
  for (const Solution& s : samples) m += s.reward;
  return m / static_cast<double>(samples.size());
}

struct Deadline {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double limit_seconds;
  explicit Deadline(double limit) : limit_seconds(limit) {}
  bool expired() const {
    if (!std::isfinite(limit_seconds)) return false;
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
    return elapsed.count() >= limit_seconds;
  }
};

}  // namespace detail

/**
 * Test-time fine-tuning of all base weights on one instance (no inserted
 * layer, no imitation term). With a zero learning rate this reduces to
 * plain sampling on the same seed stream.
 */
template <typename P>
AdaptResult active_search(const PolicyParams& base, const typename P::Instance& inst,
                          const EasConfig& cfg, SearchLog& log, Rng& rng) {
  if (cfg.alpha < 0.0) throw std::invalid_argument("active_search: negative learning rate");
  Policy pol{base, std::nullopt};
  AdaptResult result;
  const typename P::State root = P::initial_state(inst);
  detail::Deadline deadline(cfg.timeout_seconds);
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    if (log.exhausted() || deadline.expired()) break;
    log.iteration = iter;
    const int batch = static_cast<int>(
        std::min<std::int64_t>(cfg.samples_per_iter, log.remaining()));
    if (batch < 1) break;
    const std::vector<Solution> samples = sample_rollouts<P>(pol, root, batch, rng);
    for (const Solution& s : samples) log.record(s.actions, s.reward, "sample");
    AdaptTraceRow row;
    row.iteration = iter;
    double best_sample = kInfeasibleReward;
    for (const Solution& s : samples) best_sample = std::max(best_sample, s.reward);
    row.best_sample_cost = -best_sample;
    if (batch >= 2 && cfg.alpha > 0.0) {
      const double baseline = detail::mean_reward<P>(samples);
      std::vector<double> g(pol.base.theta.size(), 0.0);
      grad_jrl_into<P>(pol.base, nullptr, inst, samples, baseline, cfg.entropy_coeff, nullptr,
                       &g, &row.entropy_mean);
      double norm = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        pol.base.theta[i] += cfg.alpha * g[i];
        norm += g[i] * g[i];
      }
      row.grad_norm_jrl = std::sqrt(norm);
      for (double v : pol.base.theta)
        if (!std::isfinite(v)) throw DivergenceError("active_search: theta diverged");
    }
    row.candidate_count = log.consumed();
    row.incumbent_cost = -log.incumbent().reward;
    result.rows.push_back(row);
  }
  result.solution = log.incumbent_solution();
  result.final_policy = pol;
  return result;
}

namespace detail {

/// Shared EAS / SGBS+EAS iteration loop; `use_sgbs` switches line 5 on.
template <typename P>
AdaptResult eas_loop(const PolicyParams& base, const typename P::Instance& inst,
                     const EasConfig& cfg, SearchLog& log, Rng& rng, bool use_sgbs) {
  if (cfg.alpha < 0.0) throw std::invalid_argument("eas: negative learning rate");
  if (cfg.samples_per_iter < 2) throw std::invalid_argument("eas: samples_per_iter must be >= 2");
  AdaptResult result;
  const typename P::State root = P::initial_state(inst);

  // Incumbent seeded with the greedy solution of the base policy.
  Policy pol{base, std::nullopt};
  if (!log.exhausted()) {
    const Solution greedy = greedy_rollout<P>(pol, root);
    log.record(greedy.actions, greedy.reward, "greedy");
  }
  pol.eas = make_eas_params(P::kFeatureCount, rng, cfg.adapter_hidden);

  detail::Deadline deadline(cfg.timeout_seconds);
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    if (log.exhausted() || deadline.expired()) break;
    log.iteration = iter;

    double sgbs_cost = std::numeric_limits<double>::quiet_NaN();
    int version_used = -1;
    if (use_sgbs) {
      version_used = pol.eas->version;
      const Solution s0 = sgbs<P>(pol, inst, cfg.sgbs_config, log);
      if (is_feasible_reward(s0.reward)) sgbs_cost = -s0.reward;
      if (log.truncated) break;
    }

    for (int step = 0; step < cfg.eas_steps_per_sgbs; ++step) {
      const int batch = static_cast<int>(
          std::min<std::int64_t>(cfg.samples_per_iter, log.remaining()));
      if (batch < 1) break;
      const std::vector<Solution> samples = sample_rollouts<P>(pol, root, batch, rng);
      for (const Solution& s : samples) log.record(s.actions, s.reward, "sample");

      AdaptTraceRow row;
      row.iteration = iter;
      row.sgbs_cost = sgbs_cost;
      row.psi_version_used_by_sgbs = version_used;
      double best_sample = kInfeasibleReward;
      for (const Solution& s : samples) best_sample = std::max(best_sample, s.reward);
      row.best_sample_cost = -best_sample;

      if (batch >= 2 && cfg.alpha > 0.0) {
        const double baseline = detail::mean_reward<P>(samples);
        PsiGrad g_rl = PsiGrad::zeros(*pol.eas);
        grad_jrl_into<P>(pol.base, &*pol.eas, inst, samples, baseline, cfg.entropy_coeff, &g_rl,
                         nullptr, &row.entropy_mean);
        row.grad_norm_jrl = std::sqrt(g_rl.squared_norm());
        if (cfg.imitation_weight > 0.0 && log.incumbent().has_solution()) {
          const PsiGrad g_il =
              grad_jil<P>(pol.base, *pol.eas, inst, log.incumbent().actions);
          row.grad_norm_jil = std::sqrt(g_il.squared_norm());
          g_rl.add_scaled(g_il, cfg.imitation_weight);
        }
        apply_psi_step(*pol.eas, g_rl, cfg.alpha);
        if (!all_finite(*pol.eas)) throw DivergenceError("eas: psi diverged");
      }
      row.candidate_count = log.consumed();
      row.incumbent_cost = -log.incumbent().reward;
      result.rows.push_back(row);
    }
  }
  result.solution = log.incumbent_solution();
  result.final_policy = pol;
  return result;
}

}  // namespace detail

/// EAS ablation: the SGBS+EAS loop without the SGBS call.
template <typename P>
AdaptResult eas(const PolicyParams& base, const typename P::Instance& inst, const EasConfig& cfg,
                SearchLog& log, Rng& rng) {
  return detail::eas_loop<P>(base, inst, cfg, log, rng, false);
}

/// Full alternation: SGBS under the current psi, then sampling-based psi
/// updates, sharing one incumbent and one candidate budget.
template <typename P>
AdaptResult sgbs_eas(const PolicyParams& base, const typename P::Instance& inst,
                     const EasConfig& cfg, SearchLog& log, Rng& rng) {
  return detail::eas_loop<P>(base, inst, cfg, log, rng, true);
}

}  // namespace sgbs

#endif  // SGBS_ADAPT_HPP
