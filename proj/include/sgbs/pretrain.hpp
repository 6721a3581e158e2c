#ifndef SGBS_PRETRAIN_HPP
#define SGBS_PRETRAIN_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "sgbs/adapt.hpp"
#include "sgbs/policy.hpp"
#include "sgbs/rollout.hpp"

namespace sgbs {

struct PretrainConfig {
  double learning_rate = 0.005;
  int samples_per_instance = 16;  // K, episodes per batch
  int num_instances = 64;         // training-set size, iterated every epoch
  double entropy_coeff = 0.0;     // lambda_1
  std::uint64_t seed = 0;
  int epochs = 10;
  int heldout_instances = 32;
};

struct PretrainCurvePoint {
  int epoch = 0;
  double heldout_mean_cost = 0.0;
};

struct PretrainResult {
  PolicyParams params;
  std::vector<PretrainCurvePoint> curve;   // one row per epoch
  std::vector<PolicyParams> checkpoints;   // post-epoch snapshots
};

/// Mean greedy cost of `params` over an instance set.
template <typename P>
double mean_greedy_cost(const PolicyParams& params,
                        const std::vector<typename P::Instance>& instances) {
  double total = 0.0;
  for (const auto& inst : instances) {
    const Solution s = greedy_rollout<P>(Policy{params, std::nullopt}, P::initial_state(inst));
    total += -s.reward;
  }
  return total / static_cast<double>(instances.size());
}

/// Mean policy entropy along the greedy trajectories of an instance set.
template <typename P>
double mean_policy_entropy(const PolicyParams& params,
                           const std::vector<typename P::Instance>& instances) {
  double total = 0.0;
  std::int64_t states = 0;
  for (const auto& inst : instances) {
    typename P::State s = P::initial_state(inst);
    while (!P::is_terminal(s)) {
      const ActionDistribution dist = eval_policy<P>(params, nullptr, s);
      total += entropy(dist);
      ++states;
      s = P::apply_action(s, dist.actions[dist.argmax()]);
    }
  }
  return states > 0 ? total / static_cast<double>(states) : 0.0;
}

/**
 * REINFORCE pretraining of the base weights. Per training instance, K
 * solutions are sampled, the batch-mean reward is the baseline, and theta
 * ascends (1/K) sum_i (R_i - b) sum_d grad log pi plus the entropy term
 * scaled by lambda_1. One pass over the training set per epoch; the curve
 * records held-out greedy cost after every epoch.
 */
template <typename P>
PretrainResult pretrain(const PretrainConfig& cfg,
                        const std::function<typename P::Instance(std::int64_t)>& make_instance,
                        PolicyParams init) {
  if (cfg.learning_rate < 0.0) throw std::invalid_argument("pretrain: negative learning rate");
  if (cfg.samples_per_instance < 2) throw std::invalid_argument("pretrain: K must be >= 2");
  if (cfg.epochs < 1 || cfg.num_instances < 1)
    throw std::invalid_argument("pretrain: epochs and num_instances must be >= 1");

  std::vector<typename P::Instance> train;
  train.reserve(cfg.num_instances);
  for (int i = 0; i < cfg.num_instances; ++i) train.push_back(make_instance(i));
  std::vector<typename P::Instance> heldout;
  heldout.reserve(cfg.heldout_instances);
  for (int i = 0; i < cfg.heldout_instances; ++i)
    heldout.push_back(make_instance(cfg.num_instances + i));

  PretrainResult result;
  result.params = std::move(init);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (int t = 0; t < cfg.num_instances; ++t) {
      const typename P::Instance& inst = train[t];
      Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch),
                          static_cast<std::uint64_t>(t)));
      const Policy pol{result.params, std::nullopt};
      const std::vector<Solution> samples =
          sample_rollouts<P>(pol, P::initial_state(inst), cfg.samples_per_instance, rng);
      double baseline = 0.0;
      for (const Solution& s : samples) baseline += s.reward;
      baseline /= static_cast<double>(samples.size());
      std::vector<double> grad(result.params.theta.size(), 0.0);
      grad_jrl_into<P>(result.params, nullptr, inst, samples, baseline, cfg.entropy_coeff,
                       nullptr, &grad);
      for (std::size_t i = 0; i < grad.size(); ++i) {
        result.params.theta[i] += cfg.learning_rate * grad[i];
        if (!std::isfinite(result.params.theta[i]))
          throw DivergenceError("pretrain: theta diverged at epoch " + std::to_string(epoch));
      }
    }
    result.curve.push_back({epoch, mean_greedy_cost<P>(result.params, heldout)});
    result.checkpoints.push_back(result.params);
  }
  return result;
}

}  // namespace sgbs

#endif  // SGBS_PRETRAIN_HPP
