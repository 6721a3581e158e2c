#ifndef SGBS_POLICY_HPP
#define SGBS_POLICY_HPP

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "sgbs/common.hpp"
#include "sgbs/problem.hpp"

namespace sgbs {

/**
 * @brief Base policy: one weight per feature plus a softmax temperature.
 *
 * The logit of action a in state s is -theta . f(s,a) / temperature, so
 * with theta = (1, 0, ...) and a distance-like first feature the argmax
 * action is the nearest choice (a softened nearest-neighbor policy).
 */
struct PolicyParams {
  std::vector<double> theta;
  double temperature = 0.1;
};

inline PolicyParams default_policy(int feature_count) {
  PolicyParams p;
  p.theta.assign(feature_count, 0.0);
  p.theta[0] = 1.0;
  p.temperature = 0.1;
  return p;
}

/**
 * @brief Inserted residual adapter (test-time trainable parameters).
 *
 * Two-layer perceptron over the feature vector: out = w2 . tanh(W1 f + b1) + b2,
 * added to the base logit per action. Insertion zeroes w2 and b2 so the
 * adapter output is exactly 0 and the combined policy reproduces the base
 * policy bit for bit; W1 is random so gradients can flow once w2 moves.
 */
struct EasParams {
  int hidden = 0;
  int features = 0;
  std::vector<double> w1;  // hidden x features, row-major
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden
  double b2 = 0.0;
  int version = 0;  // bumped by every adaptation update

  double output(std::span<const double> f, std::span<double> h) const {
    double out = b2;
    for (int j = 0; j < hidden; ++j) {
      double z = b1[j];
      const double* row = &w1[static_cast<std::size_t>(j) * features];
      for (int i = 0; i < features; ++i) z += row[i] * f[i];
      h[j] = std::tanh(z);
      out += w2[j] * h[j];
    }
    return out;
  }
};

inline constexpr int kDefaultAdapterHidden = 8;

inline EasParams make_eas_params(int feature_count, Rng& rng, int hidden = kDefaultAdapterHidden) {
  EasParams e;
  e.hidden = hidden;
  e.features = feature_count;
  e.w1.resize(static_cast<std::size_t>(hidden) * feature_count);
  const double scale = 1.0 / std::sqrt(static_cast<double>(feature_count));
  for (double& w : e.w1) w = scale * rng.next_normal();
  e.b1.assign(hidden, 0.0);
  e.w2.assign(hidden, 0.0);
  e.b2 = 0.0;
  return e;
}

/// Distribution over the feasible actions of one state.
struct ActionDistribution {
  std::vector<Action> actions;
  std::vector<double> logits;
  std::vector<double> probs;
  double log_norm = 0.0;  // log sum exp(logit - max_logit)
  double max_logit = 0.0;

  int index_of(Action a) const {
    for (std::size_t i = 0; i < actions.size(); ++i)
      if (actions[i] == a) return static_cast<int>(i);
    return -1;
  }

  /// Numerically stable log probability of the i-th feasible action.
  double log_prob_at(int i) const { return logits[i] - max_logit - log_norm; }

  int argmax() const {
    int best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i)
      if (probs[i] > probs[best]) best = static_cast<int>(i);
    return best;
  }
};

/// Gradient with respect to the adapter parameters, same shapes as EasParams.
struct PsiGrad {
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;

  static PsiGrad zeros(const EasParams& e) {
    PsiGrad g;
    g.w1.assign(e.w1.size(), 0.0);
    g.b1.assign(e.b1.size(), 0.0);
    g.w2.assign(e.w2.size(), 0.0);
    return g;
  }

  void add_scaled(const PsiGrad& o, double s) {
    for (std::size_t i = 0; i < w1.size(); ++i) w1[i] += s * o.w1[i];
    for (std::size_t i = 0; i < b1.size(); ++i) b1[i] += s * o.b1[i];
    for (std::size_t i = 0; i < w2.size(); ++i) w2[i] += s * o.w2[i];
    b2 += s * o.b2;
  }

  double squared_norm() const {
    double n = 0.0;
    for (double v : w1) n += v * v;
    for (double v : b1) n += v * v;
    for (double v : w2) n += v * v;
    n += b2 * b2;
    return n;
  }
};

inline void apply_psi_step(EasParams& e, const PsiGrad& g, double alpha) {
  for (std::size_t i = 0; i < e.w1.size(); ++i) e.w1[i] += alpha * g.w1[i];
  for (std::size_t i = 0; i < e.b1.size(); ++i) e.b1[i] += alpha * g.b1[i];
  for (std::size_t i = 0; i < e.w2.size(); ++i) e.w2[i] += alpha * g.w2[i];
  e.b2 += alpha * g.b2;
  ++e.version;
}

inline bool all_finite(const EasParams& e) {
  for (double v : e.w1)
    if (!std::isfinite(v)) return false;
  for (double v : e.b1)
    if (!std::isfinite(v)) return false;
  for (double v : e.w2)
    if (!std::isfinite(v)) return false;
  return std::isfinite(e.b2);
}

/// Evaluates the (combined) policy on a non-terminal state.
/// logit(a) = -theta.f(s,a)/temperature [+ adapter(f(s,a))].
template <typename P>
ActionDistribution eval_policy(const PolicyParams& params, const EasParams* eas,
                               const typename P::State& state) {
  static_assert(P::kFeatureCount <= 16);
  ActionDistribution dist;
  P::feasible_actions(state, dist.actions);
  const int n = static_cast<int>(dist.actions.size());
  dist.logits.resize(n);
  double f[16];
  std::vector<double> h(eas ? eas->hidden : 0);
  const int fc = P::kFeatureCount;
  for (int i = 0; i < n; ++i) {
    P::features(state, dist.actions[i], std::span<double>(f, fc));
    double dot = 0.0;
    for (int k = 0; k < fc; ++k) {
      if (!std::isfinite(f[k])) throw std::runtime_error("eval_policy: non-finite feature");
      dot += params.theta[k] * f[k];
    }
    double z = -dot / params.temperature;
    if (eas) z += eas->output(std::span<const double>(f, fc), h);
    dist.logits[i] = z;
  }
  dist.max_logit = dist.logits[0];
  for (int i = 1; i < n; ++i) dist.max_logit = std::max(dist.max_logit, dist.logits[i]);
  dist.probs.resize(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    dist.probs[i] = std::exp(dist.logits[i] - dist.max_logit);
    sum += dist.probs[i];
  }
  for (int i = 0; i < n; ++i) dist.probs[i] /= sum;
  dist.log_norm = std::log(sum);
  return dist;
}

/// H(pi) = -sum pi log pi.
inline double entropy(const ActionDistribution& dist) {
  double h = 0.0;
  for (std::size_t i = 0; i < dist.probs.size(); ++i)
    h -= dist.probs[i] * dist.log_prob_at(static_cast<int>(i));
  return h;
}

namespace detail {

/// Chains per-logit weights w_k into parameter space:
///   dL/dpsi   = sum_k w_k dz_k/dpsi,  dL/dtheta = sum_k w_k dz_k/dtheta,
/// with dz_k/dtheta_i = -f_k[i]/temperature and the adapter backprop
/// through out = w2 . tanh(W1 f + b1) + b2.
template <typename P>
void chain_logit_weights(const PolicyParams& params, const EasParams* eas,
                         const typename P::State& state, const ActionDistribution& dist,
                         std::span<const double> weights, PsiGrad* psi,
                         std::vector<double>* theta) {
  const int fc = P::kFeatureCount;
  double f[16];
  std::vector<double> h(eas ? eas->hidden : 0);
  for (std::size_t k = 0; k < dist.actions.size(); ++k) {
    const double w = weights[k];
    if (w == 0.0) continue;
    P::features(state, dist.actions[k], std::span<double>(f, fc));
    if (theta) {
      for (int i = 0; i < fc; ++i) (*theta)[i] += w * (-f[i] / params.temperature);
    }
    if (psi && eas) {
      eas->output(std::span<const double>(f, fc), h);
      psi->b2 += w;
      for (int j = 0; j < eas->hidden; ++j) {
        psi->w2[j] += w * h[j];
        const double back = w * eas->w2[j] * (1.0 - h[j] * h[j]);
        psi->b1[j] += back;
        double* row = &psi->w1[static_cast<std::size_t>(j) * fc];
        for (int i = 0; i < fc; ++i) row[i] += back * f[i];
      }
    }
  }
}

}  // namespace detail

/// d log pi(a|s) / d z_k = 1{k=a} - pi(k), chained into the adapter.
template <typename P>
PsiGrad log_prob_grad_psi(const PolicyParams& params, const EasParams& eas,
                          const typename P::State& state, Action action) {
  const ActionDistribution dist = eval_policy<P>(params, &eas, state);
  const int idx = dist.index_of(action);
  if (idx < 0) throw std::invalid_argument("log_prob_grad_psi: action not feasible");
  std::vector<double> w(dist.actions.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = (static_cast<int>(k) == idx ? 1.0 : 0.0) - dist.probs[k];
  PsiGrad g = PsiGrad::zeros(eas);
  detail::chain_logit_weights<P>(params, &eas, state, dist, w, &g, nullptr);
  return g;
}

template <typename P>
std::vector<double> log_prob_grad_theta(const PolicyParams& params, const EasParams* eas,
                                        const typename P::State& state, Action action) {
  const ActionDistribution dist = eval_policy<P>(params, eas, state);
  const int idx = dist.index_of(action);
  if (idx < 0) throw std::invalid_argument("log_prob_grad_theta: action not feasible");
  std::vector<double> w(dist.actions.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = (static_cast<int>(k) == idx ? 1.0 : 0.0) - dist.probs[k];
  std::vector<double> g(params.theta.size(), 0.0);
  detail::chain_logit_weights<P>(params, eas, state, dist, w, nullptr, &g);
  return g;
}

/// dH/dz_k = -pi_k (log pi_k + H), chained into the adapter.
template <typename P>
PsiGrad entropy_grad_psi(const PolicyParams& params, const EasParams& eas,
                         const typename P::State& state) {
  const ActionDistribution dist = eval_policy<P>(params, &eas, state);
  const double h_val = entropy(dist);
  std::vector<double> w(dist.actions.size());
  for (std::size_t k = 0; k < w.size(); ++k)
    w[k] = -dist.probs[k] * (dist.log_prob_at(static_cast<int>(k)) + h_val);
  PsiGrad g = PsiGrad::zeros(eas);
  detail::chain_logit_weights<P>(params, &eas, state, dist, w, &g, nullptr);
  return g;
}

template <typename P>
std::vector<double> entropy_grad_theta(const PolicyParams& params, const EasParams* eas,
                                       const typename P::State& state) {
  const ActionDistribution dist = eval_policy<P>(params, eas, state);
  const double h_val = entropy(dist);
  std::vector<double> w(dist.actions.size());
  for (std::size_t k = 0; k < w.size(); ++k)
    w[k] = -dist.probs[k] * (dist.log_prob_at(static_cast<int>(k)) + h_val);
  std::vector<double> g(params.theta.size(), 0.0);
  detail::chain_logit_weights<P>(params, eas, state, dist, w, nullptr, &g);
  return g;
}

enum class GradCheckTarget { kLogProb, kEntropy };

/**
 * Central-difference oracle for the analytic gradients: perturbs every
 * theta and psi component by +-1e-5 and returns the worst relative error
 * (denominator floored at 1e-8). Checks log pi(action|state) or the
 * entropy of pi(.|state).
 */
template <typename P>
double finite_diff_check(const PolicyParams& params, const EasParams* eas,
                         const typename P::State& state, GradCheckTarget target,
                         Action action = -1) {
  constexpr double kStep = 1e-5;
  if (target == GradCheckTarget::kLogProb && action < 0)
    throw std::invalid_argument("finite_diff_check: log-prob target needs an action");

  PolicyParams p = params;
  EasParams e_store;
  EasParams* e = nullptr;
  if (eas) {
    e_store = *eas;
    e = &e_store;
  }

  auto value = [&]() -> double {
    const ActionDistribution dist = eval_policy<P>(p, e, state);
    if (target == GradCheckTarget::kEntropy) return entropy(dist);
    const int idx = dist.index_of(action);
    if (idx < 0) throw std::invalid_argument("finite_diff_check: action not feasible");
    return dist.log_prob_at(idx);
  };

  double worst = 0.0;
  auto check = [&](double analytic, double* slot) {
    const double saved = *slot;
    *slot = saved + kStep;
    const double hi = value();
    *slot = saved - kStep;
    const double lo = value();
    *slot = saved;
    const double fd = (hi - lo) / (2.0 * kStep);
    const double diff = std::abs(fd - analytic);
    if (diff <= 1e-8) return;  // below the absolute floor: finite-difference noise
    const double denom = std::max({std::abs(fd), std::abs(analytic), 1e-8});
    worst = std::max(worst, diff / denom);
  };

  {
    std::vector<double> g = target == GradCheckTarget::kLogProb
                                ? log_prob_grad_theta<P>(params, eas, state, action)
                                : entropy_grad_theta<P>(params, eas, state);
    for (std::size_t i = 0; i < p.theta.size(); ++i) check(g[i], &p.theta[i]);
  }
  if (eas) {
    PsiGrad g = target == GradCheckTarget::kLogProb
                    ? log_prob_grad_psi<P>(params, *eas, state, action)
                    : entropy_grad_psi<P>(params, *eas, state);
    for (std::size_t i = 0; i < e->w1.size(); ++i) check(g.w1[i], &e->w1[i]);
    for (std::size_t i = 0; i < e->b1.size(); ++i) check(g.b1[i], &e->b1[i]);
    for (std::size_t i = 0; i < e->w2.size(); ++i) check(g.w2[i], &e->w2[i]);
    check(g.b2, &e->b2);
  }
  return worst;
}

}  // namespace sgbs

#endif  // SGBS_POLICY_HPP
