#include "readsim/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "readsim/errors.hpp"

namespace readsim {

void PpoConfig::validate() const {
  auto unit = [](double v, const char* key) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(key, "must be in [0,1]");
  };
  unit(gamma, "ppo.gamma");
  unit(gae_lambda, "ppo.gae_lambda");
  if (!(clip_eps > 0.0)) throw ConfigError("ppo.clip_eps", "must be > 0");
  if (!(learning_rate > 0.0)) throw ConfigError("ppo.learning_rate", "must be > 0");
  if (epochs_per_update == 0) throw ConfigError("ppo.epochs_per_update", "must be >= 1");
  if (minibatch_size == 0) throw ConfigError("ppo.minibatch_size", "must be >= 1");
  if (entropy_coef < 0.0) throw ConfigError("ppo.entropy_coef", "must be >= 0");
  if (value_coef < 0.0) throw ConfigError("ppo.value_coef", "must be >= 0");
  if (parallel_envs == 0) throw ConfigError("ppo.parallel_envs", "must be >= 1");
  if (steps_per_update < parallel_envs) throw ConfigError("ppo.steps_per_update", "must be >= parallel_envs");
  for (const auto h : hidden_sizes) {
    if (h == 0) throw ConfigError("ppo.hidden_sizes", "layer sizes must be >= 1");
  }
}

PolicyParameters PolicyParameters::create(std::uint64_t seed, const std::vector<std::size_t>& hidden_sizes) {
  std::vector<std::size_t> policy_sizes{kNumFeatures};
  policy_sizes.insert(policy_sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
  auto value_sizes = policy_sizes;
  policy_sizes.push_back(kNumActions);
  value_sizes.push_back(1);

  PolicyParameters params{Mlp(policy_sizes), Mlp(value_sizes), {}, {}};
  Rng rng(derive_seed(seed, 0x1417));
  params.policy.initialize(rng, std::sqrt(2.0), 0.01);
  params.value.initialize(rng, std::sqrt(2.0), 1.0);
  return params;
}

bool PolicyParameters::all_finite() const {
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  return finite(policy.parameters()) && finite(value.parameters());
}

namespace {

// Log-softmax of the logits, computed stably.
ActionProbabilities log_softmax(const std::vector<double>& logits) {
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (const double z : logits) sum += std::exp(z - max_logit);
  const double log_norm = max_logit + std::log(sum);
  ActionProbabilities out{};
  for (std::size_t i = 0; i < kNumActions; ++i) out[i] = logits[i] - log_norm;
  return out;
}

}  // namespace

PolicyOutput policy_forward(const PolicyParameters& params, std::span<const double> features) {
  if (features.size() != kNumFeatures) {
    throw ShapeMismatch("expected " + std::to_string(kNumFeatures) + " features, got " +
                        std::to_string(features.size()));
  }
  const auto log_probs = log_softmax(params.policy.forward(features));
  PolicyOutput out;
  for (std::size_t i = 0; i < kNumActions; ++i) out.probabilities[i] = std::exp(log_probs[i]);
  out.value = params.value.forward(features)[0];
  return out;
}

double log_probability(const ActionProbabilities& probs, Action action) {
  return std::log(probs[action_index(action)]);
}

double entropy(const ActionProbabilities& probs) {
  double h = 0.0;
  for (const double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

ActionProbabilities NeuralPolicy::action_probabilities(const Features& features) const {
  return policy_forward(*params_, features).probabilities;
}

GaeResult compute_gae(const RolloutBuffer& buffer, double gamma, double lambda) {
  if (buffer.empty()) throw EmptyBuffer("cannot estimate advantages of an empty buffer");
  std::vector<RolloutBuffer::Segment> segments = buffer.segments;
  if (segments.empty()) segments.push_back({0, buffer.size(), 0.0});

  GaeResult out;
  out.advantages.assign(buffer.size(), 0.0);
  out.returns.assign(buffer.size(), 0.0);
  for (const auto& seg : segments) {
    double next_value = seg.bootstrap_value;
    double next_advantage = 0.0;
    for (std::size_t t = seg.end; t-- > seg.begin;) {
      const auto& step = buffer.steps[t];
      const double not_done = step.done ? 0.0 : 1.0;
      const double delta = step.reward + gamma * next_value * not_done - step.value;
      const double advantage = delta + gamma * lambda * not_done * next_advantage;
      out.advantages[t] = advantage;
      out.returns[t] = advantage + step.value;
      next_value = step.value;
      next_advantage = advantage;
    }
  }
  return out;
}

std::vector<double> normalize_advantages(std::span<const double> advantages) {
  std::vector<double> out(advantages.begin(), advantages.end());
  if (out.empty()) return out;
  const double n = static_cast<double>(out.size());
  const double mean = std::accumulate(out.begin(), out.end(), 0.0) / n;
  double var = 0.0;
  for (const double a : out) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / n);
  for (auto& a : out) a = sd > 1e-12 ? (a - mean) / sd : 0.0;
  return out;
}

double clipped_surrogate(double ratio, double advantage, double clip_eps) {
  const double clipped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
  return std::min(ratio * advantage, clipped * advantage);
}

LossTerms ppo_loss(const PolicyParameters& params, std::span<const LossSample> batch, const PpoConfig& config,
                   std::vector<double>* policy_grad, std::vector<double>* value_grad) {
  LossTerms terms;
  if (batch.empty()) return terms;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  Mlp::Cache policy_cache;
  Mlp::Cache value_cache;
  std::vector<double> grad_logits(kNumActions);
  for (const auto& sample : batch) {
    const auto logits = params.policy.forward(sample.features, policy_cache);
    const auto log_probs = log_softmax(logits);
    ActionProbabilities probs{};
    for (std::size_t i = 0; i < kNumActions; ++i) probs[i] = std::exp(log_probs[i]);
    const auto a = action_index(sample.action);
    const double log_ratio = log_probs[a] - sample.old_log_prob;
    const double ratio = std::exp(log_ratio);
    const double objective = clipped_surrogate(ratio, sample.advantage, config.clip_eps);
    const double h = entropy(probs);
    const double value = params.value.forward(sample.features, value_cache)[0];
    const double value_error = value - sample.return_target;

    terms.policy_objective += objective * inv_n;
    terms.value_loss += value_error * value_error * inv_n;
    terms.entropy += h * inv_n;
    terms.clip_fraction += (std::abs(ratio - 1.0) > config.clip_eps ? 1.0 : 0.0) * inv_n;
    terms.approx_kl += ((ratio - 1.0) - log_ratio) * inv_n;

    if (policy_grad != nullptr) {
      // The unclipped branch carries the gradient whenever min() selects it.
      const double clipped = std::clamp(ratio, 1.0 - config.clip_eps, 1.0 + config.clip_eps);
      const bool unclipped_active = ratio * sample.advantage <= clipped * sample.advantage;
      const double d_logp = unclipped_active ? -sample.advantage * ratio : 0.0;
      for (std::size_t j = 0; j < kNumActions; ++j) {
        const double indicator = j == a ? 1.0 : 0.0;
        const double entropy_term = probs[j] > 0.0 ? probs[j] * (log_probs[j] + h) : 0.0;
        grad_logits[j] = (d_logp * (indicator - probs[j]) + config.entropy_coef * entropy_term) * inv_n;
      }
      params.policy.backward(policy_cache, grad_logits, *policy_grad);
    }
    if (value_grad != nullptr) {
      const double d_value = 2.0 * config.value_coef * value_error * inv_n;
      params.value.backward(value_cache, std::span<const double>(&d_value, 1), *value_grad);
    }
  }
  terms.total = -terms.policy_objective + config.value_coef * terms.value_loss - config.entropy_coef * terms.entropy;
  return terms;
}

UpdateStats ppo_update(PolicyParameters& params, const RolloutBuffer& buffer, const GaeResult& gae,
                       const PpoConfig& config, Rng& rng) {
  if (buffer.empty()) throw EmptyBuffer("cannot update from an empty buffer");
  const auto advantages = normalize_advantages(gae.advantages);
  std::vector<LossSample> samples(buffer.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const auto& step = buffer.steps[i];
    samples[i] = LossSample{step.features, step.action, step.log_prob, advantages[i], gae.returns[i]};
  }

  const AdamConfig adam{config.learning_rate};
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<LossSample> minibatch;
  std::vector<double> policy_grad(params.policy.parameter_count());
  std::vector<double> value_grad(params.value.parameter_count());
  UpdateStats stats;
  std::size_t batches = 0;
  for (std::size_t epoch = 0; epoch < config.epochs_per_update; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += config.minibatch_size) {
      const auto end = std::min(order.size(), start + config.minibatch_size);
      minibatch.clear();
      for (std::size_t k = start; k < end; ++k) minibatch.push_back(samples[order[k]]);
      std::fill(policy_grad.begin(), policy_grad.end(), 0.0);
      std::fill(value_grad.begin(), value_grad.end(), 0.0);
      const auto terms = ppo_loss(params, minibatch, config, &policy_grad, &value_grad);
      if (!std::isfinite(terms.total)) {
        throw TrainingDiverged("non-finite loss (objective " + std::to_string(terms.policy_objective) +
                               ", value loss " + std::to_string(terms.value_loss) + ")");
      }
      adam_step(params.policy.parameters(), policy_grad, params.policy_adam, adam);
      adam_step(params.value.parameters(), value_grad, params.value_adam, adam);
      stats.policy_objective += terms.policy_objective;
      stats.value_loss += terms.value_loss;
      stats.entropy += terms.entropy;
      stats.clip_fraction += terms.clip_fraction;
      stats.approx_kl += terms.approx_kl;
      ++batches;
    }
  }
  if (!params.all_finite()) throw TrainingDiverged("parameters became non-finite");
  const double inv = 1.0 / static_cast<double>(batches);
  stats.policy_objective *= inv;
  stats.value_loss *= inv;
  stats.entropy *= inv;
  stats.clip_fraction *= inv;
  stats.approx_kl *= inv;
  return stats;
}

namespace {

struct Worker {
  std::unique_ptr<RlEnvironment> env;
  Rng rng;
  Features features{};
  double episode_return = 0.0;
  std::uint64_t episodes = 0;
  std::uint64_t seed_base = 0;
  std::vector<Transition> steps;
  std::vector<double> finished_returns;

  void begin_episode() {
    features = env->reset(derive_seed(seed_base, episodes++));
    episode_return = 0.0;
  }

  void collect(const PolicyParameters& params, std::size_t count) {
    steps.clear();
    finished_returns.clear();
    for (std::size_t i = 0; i < count; ++i) {
      const auto out = policy_forward(params, features);
      const auto action = sample_action(out.probabilities, rng);
      const auto result = env->step(action);
      steps.push_back(Transition{features, action, log_probability(out.probabilities, action), result.reward,
                                 out.value, result.terminal});
      episode_return += result.reward;
      if (result.terminal) {
        finished_returns.push_back(episode_return);
        begin_episode();
      } else {
        features = result.features;
      }
    }
  }
};

}  // namespace

TrainResult train(const EnvFactory& make_env, const PpoConfig& config, std::uint64_t seed, std::size_t threads,
                  const std::function<void(const CurvePoint&)>& on_update) {
  config.validate();
  TrainResult result{PolicyParameters::create(seed, config.hidden_sizes), {}};
  if (config.total_updates == 0) return result;

  std::vector<Worker> workers(config.parallel_envs);
  for (std::size_t e = 0; e < workers.size(); ++e) {
    workers[e].env = make_env(e);
    workers[e].rng.seed(derive_seed(seed, 0x5000 + e));
    workers[e].seed_base = derive_seed(seed, 0x100000 + e);
    workers[e].begin_episode();
  }
  const std::size_t per_env = (config.steps_per_update + config.parallel_envs - 1) / config.parallel_envs;
  threads = std::clamp<std::size_t>(threads, 1, workers.size());
  Rng update_rng(derive_seed(seed, 0xa11));

  for (std::size_t update = 0; update < config.total_updates; ++update) {
    const auto& params = result.params;
    if (threads == 1) {
      for (auto& w : workers) w.collect(params, per_env);
    } else {
      std::vector<std::exception_ptr> errors(threads);
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
          try {
            for (std::size_t e = t; e < workers.size(); e += threads) workers[e].collect(params, per_env);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      for (const auto& err : errors) {
        if (err) std::rethrow_exception(err);
      }
    }

    RolloutBuffer buffer;
    std::vector<double> finished;
    for (auto& w : workers) {
      const auto begin = buffer.steps.size();
      buffer.steps.insert(buffer.steps.end(), w.steps.begin(), w.steps.end());
      const double bootstrap = w.steps.back().done ? 0.0 : policy_forward(params, w.features).value;
      buffer.segments.push_back({begin, buffer.steps.size(), bootstrap});
      finished.insert(finished.end(), w.finished_returns.begin(), w.finished_returns.end());
    }

    const auto gae = compute_gae(buffer, config.gamma, config.gae_lambda);
    const auto stats = ppo_update(result.params, buffer, gae, config, update_rng);

    CurvePoint point;
    point.update = update;
    point.mean_return = finished.empty() ? std::numeric_limits<double>::quiet_NaN()
                                         : std::accumulate(finished.begin(), finished.end(), 0.0) /
                                               static_cast<double>(finished.size());
    point.clip_fraction = stats.clip_fraction;
    point.approx_kl = stats.approx_kl;
    point.entropy = stats.entropy;
    result.curve.push_back(point);
    if (on_update) on_update(point);
  }
  return result;
}

}  // namespace readsim
