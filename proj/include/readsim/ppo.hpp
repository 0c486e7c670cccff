#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "readsim/agent.hpp"
#include "readsim/episode.hpp"
#include "readsim/mlp.hpp"

namespace readsim {

struct PpoConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_eps = 0.2;
  double learning_rate = 3e-4;
  std::size_t epochs_per_update = 4;
  std::size_t minibatch_size = 64;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  std::size_t steps_per_update = 4096;
  std::size_t parallel_envs = 8;
  std::size_t total_updates = 100;
  std::vector<std::size_t> hidden_sizes = {64, 64};

  void validate() const;
};

// Policy network (features -> action logits) and value network
// (features -> scalar) with their optimizer moments.
struct PolicyParameters {
  Mlp policy;
  Mlp value;
  AdamState policy_adam;
  AdamState value_adam;

  static PolicyParameters create(std::uint64_t seed, const std::vector<std::size_t>& hidden_sizes = {64, 64});
  bool all_finite() const;
};

struct PolicyOutput {
  ActionProbabilities probabilities{};
  double value = 0.0;
};

// Softmax over logits plus the value estimate. Throws ShapeMismatch unless
// `features` has 12 entries.
PolicyOutput policy_forward(const PolicyParameters& params, std::span<const double> features);

double log_probability(const ActionProbabilities& probs, Action action);
double entropy(const ActionProbabilities& probs);

class NeuralPolicy : public Policy {
 public:
  explicit NeuralPolicy(std::shared_ptr<const PolicyParameters> params) : params_(std::move(params)) {}
  ActionProbabilities action_probabilities(const Features& features) const override;

 private:
  std::shared_ptr<const PolicyParameters> params_;
};

struct Transition {
  Features features{};
  Action action = Action::kContinue;
  double log_prob = 0.0;
  double reward = 0.0;
  double value = 0.0;
  bool done = false;
};

// Transitions grouped into contiguous per-environment segments. A segment
// that does not end in a terminal step bootstraps from `bootstrap_value`.
struct RolloutBuffer {
  struct Segment {
    std::size_t begin = 0;
    std::size_t end = 0;
    double bootstrap_value = 0.0;
  };
  std::vector<Transition> steps;
  std::vector<Segment> segments;

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
};

struct GaeResult {
  std::vector<double> advantages;  // raw, unnormalized
  std::vector<double> returns;     // advantages + values
};

// Throws EmptyBuffer for an empty buffer. Without explicit segments the
// whole buffer is one segment with a zero bootstrap.
GaeResult compute_gae(const RolloutBuffer& buffer, double gamma, double lambda);

// Mean 0, standard deviation 1 (population SD); constant input maps to 0.
std::vector<double> normalize_advantages(std::span<const double> advantages);

// min(ratio * A, clip(ratio, 1 - eps, 1 + eps) * A)
double clipped_surrogate(double ratio, double advantage, double clip_eps);

struct LossSample {
  Features features{};
  Action action = Action::kContinue;
  double old_log_prob = 0.0;
  double advantage = 0.0;
  double return_target = 0.0;
};

struct LossTerms {
  double total = 0.0;
  double policy_objective = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
};

// Minibatch loss  -objective + value_coef * MSE - entropy_coef * entropy,
// averaged over samples. Gradients are accumulated when the pointers are set.
LossTerms ppo_loss(const PolicyParameters& params, std::span<const LossSample> batch, const PpoConfig& config,
                   std::vector<double>* policy_grad = nullptr, std::vector<double>* value_grad = nullptr);

struct UpdateStats {
  double policy_objective = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
};

// Epochs of shuffled minibatch Adam steps on the clipped objective. Throws
// TrainingDiverged on a non-finite loss.
UpdateStats ppo_update(PolicyParameters& params, const RolloutBuffer& buffer, const GaeResult& gae,
                       const PpoConfig& config, Rng& rng);

struct CurvePoint {
  std::size_t update = 0;
  double mean_return = 0.0;  // NaN when no episode finished during the update
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  double entropy = 0.0;
};

struct TrainResult {
  PolicyParameters params;
  std::vector<CurvePoint> curve;
};

using EnvFactory = std::function<std::unique_ptr<RlEnvironment>(std::size_t env_index)>;

// Collects steps_per_update transitions from parallel_envs environments
// (`threads` workers; results are gathered in environment order so the
// outcome does not depend on the thread count), then runs ppo_update.
TrainResult train(const EnvFactory& make_env, const PpoConfig& config, std::uint64_t seed,
                  std::size_t threads = 1, const std::function<void(const CurvePoint&)>& on_update = {});

}  // namespace readsim
