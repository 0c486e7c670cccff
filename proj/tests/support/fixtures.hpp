#pragma once

// Small builders shared by the unit and acceptance tests.

#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "readsim/belief.hpp"
#include "readsim/corpus.hpp"
#include "readsim/perception.hpp"
#include "support/oracles.hpp"

namespace fixture {

inline std::shared_ptr<const readsim::CandidateSet> candidates(std::vector<std::string> words,
                                                               std::vector<double> frequency,
                                                               std::size_t true_index = 0) {
  auto set = std::make_shared<readsim::CandidateSet>();
  set->words = std::move(words);
  set->frequency_rel = std::move(frequency);
  set->true_index = true_index;
  return set;
}

inline readsim::WordToken token(const std::string& surface, double predictability = 0.0,
                                std::size_t first_letter_offset = 0) {
  readsim::WordToken t;
  t.surface = surface;
  t.predictability = predictability;
  t.first_letter_offset = first_letter_offset;
  return t;
}

// Belief whose prior equals `prior` exactly (frequency-only mixing).
inline readsim::LexicalBelief belief_with_prior(const std::vector<std::string>& words,
                                                const std::vector<double>& prior) {
  return readsim::init_lexical_belief(token(words.front()), candidates(words, prior), 0.0);
}

// Eccentricity that yields identification probability `p` under `model`.
inline double eccentricity_for(double p, const readsim::AcuityModel& model) {
  const double g = (p - model.p_floor) / (1.0 - model.p_floor);
  return model.sigma * std::sqrt(-2.0 * std::log(g));
}

// Independent restatement of the acuity curve.
inline double acuity(double e, double sigma, double p_floor) {
  return p_floor + (1.0 - p_floor) * std::exp(-(e * e) / (2.0 * sigma * sigma));
}

struct RandomCase {
  std::vector<std::string> words;
  std::vector<double> prior;
  std::vector<readsim::LetterObservation> observations;
  std::vector<oracle::Observation> oracle_observations;
};

// Random vocabulary of equal-length words over a small alphabet (so letters
// collide), random prior and random letter observations.
inline RandomCase random_case(std::mt19937_64& rng, const readsim::AcuityModel& model) {
  std::uniform_int_distribution<std::size_t> vocab_dist(1, 100);
  std::uniform_int_distribution<std::size_t> len_dist(1, 8);
  std::uniform_int_distribution<std::size_t> obs_dist(0, 10);
  std::uniform_int_distribution<int> letter_dist(0, 5);
  std::uniform_real_distribution<double> unit(0.01, 1.0);
  std::uniform_real_distribution<double> ecc(0.0, 8.0);

  RandomCase c;
  const auto length = len_dist(rng);
  const auto vocab = vocab_dist(rng);
  for (std::size_t i = 0; i < vocab; ++i) {
    std::string w;
    for (std::size_t k = 0; k < length; ++k) w.push_back(static_cast<char>('a' + letter_dist(rng)));
    c.words.push_back(w);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < vocab; ++i) {
    c.prior.push_back(unit(rng));
    total += c.prior.back();
  }
  for (auto& p : c.prior) p /= total;
  const auto n_obs = obs_dist(rng);
  std::uniform_int_distribution<std::size_t> slot_dist(0, length - 1);
  for (std::size_t k = 0; k < n_obs; ++k) {
    readsim::LetterObservation o;
    o.letter_offset = slot_dist(rng);
    o.observed_letter = static_cast<char>('a' + letter_dist(rng));
    o.eccentricity = ecc(rng);
    c.observations.push_back(o);
    c.oracle_observations.push_back({o.letter_offset, o.observed_letter, acuity(o.eccentricity, model.sigma, model.p_floor)});
  }
  return c;
}

}  // namespace fixture

#include "readsim/ppo.hpp"

namespace fixture {

// Random small networks and a random minibatch whose old log-probabilities
// sit either near the current ones or far outside the clip range, so no
// sample lies on a kink of the clipped objective.
struct GradientInstance {
  readsim::PolicyParameters params;
  std::vector<readsim::LossSample> batch;
  readsim::PpoConfig config;
};

inline GradientInstance gradient_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> width(2, 8);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  GradientInstance g;
  g.params = readsim::PolicyParameters::create(seed, {width(rng), width(rng)});
  readsim::Rng init(seed + 1);
  g.params.policy.initialize(init, 1.0, 1.0);
  g.params.value.initialize(init, 1.0, 1.0);
  g.config.entropy_coef = 0.05;
  g.config.value_coef = 0.5;

  const std::size_t n = 3 + rng() % 6;
  for (std::size_t i = 0; i < n; ++i) {
    readsim::LossSample s;
    for (auto& x : s.features) x = normal(rng);
    s.action = readsim::action_from_index(rng() % readsim::kNumActions);
    const auto probs = readsim::policy_forward(g.params, s.features).probabilities;
    const double current = readsim::log_probability(probs, s.action);
    const double shift = unit(rng) < 0.7 ? 0.1 * (2.0 * unit(rng) - 1.0) : (unit(rng) < 0.5 ? 0.6 : -0.6);
    s.old_log_prob = current - shift;
    s.advantage = normal(rng);
    s.return_target = normal(rng);
    g.batch.push_back(s);
  }
  return g;
}

// Largest relative error between analytic and central-difference gradients
// of the total loss, over both networks.
inline double gradient_check(std::uint64_t seed) {
  auto g = gradient_instance(seed);
  std::vector<double> policy_grad(g.params.policy.parameter_count());
  std::vector<double> value_grad(g.params.value.parameter_count());
  readsim::ppo_loss(g.params, g.batch, g.config, &policy_grad, &value_grad);
  auto loss = [&] { return readsim::ppo_loss(g.params, g.batch, g.config).total; };
  const auto numeric_policy = oracle::numeric_gradient(g.params.policy.parameters(), loss);
  const auto numeric_value = oracle::numeric_gradient(g.params.value.parameters(), loss);
  return std::max(oracle::max_relative_error(policy_grad, numeric_policy),
                  oracle::max_relative_error(value_grad, numeric_value));
}

}  // namespace fixture
