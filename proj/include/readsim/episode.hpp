#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "readsim/agent.hpp"
#include "readsim/reading_env.hpp"

namespace readsim {

struct RlStep {
  Features features{};
  double reward = 0.0;
  bool terminal = false;
};

// Environment surface seen by the learner.
class RlEnvironment {
 public:
  virtual ~RlEnvironment() = default;
  virtual Features reset(std::uint64_t seed) = 0;
  virtual RlStep step(Action action) = 0;
};

// Reading environment with the text- and sentence-level controllers folded
// into its dynamics: after each word-policy action, any directive from the
// text controller is executed until control returns to the word level. The
// rewards of those forced steps are credited to the word-policy step.
class ControlledReadingEnv : public RlEnvironment {
 public:
  ControlledReadingEnv(std::vector<std::shared_ptr<const PreparedText>> texts, EnvParams params,
                       AgentConfig agent = {});

  // The episode's text is drawn from the pool using `seed`.
  Features reset(std::uint64_t seed) override;
  RlStep step(Action action) override;

  const ReadingEnv& env() const { return *env_; }
  std::size_t text_index() const { return text_index_; }
  std::size_t forced_steps() const { return forced_steps_; }
  const std::optional<SentenceDirective>& directive() const { return directive_; }

 private:
  void observe(const StepResult& result);
  ReadingPosition position() const;

  std::vector<std::shared_ptr<const PreparedText>> texts_;
  EnvParams params_;
  AgentConfig agent_;
  std::optional<ReadingEnv> env_;
  std::size_t text_index_ = 0;
  TextControlState control_;
  std::optional<SentenceDirective> directive_;
  std::size_t forced_steps_ = 0;
};

struct EpisodeResult {
  Scanpath scanpath;
  double total_reward = 0.0;
  std::size_t text_index = 0;
  std::vector<std::size_t> samples_on_word;
};

// Runs one episode to termination; the policy's action stream is seeded
// from `seed` independently of the environment's stream.
EpisodeResult run_episode(ControlledReadingEnv& env, const Policy& policy, std::uint64_t seed,
                          std::string trial_id);

}  // namespace readsim
