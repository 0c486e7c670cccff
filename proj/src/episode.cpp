#include "readsim/episode.hpp"

#include "readsim/errors.hpp"

namespace readsim {

ControlledReadingEnv::ControlledReadingEnv(std::vector<std::shared_ptr<const PreparedText>> texts,
                                           EnvParams params, AgentConfig agent)
    : texts_(std::move(texts)), params_(params), agent_(agent) {
  if (texts_.empty()) throw DataError("no texts to read");
  params_.validate();
}

Features ControlledReadingEnv::reset(std::uint64_t seed) {
  text_index_ = texts_.size() == 1 ? 0 : derive_seed(seed, 0x7e47) % texts_.size();
  env_.emplace(texts_[text_index_], params_);
  control_ = TextControlState(texts_[text_index_]->text.sentence_count());
  directive_.reset();
  forced_steps_ = 0;
  return env_->reset(seed);
}

ReadingPosition ControlledReadingEnv::position() const {
  const auto& word = env_->text().words[env_->fixated_word()];
  return ReadingPosition{word.sentence_index, word.word_index_in_sentence};
}

void ControlledReadingEnv::observe(const StepResult& result) {
  if (!result.consolidation) return;
  const auto summary = text_gist_summary(env_->memory(), env_->text().sentence_count());
  directive_ = select_sentence(summary, result.consolidation->sentence_index, control_, agent_.revisit_budget);
  if (directive_->kind == SentenceDirective::Kind::kProceed) directive_.reset();
}

RlStep ControlledReadingEnv::step(Action action) {
  if (!env_) throw EpisodeFinished("reset() has not been called");
  auto result = env_->step(action);
  double reward = result.reward;
  observe(result);
  while (!result.terminal) {
    const auto forced = directive_override(directive_, position());
    if (!forced) {
      directive_.reset();
      break;
    }
    // A revisit is one return sweep rather than a chain of single-word
    // regressions, so the word policy cannot hand its reading to the controller.
    const bool sweep = *forced == Action::kRegressWord && directive_->kind == SentenceDirective::Kind::kRevisit;
    result = sweep ? env_->return_to_sentence(directive_->sentence) : env_->step(*forced);
    reward += result.reward;
    ++forced_steps_;
    observe(result);
  }
  return RlStep{result.features, reward, result.terminal};
}

EpisodeResult run_episode(ControlledReadingEnv& env, const Policy& policy, std::uint64_t seed,
                          std::string trial_id) {
  Rng policy_rng(derive_seed(seed, 0x9011c7));
  EpisodeResult out;
  auto features = env.reset(seed);
  while (true) {
    const auto step = env.step(policy.act(features, policy_rng));
    out.total_reward += step.reward;
    features = step.features;
    if (step.terminal) break;
  }
  out.scanpath = env.env().scanpath(std::move(trial_id));
  out.text_index = env.text_index();
  out.samples_on_word = env.env().samples_on_word();
  return out;
}

}  // namespace readsim
