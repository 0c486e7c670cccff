#include "readsim/agent.hpp"

#include <algorithm>

namespace readsim {

Action sample_action(const ActionProbabilities& probs, Rng& rng) {
  const double u = uniform01(rng);
  double cumulative = 0.0;
  for (std::size_t i = 0; i < kNumActions; ++i) {
    cumulative += probs[i];
    if (u < cumulative) return action_from_index(i);
  }
  // Rounding left u above the last partial sum: take the last action with mass.
  for (std::size_t i = kNumActions; i-- > 0;) {
    if (probs[i] > 0.0) return action_from_index(i);
  }
  return Action::kContinue;
}

Action Policy::act(const Features& features, Rng& rng) const {
  return sample_action(action_probabilities(features), rng);
}

Action heuristic_word_policy(const Features& features, const HeuristicThresholds& thresholds) {
  if (features[feature::kRecognized] < 0.5) return Action::kContinue;
  if (features[feature::kNextPredictability] >= thresholds.skip_pred_threshold) return Action::kSkipWord;
  if (features[feature::kWordPosition] >= 1.0 - 1e-12) return Action::kNextSentence;
  return Action::kNextWord;
}

ActionProbabilities HeuristicPolicy::action_probabilities(const Features& features) const {
  ActionProbabilities probs{};
  probs[action_index(heuristic_word_policy(features, thresholds_))] = 1.0;
  return probs;
}

Action HeuristicPolicy::act(const Features& features, Rng&) const {
  return heuristic_word_policy(features, thresholds_);
}

SentenceDirective select_sentence(const TextBelief& text_belief, std::size_t finished_sentence,
                                  TextControlState& state, std::size_t revisit_budget) {
  const auto n = text_belief.integrated.size();
  if (state.visited.size() != n) state = TextControlState(n);
  for (std::size_t s = 0; s <= finished_sentence && s < n; ++s) state.visited[s] = true;

  if (finished_sentence < n && !text_belief.integrated[finished_sentence] &&
      state.revisits_used[finished_sentence] < revisit_budget) {
    ++state.revisits_used[finished_sentence];
    return SentenceDirective::revisit(finished_sentence);
  }
  bool done = true;
  for (std::size_t s = 0; s < n; ++s) {
    const bool settled = text_belief.integrated[s] || state.revisits_used[s] >= revisit_budget;
    if (!state.visited[s] || !settled) {
      done = false;
      break;
    }
  }
  if (done) return SentenceDirective::stop();
  if (finished_sentence + 1 >= n) return SentenceDirective::stop();
  return SentenceDirective::proceed();
}

std::vector<double> sentence_priorities(const SentenceBelief& sentence,
                                        std::span<const LexicalBelief> sentence_beliefs) {
  std::vector<double> priorities(sentence_beliefs.size(), 0.0);
  for (std::size_t i = 0; i < sentence_beliefs.size(); ++i) {
    const bool recognized = i < sentence.recognized.size() ? sentence.recognized[i] : sentence_beliefs[i].recognized;
    if (!recognized) priorities[i] = std::clamp(1.0 - sentence_beliefs[i].max_posterior(), 0.0, 1.0);
  }
  return priorities;
}

HierarchicalAgent::HierarchicalAgent(std::shared_ptr<const Policy> word_policy, AgentConfig config)
    : word_policy_(std::move(word_policy)), config_(config) {}

std::optional<Action> directive_override(const std::optional<SentenceDirective>& directive,
                                         const ReadingPosition& position) {
  if (!directive) return std::nullopt;
  switch (directive->kind) {
    case SentenceDirective::Kind::kProceed:
      return std::nullopt;
    case SentenceDirective::Kind::kStop:
      return Action::kStop;
    case SentenceDirective::Kind::kRevisit:
      if (position.sentence < directive->sentence) return Action::kNextSentence;
      if (position.sentence > directive->sentence || position.word_in_sentence > 0) return Action::kRegressWord;
      return std::nullopt;
  }
  return std::nullopt;
}

AgentAction agent_act(const HierarchicalAgent& agent, const Features& features,
                      const std::optional<SentenceDirective>& directive, const ReadingPosition& position,
                      Rng& rng) {
  if (const auto forced = agent.override_action(directive, position)) return AgentAction{*forced, true};
  return AgentAction{agent.word_policy().act(features, rng), false};
}

}  // namespace readsim
