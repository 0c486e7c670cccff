#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "readsim/belief.hpp"
#include "readsim/random.hpp"
#include "readsim/reading_env.hpp"

namespace readsim {

using ActionProbabilities = std::array<double, kNumActions>;

// Word-level policy over the 8 oculomotor actions.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual ActionProbabilities action_probabilities(const Features& features) const = 0;
  // Samples from action_probabilities by default.
  virtual Action act(const Features& features, Rng& rng) const;
};

Action sample_action(const ActionProbabilities& probs, Rng& rng);

struct HeuristicThresholds {
  double skip_pred_threshold = 0.8;
};

// Baseline: keep sampling until the fixated word is recognized, then skip a
// predictable next word, change sentence at its end, or step to the next word.
Action heuristic_word_policy(const Features& features, const HeuristicThresholds& thresholds);

class HeuristicPolicy : public Policy {
 public:
  explicit HeuristicPolicy(HeuristicThresholds thresholds = {}) : thresholds_(thresholds) {}
  ActionProbabilities action_probabilities(const Features& features) const override;
  Action act(const Features& features, Rng& rng) const override;

 private:
  HeuristicThresholds thresholds_;
};

struct SentenceDirective {
  enum class Kind { kProceed, kRevisit, kStop };
  Kind kind = Kind::kProceed;
  std::size_t sentence = 0;

  static SentenceDirective proceed() { return {Kind::kProceed, 0}; }
  static SentenceDirective revisit(std::size_t s) { return {Kind::kRevisit, s}; }
  static SentenceDirective stop() { return {Kind::kStop, 0}; }
  bool operator==(const SentenceDirective&) const = default;
};

// Per-episode bookkeeping of the text-level controller.
struct TextControlState {
  std::vector<bool> visited;
  std::vector<std::size_t> revisits_used;

  explicit TextControlState(std::size_t sentence_count = 0)
      : visited(sentence_count, false), revisits_used(sentence_count, 0) {}
};

// Called when `finished_sentence` has just been consolidated (or failed to).
// Sentences before it count as visited since reading proceeds in order.
SentenceDirective select_sentence(const TextBelief& text_belief, std::size_t finished_sentence,
                                  TextControlState& state, std::size_t revisit_budget = 1);

// 1 - max posterior for unrecognized words, 0 for recognized ones.
std::vector<double> sentence_priorities(const SentenceBelief& sentence,
                                        std::span<const LexicalBelief> sentence_beliefs);

struct AgentConfig {
  HeuristicThresholds thresholds;
  std::size_t revisit_budget = 1;
};

struct ReadingPosition {
  std::size_t sentence = 0;
  std::size_t word_in_sentence = 0;
};

struct AgentAction {
  Action action = Action::kContinue;
  bool overridden = false;
};

// Routing for a text-level directive: Stop for stop, RegressWord or
// NextSentence toward the first word of a revisited sentence, nullopt when
// the word policy is free to act.
std::optional<Action> directive_override(const std::optional<SentenceDirective>& directive,
                                         const ReadingPosition& position);

// Text controller + sentence controller + word policy.
class HierarchicalAgent {
 public:
  HierarchicalAgent(std::shared_ptr<const Policy> word_policy, AgentConfig config = {});

  const Policy& word_policy() const { return *word_policy_; }
  const AgentConfig& config() const { return config_; }

  std::optional<Action> override_action(const std::optional<SentenceDirective>& directive,
                                        const ReadingPosition& position) const {
    return directive_override(directive, position);
  }

 private:
  std::shared_ptr<const Policy> word_policy_;
  AgentConfig config_;
};

AgentAction agent_act(const HierarchicalAgent& agent, const Features& features,
                      const std::optional<SentenceDirective>& directive, const ReadingPosition& position,
                      Rng& rng);

}  // namespace readsim
