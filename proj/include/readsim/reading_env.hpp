#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "readsim/belief.hpp"
#include "readsim/corpus.hpp"
#include "readsim/memory.hpp"
#include "readsim/perception.hpp"
#include "readsim/random.hpp"

namespace readsim {

enum class Action : std::uint8_t {
  kContinue = 0,
  kRefixateLeft = 1,
  kRefixateRight = 2,
  kNextWord = 3,
  kSkipWord = 4,
  kRegressWord = 5,
  kNextSentence = 6,
  kStop = 7,
};

inline constexpr std::size_t kNumActions = 8;
inline constexpr std::size_t kNumFeatures = 12;

using Features = std::array<double, kNumFeatures>;

std::string_view action_name(Action action);
std::optional<Action> action_from_name(std::string_view name);
inline Action action_from_index(std::size_t i) { return static_cast<Action>(i); }
inline std::size_t action_index(Action a) { return static_cast<std::size_t>(a); }

// Feature slots, in order.
namespace feature {
inline constexpr std::size_t kRemainingTime = 0;
inline constexpr std::size_t kEntropy = 1;
inline constexpr std::size_t kMaxPosterior = 2;
inline constexpr std::size_t kRecognized = 3;
inline constexpr std::size_t kNextRecognized = 4;
inline constexpr std::size_t kNextPredictability = 5;
inline constexpr std::size_t kLogFrequency = 6;
inline constexpr std::size_t kLength = 7;
inline constexpr std::size_t kNextLength = 8;
inline constexpr std::size_t kWordPosition = 9;
inline constexpr std::size_t kSentencePosition = 10;
inline constexpr std::size_t kStmLoad = 11;
}  // namespace feature

struct BeliefParams {
  double theta_rec = kDefaultRecognitionThreshold;
  double gamma_pred = 0.5;
};

struct RewardConfig {
  double alpha_word = 1.0;
  double alpha_sentence = 5.0;
  double alpha_recall = 10.0;
  double c_time = 0.1;
  double c_sacc_base = 0.01;
  double c_sacc_amp = 0.001;
  // Also pay alpha_word when a word evicted from memory is recognized again.
  bool pay_rerecognition = false;
};

struct TimingModel {
  double tau_sample = 0.050;
  double sacc_base = 0.020;
  double sacc_per_letter = 0.002;
  double sentence_switch = 0.150;
  double motor_noise_sd_frac = 0.15;
};

struct EnvParams {
  AcuityModel perception;
  BeliefParams belief;
  MemoryParams memory;
  RewardConfig reward;
  TimingModel timing;
  double time_budget_s = 60.0;

  void validate() const;
};

// A text with its candidate sets and lexicon frequency range, built once and
// shared by every episode that reads it.
struct PreparedText {
  AnnotatedText text;
  std::vector<std::shared_ptr<const CandidateSet>> candidates;
  std::string alphabet = std::string(kDefaultAlphabet);
  double log_count_min = 0.0;
  double log_count_max = 0.0;
};

std::shared_ptr<const PreparedText> prepare_text(AnnotatedText text, const Lexicon& lexicon);

struct FixationEvent {
  double t_ms = 0.0;
  std::size_t word = 0;
  std::size_t letter = 0;
  std::string action;
  double dur_ms = 0.0;
};

struct Scanpath {
  std::string trial_id;
  double condition_s = 0.0;
  std::optional<std::uint64_t> seed;
  std::optional<double> recall;
  std::optional<std::string> text_id;
  std::vector<FixationEvent> events;
};

struct Consolidation {
  std::size_t sentence_index = 0;
  double comprehension_fraction = 0.0;
  bool integrated = false;
};

struct StepResult {
  Features features{};
  double reward = 0.0;
  bool terminal = false;
  double dt = 0.0;
  std::size_t recognitions = 0;        // recognition events, including re-recognitions
  std::size_t first_recognitions = 0;  // words recognized for the first time this episode
  std::optional<Consolidation> consolidation;
};

// Reading as a POMDP over a single text. One instance is single-threaded;
// independent instances share nothing mutable.
class ReadingEnv {
 public:
  ReadingEnv(std::shared_ptr<const PreparedText> text, EnvParams params);

  Features reset(std::uint64_t seed);
  // Throws EpisodeFinished once the episode is terminal.
  StepResult step(Action action);
  // Single regressive saccade to the first word of an earlier (or the
  // current) sentence followed by one sample; recorded as RegressWord.
  // Used by the text controller to execute a revisit.
  StepResult return_to_sentence(std::size_t sentence_index);
  Features features() const;

  const AnnotatedText& text() const { return text_->text; }
  const std::shared_ptr<const PreparedText>& prepared() const { return text_; }
  const EnvParams& params() const { return params_; }
  double clock() const { return clock_; }
  bool terminal() const { return terminal_; }
  std::size_t fixated_word() const { return word_; }
  std::size_t fixation_offset() const { return offset_; }
  std::size_t current_sentence() const { return text().words[word_].sentence_index; }
  const std::vector<LexicalBelief>& beliefs() const { return beliefs_; }
  const MemoryState& memory() const { return memory_; }
  const std::vector<FixationEvent>& events() const { return events_; }
  // Observation samples taken while each word was fixated.
  const std::vector<std::size_t>& samples_on_word() const { return samples_on_word_; }
  std::optional<double> recall_score() const { return recall_; }
  std::uint64_t seed() const { return seed_; }

  Scanpath scanpath(std::string trial_id) const;

 private:
  struct Move {
    double dt = 0.0;
    double cost = 0.0;
  };

  Move saccade_to(std::size_t target_offset);
  std::size_t landing_site(std::size_t target_word);
  void sample_and_update(StepResult& result);
  double consolidate(std::size_t sentence_index, std::optional<Consolidation>& out);
  void record_event(Action action, double start, double dt);
  StepResult complete_step(Action action, Move move, bool sample, bool stop, double gist_gain, StepResult result);

  std::shared_ptr<const PreparedText> text_;
  EnvParams params_;
  Rng rng_;
  std::uint64_t seed_ = 0;
  double clock_ = 0.0;
  bool terminal_ = true;
  std::size_t word_ = 0;
  std::size_t offset_ = 0;
  std::vector<LexicalBelief> beliefs_;
  MemoryState memory_;
  std::vector<FixationEvent> events_;
  std::vector<std::size_t> samples_on_word_;
  std::vector<bool> ever_recognized_;
  std::optional<double> recall_;
  bool event_open_ = false;
};

}  // namespace readsim
