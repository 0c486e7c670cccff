#include "readsim/reading_env.hpp"

#include <algorithm>
#include <cmath>

#include "readsim/errors.hpp"

namespace readsim {

namespace {

constexpr std::array<std::string_view, kNumActions> kActionNames = {
    "Continue", "RefixateLeft", "RefixateRight", "NextWord",
    "SkipWord", "RegressWord",  "NextSentence",  "Stop",
};

constexpr std::size_t kRefixationStep = 2;
constexpr double kMaxWordLength = 15.0;

}  // namespace

std::string_view action_name(Action action) { return kActionNames.at(action_index(action)); }

std::optional<Action> action_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumActions; ++i) {
    if (kActionNames[i] == name) return action_from_index(i);
  }
  return std::nullopt;
}

void EnvParams::validate() const {
  perception.validate();
  memory.validate();
  auto nonneg = [](double v, const char* key) {
    if (!(v >= 0.0)) throw ConfigError(key, "must be >= 0");
  };
  auto unit = [](double v, const char* key) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(key, "must be in [0,1]");
  };
  unit(belief.theta_rec, "belief.theta_rec");
  unit(belief.gamma_pred, "belief.gamma_pred");
  nonneg(reward.alpha_word, "reward.alpha_word");
  nonneg(reward.alpha_sentence, "reward.alpha_sentence");
  nonneg(reward.alpha_recall, "reward.alpha_recall");
  nonneg(reward.c_time, "reward.c_time");
  nonneg(reward.c_sacc_base, "reward.c_sacc_base");
  nonneg(reward.c_sacc_amp, "reward.c_sacc_amp");
  if (!(timing.tau_sample > 0.0)) throw ConfigError("timing.tau_sample", "must be > 0");
  nonneg(timing.sacc_base, "timing.sacc_base");
  nonneg(timing.sacc_per_letter, "timing.sacc_per_letter");
  nonneg(timing.sentence_switch, "timing.sentence_switch");
  nonneg(timing.motor_noise_sd_frac, "timing.motor_noise_sd_frac");
  if (!(time_budget_s > 0.0)) throw ConfigError("env.time_budget_s", "must be > 0");
}

std::shared_ptr<const PreparedText> prepare_text(AnnotatedText text, const Lexicon& lexicon) {
  auto prepared = std::make_shared<PreparedText>();
  prepared->candidates.reserve(text.words.size());
  for (const auto& word : text.words) prepared->candidates.push_back(make_candidate_set(word, lexicon));
  prepared->alphabet = lexicon.alphabet();
  prepared->log_count_min = std::log(static_cast<double>(lexicon.min_count()));
  prepared->log_count_max = std::log(static_cast<double>(lexicon.max_count()));
  prepared->text = std::move(text);
  return prepared;
}

ReadingEnv::ReadingEnv(std::shared_ptr<const PreparedText> text, EnvParams params)
    : text_(std::move(text)), params_(params), memory_(params.memory) {
  params_.validate();
}

Features ReadingEnv::reset(std::uint64_t seed) {
  seed_ = seed;
  rng_.seed(seed);
  clock_ = 0.0;
  terminal_ = false;
  recall_.reset();
  memory_ = MemoryState(params_.memory);
  events_.clear();
  event_open_ = false;
  const auto& words = text().words;
  samples_on_word_.assign(words.size(), 0);
  ever_recognized_.assign(words.size(), false);
  beliefs_.clear();
  beliefs_.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    beliefs_.push_back(init_lexical_belief(words[i], text_->candidates[i], params_.belief.gamma_pred));
  }
  word_ = 0;
  offset_ = words.front().landing_offset();
  return features();
}

ReadingEnv::Move ReadingEnv::saccade_to(std::size_t target_offset) {
  const double amplitude =
      std::abs(static_cast<double>(target_offset) - static_cast<double>(offset_));
  offset_ = target_offset;
  word_ = *text().word_at_offset(target_offset);
  return Move{params_.timing.sacc_base + params_.timing.sacc_per_letter * amplitude,
              params_.reward.c_sacc_base + params_.reward.c_sacc_amp * amplitude};
}

std::size_t ReadingEnv::landing_site(std::size_t target_word) {
  const auto& word = text().words[target_word];
  const auto intended = static_cast<double>(word.landing_offset());
  const double amplitude = std::abs(intended - static_cast<double>(offset_));
  const double sd = params_.timing.motor_noise_sd_frac * amplitude;
  double landing = intended;
  if (sd > 0.0) landing += std::round(std::normal_distribution<double>(0.0, sd)(rng_));
  landing = std::clamp(landing, static_cast<double>(word.first_letter_offset),
                       static_cast<double>(word.last_letter_offset()));
  return static_cast<std::size_t>(landing);
}

void ReadingEnv::sample_and_update(StepResult& result) {
  const auto observations = sample_observation(offset_, text(), params_.perception, rng_, text_->alphabet);
  ++samples_on_word_[word_];

  auto begin = observations.begin();
  while (begin != observations.end()) {
    const auto w = *text().word_at_offset(begin->letter_offset);
    const auto& token = text().words[w];
    auto end = std::find_if(begin, observations.end(),
                            [&](const LetterObservation& o) { return o.letter_offset > token.last_letter_offset(); });
    const bool was_recognized = beliefs_[w].recognized;
    beliefs_[w] = update_lexical_belief(std::move(beliefs_[w]), std::span(&*begin, static_cast<std::size_t>(end - begin)),
                                        params_.perception, params_.belief.theta_rec, text_->alphabet.size());
    if (beliefs_[w].recognized) {
      if (!was_recognized) {
        ++result.recognitions;
        if (!ever_recognized_[w]) ++result.first_recognitions;
        ever_recognized_[w] = true;
      }
      // Only content words occupy short-term memory slots.
      if (token.is_content) {
        if (const auto evicted = memory_.encode_word(w, clock_)) beliefs_[*evicted].forget();
      }
    }
    begin = end;
  }
}

double ReadingEnv::consolidate(std::size_t sentence_index, std::optional<Consolidation>& out) {
  const auto sentence = sentence_comprehension(sentence_index, text(), beliefs_, memory_, params_.memory);
  const double gain = memory_.consolidate_sentence(sentence, clock_);
  out = Consolidation{sentence_index, sentence.comprehension_fraction, sentence.integrated};
  return gain;
}

void ReadingEnv::record_event(Action action, double start, double dt) {
  if (action == Action::kContinue && event_open_) {
    events_.back().dur_ms += dt * 1000.0;
    return;
  }
  events_.push_back(FixationEvent{start * 1000.0, word_, offset_, std::string(action_name(action)), dt * 1000.0});
  event_open_ = true;
}

StepResult ReadingEnv::step(Action action) {
  if (terminal_) throw EpisodeFinished("step called on a finished episode");
  const auto& words = text().words;
  const auto& timing = params_.timing;

  StepResult result;
  Move move;
  bool sample = true;
  bool stop = false;
  double gist_gain = 0.0;

  switch (action) {
    case Action::kContinue:
      break;
    case Action::kRefixateLeft:
    case Action::kRefixateRight: {
      const auto& word = words[word_];
      const auto lo = static_cast<long>(word.first_letter_offset);
      const auto hi = static_cast<long>(word.last_letter_offset());
      const long delta = action == Action::kRefixateLeft ? -static_cast<long>(kRefixationStep)
                                                         : static_cast<long>(kRefixationStep);
      move = saccade_to(static_cast<std::size_t>(std::clamp(static_cast<long>(offset_) + delta, lo, hi)));
      break;
    }
    case Action::kNextWord:
    case Action::kSkipWord:
    case Action::kRegressWord: {
      const long jump = action == Action::kNextWord ? 1 : action == Action::kSkipWord ? 2 : -1;
      const auto target = static_cast<std::size_t>(
          std::clamp(static_cast<long>(word_) + jump, 0L, static_cast<long>(words.size()) - 1));
      move = saccade_to(landing_site(target));
      break;
    }
    case Action::kNextSentence: {
      const auto sentence = current_sentence();
      if (sentence + 1 >= text().sentence_count()) {
        stop = true;
        sample = false;
        break;
      }
      gist_gain += consolidate(sentence, result.consolidation);
      move = saccade_to(landing_site(text().sentence_begin[sentence + 1]));
      move.dt += timing.sentence_switch;
      break;
    }
    case Action::kStop:
      stop = true;
      sample = false;
      break;
  }

  return complete_step(action, move, sample, stop, gist_gain, std::move(result));
}

StepResult ReadingEnv::return_to_sentence(std::size_t sentence_index) {
  if (terminal_) throw EpisodeFinished("step called on a finished episode");
  if (sentence_index > current_sentence()) {
    throw InvalidFixation("return_to_sentence target " + std::to_string(sentence_index) + " lies ahead");
  }
  const auto move = saccade_to(landing_site(text().sentence_begin[sentence_index]));
  return complete_step(Action::kRegressWord, move, true, false, 0.0, StepResult{});
}

StepResult ReadingEnv::complete_step(Action action, Move move, bool sample, bool stop, double gist_gain,
                                     StepResult result) {
  const auto& reward = params_.reward;
  double dt = move.dt;
  if (sample) dt += params_.timing.tau_sample;
  const double start = clock_;
  memory_.decay_step(dt);
  clock_ += dt;
  if (sample) {
    sample_and_update(result);
    record_event(action, start, dt);
  }

  if (stop || clock_ >= params_.time_budget_s) {
    gist_gain += consolidate(current_sentence(), result.consolidation);
    const auto recall = simulate_recall(memory_, text().sentence_count(), 0.0);
    recall_ = recall.score;
    result.reward += reward.alpha_recall * recall.score;
    terminal_ = true;
  }

  const auto paid = reward.pay_rerecognition ? result.recognitions : result.first_recognitions;
  result.reward += reward.alpha_word * static_cast<double>(paid) + reward.alpha_sentence * gist_gain -
                   reward.c_time * dt - move.cost;
  result.dt = dt;
  result.terminal = terminal_;
  result.features = features();
  return result;
}

Features ReadingEnv::features() const {
  Features f{};
  const auto& words = text().words;
  const auto& word = words[word_];
  const auto& belief = beliefs_[word_];
  const bool has_next = word_ + 1 < words.size();

  f[feature::kRemainingTime] = std::clamp((params_.time_budget_s - clock_) / params_.time_budget_s, 0.0, 1.0);
  f[feature::kEntropy] = belief.normalized_entropy();
  f[feature::kMaxPosterior] = belief.max_posterior();
  f[feature::kRecognized] = belief.recognized ? 1.0 : 0.0;
  f[feature::kNextRecognized] = has_next ? (beliefs_[word_ + 1].recognized ? 1.0 : 0.0) : 1.0;
  f[feature::kNextPredictability] = has_next ? words[word_ + 1].predictability : 0.0;
  const double log_range = text_->log_count_max - text_->log_count_min;
  f[feature::kLogFrequency] =
      log_range > 0.0
          ? std::clamp((std::log(static_cast<double>(word.count)) - text_->log_count_min) / log_range, 0.0, 1.0)
          : 1.0;
  f[feature::kLength] = std::min(1.0, static_cast<double>(word.length()) / kMaxWordLength);
  f[feature::kNextLength] =
      has_next ? std::min(1.0, static_cast<double>(words[word_ + 1].length()) / kMaxWordLength) : 0.0;
  f[feature::kWordPosition] = static_cast<double>(word.word_index_in_sentence + 1) /
                              static_cast<double>(text().sentence_size(word.sentence_index));
  f[feature::kSentencePosition] =
      static_cast<double>(word.sentence_index + 1) / static_cast<double>(text().sentence_count());
  f[feature::kStmLoad] = memory_.load_fraction();
  return f;
}

Scanpath ReadingEnv::scanpath(std::string trial_id) const {
  Scanpath out;
  out.trial_id = std::move(trial_id);
  out.condition_s = params_.time_budget_s;
  out.seed = seed_;
  out.recall = recall_;
  if (!text().id.empty()) out.text_id = text().id;
  out.events = events_;
  return out;
}

}  // namespace readsim
