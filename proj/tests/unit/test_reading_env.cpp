#include <gtest/gtest.h>

#include <cmath>

#include "readsim/errors.hpp"
#include "readsim/reading_env.hpp"

using namespace readsim;

namespace {

std::shared_ptr<const PreparedText> prepared(const std::string& raw, const Lexicon& lex) {
  return prepare_text(tokenize(raw, lex), lex);
}

// Only the fixated letter carries information; everything else is chance.
EnvParams blurry_params() {
  EnvParams p;
  p.perception.sigma = 0.1;
  p.timing.motor_noise_sd_frac = 0.0;
  return p;
}

EnvParams veridical_params() {
  EnvParams p;
  p.perception.p_floor = 1.0;
  p.timing.motor_noise_sd_frac = 0.0;
  return p;
}

Lexicon ambiguous_lexicon() {
  return Lexicon({{"cat", 1}, {"cab", 1}, {"elephants", 1}, {"elephanta", 1}});
}

Lexicon story_lexicon() {
  return Lexicon({{"the", 5000}, {"a", 4000}, {"old", 300}, {"sailor", 40}, {"mended", 10}, {"torn", 30},
                  {"net", 50}, {"before", 400}, {"dawn", 60}, {"gulls", 8}, {"circled", 9}, {"harbour", 20},
                  {"quietly", 25}, {"boats", 35}, {"rocked", 12}});
}

const char* kStory = "The old sailor mended a torn net before dawn. Gulls circled the harbour quietly. Boats rocked.";

}  // namespace

TEST(Reset, InitialState) {
  ReadingEnv env(prepared(kStory, story_lexicon()), EnvParams{});
  const auto f = env.reset(1);
  EXPECT_EQ(env.clock(), 0.0);
  EXPECT_EQ(f[feature::kRemainingTime], 1.0);
  EXPECT_EQ(env.fixated_word(), 0u);
  EXPECT_FALSE(env.terminal());
}

TEST(Reset, SingleWordText) {
  const Lexicon lex({{"hello", 1}});
  ReadingEnv env(prepared("Hello.", lex), EnvParams{});
  env.reset(3);
  EXPECT_EQ(env.fixated_word(), 0u);
  const auto r = env.step(Action::kContinue);
  EXPECT_EQ(env.fixated_word(), 0u);
  EXPECT_GT(r.dt, 0.0);
}

TEST(Reset, SameSeedSameFirstObservation) {
  ReadingEnv a(prepared(kStory, story_lexicon()), EnvParams{});
  ReadingEnv b(prepared(kStory, story_lexicon()), EnvParams{});
  EXPECT_EQ(a.reset(42), b.reset(42));
  EXPECT_EQ(a.step(Action::kContinue).features, b.step(Action::kContinue).features);
}

TEST(Step, ContinueWithoutRecognition) {
  ReadingEnv env(prepared("cat.", ambiguous_lexicon()), blurry_params());
  env.reset(0);
  const auto r = env.step(Action::kContinue);
  EXPECT_EQ(r.recognitions, 0u);
  EXPECT_NEAR(r.dt, 0.050, 1e-15);
  EXPECT_NEAR(r.reward, -0.005, 1e-12);
}

TEST(Step, NextWordAmplitudeSeven) {
  ReadingEnv env(prepared("cat elephants.", ambiguous_lexicon()), blurry_params());
  env.reset(0);
  ASSERT_EQ(env.fixation_offset(), 1u);
  const auto r = env.step(Action::kNextWord);
  ASSERT_EQ(env.fixation_offset(), 8u);
  EXPECT_EQ(r.recognitions, 0u);
  EXPECT_NEAR(r.dt, 0.020 + 0.002 * 7 + 0.050, 1e-12);
  EXPECT_NEAR(r.reward, -(0.01 + 0.001 * 7) - 0.1 * 0.084, 1e-12);
  EXPECT_NEAR(r.reward, -0.0254, 1e-12);
}

TEST(Step, StopPaysRecall) {
  const Lexicon lex({{"cat", 1}, {"dog", 1}});
  ReadingEnv env(prepared("cat. dog.", lex), veridical_params());
  env.reset(0);
  const auto r = env.step(Action::kStop);
  EXPECT_TRUE(r.terminal);
  ASSERT_TRUE(env.recall_score().has_value());
  EXPECT_EQ(*env.recall_score(), 0.5);
  ASSERT_TRUE(r.consolidation.has_value());
  const double gist_gain = env.memory().gist_strength(0);
  EXPECT_NEAR(r.reward, 10.0 * 0.5 + 5.0 * gist_gain, 1e-12);
  EXPECT_EQ(r.dt, 0.0);
}

TEST(Step, AfterTerminalThrows) {
  ReadingEnv env(prepared(kStory, story_lexicon()), EnvParams{});
  env.reset(0);
  env.step(Action::kStop);
  EXPECT_THROW(env.step(Action::kContinue), EpisodeFinished);
}

TEST(Step, OutOfBoundsMovesClampButPay) {
  ReadingEnv env(prepared("cat.", ambiguous_lexicon()), blurry_params());
  env.reset(0);
  const auto before = env.fixation_offset();
  const auto r = env.step(Action::kRegressWord);
  EXPECT_EQ(env.fixated_word(), 0u);
  EXPECT_EQ(env.fixation_offset(), before);
  EXPECT_NEAR(r.dt, 0.020 + 0.050, 1e-15);
  EXPECT_NEAR(r.reward, -0.01 - 0.1 * r.dt, 1e-12);
}

TEST(Step, NextSentenceConsolidatesAndMoves) {
  ReadingEnv env(prepared(kStory, story_lexicon()), veridical_params());
  env.reset(0);
  const auto r = env.step(Action::kNextSentence);
  ASSERT_TRUE(r.consolidation.has_value());
  EXPECT_EQ(r.consolidation->sentence_index, 0u);
  EXPECT_EQ(env.current_sentence(), 1u);
  EXPECT_EQ(env.text().words[env.fixated_word()].word_index_in_sentence, 0u);
}

TEST(Step, NextSentenceOnLastSentenceStops) {
  const Lexicon lex({{"cat", 1}});
  ReadingEnv env(prepared("cat.", lex), EnvParams{});
  env.reset(0);
  EXPECT_TRUE(env.step(Action::kNextSentence).terminal);
}

TEST(Step, TruncationAtBudgetComputesRecall) {
  auto p = blurry_params();
  p.time_budget_s = 0.2;
  ReadingEnv env(prepared("cat.", ambiguous_lexicon()), p);
  env.reset(0);
  std::size_t steps = 0;
  while (!env.terminal()) {
    env.step(Action::kContinue);
    ++steps;
  }
  EXPECT_GE(steps, 4u);
  EXPECT_LE(steps, 5u);
  EXPECT_GE(env.clock(), 0.2);
  EXPECT_TRUE(env.recall_score().has_value());
}

TEST(Step, ClockStrictlyIncreases) {
  ReadingEnv env(prepared(kStory, story_lexicon()), EnvParams{});
  env.reset(9);
  Rng rng(4);
  double last = env.clock();
  while (!env.terminal()) {
    const auto a = action_from_index(rng() % (kNumActions - 1));
    const auto r = env.step(a);
    // Ending the episode takes no time.
    if (r.terminal && r.dt == 0.0) {
      EXPECT_EQ(env.clock(), last);
    } else {
      EXPECT_GT(env.clock(), last);
    }
    last = env.clock();
  }
}

TEST(Reward, EachWordPaysOnce) {
  ReadingEnv env(prepared(kStory, story_lexicon()), EnvParams{});
  env.reset(2);
  Rng rng(11);
  std::size_t paid = 0;
  std::size_t recognitions = 0;
  while (!env.terminal()) {
    const auto r = env.step(action_from_index(rng() % (kNumActions - 1)));
    paid += r.first_recognitions;
    recognitions += r.recognitions;
  }
  EXPECT_LE(paid, env.text().word_count());
  EXPECT_GE(recognitions, paid);
}

TEST(Reward, ReRecognitionPaysWhenEnabled) {
  // Capacity 1 makes every newly encoded content word evict the previous one.
  auto p = veridical_params();
  p.memory.stm_capacity = 1;
  p.reward.pay_rerecognition = true;
  p.perception.span_right = 0;
  p.perception.span_left = 0;
  const Lexicon lex({{"alpha", 1}, {"bravo", 1}, {"alphb", 1}, {"bravp", 1}});
  ReadingEnv env(prepared("alpha bravo.", lex), p);
  env.reset(0);
  std::size_t recognitions = 0;
  std::size_t first = 0;
  for (const auto a : {Action::kContinue, Action::kRefixateRight, Action::kRefixateRight, Action::kNextWord,
                       Action::kRefixateRight, Action::kRefixateRight, Action::kRegressWord,
                       Action::kRefixateRight, Action::kRefixateRight}) {
    const auto r = env.step(a);
    recognitions += r.recognitions;
    first += r.first_recognitions;
  }
  EXPECT_EQ(first, 2u);
  EXPECT_EQ(recognitions, 3u);
}

TEST(Determinism, SameSeedSameTrajectory) {
  auto run = [](std::uint64_t seed) {
    ReadingEnv env(prepared(kStory, story_lexicon()), EnvParams{});
    env.reset(seed);
    std::vector<double> rewards;
    const std::array<Action, 6> script = {Action::kContinue, Action::kNextWord, Action::kRefixateLeft,
                                          Action::kSkipWord, Action::kRegressWord, Action::kNextSentence};
    for (std::size_t i = 0; !env.terminal() && i < 200; ++i) rewards.push_back(env.step(script[i % script.size()]).reward);
    return std::make_pair(rewards, env.scanpath("t"));
  };
  const auto a = run(5);
  const auto b = run(5);
  EXPECT_EQ(a.first, b.first);
  ASSERT_EQ(a.second.events.size(), b.second.events.size());
  for (std::size_t i = 0; i < a.second.events.size(); ++i) {
    EXPECT_EQ(a.second.events[i].t_ms, b.second.events[i].t_ms);
    EXPECT_EQ(a.second.events[i].letter, b.second.events[i].letter);
    EXPECT_EQ(a.second.events[i].action, b.second.events[i].action);
  }
}

TEST(Veridical, ScriptedForwardReadingRecognizesEveryWord) {
  ReadingEnv env(prepared(kStory, story_lexicon()), veridical_params());
  env.reset(0);
  env.step(Action::kContinue);
  while (env.fixated_word() + 1 < env.text().word_count()) {
    EXPECT_TRUE(env.beliefs()[env.fixated_word()].recognized) << env.text().words[env.fixated_word()].surface;
    env.step(Action::kNextWord);
  }
  EXPECT_TRUE(env.beliefs()[env.fixated_word()].recognized);
}

TEST(Features, Ranges) {
  ReadingEnv env(prepared(kStory, story_lexicon()), EnvParams{});
  env.reset(1);
  Rng rng(2);
  while (!env.terminal()) {
    const auto f = env.step(action_from_index(rng() % (kNumActions - 1))).features;
    for (const double v : f) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Features, SingletonEntropyIsZero) {
  const Lexicon lex({{"zebra", 1}});
  ReadingEnv env(prepared("zebra.", lex), EnvParams{});
  EXPECT_EQ(env.reset(0)[feature::kEntropy], 0.0);
}

TEST(Features, StmLoad) {
  const Lexicon lex({{"alpha", 1}, {"bravo", 1}, {"delta", 1}});
  auto p = veridical_params();
  p.perception.span_right = 16;
  ReadingEnv env(prepared("alpha bravo delta.", lex), p);
  env.reset(0);
  const auto f = env.step(Action::kContinue).features;
  EXPECT_EQ(env.memory().lexical_store().size(), 3u);
  EXPECT_NEAR(f[feature::kStmLoad], 3.0 / 9.0, 1e-12);
}

TEST(Features, OnlyContentWordsOccupyMemory) {
  ReadingEnv env(prepared(kStory, story_lexicon()), veridical_params());
  env.reset(0);
  env.step(Action::kContinue);
  for (const auto& [index, item] : env.memory().lexical_store()) EXPECT_TRUE(env.text().words[index].is_content);
}

TEST(ReturnToSentence, RejectsSentencesAhead) {
  ReadingEnv env(prepared(kStory, story_lexicon()), EnvParams{});
  env.reset(0);
  EXPECT_THROW(env.return_to_sentence(1), InvalidFixation);
}

TEST(ReturnToSentence, SingleRegression) {
  ReadingEnv env(prepared(kStory, story_lexicon()), veridical_params());
  env.reset(0);
  env.step(Action::kNextSentence);
  env.step(Action::kNextWord);
  const auto events_before = env.events().size();
  env.return_to_sentence(0);
  EXPECT_EQ(env.current_sentence(), 0u);
  EXPECT_EQ(env.fixated_word(), 0u);
  ASSERT_EQ(env.events().size(), events_before + 1);
  EXPECT_EQ(env.events().back().action, "RegressWord");
}

TEST(Actions, NamesRoundTrip) {
  for (std::size_t i = 0; i < kNumActions; ++i) {
    EXPECT_EQ(action_from_name(action_name(action_from_index(i))), action_from_index(i));
  }
  EXPECT_FALSE(action_from_name("Jump").has_value());
}

TEST(Params, ValidateNamesKey) {
  EnvParams p;
  p.timing.tau_sample = 0.0;
  try {
    p.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "timing.tau_sample");
  }
}
