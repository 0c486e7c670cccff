#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "readsim/belief.hpp"
#include "readsim/errors.hpp"
#include "readsim/memory.hpp"

using namespace readsim;

namespace {

SentenceBelief sentence(std::size_t index, double fraction) {
  SentenceBelief s;
  s.sentence_index = index;
  s.comprehension_fraction = fraction;
  s.integrated = fraction >= 0.7;
  return s;
}

}  // namespace

TEST(Encode, FirstInsert) {
  MemoryState m;
  EXPECT_FALSE(m.encode_word(4, 0.0).has_value());
  EXPECT_EQ(m.lexical_store().size(), 1u);
  EXPECT_EQ(m.activation(4), 1.0);
}

TEST(Encode, EvictsLowestActivationAtCapacity) {
  MemoryState m;
  for (std::size_t w = 0; w < 9; ++w) {
    m.encode_word(w, static_cast<double>(w));
    m.decay_step(1.0);
  }
  // word 0 has decayed longest
  const auto evicted = m.encode_word(100, 9.0);
  ASSERT_TRUE(evicted.has_value());
  EXPECT_EQ(*evicted, 0u);
  EXPECT_EQ(m.lexical_store().size(), 9u);
  EXPECT_FALSE(m.holds(0));
}

TEST(Encode, TiesBreakByAgeThenIndex) {
  MemoryParams p;
  p.stm_capacity = 2;
  MemoryState m(p);
  m.encode_word(7, 1.0);
  m.encode_word(3, 1.0);
  EXPECT_EQ(m.encode_word(9, 2.0), std::optional<std::size_t>(3));
  MemoryState older(p);
  older.encode_word(7, 0.0);
  older.encode_word(3, 1.0);
  EXPECT_EQ(older.encode_word(9, 2.0), std::optional<std::size_t>(7));
}

TEST(Encode, RefreshDoesNotEvict) {
  MemoryState m;
  for (std::size_t w = 0; w < 9; ++w) m.encode_word(w, 0.0);
  m.decay_step(5.0);
  EXPECT_FALSE(m.encode_word(3, 5.0).has_value());
  EXPECT_EQ(m.lexical_store().size(), 9u);
  EXPECT_EQ(m.activation(3), 1.0);
}

TEST(Decay, ZeroIntervalIsIdentity) {
  MemoryState m;
  m.encode_word(1, 0.0);
  m.decay_step(0.0);
  EXPECT_EQ(m.activation(1), 1.0);
}

TEST(Decay, ZeroRateIsIdentity) {
  MemoryParams p;
  p.lambda_stm = 0.0;
  MemoryState m(p);
  m.encode_word(1, 0.0);
  m.decay_step(100.0);
  EXPECT_EQ(m.activation(1), 1.0);
}

TEST(Decay, OneTimeConstant) {
  MemoryParams p;
  p.lambda_stm = 0.1;
  MemoryState m(p);
  m.encode_word(1, 0.0);
  m.decay_step(10.0);
  EXPECT_NEAR(m.activation(1), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(m.activation(1), 0.3679, 1e-4);
}

TEST(Decay, NegativeIntervalThrows) {
  MemoryState m;
  EXPECT_THROW(m.decay_step(-0.1), InvalidDuration);
}

TEST(Decay, Composes) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> dt(0.0, 20.0);
  for (int i = 0; i < 100; ++i) {
    MemoryState a;
    MemoryState b;
    a.encode_word(0, 0.0);
    b.encode_word(0, 0.0);
    a.consolidate_sentence(sentence(0, 1.0), 0.0);
    b.consolidate_sentence(sentence(0, 1.0), 0.0);
    const double d1 = dt(rng);
    const double d2 = dt(rng);
    a.decay_step(d1);
    a.decay_step(d2);
    b.decay_step(d1 + d2);
    EXPECT_NEAR(a.activation(0), b.activation(0), 1e-12);
    EXPECT_NEAR(a.gist_strength(0), b.gist_strength(0), 1e-12);
  }
}

TEST(Consolidate, AboveThresholdStored) {
  MemoryState m;
  EXPECT_NEAR(m.consolidate_sentence(sentence(2, 0.8), 1.0), 0.8, 1e-15);
  EXPECT_EQ(m.gist_strength(2), 0.8);
}

TEST(Consolidate, BelowThresholdIgnored) {
  MemoryState m;
  EXPECT_EQ(m.consolidate_sentence(sentence(2, 0.6), 1.0), 0.0);
  EXPECT_TRUE(m.gist().empty());
}

TEST(Consolidate, KeepsMaximum) {
  MemoryState m;
  m.consolidate_sentence(sentence(0, 0.9), 0.0);
  EXPECT_EQ(m.consolidate_sentence(sentence(0, 0.75), 1.0), 0.0);
  EXPECT_EQ(m.gist_strength(0), 0.9);
  EXPECT_NEAR(m.consolidate_sentence(sentence(0, 1.0), 2.0), 0.1, 1e-12);
}

TEST(Recall, ThresholdCount) {
  MemoryParams p;
  p.theta_int = 0.1;
  MemoryState m(p);
  m.consolidate_sentence(sentence(0, 0.5), 0.0);
  m.consolidate_sentence(sentence(1, 0.15), 0.0);
  const auto r = simulate_recall(m, 2, 0.0);
  EXPECT_EQ(r.score, 0.5);
  EXPECT_EQ(r.recalled_sentences, std::vector<std::size_t>{0});
}

TEST(Recall, AllStrong) {
  MemoryState m;
  m.consolidate_sentence(sentence(0, 1.0), 0.0);
  m.consolidate_sentence(sentence(1, 1.0), 0.0);
  EXPECT_EQ(simulate_recall(m, 2, 0.0).score, 1.0);
}

TEST(Recall, NothingConsolidated) {
  EXPECT_EQ(simulate_recall(MemoryState{}, 4, 10.0).score, 0.0);
}

TEST(Recall, ElapsedTimeDecaysGist) {
  MemoryState m;
  m.consolidate_sentence(sentence(0, 1.0), 0.0);
  const double forget_after = -std::log(0.19) / m.params().lambda_gist;
  EXPECT_EQ(simulate_recall(m, 1, forget_after).score, 0.0);
  EXPECT_EQ(m.gist_strength(0), 1.0);
}

TEST(Recall, StochasticUsesDraws) {
  MemoryParams p;
  p.stochastic_recall = true;
  MemoryState m(p);
  m.consolidate_sentence(sentence(0, 0.8), 0.0);
  m.consolidate_sentence(sentence(1, 0.8), 0.0);
  EXPECT_EQ(simulate_recall(m, 2, 0.0, {0.5, 0.9}).recalled_sentences, std::vector<std::size_t>{0});
}

TEST(Properties, CapacityNeverExceeded) {
  std::mt19937_64 rng(3);
  for (int seq = 0; seq < 200; ++seq) {
    MemoryParams p;
    p.stm_capacity = 1 + rng() % 12;
    MemoryState m(p);
    double now = 0.0;
    for (int op = 0; op < 100; ++op) {
      if (rng() % 3 == 0) {
        const double dt = static_cast<double>(rng() % 1000) / 100.0;
        m.decay_step(dt);
        now += dt;
      } else {
        m.encode_word(rng() % 40, now);
      }
      ASSERT_LE(m.lexical_store().size(), p.stm_capacity);
    }
  }
}

TEST(Properties, GistNonIncreasingBetweenConsolidations) {
  MemoryState m;
  m.consolidate_sentence(sentence(0, 0.9), 0.0);
  double last = m.gist_strength(0);
  for (int i = 0; i < 20; ++i) {
    m.decay_step(3.0);
    EXPECT_LE(m.gist_strength(0), last);
    last = m.gist_strength(0);
  }
}

TEST(Params, Validate) {
  MemoryParams p;
  EXPECT_NO_THROW(p.validate());
  p.stm_capacity = 0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = MemoryParams{};
  p.theta_int = 1.5;
  EXPECT_THROW(p.validate(), ConfigError);
}
