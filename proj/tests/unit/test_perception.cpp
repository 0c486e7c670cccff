#include <gtest/gtest.h>

#include <cmath>

#include "readsim/corpus.hpp"
#include "readsim/errors.hpp"
#include "readsim/perception.hpp"
#include "support/fixtures.hpp"

using namespace readsim;

namespace {

AnnotatedText sample_text() {
  const Lexicon lex({{"the", 100}, {"quick", 10}, {"brown", 10}, {"fox", 5}, {"jumps", 4}});
  return tokenize("The quick brown fox jumps.", lex);
}

}  // namespace

TEST(Acuity, FovealLetterIsCertain) {
  EXPECT_DOUBLE_EQ(identification_probability(0.0, AcuityModel{}), 1.0);
}

TEST(Acuity, FarLettersFallToChance) {
  EXPECT_NEAR(identification_probability(1000.0, AcuityModel{}), 1.0 / 26.0, 1e-12);
}

TEST(Acuity, OneSigma) {
  const double expected = 1.0 / 26.0 + (25.0 / 26.0) * std::exp(-0.5);
  EXPECT_NEAR(identification_probability(3.0, AcuityModel{}), expected, 1e-12);
  EXPECT_NEAR(identification_probability(3.0, AcuityModel{}), 0.6217, 1e-4);
}

TEST(Acuity, SymmetricInEccentricity) {
  for (double e = 0.0; e < 10.0; e += 0.5) {
    EXPECT_DOUBLE_EQ(identification_probability(e, AcuityModel{}), identification_probability(-e, AcuityModel{}));
  }
}

TEST(Acuity, ValidateRejectsBadParameters) {
  AcuityModel m;
  m.sigma = 0.0;
  EXPECT_THROW(m.validate(), ConfigError);
  m = AcuityModel{};
  m.p_floor = 1.5;
  EXPECT_THROW(m.validate(), ConfigError);
}

TEST(VisibleLetters, LeftEdgeClipped) {
  const auto text = sample_text();
  const auto slots = visible_letters(0, text, AcuityModel{});
  EXPECT_EQ(slots.front(), 0u);
  // 0..8 minus the separator at 3
  EXPECT_EQ(slots, (std::vector<std::size_t>{0, 1, 2, 4, 5, 6, 7, 8}));
}

TEST(VisibleLetters, MidTextWindow) {
  const auto text = sample_text();
  const std::size_t fix = 10;  // inside "brown"
  const auto slots = visible_letters(fix, text, AcuityModel{});
  std::size_t separators = 0;
  for (std::size_t o = fix - 3; o <= fix + 8; ++o) separators += text.letter_line[o] == ' ';
  EXPECT_EQ(slots.size(), 12u - separators);
  EXPECT_EQ(slots.front(), fix - 3);
  EXPECT_EQ(slots.back(), fix + 8);
}

TEST(VisibleLetters, RightEdgeClipped) {
  const auto text = sample_text();
  const auto last = text.letter_line.size() - 1;
  const auto slots = visible_letters(last, text, AcuityModel{});
  EXPECT_EQ(slots.back(), last);
  EXPECT_EQ(slots.size(), 4u);
}

TEST(VisibleLetters, OutOfBoundsThrows) {
  const auto text = sample_text();
  EXPECT_THROW(visible_letters(text.letter_line.size(), text, AcuityModel{}), InvalidFixation);
}

TEST(SampleObservation, VeridicalModeIsExact) {
  const auto text = sample_text();
  AcuityModel m;
  m.p_floor = 1.0;
  Rng rng(3);
  for (std::size_t fix = 0; fix < text.letter_line.size(); fix += 3) {
    if (text.letter_line[fix] == ' ') continue;
    for (const auto& o : sample_observation(fix, text, m, rng)) {
      EXPECT_EQ(o.observed_letter, text.letter_line[o.letter_offset]);
    }
  }
}

TEST(SampleObservation, SeededRepeatability) {
  const auto text = sample_text();
  Rng a(99);
  Rng b(99);
  const auto x = sample_observation(6, text, AcuityModel{}, a);
  const auto y = sample_observation(6, text, AcuityModel{}, b);
  ASSERT_EQ(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(x[i].letter_offset, y[i].letter_offset);
    EXPECT_EQ(x[i].observed_letter, y[i].observed_letter);
    EXPECT_EQ(x[i].eccentricity, y[i].eccentricity);
  }
}

TEST(SampleObservation, MonteCarloMatchesAcuity) {
  const auto text = sample_text();
  const AcuityModel m;
  const std::size_t fix = 4;  // 'q'; the letter 3 slots right is 'c'
  const std::size_t target = fix + 3;
  Rng rng(2024);
  std::size_t correct = 0;
  const std::size_t n = 10000;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& o : sample_observation(fix, text, m, rng)) {
      if (o.letter_offset == target) correct += o.observed_letter == text.letter_line[target];
    }
  }
  EXPECT_NEAR(static_cast<double>(correct) / n, 0.6217, 0.02);
}

TEST(SampleObservation, WrongLettersNeverEqualTruth) {
  const AcuityModel m;
  EXPECT_NEAR(observation_likelihood('x', 'y', 3.0, m), (1.0 - identification_probability(3.0, m)) / 25.0, 1e-15);
  EXPECT_DOUBLE_EQ(observation_likelihood('y', 'y', 3.0, m), identification_probability(3.0, m));
  double total = observation_likelihood('a', 'a', 2.0, m);
  for (char c = 'b'; c <= 'z'; ++c) total += observation_likelihood(c, 'a', 2.0, m);
  EXPECT_NEAR(total, 1.0, 1e-12);
}
