#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "readsim/errors.hpp"
#include "readsim/metrics.hpp"
#include "readsim/scanpath_io.hpp"
#include "support/oracles.hpp"

using namespace readsim;

namespace {

Scanpath path_of(const std::string& id, double condition, const std::vector<std::size_t>& words,
                 double dur_ms = 200.0) {
  Scanpath s;
  s.trial_id = id;
  s.condition_s = condition;
  double t = 0.0;
  for (const auto w : words) {
    s.events.push_back(FixationEvent{t, w, w * 4, "NextWord", dur_ms});
    t += dur_ms;
  }
  return s;
}

Symbols symbols(const std::string& s) { return Symbols(s.begin(), s.end()); }

}  // namespace

TEST(Levenshtein, Identity) { EXPECT_EQ(levenshtein(symbols("abc"), symbols("abc")), 0u); }

TEST(Levenshtein, EmptyVersusN) { EXPECT_EQ(levenshtein(Symbols{}, symbols("abcde")), 5u); }

TEST(Levenshtein, KittenSitting) { EXPECT_EQ(levenshtein(symbols("kitten"), symbols("sitting")), 3u); }

TEST(Levenshtein, MetricAxiomsAgainstOracle) {
  std::mt19937_64 rng(6);
  auto random_seq = [&] {
    Symbols s(rng() % 21);
    for (auto& x : s) x = rng() % 5;
    return s;
  };
  for (int i = 0; i < 300; ++i) {
    const auto a = random_seq();
    const auto b = random_seq();
    const auto c = random_seq();
    const auto ab = levenshtein(a, b);
    EXPECT_EQ(ab, oracle::edit_distance(a, b));
    EXPECT_EQ(ab, levenshtein(b, a));
    EXPECT_EQ(ab == 0, a == b);
    EXPECT_LE(levenshtein(a, c), ab + levenshtein(b, c));
  }
}

TEST(Nld, Examples) {
  EXPECT_EQ(nld(symbols("abc"), symbols("abc")), 0.0);
  EXPECT_EQ(nld(Symbols{}, symbols("ab")), 1.0);
  EXPECT_NEAR(nld(symbols("abc"), symbols("axc")), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(nld(Symbols{}, Symbols{}), 0.0);
}

TEST(Symbols, CollapseRefixations) {
  const auto s = path_of("t", 30, {0, 0, 1, 1, 1, 2, 1});
  EXPECT_EQ(scanpath_symbols(s), (Symbols{0, 1, 2, 1}));
  EXPECT_EQ(scanpath_symbols(s, false), (Symbols{0, 0, 1, 1, 1, 2, 1}));
}

TEST(Summary, ReadingSpeed) {
  std::vector<std::size_t> words(60);
  for (std::size_t i = 0; i < 60; ++i) words[i] = i;
  const auto r = summarize_scanpath(path_of("t", 30, words, 500.0), 100);
  EXPECT_NEAR(r.reading_speed_wpm, 120.0, 1e-9);
  EXPECT_NEAR(r.coverage_fraction, 0.6, 1e-12);
  EXPECT_NEAR(r.mean_fixation_duration_ms, 500.0, 1e-12);
}

TEST(Summary, FirstPassSkip) {
  const auto r = summarize_scanpath(path_of("t", 30, {0, 2, 3}), 4);
  EXPECT_DOUBLE_EQ(r.skip_probability, 0.25);
}

TEST(Summary, Regressions) {
  const auto r = summarize_scanpath(path_of("t", 30, {0, 1, 2, 1, 3}), 4);
  EXPECT_DOUBLE_EQ(r.regression_probability, 0.25);
}

TEST(Summary, LateFixationStillCountsAsSkipped) {
  EXPECT_EQ(first_pass_skips(Symbols{0, 2, 1, 3}, 5), (std::vector<bool>{false, true, false, false, false}));
  EXPECT_THROW(first_pass_skips(Symbols{0, 7}, 5), DataError);
}

TEST(Summary, EmptyThrows) {
  EXPECT_THROW(summarize_scanpath(Scanpath{}, 4), EmptyScanpath);
}

TEST(Summary, FuzzedFractionsInRange) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = 1 + rng() % 30;
    std::vector<std::size_t> words(1 + rng() % 40);
    for (auto& w : words) w = rng() % n;
    const auto r = summarize_scanpath(path_of("t", 30, words, 1.0 + rng() % 300), n);
    for (const double v : {r.skip_probability, r.regression_probability, r.coverage_fraction}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_GE(r.reading_speed_wpm, 0.0);
  }
}

TEST(Compare, SelfComparisonIsZero) {
  const std::vector<Scanpath> sims = {path_of("a", 30, {0, 1, 2}), path_of("b", 60, {0, 2, 1})};
  const auto report = compare_batches(sims, sims);
  ASSERT_EQ(report.pairs.size(), 2u);
  for (const auto& p : report.pairs) EXPECT_EQ(p.nld, 0.0);
  EXPECT_TRUE(report.unmatched.empty());
}

TEST(Compare, UnmatchedListed) {
  const std::vector<Scanpath> sims = {path_of("a", 30, {0, 1}), path_of("extra", 30, {0})};
  const std::vector<Scanpath> human = {path_of("a", 30, {0, 1}), path_of("lonely", 30, {0})};
  const auto report = compare_batches(sims, human);
  EXPECT_EQ(report.unmatched, (std::vector<std::string>{"extra", "lonely"}));
}

TEST(Compare, ConditionMeans) {
  const std::vector<Scanpath> sims = {path_of("a", 30, {0, 1, 2, 3, 4}), path_of("b", 30, {0, 1, 2, 3, 4})};
  const std::vector<Scanpath> human = {path_of("a", 30, {0, 1, 2, 3, 9}), path_of("b", 30, {0, 1, 2, 8, 9})};
  const auto report = compare_batches(sims, human);
  EXPECT_NEAR(report.per_condition.at(30).mean_nld, 0.3, 1e-12);
  EXPECT_NEAR(report.per_condition.at(30).sd_nld, std::sqrt(0.02), 1e-12);
}

TEST(Compare, DisjointIdsThrow) {
  const std::vector<Scanpath> sims = {path_of("a", 30, {0})};
  const std::vector<Scanpath> human = {path_of("b", 30, {0})};
  EXPECT_THROW(compare_batches(sims, human), NoPairs);
}

TEST(Compare, DuplicateIdsThrow) {
  const std::vector<Scanpath> sims = {path_of("a", 30, {0}), path_of("a", 30, {1})};
  EXPECT_THROW(compare_batches(sims, sims), DataError);
}

TEST(MeanSdTest, SampleStatistics) {
  const std::vector<double> v = {1, 2, 3, 4};
  const auto m = mean_sd(v);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.sd, std::sqrt(5.0 / 3.0), 1e-12);
  EXPECT_NEAR(m.se, m.sd / 2.0, 1e-12);
  EXPECT_EQ(m.n, 4u);
}

TEST(Csv, HeaderAndRow) {
  EXPECT_EQ(metrics_csv_header(), "trial_id,condition_s,reading_speed_wpm,skip_p,regress_p,mean_fix_ms,coverage,recall,nld\n");
  MetricReport r;
  r.reading_speed_wpm = 120;
  r.recall_score = 0.5;
  EXPECT_EQ(metrics_csv_row("x", 30, r), "x,30.000000,120.000000,0.000000,0.000000,0.000000,0.000000,0.500000,\n");
}

TEST(Heatmap, TotalsPerWord) {
  const std::vector<Scanpath> paths = {path_of("a", 30, {0, 1, 1}, 100.0), path_of("b", 30, {1}, 100.0)};
  const auto totals = fixation_time_per_word(paths, 3);
  EXPECT_EQ(totals, (std::vector<double>{50.0, 150.0, 0.0}));
  const Lexicon lex({{"big", 1}, {"red", 1}, {"dog", 1}});
  const auto text = tokenize("Big red dog.", lex);
  const auto csv = heatmap_csv(text, totals);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "word_index,sentence,word,total_fix_ms");
  const auto svg = heatmap_svg(text, totals, "demo");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Jsonl, RoundTrip) {
  auto s = path_of("T30_seed7", 30, {0, 1, 3});
  s.seed = 7;
  s.recall = 0.25;
  s.text_id = "text01";
  const auto line = scanpath_to_json_line(s);
  std::istringstream in(line + line);
  const auto parsed = parse_scanpaths_jsonl(in);
  ASSERT_EQ(parsed.size(), 2u);
  EXPECT_EQ(parsed[0].trial_id, "T30_seed7");
  EXPECT_EQ(parsed[0].seed, std::optional<std::uint64_t>(7));
  EXPECT_EQ(parsed[0].text_id, std::optional<std::string>("text01"));
  EXPECT_EQ(parsed[0].events.size(), 3u);
  EXPECT_EQ(scanpath_to_json_line(parsed[0]), line);
}

TEST(Jsonl, KeyOrder) {
  const auto line = scanpath_to_json_line(path_of("x", 60, {0}));
  EXPECT_EQ(line.rfind("{\"trial_id\":\"x\",\"condition_s\":60", 0), 0u);
}

TEST(Jsonl, MalformedLineNumber) {
  const auto good = scanpath_to_json_line(path_of("x", 60, {0}));
  std::istringstream in(good + good + "{not json\n");
  try {
    parse_scanpaths_jsonl(in);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Jsonl, MissingFieldIsSchemaError) {
  std::istringstream in("{\"trial_id\":\"x\",\"events\":[]}\n");
  EXPECT_THROW(parse_scanpaths_jsonl(in), SchemaError);
}

TEST(Jsonl, BlankLinesAndUnknownKeys) {
  std::istringstream in(
      "\n{\"trial_id\":\"x\",\"condition_s\":30,\"subject\":\"p1\",\"events\":[{\"t_ms\":0,\"word\":2,\"letter\":9,"
      "\"action\":\"NextWord\",\"dur_ms\":180}]}\n\n");
  const auto parsed = parse_scanpaths_jsonl(in);
  ASSERT_EQ(parsed.size(), 1u);
  EXPECT_EQ(parsed[0].events[0].word, 2u);
}
