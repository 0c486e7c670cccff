#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "readsim/corpus.hpp"
#include "readsim/reading_env.hpp"

namespace readsim {

using Symbols = std::vector<std::size_t>;

std::size_t levenshtein(std::span<const std::size_t> a, std::span<const std::size_t> b);

// Edit distance over the longer length; 0 when both are empty.
double nld(std::span<const std::size_t> a, std::span<const std::size_t> b);

// Word index per fixation event, optionally collapsing consecutive repeats.
Symbols scanpath_symbols(const Scanpath& scanpath, bool collapse_refixations = true);

// Per word: true when a later word was fixated before the word's first
// fixation (words never reached are not skipped).
std::vector<bool> first_pass_skips(std::span<const std::size_t> word_sequence, std::size_t word_count);

struct MetricReport {
  double reading_speed_wpm = 0.0;
  double skip_probability = 0.0;
  double regression_probability = 0.0;
  double mean_fixation_duration_ms = 0.0;
  double coverage_fraction = 0.0;
  std::optional<double> recall_score;
  std::optional<double> nld;
};

// Throws EmptyScanpath when there are no events.
MetricReport summarize_scanpath(const Scanpath& scanpath, std::size_t word_count);

struct PairResult {
  std::string trial_id;
  double condition_s = 0.0;
  double nld = 0.0;
};

struct ConditionSummary {
  std::size_t pairs = 0;
  double mean_nld = 0.0;
  double sd_nld = 0.0;  // sample standard deviation, 0 for a single pair
};

struct ComparisonReport {
  std::vector<PairResult> pairs;           // simulated file order
  std::vector<std::string> unmatched;      // trial ids present on one side only
  std::map<double, ConditionSummary> per_condition;
};

// Pairs simulated and human trials by trial_id. Throws NoPairs when nothing
// matches and DataError on duplicate ids within one side.
ComparisonReport compare_batches(std::span<const Scanpath> simulated, std::span<const Scanpath> human,
                                 bool collapse_refixations = true);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

MeanSd mean_sd(std::span<const double> values);

// Metric CSV rows: trial_id,condition_s,reading_speed_wpm,skip_p,regress_p,mean_fix_ms,coverage,recall,nld
std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& trial_id, double condition_s, const MetricReport& report);

// Total fixation time per word, averaged over the given scanpaths.
std::vector<double> fixation_time_per_word(std::span<const Scanpath> scanpaths, std::size_t word_count);

std::string heatmap_csv(const AnnotatedText& text, std::span<const double> total_ms);
std::string heatmap_svg(const AnnotatedText& text, std::span<const double> total_ms, const std::string& title);

// Fixed-precision number formatting shared by all CSV writers.
std::string format_number(double value);

}  // namespace readsim
