#include "readsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>

#include "readsim/errors.hpp"

namespace readsim {

std::size_t levenshtein(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      row[j] = std::min({above + 1, row[j - 1] + 1, diagonal + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diagonal = above;
    }
  }
  return row[b.size()];
}

double nld(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  const auto longest = std::max(a.size(), b.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

Symbols scanpath_symbols(const Scanpath& scanpath, bool collapse_refixations) {
  Symbols out;
  out.reserve(scanpath.events.size());
  for (const auto& event : scanpath.events) {
    if (collapse_refixations && !out.empty() && out.back() == event.word) continue;
    out.push_back(event.word);
  }
  return out;
}

std::vector<bool> first_pass_skips(std::span<const std::size_t> word_sequence, std::size_t word_count) {
  std::vector<bool> skipped(word_count, false);
  std::vector<bool> fixated(word_count, false);
  for (const auto w : word_sequence) {
    if (w >= word_count) throw DataError("fixated word index " + std::to_string(w) + " outside the text");
    // Every unfixated word before w is passed over for the first time here.
    for (std::size_t v = 0; v < w; ++v) {
      if (!fixated[v]) skipped[v] = true;
    }
    fixated[w] = true;
  }
  return skipped;
}

MetricReport summarize_scanpath(const Scanpath& scanpath, std::size_t word_count) {
  if (scanpath.events.empty()) throw EmptyScanpath("scanpath '" + scanpath.trial_id + "' has no events");
  if (word_count == 0) throw DataError("text has no words");

  Symbols words;
  words.reserve(scanpath.events.size());
  double end_ms = 0.0;
  double total_duration = 0.0;
  for (const auto& e : scanpath.events) {
    words.push_back(e.word);
    end_ms = std::max(end_ms, e.t_ms + e.dur_ms);
    total_duration += e.dur_ms;
  }

  const std::set<std::size_t> distinct(words.begin(), words.end());
  const auto skips = first_pass_skips(words, word_count);
  std::size_t transitions = 0;
  std::size_t regressions = 0;
  for (std::size_t i = 1; i < words.size(); ++i) {
    if (words[i] == words[i - 1]) continue;
    ++transitions;
    if (words[i] < words[i - 1]) ++regressions;
  }

  MetricReport report;
  const double minutes = end_ms / 60000.0;
  report.reading_speed_wpm = minutes > 0.0 ? static_cast<double>(distinct.size()) / minutes : 0.0;
  report.skip_probability = static_cast<double>(std::count(skips.begin(), skips.end(), true)) /
                            static_cast<double>(word_count);
  report.regression_probability =
      transitions > 0 ? static_cast<double>(regressions) / static_cast<double>(transitions) : 0.0;
  report.mean_fixation_duration_ms = total_duration / static_cast<double>(scanpath.events.size());
  report.coverage_fraction = static_cast<double>(distinct.size()) / static_cast<double>(word_count);
  report.recall_score = scanpath.recall;
  return report;
}

MeanSd mean_sd(std::span<const double> values) {
  MeanSd out;
  out.n = values.size();
  if (values.empty()) return out;
  double sum = 0.0;
  for (const double v : values) sum += v;
  out.mean = sum / static_cast<double>(out.n);
  if (out.n > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(out.n - 1));
    out.se = out.sd / std::sqrt(static_cast<double>(out.n));
  }
  return out;
}

ComparisonReport compare_batches(std::span<const Scanpath> simulated, std::span<const Scanpath> human,
                                 bool collapse_refixations) {
  std::unordered_map<std::string, const Scanpath*> human_by_id;
  for (const auto& h : human) {
    if (!human_by_id.emplace(h.trial_id, &h).second) throw DataError("duplicate human trial_id '" + h.trial_id + "'");
  }
  std::set<std::string> sim_ids;
  ComparisonReport report;
  std::map<double, std::vector<double>> by_condition;
  for (const auto& s : simulated) {
    if (!sim_ids.insert(s.trial_id).second) throw DataError("duplicate simulated trial_id '" + s.trial_id + "'");
    const auto it = human_by_id.find(s.trial_id);
    if (it == human_by_id.end()) {
      report.unmatched.push_back(s.trial_id);
      continue;
    }
    const double d = nld(scanpath_symbols(s, collapse_refixations), scanpath_symbols(*it->second, collapse_refixations));
    report.pairs.push_back(PairResult{s.trial_id, s.condition_s, d});
    by_condition[s.condition_s].push_back(d);
  }
  for (const auto& h : human) {
    if (!sim_ids.count(h.trial_id)) report.unmatched.push_back(h.trial_id);
  }
  if (report.pairs.empty()) throw NoPairs("no trial_id appears in both inputs");
  for (const auto& [condition, values] : by_condition) {
    const auto stats = mean_sd(values);
    report.per_condition[condition] = ConditionSummary{stats.n, stats.mean, stats.sd};
  }
  return report;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

std::string metrics_csv_header() {
  return "trial_id,condition_s,reading_speed_wpm,skip_p,regress_p,mean_fix_ms,coverage,recall,nld\n";
}

std::string metrics_csv_row(const std::string& trial_id, double condition_s, const MetricReport& r) {
  std::ostringstream out;
  out << trial_id << ',' << format_number(condition_s) << ',' << format_number(r.reading_speed_wpm) << ','
      << format_number(r.skip_probability) << ',' << format_number(r.regression_probability) << ','
      << format_number(r.mean_fixation_duration_ms) << ',' << format_number(r.coverage_fraction) << ','
      << (r.recall_score ? format_number(*r.recall_score) : "") << ',' << (r.nld ? format_number(*r.nld) : "")
      << '\n';
  return out.str();
}

std::vector<double> fixation_time_per_word(std::span<const Scanpath> scanpaths, std::size_t word_count) {
  std::vector<double> totals(word_count, 0.0);
  if (scanpaths.empty()) return totals;
  for (const auto& s : scanpaths) {
    for (const auto& e : s.events) {
      if (e.word >= word_count) throw DataError("fixated word index " + std::to_string(e.word) + " outside the text");
      totals[e.word] += e.dur_ms;
    }
  }
  for (auto& t : totals) t /= static_cast<double>(scanpaths.size());
  return totals;
}

std::string heatmap_csv(const AnnotatedText& text, std::span<const double> total_ms) {
  std::ostringstream out;
  out << "word_index,sentence,word,total_fix_ms\n";
  for (std::size_t i = 0; i < text.words.size(); ++i) {
    out << i << ',' << text.words[i].sentence_index << ',' << text.words[i].surface << ','
        << format_number(i < total_ms.size() ? total_ms[i] : 0.0) << '\n';
  }
  return out.str();
}

std::string heatmap_svg(const AnnotatedText& text, std::span<const double> total_ms, const std::string& title) {
  constexpr double kCharWidth = 9.0;
  constexpr double kRowHeight = 28.0;
  constexpr double kMargin = 16.0;
  constexpr double kWidth = 800.0;
  constexpr double kGap = kCharWidth;

  double peak = 0.0;
  for (const double t : total_ms) peak = std::max(peak, t);

  std::ostringstream body;
  double x = kMargin;
  double y = kMargin + kRowHeight;
  for (std::size_t i = 0; i < text.words.size(); ++i) {
    const auto& word = text.words[i];
    const double w = kCharWidth * static_cast<double>(word.length()) + 4.0;
    if (x + w > kWidth - kMargin) {
      x = kMargin;
      y += kRowHeight;
    }
    const double intensity = peak > 0.0 && i < total_ms.size() ? total_ms[i] / peak : 0.0;
    const int shade = static_cast<int>(std::lround(255.0 * (1.0 - intensity)));
    char rect[256];
    std::snprintf(rect, sizeof rect,
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"rgb(255,%d,%d)\" "
                  "stroke=\"#999\" stroke-width=\"0.5\"><title>%s: %.1f ms</title></rect>\n",
                  x, y - kRowHeight + 6.0, w, kRowHeight - 8.0, shade, shade, word.surface.c_str(),
                  i < total_ms.size() ? total_ms[i] : 0.0);
    body << rect;
    char label[256];
    std::snprintf(label, sizeof label,
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"monospace\" font-size=\"14\">%s</text>\n", x + 2.0,
                  y - 8.0, word.surface.c_str());
    body << label;
    x += w + kGap;
  }
  const double height = y + kMargin;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << height + kRowHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << height + kRowHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << body.str();
  out << "<text x=\"" << kMargin << "\" y=\"" << height + kRowHeight / 2.0
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << title << " (peak " << format_number(peak)
      << " ms)</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace readsim
