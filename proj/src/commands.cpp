#include "readsim/commands.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "readsim/checkpoint.hpp"
#include "readsim/errors.hpp"
#include "readsim/experiment.hpp"
#include "readsim/scanpath_io.hpp"

namespace readsim {

namespace {

std::vector<std::shared_ptr<const PreparedText>> select_passages(const Corpus& corpus,
                                                                 const std::optional<std::filesystem::path>& text) {
  if (text) return {prepare_text_file(*text, corpus)};
  return corpus.passages;
}

std::string budget_label(double budget) {
  std::ostringstream out;
  out << budget;
  return out.str();
}

const std::vector<std::string> kFitMetrics = {"reading_speed_wpm", "skip_p", "regress_p",
                                              "mean_fix_ms",       "coverage", "recall"};

}  // namespace

TrainSummary cmd_train(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream* log) {
  config.validate();
  const auto corpus = load_corpus(config.corpus);
  auto params = config.env;
  params.time_budget_s = config.time_budgets.front();

  const auto result = train(reading_env_factory(corpus.passages, params, config.agent), config.ppo, config.seed,
                            config.threads, [&](const CurvePoint& p) {
                              if (log != nullptr) {
                                *log << "update " << p.update << " mean_return " << format_number(p.mean_return)
                                     << " entropy " << format_number(p.entropy) << '\n';
                              }
                            });

  TrainSummary summary;
  summary.checkpoint = out_dir / "checkpoint.json";
  summary.curve = out_dir / "curve.csv";
  summary.resolved_config = out_dir / "resolved_config.json";
  summary.curve_points = result.curve;
  save_checkpoint(summary.checkpoint,
                  Checkpoint{result.params, config_hash(config), config.seed, config.ppo.total_updates,
                             params.time_budget_s});
  write_text_file(summary.curve, curve_csv(result.curve));
  auto resolved = config;
  resolved.time_budgets = {params.time_budget_s};
  resolved.output_dir = out_dir.string();
  write_text_file(summary.resolved_config, config_to_json(resolved).dump(2) + "\n");
  return summary;
}

SimulateSummary cmd_simulate(const RunConfig& config, const SimulateRequest& request,
                             const std::filesystem::path& out_dir) {
  config.validate();
  if (request.episodes == 0) throw ConfigError("n", "must be >= 1");
  const auto policy = load_policy(request.policy, config);
  const auto corpus = load_corpus(config.corpus);
  const auto passages = select_passages(corpus, request.text);

  SimulateSummary summary;
  summary.scanpaths = out_dir / "scanpaths.jsonl";
  summary.metrics = out_dir / "metrics.csv";
  std::string jsonl;
  std::string metrics = metrics_csv_header();
  for (const double budget : config.time_budgets) {
    auto params = config.env;
    params.time_budget_s = budget;
    const auto episodes =
        run_episodes(passages, params, config.agent, *policy, config.seed, request.episodes, config.threads);
    const auto reports = summarize_episodes(episodes, passages);
    std::vector<double> speeds;
    std::vector<std::size_t> per_passage(passages.size(), 0);
    for (std::size_t i = 0; i < episodes.size(); ++i) {
      jsonl += scanpath_to_json_line(episodes[i].scanpath);
      metrics += metrics_csv_row(episodes[i].scanpath.trial_id, budget, reports[i]);
      speeds.push_back(reports[i].reading_speed_wpm);
      ++per_passage[episodes[i].text_index];
    }
    summary.reading_speed_by_condition[budget] = mean_sd(speeds);

    // Heatmap of the passage read most often under this condition.
    const auto shown = static_cast<std::size_t>(
        std::distance(per_passage.begin(), std::max_element(per_passage.begin(), per_passage.end())));
    std::vector<Scanpath> on_passage;
    for (const auto& e : episodes) {
      if (e.text_index == shown) on_passage.push_back(e.scanpath);
    }
    const auto& text = passages[shown]->text;
    const auto totals = fixation_time_per_word(on_passage, text.word_count());
    const auto stem = out_dir / ("heatmap_T" + budget_label(budget));
    write_text_file(stem.string() + ".csv", heatmap_csv(text, totals));
    write_text_file(stem.string() + ".svg",
                    heatmap_svg(text, totals, "Mean fixation time per word, " + text.id + ", T = " +
                                                  budget_label(budget) + " s"));
    summary.heatmaps.push_back(stem.string() + ".svg");
  }
  write_text_file(summary.scanpaths, jsonl);
  write_text_file(summary.metrics, metrics);
  return summary;
}

ComparisonReport cmd_evaluate(const RunConfig& config, const std::filesystem::path& simulated,
                              const std::filesystem::path& human, const std::filesystem::path& out_dir) {
  const auto sim = load_scanpaths_jsonl(simulated);
  const auto hum = load_scanpaths_jsonl(human);
  auto report = compare_batches(sim, hum, config.collapse_refixations);

  // Word counts come from the corpus passage named by the scanpath when it
  // is known, otherwise from the largest fixated word index.
  std::unordered_map<std::string, std::size_t> word_counts;
  try {
    const auto corpus = load_corpus(config.corpus);
    for (const auto& p : corpus.passages) word_counts[p->text.id] = p->text.word_count();
  } catch (const ConfigError&) {
  }
  auto word_count = [&](const Scanpath& s) {
    if (s.text_id) {
      if (const auto it = word_counts.find(*s.text_id); it != word_counts.end()) return it->second;
    }
    std::size_t n = 0;
    for (const auto& e : s.events) n = std::max(n, e.word + 1);
    return n;
  };
  std::unordered_map<std::string, double> pair_nld;
  for (const auto& p : report.pairs) pair_nld[p.trial_id] = p.nld;

  auto battery = [&](const std::vector<Scanpath>& side, std::vector<MetricReport>& reports) {
    std::string csv = metrics_csv_header();
    for (const auto& s : side) {
      auto r = summarize_scanpath(s, word_count(s));
      if (const auto it = pair_nld.find(s.trial_id); it != pair_nld.end()) r.nld = it->second;
      csv += metrics_csv_row(s.trial_id, s.condition_s, r);
      reports.push_back(r);
    }
    return csv;
  };
  std::vector<MetricReport> sim_reports;
  std::vector<MetricReport> human_reports;
  write_text_file(out_dir / "metrics_sim.csv", battery(sim, sim_reports));
  write_text_file(out_dir / "metrics_human.csv", battery(hum, human_reports));

  std::string comparison = "trial_id,condition_s,nld\n";
  for (const auto& p : report.pairs) {
    comparison += p.trial_id + "," + format_number(p.condition_s) + "," + format_number(p.nld) + "\n";
  }
  write_text_file(out_dir / "comparison.csv", comparison);

  std::ostringstream summary;
  summary << "matched pairs: " << report.pairs.size() << "\n";
  summary << "unmatched trials: " << report.unmatched.size();
  for (const auto& id : report.unmatched) summary << ' ' << id;
  summary << "\n\nNLD by condition (" << (config.collapse_refixations ? "refixations collapsed" : "all fixations")
          << ")\n";
  for (const auto& [condition, c] : report.per_condition) {
    summary << "  T = " << budget_label(condition) << " s: n = " << c.pairs << ", mean = " << format_number(c.mean_nld)
            << ", sd = " << format_number(c.sd_nld) << "\n";
  }
  const auto sim_means = aggregate_metrics(sim_reports);
  const auto human_means = aggregate_metrics(human_reports);
  summary << "\nmetric means (simulated / human)\n";
  for (const auto& name : kFitMetrics) {
    summary << "  " << name << ": " << format_number(sim_means.get(name).mean) << " / "
            << format_number(human_means.get(name).mean) << "\n";
  }
  write_text_file(out_dir / "summary.txt", summary.str());
  return report;
}

std::map<std::string, double> fit_metrics(const RunConfig& config, const std::string& policy_spec,
                                          const std::optional<std::filesystem::path>& text) {
  config.validate();
  const auto policy = load_policy(policy_spec, config);
  const auto corpus = load_corpus(config.corpus);
  const auto passages = select_passages(corpus, text);
  auto params = config.env;
  params.time_budget_s = config.time_budgets.front();
  const auto episodes = run_episodes(passages, params, config.agent, *policy, config.seed, config.fit.episodes);
  const auto means = aggregate_metrics(summarize_episodes(episodes, passages));
  std::map<std::string, double> out;
  for (const auto& name : kFitMetrics) out[name] = means.get(name).mean;
  return out;
}

FitResult cmd_fit(const RunConfig& config, const std::string& policy_spec,
                  const std::optional<std::filesystem::path>& text, const std::filesystem::path& out_dir) {
  config.validate();
  const auto& fit = config.fit;
  if (fit.grid.empty()) throw ConfigError("fit.grid", "grid is empty");
  if (fit.target.empty()) throw ConfigError("fit.target", "no target metrics given");

  const auto policy = load_policy(policy_spec, config);
  const auto corpus = load_corpus(config.corpus);
  const auto passages = select_passages(corpus, text);

  std::size_t points = 1;
  for (const auto& axis : fit.grid) points *= axis.second.size();

  std::vector<FitRow> rows(points);
  auto evaluate_point = [&](std::size_t index) {
    auto point_config = config;
    FitRow row;
    row.grid_index = index;
    std::size_t stride = points;
    for (const auto& [param, values] : fit.grid) {
      stride /= values.size();
      const double value = values[(index / stride) % values.size()];
      set_parameter(point_config, param, value);
      row.parameters.emplace_back(param, value);
    }
    point_config.validate();
    auto params = point_config.env;
    params.time_budget_s = point_config.time_budgets.front();
    const auto episodes =
        run_episodes(passages, params, point_config.agent, *policy, point_config.seed, fit.episodes);
    const auto means = aggregate_metrics(summarize_episodes(episodes, passages));
    for (const auto& name : kFitMetrics) row.metrics[name] = means.get(name).mean;
    for (const auto& [name, target] : fit.target) {
      const auto w = fit.weights.count(name) ? fit.weights.at(name) : 1.0;
      const double diff = row.metrics.at(name) - target;
      row.loss += w * diff * diff;
    }
    rows[index] = std::move(row);
  };

  const auto threads = std::clamp<std::size_t>(config.threads, 1, points);
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    auto body = [&, t] {
      try {
        for (std::size_t i = t; i < points; i += threads) evaluate_point(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    };
    if (threads == 1) {
      body();
    } else {
      pool.emplace_back(body);
    }
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::stable_sort(rows.begin(), rows.end(), [](const FitRow& a, const FitRow& b) { return a.loss < b.loss; });
  FitResult result{rows, rows.front()};

  std::ostringstream csv;
  csv << "grid_index";
  for (const auto& axis : fit.grid) csv << ',' << axis.first;
  for (const auto& name : kFitMetrics) csv << ',' << name;
  csv << ",loss\n";
  for (const auto& row : rows) {
    csv << row.grid_index;
    for (const auto& p : row.parameters) csv << ',' << format_number(p.second);
    for (const auto& name : kFitMetrics) csv << ',' << format_number(row.metrics.at(name));
    csv << ',' << format_number(row.loss) << '\n';
  }
  write_text_file(out_dir / "fit.csv", csv.str());

  nlohmann::ordered_json best;
  best["grid_index"] = result.best.grid_index;
  for (const auto& [param, value] : result.best.parameters) best["parameters"][param] = value;
  best["metrics"] = nlohmann::ordered_json(result.best.metrics);
  best["loss"] = result.best.loss;
  write_text_file(out_dir / "fit_best.json", best.dump(2) + "\n");
  return result;
}

}  // namespace readsim
