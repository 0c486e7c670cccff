#include "readsim/experiment.hpp"

#include <cstdio>
#include <exception>
#include <thread>

#include "readsim/checkpoint.hpp"
#include "readsim/errors.hpp"
#include "readsim/scanpath_io.hpp"

namespace readsim {

namespace {

std::shared_ptr<const PreparedText> prepare(const std::string& raw, const std::string& id, const Corpus& corpus) {
  auto text = tokenize(raw, corpus.lexicon, id);
  text = predictability_from_bigrams(std::move(text), corpus.texts);
  text = apply_predictability_overrides(std::move(text), corpus.lexicon);
  return prepare_text(std::move(text), corpus.lexicon);
}

}  // namespace

Corpus load_corpus(const CorpusConfig& config) {
  if (!std::filesystem::is_regular_file(config.lexicon)) {
    throw ConfigError("corpus.lexicon", "file not found: " + config.lexicon);
  }
  const auto paths = corpus_text_paths(config);
  if (paths.empty()) throw ConfigError("corpus.texts", "no text files found");
  for (const auto& p : paths) {
    if (!std::filesystem::is_regular_file(p)) throw ConfigError("corpus.texts", "file not found: " + p.string());
  }

  Corpus corpus;
  corpus.lexicon = load_lexicon_tsv(config.lexicon);
  std::vector<std::string> raw;
  for (const auto& p : paths) {
    raw.push_back(read_text_file(p));
    corpus.texts.push_back(tokenize(raw.back(), corpus.lexicon, p.stem().string()));
  }
  const auto k = std::min(config.texts_per_passage, raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::string joined;
    std::string id;
    for (std::size_t j = 0; j < k; ++j) {
      const auto idx = (i + j) % raw.size();
      joined += raw[idx] + "\n";
      id += (j ? "+" : "") + corpus.texts[idx].id;
    }
    corpus.passages.push_back(prepare(joined, id, corpus));
  }
  return corpus;
}

std::shared_ptr<const PreparedText> prepare_text_file(const std::filesystem::path& path, const Corpus& corpus) {
  if (!std::filesystem::is_regular_file(path)) throw DataError("text file not found: " + path.string());
  return prepare(read_text_file(path), path.stem().string(), corpus);
}

std::string trial_id(double condition_s, std::uint64_t seed) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "T%g_seed%llu", condition_s, static_cast<unsigned long long>(seed));
  return buf;
}

std::vector<EpisodeResult> run_episodes(const std::vector<std::shared_ptr<const PreparedText>>& passages,
                                        const EnvParams& params, const AgentConfig& agent, const Policy& policy,
                                        std::uint64_t first_seed, std::size_t n, std::size_t threads) {
  std::vector<EpisodeResult> results(n);
  auto work = [&](std::size_t worker, std::size_t stride) {
    ControlledReadingEnv env(passages, params, agent);
    for (std::size_t i = worker; i < n; i += stride) {
      const auto seed = first_seed + i;
      results[i] = run_episode(env, policy, seed, trial_id(params.time_budget_s, seed));
    }
  };
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    work(0, 1);
    return results;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        work(t, threads);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

const MeanSd& MetricMeans::get(const std::string& name) const {
  if (name == "reading_speed_wpm") return reading_speed_wpm;
  if (name == "skip_p") return skip_p;
  if (name == "regress_p") return regress_p;
  if (name == "mean_fix_ms") return mean_fix_ms;
  if (name == "coverage") return coverage;
  if (name == "recall") return recall;
  throw ConfigError("fit.target." + name, "unknown metric");
}

std::vector<MetricReport> summarize_episodes(const std::vector<EpisodeResult>& episodes,
                                             const std::vector<std::shared_ptr<const PreparedText>>& passages) {
  std::vector<MetricReport> out;
  out.reserve(episodes.size());
  for (const auto& e : episodes) {
    // A reader that stops before its first sample read nothing.
    if (e.scanpath.events.empty()) {
      MetricReport nothing;
      nothing.recall_score = e.scanpath.recall;
      out.push_back(nothing);
      continue;
    }
    out.push_back(summarize_scanpath(e.scanpath, passages.at(e.text_index)->text.word_count()));
  }
  return out;
}

MetricMeans aggregate_metrics(const std::vector<MetricReport>& reports) {
  std::vector<double> speed, skip, regress, fix, coverage, recall;
  for (const auto& r : reports) {
    speed.push_back(r.reading_speed_wpm);
    skip.push_back(r.skip_probability);
    regress.push_back(r.regression_probability);
    fix.push_back(r.mean_fixation_duration_ms);
    coverage.push_back(r.coverage_fraction);
    if (r.recall_score) recall.push_back(*r.recall_score);
  }
  return MetricMeans{mean_sd(speed), mean_sd(skip), mean_sd(regress), mean_sd(fix), mean_sd(coverage), mean_sd(recall)};
}

EnvFactory reading_env_factory(std::vector<std::shared_ptr<const PreparedText>> passages, EnvParams params,
                               AgentConfig agent) {
  return [passages = std::move(passages), params, agent](std::size_t) -> std::unique_ptr<RlEnvironment> {
    return std::make_unique<ControlledReadingEnv>(passages, params, agent);
  };
}

std::shared_ptr<const Policy> load_policy(const std::string& spec, const RunConfig& config) {
  if (spec == "heuristic") return std::make_shared<HeuristicPolicy>(config.agent.thresholds);
  auto checkpoint = load_checkpoint(spec);
  const auto expected = config_hash(config);
  if (checkpoint.config_hash != expected) {
    throw HashMismatch("checkpoint " + spec + " was trained with config hash " + hash_hex(checkpoint.config_hash) +
                       ", current config hash is " + hash_hex(expected));
  }
  return std::make_shared<NeuralPolicy>(std::make_shared<const PolicyParameters>(std::move(checkpoint.params)));
}

}  // namespace readsim
