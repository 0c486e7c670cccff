#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "readsim/config.hpp"
#include "readsim/corpus.hpp"
#include "readsim/episode.hpp"
#include "readsim/metrics.hpp"
#include "readsim/ppo.hpp"

namespace readsim {

struct Corpus {
  Lexicon lexicon;
  std::vector<AnnotatedText> texts;  // one per file, used to estimate bigrams
  std::vector<std::shared_ptr<const PreparedText>> passages;
};

// Passage i joins texts i, i+1, ... (wrapping) up to texts_per_passage.
// Missing files raise ConfigError naming corpus.lexicon or corpus.texts.
Corpus load_corpus(const CorpusConfig& config);

// A single text file prepared against an already loaded corpus.
std::shared_ptr<const PreparedText> prepare_text_file(const std::filesystem::path& path, const Corpus& corpus);

std::string trial_id(double condition_s, std::uint64_t seed);

// Episodes with seeds first_seed .. first_seed + n - 1, returned in seed
// order regardless of the thread count.
std::vector<EpisodeResult> run_episodes(const std::vector<std::shared_ptr<const PreparedText>>& passages,
                                        const EnvParams& params, const AgentConfig& agent, const Policy& policy,
                                        std::uint64_t first_seed, std::size_t n, std::size_t threads = 1);

struct MetricMeans {
  MeanSd reading_speed_wpm;
  MeanSd skip_p;
  MeanSd regress_p;
  MeanSd mean_fix_ms;
  MeanSd coverage;
  MeanSd recall;

  // By metrics-CSV column name; throws ConfigError for unknown names.
  const MeanSd& get(const std::string& name) const;
};

std::vector<MetricReport> summarize_episodes(const std::vector<EpisodeResult>& episodes,
                                             const std::vector<std::shared_ptr<const PreparedText>>& passages);
MetricMeans aggregate_metrics(const std::vector<MetricReport>& reports);

// Factory for trainer environments over the corpus passages.
EnvFactory reading_env_factory(std::vector<std::shared_ptr<const PreparedText>> passages, EnvParams params,
                               AgentConfig agent);

// "heuristic" selects the baseline; anything else is a checkpoint path whose
// config hash must match `config` (HashMismatch otherwise).
std::shared_ptr<const Policy> load_policy(const std::string& spec, const RunConfig& config);

}  // namespace readsim
