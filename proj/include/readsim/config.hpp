#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "readsim/agent.hpp"
#include "readsim/ppo.hpp"
#include "readsim/reading_env.hpp"

namespace readsim {

struct CorpusConfig {
  std::string lexicon = "data/lexicon.tsv";
  // Explicit text files; when empty every *.txt in texts_dir is used, sorted by name.
  std::vector<std::string> texts;
  std::string texts_dir = "data/texts";
  // Consecutive texts joined into one passage per episode.
  std::size_t texts_per_passage = 1;
};

struct FitConfig {
  std::size_t episodes = 20;
  // Parameter path -> candidate values, e.g. "perception.sigma".
  std::vector<std::pair<std::string, std::vector<double>>> grid;
  // Metric name -> target value; metric names follow the metrics CSV columns.
  std::map<std::string, double> target;
  std::map<std::string, double> weights;
};

struct RunConfig {
  CorpusConfig corpus;
  EnvParams env;
  std::vector<double> time_budgets{60.0};
  AgentConfig agent;
  PpoConfig ppo;
  bool collapse_refixations = true;
  FitConfig fit;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::size_t threads = 1;

  void validate() const;
};

// Relative corpus paths are resolved against `base_dir`. Unknown keys,
// wrong types and out-of-range values raise ConfigError with the key path.
RunConfig config_from_json(const nlohmann::json& json, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

// Every field materialized; loading the result reproduces the same config.
nlohmann::ordered_json config_to_json(const RunConfig& config);
std::string default_config_text();

// Sets a numeric parameter by dotted path (used by fit grids).
void set_parameter(RunConfig& config, const std::string& path, double value);
bool is_settable_parameter(const std::string& path);

// FNV-1a over the perception, belief, memory, reward and timing sections.
std::uint64_t config_hash(const RunConfig& config);
std::string hash_hex(std::uint64_t hash);

// Texts referenced by the corpus section, in load order.
std::vector<std::filesystem::path> corpus_text_paths(const CorpusConfig& corpus);

}  // namespace readsim
