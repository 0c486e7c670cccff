#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

namespace readsim {

struct AnnotatedText;
struct SentenceBelief;

struct MemoryParams {
  std::size_t stm_capacity = 9;
  double lambda_stm = 0.02;   // per second
  double lambda_gist = 0.001; // per second
  double theta_forget = 0.1;
  double theta_int = 0.7;
  double theta_recall = 0.2;
  bool stochastic_recall = false;

  void validate() const;
};

struct StmItem {
  double encode_time = 0.0;
  double activation = 1.0;
};

struct GistItem {
  double strength = 0.0;
  double consolidation_time = 0.0;
};

// Lexical store (capacity-limited short-term buffer of recognized words) and
// decaying sentence gist.
class MemoryState {
 public:
  explicit MemoryState(MemoryParams params = {}) : params_(params) {}

  const MemoryParams& params() const { return params_; }
  const std::map<std::size_t, StmItem>& lexical_store() const { return store_; }
  const std::map<std::size_t, GistItem>& gist() const { return gist_; }

  // Inserts (or refreshes) a word at activation 1. Returns the evicted word
  // when the store overflows: lowest activation, then oldest, then lowest index.
  std::optional<std::size_t> encode_word(std::size_t word_global_index, double now);

  // Exponential decay of both stores. Throws InvalidDuration for dt < 0.
  void decay_step(double dt);

  // Stores max(previous, fraction) when the sentence clears theta_int.
  // Returns the increase in gist strength (0 when nothing changed).
  double consolidate_sentence(const SentenceBelief& sentence, double now);

  double activation(std::size_t word_global_index) const;
  bool holds(std::size_t word_global_index) const { return store_.count(word_global_index) != 0; }
  double gist_strength(std::size_t sentence_index) const;
  double load_fraction() const;

 private:
  MemoryParams params_;
  std::map<std::size_t, StmItem> store_;
  std::map<std::size_t, GistItem> gist_;
};

struct RecallResult {
  double score = 0.0;
  std::vector<std::size_t> recalled_sentences;
};

// Decays a copy of `state` by `elapsed` seconds and recalls every sentence
// whose gist strength reaches theta_recall. With stochastic_recall enabled a
// sentence is recalled with probability equal to its strength; `uniform_draws`
// then supplies one U[0,1) value per sentence.
RecallResult simulate_recall(const MemoryState& state, std::size_t sentence_count, double elapsed,
                             const std::vector<double>& uniform_draws = {});

}  // namespace readsim
