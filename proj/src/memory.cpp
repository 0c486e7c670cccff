#include "readsim/memory.hpp"

#include <cmath>
#include <string>
#include <tuple>

#include "readsim/belief.hpp"
#include "readsim/errors.hpp"

namespace readsim {

void MemoryParams::validate() const {
  if (stm_capacity < 1) throw ConfigError("memory.stm_capacity", "must be >= 1");
  if (lambda_stm < 0.0) throw ConfigError("memory.lambda_stm", "must be >= 0");
  if (lambda_gist < 0.0) throw ConfigError("memory.lambda_gist", "must be >= 0");
  auto unit = [](double v, const char* key) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(key, "must be in [0,1]");
  };
  unit(theta_forget, "memory.theta_forget");
  unit(theta_int, "memory.theta_int");
  unit(theta_recall, "memory.theta_recall");
}

std::optional<std::size_t> MemoryState::encode_word(std::size_t word_global_index, double now) {
  auto it = store_.find(word_global_index);
  if (it != store_.end()) {
    it->second = StmItem{now, 1.0};
    return std::nullopt;
  }
  std::optional<std::size_t> evicted;
  if (store_.size() >= params_.stm_capacity) {
    auto victim = store_.begin();
    for (auto cand = store_.begin(); cand != store_.end(); ++cand) {
      const auto key = std::make_tuple(cand->second.activation, cand->second.encode_time, cand->first);
      const auto best = std::make_tuple(victim->second.activation, victim->second.encode_time, victim->first);
      if (key < best) victim = cand;
    }
    evicted = victim->first;
    store_.erase(victim);
  }
  store_.emplace(word_global_index, StmItem{now, 1.0});
  return evicted;
}

void MemoryState::decay_step(double dt) {
  if (dt < 0.0 || std::isnan(dt)) throw InvalidDuration("decay interval must be >= 0, got " + std::to_string(dt));
  if (dt == 0.0) return;
  const double stm_factor = std::exp(-params_.lambda_stm * dt);
  const double gist_factor = std::exp(-params_.lambda_gist * dt);
  for (auto& [index, item] : store_) item.activation *= stm_factor;
  for (auto& [index, item] : gist_) item.strength *= gist_factor;
}

double MemoryState::consolidate_sentence(const SentenceBelief& sentence, double now) {
  if (sentence.comprehension_fraction < params_.theta_int) return 0.0;
  auto& item = gist_[sentence.sentence_index];
  const double before = item.strength;
  if (sentence.comprehension_fraction > item.strength) {
    item.strength = sentence.comprehension_fraction;
    item.consolidation_time = now;
  }
  return item.strength - before;
}

double MemoryState::activation(std::size_t word_global_index) const {
  const auto it = store_.find(word_global_index);
  return it == store_.end() ? 0.0 : it->second.activation;
}

double MemoryState::gist_strength(std::size_t sentence_index) const {
  const auto it = gist_.find(sentence_index);
  return it == gist_.end() ? 0.0 : it->second.strength;
}

double MemoryState::load_fraction() const {
  return static_cast<double>(store_.size()) / static_cast<double>(params_.stm_capacity);
}

RecallResult simulate_recall(const MemoryState& state, std::size_t sentence_count, double elapsed,
                             const std::vector<double>& uniform_draws) {
  MemoryState decayed = state;
  decayed.decay_step(elapsed);
  RecallResult result;
  if (sentence_count == 0) return result;
  const auto& params = state.params();
  for (std::size_t s = 0; s < sentence_count; ++s) {
    const double strength = decayed.gist_strength(s);
    bool recalled = false;
    if (params.stochastic_recall && s < uniform_draws.size()) {
      recalled = uniform_draws[s] < strength;
    } else {
      recalled = strength > 0.0 && strength >= params.theta_recall;
    }
    if (recalled) result.recalled_sentences.push_back(s);
  }
  result.score = static_cast<double>(result.recalled_sentences.size()) / static_cast<double>(sentence_count);
  return result;
}

}  // namespace readsim
