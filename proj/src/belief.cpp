#include "readsim/belief.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "readsim/errors.hpp"
#include "readsim/memory.hpp"

namespace readsim {

std::shared_ptr<const CandidateSet> make_candidate_set(const WordToken& token, const Lexicon& lexicon) {
  auto set = std::make_shared<CandidateSet>();
  set->words = candidate_set(token, lexicon);
  set->frequency_rel.reserve(set->words.size());
  for (std::size_t i = 0; i < set->words.size(); ++i) {
    set->frequency_rel.push_back(static_cast<double>(lexicon.smoothed_count(set->words[i])) /
                                 static_cast<double>(lexicon.max_count()));
    if (set->words[i] == token.surface) set->true_index = i;
  }
  return set;
}

std::size_t LexicalBelief::argmax() const {
  return static_cast<std::size_t>(std::max_element(posterior.begin(), posterior.end()) - posterior.begin());
}

double LexicalBelief::max_posterior() const {
  return posterior.empty() ? 0.0 : *std::max_element(posterior.begin(), posterior.end());
}

double LexicalBelief::normalized_entropy() const {
  if (posterior.size() <= 1) return 0.0;
  double h = 0.0;
  for (const double p : posterior) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::clamp(h / std::log(static_cast<double>(posterior.size())), 0.0, 1.0);
}

void LexicalBelief::forget() {
  posterior = prior;
  recognized = false;
}

namespace {

void normalize(std::vector<double>& v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  if (total > 0.0) {
    for (auto& x : v) x /= total;
  }
}

}  // namespace

LexicalBelief init_lexical_belief(const WordToken& token, std::shared_ptr<const CandidateSet> candidates,
                                  double gamma_pred) {
  if (!candidates || candidates->words.empty()) {
    throw NoCandidates("no candidates for word '" + token.surface + "'");
  }
  const auto n = candidates->words.size();
  std::vector<double> freq = candidates->frequency_rel;
  normalize(freq);

  std::vector<double> pred(n, 0.0);
  if (n == 1) {
    pred[0] = 1.0;
  } else {
    const double rest = (1.0 - token.predictability) / static_cast<double>(n - 1);
    std::fill(pred.begin(), pred.end(), rest);
    pred[candidates->true_index] = token.predictability;
  }

  LexicalBelief belief;
  belief.word_global_index = token.global_index;
  belief.first_letter_offset = token.first_letter_offset;
  belief.prior.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    belief.prior[i] = (1.0 - gamma_pred) * freq[i] + gamma_pred * pred[i];
  }
  normalize(belief.prior);
  belief.posterior = belief.prior;
  belief.candidates = std::move(candidates);
  return belief;
}

LexicalBelief update_lexical_belief(LexicalBelief belief, std::span<const LetterObservation> observations,
                                    const AcuityModel& model, double theta_rec, std::size_t alphabet_size) {
  const auto& words = belief.candidates->words;
  const std::size_t length = words.front().size();
  for (const auto& obs : observations) {
    if (obs.letter_offset < belief.first_letter_offset ||
        obs.letter_offset >= belief.first_letter_offset + length) {
      throw ObservationMismatch("observation at slot " + std::to_string(obs.letter_offset) +
                                " outside word " + std::to_string(belief.word_global_index));
    }
  }
  if (observations.empty()) return belief;

  std::vector<double> updated = belief.posterior;
  for (const auto& obs : observations) {
    const std::size_t pos = obs.letter_offset - belief.first_letter_offset;
    const double p_match = identification_probability(obs.eccentricity, model);
    const double p_miss = (1.0 - p_match) / static_cast<double>(alphabet_size - 1);
    for (std::size_t i = 0; i < words.size(); ++i) {
      updated[i] *= words[i][pos] == obs.observed_letter ? p_match : p_miss;
    }
  }
  // Evidence impossible under every candidate leaves the belief unchanged.
  if (std::accumulate(updated.begin(), updated.end(), 0.0) > 0.0) {
    normalize(updated);
    belief.posterior = std::move(updated);
  }
  belief.samples_seen += observations.size();
  if (belief.max_posterior() >= theta_rec) belief.recognized = true;
  return belief;
}

SentenceBelief sentence_comprehension(std::size_t sentence_index, const AnnotatedText& text,
                                      std::span<const LexicalBelief> beliefs, const MemoryState& memory,
                                      const MemoryParams& params) {
  SentenceBelief out;
  out.sentence_index = sentence_index;
  std::size_t content = 0;
  std::size_t active = 0;
  for (const auto& word : text.sentence(sentence_index)) {
    const bool recognized = beliefs[word.global_index].recognized;
    out.recognized.push_back(recognized);
    if (!word.is_content) continue;
    ++content;
    if (recognized && memory.activation(word.global_index) >= params.theta_forget) ++active;
  }
  out.comprehension_fraction = content == 0 ? 1.0 : static_cast<double>(active) / static_cast<double>(content);
  out.integrated = out.comprehension_fraction >= params.theta_int;
  return out;
}

TextBelief text_gist_summary(const MemoryState& memory, std::size_t sentence_count) {
  TextBelief out;
  out.integrated.resize(sentence_count, false);
  out.gist_strength.resize(sentence_count, 0.0);
  for (const auto& [index, item] : memory.gist()) {
    if (index >= sentence_count) continue;
    out.gist_strength[index] = item.strength;
    out.integrated[index] = true;
  }
  return out;
}

}  // namespace readsim
