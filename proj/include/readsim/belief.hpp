#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "readsim/corpus.hpp"
#include "readsim/perception.hpp"

namespace readsim {

class MemoryState;
struct MemoryParams;

// Candidate words of one length with their relative frequencies. Shared
// between beliefs so a text's candidate sets are built once.
struct CandidateSet {
  std::vector<std::string> words;
  std::vector<double> frequency_rel;
  std::size_t true_index = 0;
};

std::shared_ptr<const CandidateSet> make_candidate_set(const WordToken& token, const Lexicon& lexicon);

struct LexicalBelief {
  std::size_t word_global_index = 0;
  std::size_t first_letter_offset = 0;
  std::shared_ptr<const CandidateSet> candidates;
  std::vector<double> prior;
  std::vector<double> posterior;
  std::size_t samples_seen = 0;
  bool recognized = false;

  std::size_t argmax() const;
  double max_posterior() const;
  // Shannon entropy divided by log(#candidates); 0 for a single candidate.
  double normalized_entropy() const;
  // Back to the prior; used when the word is forgotten.
  void forget();
};

inline constexpr double kDefaultRecognitionThreshold = 0.95;

// Prior mixes relative frequency with a predictability mass that puts the
// token's predictability on the true word and spreads the rest uniformly.
// Throws NoCandidates for an empty candidate set.
LexicalBelief init_lexical_belief(const WordToken& token, std::shared_ptr<const CandidateSet> candidates,
                                  double gamma_pred);

// Multiplies in the letter likelihoods of `observations` and renormalizes.
// Throws ObservationMismatch if an observation falls outside the word.
LexicalBelief update_lexical_belief(LexicalBelief belief, std::span<const LetterObservation> observations,
                                    const AcuityModel& model, double theta_rec = kDefaultRecognitionThreshold,
                                    std::size_t alphabet_size = 26);

struct SentenceBelief {
  std::size_t sentence_index = 0;
  std::vector<bool> recognized;
  double comprehension_fraction = 0.0;
  bool integrated = false;
};

// Fraction of content words that are recognized and whose memory activation
// is at least theta_forget. Sentences without content words count as 1.
SentenceBelief sentence_comprehension(std::size_t sentence_index, const AnnotatedText& text,
                                      std::span<const LexicalBelief> beliefs, const MemoryState& memory,
                                      const MemoryParams& params);

struct TextBelief {
  std::vector<bool> integrated;
  std::vector<double> gist_strength;
};

TextBelief text_gist_summary(const MemoryState& memory, std::size_t sentence_count);

}  // namespace readsim
