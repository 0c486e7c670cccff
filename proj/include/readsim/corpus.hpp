#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace readsim {

inline constexpr std::string_view kDefaultAlphabet = "abcdefghijklmnopqrstuvwxyz";

// Word counts plus optional per-word predictability overrides (cloze values).
class Lexicon {
 public:
  Lexicon() = default;
  // Throws DataError if a word is empty, uses letters outside `alphabet`, or
  // if the total count is zero.
  explicit Lexicon(std::map<std::string, std::uint64_t> counts,
                   std::string alphabet = std::string(kDefaultAlphabet),
                   std::map<std::string, double> predictability = {});

  const std::map<std::string, std::uint64_t>& entries() const { return counts_; }
  const std::string& alphabet() const { return alphabet_; }
  const std::map<std::string, double>& predictability_overrides() const {
    return predictability_;
  }

  bool contains(std::string_view word) const;
  // Occurrence count with the smoothing floor of 1 (absent or zero-count words).
  std::uint64_t smoothed_count(std::string_view word) const;
  std::uint64_t max_count() const { return max_count_; }
  std::uint64_t min_count() const { return min_count_; }
  bool in_alphabet(std::string_view word) const;
  // Words among the `top_n` most frequent entries (ties by word order).
  bool is_top_ranked(std::string_view word, std::size_t top_n) const;

  // Same-length words ordered by descending count then lexicographically.
  const std::vector<std::string>& words_of_length(std::size_t length) const;

 private:
  std::map<std::string, std::uint64_t> counts_;
  std::string alphabet_ = std::string(kDefaultAlphabet);
  std::map<std::string, double> predictability_;
  std::uint64_t max_count_ = 1;
  std::uint64_t min_count_ = 1;
  std::map<std::size_t, std::vector<std::string>> by_length_;
  std::map<std::string, std::size_t, std::less<>> rank_;
};

// Reads `word<TAB>count[<TAB>predictability]`. A first line whose count
// column is not numeric is treated as a header.
Lexicon load_lexicon_tsv(const std::filesystem::path& path);
Lexicon parse_lexicon_tsv(std::string_view contents);

struct WordToken {
  std::string surface;
  std::size_t sentence_index = 0;
  std::size_t word_index_in_sentence = 0;
  std::size_t global_index = 0;
  std::size_t first_letter_offset = 0;
  double frequency_rel = 0.0;
  double predictability = 0.0;
  bool is_content = true;
  std::uint64_t count = 1;

  std::size_t length() const { return surface.size(); }
  std::size_t last_letter_offset() const { return first_letter_offset + surface.size() - 1; }
  // Center-left letter, the default landing site.
  std::size_t landing_offset() const { return first_letter_offset + (surface.size() - 1) / 2; }
};

// Words are stored flat in text order; sentence `i` spans
// [sentence_begin[i], sentence_begin[i+1]).
struct AnnotatedText {
  std::string id;
  std::vector<WordToken> words;
  std::vector<std::size_t> sentence_begin;
  std::string letter_line;

  std::size_t sentence_count() const { return sentence_begin.size(); }
  std::size_t word_count() const { return words.size(); }
  std::span<const WordToken> sentence(std::size_t index) const;
  std::size_t sentence_size(std::size_t index) const;
  // Word whose letters cover `offset`, or nullopt for a separator slot.
  std::optional<std::size_t> word_at_offset(std::size_t offset) const;
  // Normalized rendering: single-space separated words, each sentence
  // terminated by '.'.
  std::string render() const;
};

// Lowercases, strips punctuation and splits sentences on '.', '!' and '?'.
// Words containing characters outside the lexicon alphabet are dropped.
// Throws EmptyText when nothing remains.
AnnotatedText tokenize(std::string_view raw_text, const Lexicon& lexicon,
                       std::string id = {});

// Add-one smoothed bigram predictability estimated from `training`. Sentence
// initial words get the smoothed unigram probability.
AnnotatedText predictability_from_bigrams(AnnotatedText text,
                                          std::span<const AnnotatedText> training);

// Replaces predictability by the lexicon's cloze column where present.
AnnotatedText apply_predictability_overrides(AnnotatedText text, const Lexicon& lexicon);

// Same-length lexicon words (descending count, then lexicographic); the token
// surface is always present.
std::vector<std::string> candidate_set(const WordToken& token, const Lexicon& lexicon);

inline constexpr std::size_t kFunctionWordMaxLength = 3;
inline constexpr std::size_t kFunctionWordTopRank = 50;

}  // namespace readsim
