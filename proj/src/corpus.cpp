#include "readsim/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "readsim/errors.hpp"

namespace readsim {

Lexicon::Lexicon(std::map<std::string, std::uint64_t> counts, std::string alphabet,
                 std::map<std::string, double> predictability)
    : counts_(std::move(counts)),
      alphabet_(std::move(alphabet)),
      predictability_(std::move(predictability)) {
  std::uint64_t total = 0;
  for (const auto& [word, count] : counts_) {
    if (word.empty()) throw DataError("lexicon contains an empty word");
    if (!in_alphabet(word)) throw DataError("lexicon word '" + word + "' is outside the alphabet");
    total += count;
  }
  if (total == 0) throw DataError("lexicon total count is zero");
  for (const auto& [word, p] : predictability_) {
    if (!(p >= 0.0 && p <= 1.0)) throw DataError("predictability of '" + word + "' outside [0,1]");
  }

  max_count_ = 1;
  min_count_ = std::numeric_limits<std::uint64_t>::max();
  for (const auto& [word, count] : counts_) {
    const auto c = std::max<std::uint64_t>(count, 1);
    max_count_ = std::max(max_count_, c);
    min_count_ = std::min(min_count_, c);
    by_length_[word.size()].push_back(word);
  }
  for (auto& [length, words] : by_length_) {
    std::stable_sort(words.begin(), words.end(), [this](const auto& a, const auto& b) {
      return counts_.at(a) > counts_.at(b);
    });
  }

  std::vector<std::string> ranked;
  ranked.reserve(counts_.size());
  for (const auto& [word, count] : counts_) ranked.push_back(word);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [this](const auto& a, const auto& b) { return counts_.at(a) > counts_.at(b); });
  for (std::size_t i = 0; i < ranked.size(); ++i) rank_.emplace(ranked[i], i);
}

bool Lexicon::contains(std::string_view word) const {
  return counts_.find(std::string(word)) != counts_.end();
}

std::uint64_t Lexicon::smoothed_count(std::string_view word) const {
  const auto it = counts_.find(std::string(word));
  if (it == counts_.end()) return 1;
  return std::max<std::uint64_t>(it->second, 1);
}

bool Lexicon::in_alphabet(std::string_view word) const {
  return std::all_of(word.begin(), word.end(),
                     [this](char c) { return alphabet_.find(c) != std::string::npos; });
}

bool Lexicon::is_top_ranked(std::string_view word, std::size_t top_n) const {
  const auto it = rank_.find(word);
  return it != rank_.end() && it->second < top_n;
}

const std::vector<std::string>& Lexicon::words_of_length(std::size_t length) const {
  static const std::vector<std::string> kEmpty;
  const auto it = by_length_.find(length);
  return it == by_length_.end() ? kEmpty : it->second;
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_sentence_end(char c) { return c == '.' || c == '!' || c == '?'; }

}  // namespace

Lexicon parse_lexicon_tsv(std::string_view contents) {
  std::map<std::string, std::uint64_t> counts;
  std::map<std::string, double> pred;
  std::size_t line_no = 0;
  for (auto line : split(contents, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto cols = split(line, '\t');
    if (cols.size() < 2) throw DataError("lexicon line " + std::to_string(line_no) + ": expected word<TAB>count");
    const auto count_col = trim(cols[1]);
    std::uint64_t count = 0;
    const auto [ptr, ec] = std::from_chars(count_col.data(), count_col.data() + count_col.size(), count);
    if (ec != std::errc() || ptr != count_col.data() + count_col.size()) {
      if (line_no == 1 && counts.empty()) continue;  // header
      throw DataError("lexicon line " + std::to_string(line_no) + ": bad count '" + std::string(count_col) + "'");
    }
    std::string word(trim(cols[0]));
    std::transform(word.begin(), word.end(), word.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    counts[word] += count;
    if (cols.size() >= 3 && !trim(cols[2]).empty()) {
      try {
        pred[word] = std::stod(std::string(trim(cols[2])));
      } catch (const std::exception&) {
        throw DataError("lexicon line " + std::to_string(line_no) + ": bad predictability");
      }
    }
  }
  return Lexicon(std::move(counts), std::string(kDefaultAlphabet), std::move(pred));
}

Lexicon load_lexicon_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_lexicon_tsv(ss.str());
}

std::span<const WordToken> AnnotatedText::sentence(std::size_t index) const {
  const auto begin = sentence_begin.at(index);
  return std::span<const WordToken>(words).subspan(begin, sentence_size(index));
}

std::size_t AnnotatedText::sentence_size(std::size_t index) const {
  const auto end = index + 1 < sentence_begin.size() ? sentence_begin[index + 1] : words.size();
  return end - sentence_begin.at(index);
}

std::optional<std::size_t> AnnotatedText::word_at_offset(std::size_t offset) const {
  // Words are sorted by offset.
  auto it = std::upper_bound(words.begin(), words.end(), offset,
                             [](std::size_t off, const WordToken& w) { return off < w.first_letter_offset; });
  if (it == words.begin()) return std::nullopt;
  --it;
  if (offset <= it->last_letter_offset()) return it->global_index;
  return std::nullopt;
}

std::string AnnotatedText::render() const {
  std::string out;
  for (std::size_t s = 0; s < sentence_count(); ++s) {
    const auto words_in = sentence(s);
    for (std::size_t i = 0; i < words_in.size(); ++i) {
      if (!out.empty()) out += ' ';
      out += words_in[i].surface;
    }
    out += '.';
  }
  return out;
}

AnnotatedText tokenize(std::string_view raw_text, const Lexicon& lexicon, std::string id) {
  std::vector<std::vector<std::string>> sentences(1);
  std::size_t i = 0;
  while (i < raw_text.size()) {
    while (i < raw_text.size() && std::isspace(static_cast<unsigned char>(raw_text[i]))) ++i;
    const auto start = i;
    while (i < raw_text.size() && !std::isspace(static_cast<unsigned char>(raw_text[i]))) ++i;
    const auto raw = raw_text.substr(start, i - start);
    if (raw.empty()) continue;

    std::string word;
    bool ends_sentence = false;
    bool seen_letter = false;
    for (char c : raw) {
      const auto uc = static_cast<unsigned char>(c);
      if (std::ispunct(uc)) {
        if (is_sentence_end(c) && seen_letter) ends_sentence = true;
        continue;
      }
      seen_letter = true;
      ends_sentence = false;
      word += static_cast<char>(std::tolower(uc));
    }
    // A token of bare punctuation such as "?" also closes the sentence.
    if (!seen_letter && std::any_of(raw.begin(), raw.end(), is_sentence_end)) ends_sentence = true;

    if (!word.empty() && lexicon.in_alphabet(word)) sentences.back().push_back(std::move(word));
    if (ends_sentence && !sentences.back().empty()) sentences.emplace_back();
  }
  if (sentences.back().empty()) sentences.pop_back();
  if (sentences.empty()) throw EmptyText("text has no words after normalization");

  AnnotatedText text;
  text.id = std::move(id);
  std::size_t offset = 0;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    text.sentence_begin.push_back(text.words.size());
    for (std::size_t w = 0; w < sentences[s].size(); ++w) {
      WordToken tok;
      tok.surface = std::move(sentences[s][w]);
      tok.sentence_index = s;
      tok.word_index_in_sentence = w;
      tok.global_index = text.words.size();
      if (!text.letter_line.empty()) {
        text.letter_line += ' ';
        ++offset;
      }
      tok.first_letter_offset = offset;
      text.letter_line += tok.surface;
      offset += tok.surface.size();
      tok.count = lexicon.smoothed_count(tok.surface);
      tok.frequency_rel = static_cast<double>(tok.count) / static_cast<double>(lexicon.max_count());
      tok.frequency_rel = std::min(tok.frequency_rel, 1.0);
      tok.is_content = !(tok.surface.size() <= kFunctionWordMaxLength &&
                         lexicon.is_top_ranked(tok.surface, kFunctionWordTopRank));
      text.words.push_back(std::move(tok));
    }
  }
  return text;
}

AnnotatedText predictability_from_bigrams(AnnotatedText text,
                                          std::span<const AnnotatedText> training) {
  std::unordered_map<std::string, std::uint64_t> unigram;
  std::unordered_map<std::string, std::uint64_t> context;
  std::unordered_map<std::string, std::uint64_t> bigram;
  std::uint64_t tokens = 0;
  for (const auto& t : training) {
    for (std::size_t s = 0; s < t.sentence_count(); ++s) {
      const auto words = t.sentence(s);
      for (std::size_t i = 0; i < words.size(); ++i) {
        ++unigram[words[i].surface];
        ++tokens;
        if (i > 0) {
          ++context[words[i - 1].surface];
          ++bigram[words[i - 1].surface + ' ' + words[i].surface];
        }
      }
    }
  }
  const double vocab = std::max<double>(1.0, static_cast<double>(unigram.size()));
  auto lookup = [](const auto& m, const std::string& k) -> double {
    const auto it = m.find(k);
    return it == m.end() ? 0.0 : static_cast<double>(it->second);
  };
  for (auto& tok : text.words) {
    if (tok.word_index_in_sentence == 0) {
      tok.predictability = (lookup(unigram, tok.surface) + 1.0) / (static_cast<double>(tokens) + vocab);
    } else {
      const auto& prev = text.words[tok.global_index - 1].surface;
      tok.predictability = (lookup(bigram, prev + ' ' + tok.surface) + 1.0) / (lookup(context, prev) + vocab);
    }
    tok.predictability = std::clamp(tok.predictability, 0.0, 1.0);
  }
  return text;
}

AnnotatedText apply_predictability_overrides(AnnotatedText text, const Lexicon& lexicon) {
  const auto& overrides = lexicon.predictability_overrides();
  for (auto& tok : text.words) {
    const auto it = overrides.find(tok.surface);
    if (it != overrides.end()) tok.predictability = it->second;
  }
  return text;
}

std::vector<std::string> candidate_set(const WordToken& token, const Lexicon& lexicon) {
  std::vector<std::string> out = lexicon.words_of_length(token.surface.size());
  if (std::find(out.begin(), out.end(), token.surface) == out.end()) {
    // Smoothing count 1 places it after every word with a larger count.
    auto pos = std::find_if(out.begin(), out.end(), [&](const std::string& w) {
      const auto c = lexicon.entries().at(w);
      return c < 1 || (c == 1 && w > token.surface);
    });
    out.insert(pos, token.surface);
  }
  return out;
}

}  // namespace readsim
