// Synthetic corpus generation shared by the acceptance suite: a Zipf-
// distributed lexicon of pseudo-words joined by the whitespace marker.
#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "nonsym/corpus.hpp"
#include "nonsym/rng.hpp"

namespace support {

inline std::vector<std::u32string> make_lexicon(std::size_t n_words,
                                                std::uint64_t seed,
                                                std::uint32_t min_len = 2,
                                                std::uint32_t max_len = 9,
                                                std::uint32_t n_letters = 26) {
  nonsym::Rng rng(nonsym::derive_seed(seed, 0x1e71c0));
  std::set<std::u32string> seen;
  std::vector<std::u32string> words;
  while (words.size() < n_words) {
    std::size_t len = min_len + rng.below(max_len - min_len + 1);
    std::u32string w;
    for (std::size_t i = 0; i < len; ++i) {
      w += char32_t(U'a' + rng.below(n_letters));
    }
    if (seen.insert(w).second) words.push_back(std::move(w));
  }
  return words;
}

// n_chars characters of "word marker word marker ..." with word ranks drawn
// from a Zipf(1) distribution over the lexicon.
inline nonsym::Corpus zipf_corpus(std::size_t n_chars, std::size_t n_words,
                                  std::uint64_t seed,
                                  char32_t marker = nonsym::kDefaultMarker) {
  std::vector<std::u32string> words = make_lexicon(n_words, seed);
  std::vector<double> cumulative(words.size());
  double h = 0;
  for (std::size_t r = 0; r < words.size(); ++r) {
    h += 1.0 / double(r + 1);
    cumulative[r] = h;
  }
  nonsym::Rng rng(nonsym::derive_seed(seed, 0x21bf));
  std::u32string text;
  text.reserve(n_chars + 16);
  while (text.size() < n_chars) {
    double u = rng.real() * h;
    std::size_t r = std::size_t(
        std::lower_bound(cumulative.begin(), cumulative.end(), u) -
        cumulative.begin());
    if (r >= words.size()) r = words.size() - 1;
    text += words[r];
    text += marker;
  }
  text.resize(n_chars);
  return nonsym::Corpus{std::move(text), "synthetic-zipf"};
}

// A stream of sentences drawn uniformly from a fixed pool of n_sentences
// distinct random sentences, so the same text recurs many times at varying
// window offsets (as repeated phrases do in natural text).
inline nonsym::Corpus sentence_pool_corpus(
    std::size_t n_chars, std::size_t n_sentences, std::size_t sentence_chars,
    std::size_t n_words, std::uint64_t seed,
    char32_t marker = nonsym::kDefaultMarker) {
  std::vector<std::u32string> words = make_lexicon(n_words, seed, 3, 8);
  nonsym::Rng rng(nonsym::derive_seed(seed, 0x5e17));
  std::vector<std::u32string> sentences(n_sentences);
  for (auto& s : sentences) {
    while (s.size() < sentence_chars) {
      s += words[rng.below(words.size())];
      s += marker;
    }
    s.resize(sentence_chars);
    s.back() = marker;
  }
  std::u32string text;
  text.reserve(n_chars + sentence_chars);
  while (text.size() < n_chars) text += sentences[rng.below(n_sentences)];
  text.resize(n_chars);
  return nonsym::Corpus{std::move(text), "synthetic-sentence-pool"};
}

}  // namespace support
