#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nonsym {

constexpr char32_t kDefaultMarker = U'@';

// Normalized character stream. Contains no raw whitespace: every run of
// space/tab/newline in the input is collapsed to a single marker character.
struct Corpus {
  std::u32string chars;
  std::string name;
};

// Ordered set of characters, codepoint order, no duplicates.
struct Alphabet {
  std::vector<char32_t> symbols;

  bool contains(char32_t c) const;
  std::size_t size() const { return symbols.size(); }
};

Alphabet alphabet_of(std::u32string_view chars);

// Bijection on an alphabet.
struct Permutation {
  std::unordered_map<char32_t, char32_t> mapping;
  std::uint64_t seed = 0;

  char32_t apply(char32_t c) const;  // throws if c not in domain
  Permutation inverse() const;
};

enum class WhitespaceMode { kOriginal, kSubstitute };

bool is_whitespace(char32_t c);

// Run-collapsing whitespace normalization; marker must not be whitespace.
Corpus normalize(std::string_view raw_utf8, char32_t marker = kDefaultMarker,
                 std::string name = "");

// Reads the file, decodes UTF-8 (error includes byte offset) and normalizes.
Corpus load_corpus(const std::string& path, char32_t marker = kDefaultMarker);

// Uniformly random bijection via Fisher-Yates over the codepoint-ordered
// alphabet; deterministic for fixed (alphabet, seed).
Permutation generate_permutation(const Alphabet& alphabet, std::uint64_t seed);

// Character-wise image. Out-of-domain character -> error naming it and its
// position.
Corpus apply_permutation(const Corpus& corpus, const Permutation& pi);

// ORIGINAL: pi applied to everything except the marker (marker fixed).
// SUBSTITUTE: pi applied to all characters, so pi^-1(marker) becomes the
// effective whitespace.
Corpus whitespace_mode(const Corpus& corpus, const Permutation& pi,
                       WhitespaceMode mode, char32_t marker = kDefaultMarker);

// Two-column text lines "from<TAB>to", one per character.
std::string serialize_permutation(const Permutation& pi);
Permutation parse_permutation(std::string_view text);
void save_permutation(const Permutation& pi, const std::string& path);
Permutation load_permutation(const std::string& path);

}  // namespace nonsym
