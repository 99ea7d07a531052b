#include "nonsym/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nonsym/rng.hpp"
#include "nonsym/utf8.hpp"

namespace nonsym {

bool is_whitespace(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r';
}

bool Alphabet::contains(char32_t c) const {
  return std::binary_search(symbols.begin(), symbols.end(), c);
}

Alphabet alphabet_of(std::u32string_view chars) {
  std::vector<char32_t> symbols(chars.begin(), chars.end());
  std::sort(symbols.begin(), symbols.end());
  symbols.erase(std::unique(symbols.begin(), symbols.end()), symbols.end());
  return Alphabet{std::move(symbols)};
}

Corpus normalize(std::string_view raw_utf8, char32_t marker, std::string name) {
  if (is_whitespace(marker)) {
    throw std::runtime_error("whitespace marker must not be a whitespace character");
  }
  std::u32string decoded = utf8::decode(raw_utf8);
  std::u32string out;
  out.reserve(decoded.size());
  bool in_run = false;
  for (char32_t c : decoded) {
    if (is_whitespace(c)) {
      if (!in_run) out.push_back(marker);
      in_run = true;
    } else {
      out.push_back(c);
      in_run = false;
    }
  }
  return Corpus{std::move(out), std::move(name)};
}

Corpus load_corpus(const std::string& path, char32_t marker) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return normalize(buf.str(), marker, path);
}

char32_t Permutation::apply(char32_t c) const {
  auto it = mapping.find(c);
  if (it == mapping.end()) {
    throw std::runtime_error("character '" + utf8::encode_char(c) +
                             "' not in permutation domain");
  }
  return it->second;
}

Permutation Permutation::inverse() const {
  Permutation inv;
  inv.seed = seed;
  for (auto [from, to] : mapping) inv.mapping.emplace(to, from);
  return inv;
}

Permutation generate_permutation(const Alphabet& alphabet, std::uint64_t seed) {
  if (alphabet.symbols.empty()) {
    throw std::runtime_error("cannot permute an empty alphabet");
  }
  std::vector<char32_t> image = alphabet.symbols;
  Rng rng(seed);
  for (std::size_t i = image.size() - 1; i > 0; --i) {
    std::size_t j = rng.below(i + 1);
    std::swap(image[i], image[j]);
  }
  Permutation pi;
  pi.seed = seed;
  for (std::size_t i = 0; i < image.size(); ++i) {
    pi.mapping.emplace(alphabet.symbols[i], image[i]);
  }
  return pi;
}

Corpus apply_permutation(const Corpus& corpus, const Permutation& pi) {
  Corpus out;
  out.name = corpus.name;
  out.chars.reserve(corpus.chars.size());
  for (std::size_t i = 0; i < corpus.chars.size(); ++i) {
    auto it = pi.mapping.find(corpus.chars[i]);
    if (it == pi.mapping.end()) {
      throw std::runtime_error("character '" +
                               utf8::encode_char(corpus.chars[i]) +
                               "' at position " + std::to_string(i) +
                               " not in permutation domain");
    }
    out.chars.push_back(it->second);
  }
  return out;
}

Corpus whitespace_mode(const Corpus& corpus, const Permutation& pi,
                       WhitespaceMode mode, char32_t marker) {
  if (mode == WhitespaceMode::kSubstitute) {
    return apply_permutation(corpus, pi);
  }
  Corpus out;
  out.name = corpus.name;
  out.chars.reserve(corpus.chars.size());
  for (std::size_t i = 0; i < corpus.chars.size(); ++i) {
    char32_t c = corpus.chars[i];
    if (c == marker) {
      out.chars.push_back(marker);
      continue;
    }
    auto it = pi.mapping.find(c);
    if (it == pi.mapping.end()) {
      throw std::runtime_error("character '" + utf8::encode_char(c) +
                               "' at position " + std::to_string(i) +
                               " not in permutation domain");
    }
    out.chars.push_back(it->second);
  }
  return out;
}

std::string serialize_permutation(const Permutation& pi) {
  std::vector<std::pair<char32_t, char32_t>> pairs(pi.mapping.begin(),
                                                   pi.mapping.end());
  std::sort(pairs.begin(), pairs.end());
  std::string out;
  for (auto [from, to] : pairs) {
    out += utf8::encode_char(from);
    out += '\t';
    out += utf8::encode_char(to);
    out += '\n';
  }
  return out;
}

Permutation parse_permutation(std::string_view text) {
  Permutation pi;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++lineno;
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw std::runtime_error("permutation line " + std::to_string(lineno) +
                               ": missing tab separator");
    }
    std::u32string from = utf8::decode(line.substr(0, tab));
    std::u32string to = utf8::decode(line.substr(tab + 1));
    if (from.size() != 1 || to.size() != 1) {
      throw std::runtime_error("permutation line " + std::to_string(lineno) +
                               ": fields must be single characters");
    }
    if (!pi.mapping.emplace(from[0], to[0]).second) {
      throw std::runtime_error("permutation line " + std::to_string(lineno) +
                               ": duplicate source character");
    }
  }
  return pi;
}

void save_permutation(const Permutation& pi, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write permutation file: " + path);
  out << serialize_permutation(pi);
}

Permutation load_permutation(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open permutation file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_permutation(buf.str());
}

}  // namespace nonsym
