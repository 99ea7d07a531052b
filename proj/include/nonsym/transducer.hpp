#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "nonsym/embeddings.hpp"

namespace nonsym {

// Sentinel for the ngram boundary anchor in deletion rules.
constexpr char32_t kBoundary = 0xFFFFFFFF;

enum class RuleKind : std::uint8_t { kSubstitute, kPredelete, kPostdelete };

struct Rule {
  RuleKind kind;
  char32_t a1;
  char32_t a2;  // kBoundary allowed for deletions
  double score = 0;       // average cosine over matched pairs
  std::uint64_t support = 0;  // number of matched pairs

  bool operator==(const Rule& other) const {
    return kind == other.kind && a1 == other.a1 && a2 == other.a2;
  }
};

// Learned transduction: rules in descending score order plus the canonical
// map induced by substitution equivalence classes.
struct RuleSet {
  std::vector<Rule> rules;
  std::unordered_map<char32_t, char32_t> canonical;
  std::uint32_t max_operations = 0;  // N_o

  char32_t canon(char32_t c) const {
    auto it = canonical.find(c);
    return it == canonical.end() ? c : it->second;
  }
};

// SUBSTITUTE: replace every occurrence of a1 by a2.
// PREDELETE: delete each a1 whose immediate predecessor is a2 (a2 == boundary
// means a1 at ngram start). POSTDELETE: mirror with the successor.
// Returns nullopt when the rule does not fire on g.
std::optional<std::u32string> match_rule(const Rule& rule, std::u32string_view g);

// Scores every template instantiation over the vocabulary by forward
// application: image each ngram under each candidate rule and probe the
// vocabulary table. Candidates below min_support are dropped; output sorted
// by score descending, ties lexicographic on (kind, a1, a2). Per-rule pair
// cosines are summed in sorted order, so scores do not depend on vocabulary
// iteration order.
std::vector<Rule> score_operations(const NgramEmbeddings& emb,
                                   std::uint64_t min_support,
                                   std::uint32_t workers = 1);

// Top-N_o rules plus canonicalized substitution classes. The canonical class
// member is the one with the highest character frequency over the vocabulary
// (unit frequencies weighted in), lowest codepoint as tiebreak.
RuleSet learn_tau(const NgramEmbeddings& emb, std::uint32_t max_operations,
                  std::uint64_t min_support, std::uint32_t workers = 1);
RuleSet make_ruleset(std::vector<Rule> scored, std::uint32_t max_operations,
                     const std::unordered_map<char32_t, std::uint64_t>&
                         char_frequency);

// Full application: rules in descending-score order, each as one left-to-
// right pass, the sequence repeated until fixpoint or max_iterations.
std::u32string apply_tau(const RuleSet& rules, std::u32string_view g,
                         std::uint32_t max_iterations = 8);
std::string apply_tau_utf8(const RuleSet& rules, std::string_view g,
                           std::uint32_t max_iterations = 8);

// Rules file: "KIND<TAB>a1<TAB>a2<TAB>score<TAB>support" lines with
// "#BOUNDARY#" as boundary sentinel, then "CANON<TAB>from<TAB>to" lines.
std::string serialize_ruleset(const RuleSet& rules);
RuleSet parse_ruleset(std::string_view text);
void save_ruleset(const RuleSet& rules, const std::string& path);
RuleSet load_ruleset(const std::string& path);

}  // namespace nonsym
