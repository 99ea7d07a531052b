#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nonsym/corpus.hpp"
#include "nonsym/embeddings.hpp"
#include "nonsym/transducer.hpp"

namespace nonsym {

struct SpanVector {
  std::vector<float> values;
  std::uint64_t contributing = 0;  // ngrams summed (0 iff values is zero)
};

struct PositionEmbedding {
  std::size_t position = 0;
  std::vector<float> values;
  std::uint64_t contributing = 0;
};

enum class ReprKind : std::uint8_t { kBag, kPositional };

struct ContextRepr {
  ReprKind kind = ReprKind::kBag;
  SpanVector bag;                            // kBag
  std::vector<PositionEmbedding> positions;  // kPositional
};

struct NgramRange {
  std::uint32_t kmin = 3;
  std::uint32_t kmax = 9;
};

// Sum of the embeddings of all substrings of lengths [kmin, kmax]; repeated
// substrings contribute per occurrence unless once_per_type. tau, when given,
// maps each ngram before lookup.
SpanVector bag_of_ngrams(const NgramEmbeddings& emb, std::u32string_view text,
                         NgramRange range, const RuleSet* tau = nullptr,
                         bool once_per_type = false);

// Sum over all substrings of lengths [kmin, kmax] that cover offset i and lie
// fully inside the text. Summation order is k ascending, start ascending.
PositionEmbedding position_embedding(const NgramEmbeddings& emb,
                                     std::u32string_view text, std::size_t i,
                                     NgramRange range,
                                     const RuleSet* tau = nullptr);

// BAG: one span vector over the whole text. POSITIONAL: one position
// embedding per offset in [lo, hi] inclusive.
ContextRepr context_repr(const NgramEmbeddings& emb, std::u32string_view text,
                         std::size_t lo, std::size_t hi, ReprKind kind,
                         NgramRange range, const RuleSet* tau = nullptr);

// u.v / (|u||v|); 0 if either norm is 0; throws on dimension mismatch.
double cosine(const std::vector<float>& u, const std::vector<float>& v);

// BAG: cosine of span vectors. POSITIONAL: mean of per-position cosines.
double context_similarity(const ContextRepr& a, const ContextRepr& b);

struct KnnFilter {
  std::optional<std::size_t> exact_length;  // in characters
  bool alnum_only = false;                  // ASCII alphanumeric only
  // marker must occur at one of these offsets (1-based character positions)
  std::vector<std::size_t> marker_positions;
  char32_t marker = kDefaultMarker;
};

struct Neighbor {
  std::string unit;
  double cosine = 0;
};

// Exact exhaustive scan; query excluded from candidates. The query is either
// a vocabulary unit or a raw vector.
std::vector<Neighbor> knn_ngrams(const NgramEmbeddings& emb,
                                 const std::string& query, std::size_t k,
                                 const KnnFilter& filter = {});
std::vector<Neighbor> knn_ngrams(const NgramEmbeddings& emb,
                                 const std::vector<float>& query_vector,
                                 std::size_t k, const KnnFilter& filter = {},
                                 const std::string& exclude_unit = "");

// Symmetric cosine matrix over the given ngrams; missing ngram -> error
// naming it.
std::vector<std::vector<double>> pairwise_cosine_report(
    const NgramEmbeddings& emb, const std::vector<std::string>& ngrams);

}  // namespace nonsym
