#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nonsym {

// Ngram-unit vocabulary. Indices are dense 0..V-1, assigned by descending
// frequency with lexicographic tiebreak, so index assignment is deterministic
// and permutation-equivariant up to frequency ties.
struct Vocab {
  std::vector<std::string> units;       // index -> UTF-8 unit
  std::vector<std::uint64_t> freq;      // index -> frequency (0 if unknown)
  std::unordered_map<std::string, std::uint32_t> index;
  std::uint64_t min_count = 1;

  std::size_t size() const { return units.size(); }
  std::optional<std::uint32_t> lookup(std::string_view unit) const;
};

class VocabBuilder {
 public:
  void add(std::string_view unit, std::uint64_t count = 1);
  Vocab build(std::uint64_t min_count) const;

 private:
  std::unordered_map<std::string, std::uint64_t> counts_;
};

// Dense vector per vocabulary unit, row-major V x dim.
struct NgramEmbeddings {
  Vocab vocab;
  std::vector<float> vectors;
  std::uint32_t dim = 0;

  const float* row(std::uint32_t i) const { return vectors.data() + std::size_t(i) * dim; }
  float* row(std::uint32_t i) { return vectors.data() + std::size_t(i) * dim; }
  std::optional<std::uint32_t> lookup(std::string_view unit) const {
    return vocab.lookup(unit);
  }
  void check_finite() const;  // throws on NaN/inf
};

double cosine_between(const NgramEmbeddings& emb, std::uint32_t i, std::uint32_t j);

// Word-vector text format: header "V d", then V lines "unit v1 ... vd".
// Units contain no raw whitespace ('@'-encoded spaces).
void save_embeddings(const NgramEmbeddings& emb, const std::string& path);
NgramEmbeddings load_embeddings(const std::string& path);

}  // namespace nonsym
