#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "nonsym/corpus.hpp"

namespace nonsym {

struct SegmentationConfig {
  std::uint32_t m = 50;
  std::uint32_t kmin = 3;
  std::uint32_t kmax = 9;
  std::uint64_t seed = 0;

  void validate() const;
};

// Core cutter: emits consecutive segments whose lengths come from draw_len;
// the final segment is the corpus tail and may be shorter than the draw.
// Concatenating the emitted segments reproduces chars exactly.
void segment_sequence(std::u32string_view chars,
                      const std::function<std::size_t()>& draw_len,
                      const std::function<void(std::u32string_view)>& emit);

// One pass of random segmentation; lengths uniform in [kmin, kmax],
// deterministic for fixed (config.seed, pass). Segmentation never inspects
// character identity, so boundaries are permutation-equivariant.
std::vector<std::u32string> random_segmentation(const Corpus& corpus,
                                                const SegmentationConfig& config,
                                                std::uint32_t pass);

// Streaming form of one pass.
void for_each_segment_in_pass(const Corpus& corpus,
                              const SegmentationConfig& config,
                              std::uint32_t pass,
                              const std::function<void(std::u32string_view)>& fn);

// m independent passes, concatenated in pass order; fn(segment, pass_index).
void multiple_segmentation(const Corpus& corpus, const SegmentationConfig& config,
                           const std::function<void(std::u32string_view,
                                                    std::uint32_t)>& fn);

// Writes the m-pass segment stream as whitespace-separated UTF-8 tokens
// (segments contain the marker, never raw whitespace, so this is unambiguous).
void write_segment_stream(const Corpus& corpus, const SegmentationConfig& config,
                          const std::string& path);

enum class NgramCountMode { kSymbolic, kNonsymbolic };

// Distinct-ngram counts per length in [kmin, kmax]. SYMBOLIC counts within-
// token ngrams (tokens delimited by the marker); NONSYMBOLIC counts all
// substrings of the raw stream, marker crossings included.
std::vector<std::pair<std::uint32_t, std::uint64_t>> count_distinct_ngrams(
    const Corpus& corpus, std::uint32_t kmin, std::uint32_t kmax,
    NgramCountMode mode, char32_t marker = kDefaultMarker);

struct NgramCurvePoint {
  std::size_t prefix_size;  // characters
  NgramCountMode mode;
  std::uint64_t count;  // total distinct ngrams over [kmin, kmax]
};

// Growth curve: total distinct-ngram count at each prefix, per mode.
std::vector<NgramCurvePoint> ngram_growth_curve(
    const Corpus& corpus, std::uint32_t kmin, std::uint32_t kmax,
    const std::vector<std::size_t>& prefixes, char32_t marker = kDefaultMarker);

}  // namespace nonsym
