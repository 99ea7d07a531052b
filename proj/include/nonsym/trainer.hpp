#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "nonsym/corpus.hpp"
#include "nonsym/embeddings.hpp"
#include "nonsym/segmenter.hpp"

namespace nonsym {

struct TrainConfig {
  std::uint32_t dim = 200;
  std::uint32_t window = 5;       // in units; actual size sampled in [1,window]
  std::uint32_t negatives = 5;
  std::uint32_t epochs = 1;
  float initial_lr = 0.025f;
  std::uint64_t min_count = 5;
  double subsample_threshold = 0;  // 0 = off
  std::uint32_t workers = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

// Re-iterable segment stream: invoking the source replays every segment in
// order, tagged with its pass index (windows never cross pass boundaries).
using SegmentVisitor =
    std::function<void(std::string_view unit, std::uint32_t pass)>;
using SegmentSource = std::function<void(const SegmentVisitor&)>;

SegmentSource memory_source(std::vector<std::string> segments);
SegmentSource corpus_source(Corpus corpus, SegmentationConfig config);
// Whitespace-separated tokens; the whole file counts as one pass.
SegmentSource file_source(std::string path);

Vocab build_vocab(const SegmentSource& source, std::uint64_t min_count);

// Skipgram with negative sampling over segment units. Asynchronous shared
// updates when workers > 1; bit-deterministic when workers == 1.
NgramEmbeddings train_sgns(const SegmentSource& source, const Vocab& vocab,
                           const TrainConfig& config);
NgramEmbeddings train_sgns(const SegmentSource& source, const TrainConfig& config);

}  // namespace nonsym
