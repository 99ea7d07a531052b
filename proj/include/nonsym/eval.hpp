#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nonsym/corpus.hpp"
#include "nonsym/embeddings.hpp"
#include "nonsym/represent.hpp"
#include "nonsym/transducer.hpp"

namespace nonsym {

// ---------------------------------------------------------------------------
// Text denoising (mean reciprocal rank)
// ---------------------------------------------------------------------------

struct DenoiseConfig {
  std::size_t context_len = 40;
  std::size_t n_contexts = 2'000'000;
  std::size_t noise_lo = 15;
  std::size_t noise_hi = 25;
  double p_space = 0.5;
  std::size_t n_queries = 1000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct DenoisingSet {
  std::vector<std::u32string> clean;
  std::vector<std::u32string> noisy;        // one twin per clean context
  std::vector<std::size_t> noise_positions;
  std::vector<std::size_t> query_indices;   // indices into noisy
};

// Replaces exactly one character at a uniform position in
// [noise_lo, noise_hi]: the marker with probability p_space, otherwise a
// uniformly random alphabet character distinct from the original. The
// replacement never equals the original character.
std::pair<std::u32string, std::size_t> make_noise_context(
    std::u32string_view clean, const DenoiseConfig& config,
    const Alphabet& alphabet, std::uint64_t seed,
    char32_t marker = kDefaultMarker);

// n_contexts windows at distinct offsets, one noise twin each, n_queries
// query indices; deterministic for a fixed (corpus, config).
DenoisingSet build_denoising_set(const Corpus& corpus,
                                 const DenoiseConfig& config,
                                 char32_t marker = kDefaultMarker);

struct DenoiseReport {
  ReprKind kind = ReprKind::kBag;
  double mrr = 0;
  std::vector<std::size_t> ranks;  // rank of the clean twin, per query
};

// Ranks the full pool (clean + noise, query excluded) against each query.
// POSITIONAL uses positions [noise_lo, noise_hi].
DenoiseReport eval_denoising(const NgramEmbeddings& emb, const DenoisingSet& set,
                             ReprKind kind, const DenoiseConfig& config,
                             NgramRange range, const RuleSet* tau = nullptr,
                             std::uint32_t workers = 1);

double mean_reciprocal_rank(const std::vector<std::size_t>& ranks);

// ---------------------------------------------------------------------------
// Entity typing (micro F1)
// ---------------------------------------------------------------------------

struct TypingExample {
  std::string mention;
  std::vector<std::string> types;
};

struct TypingDataset {
  std::vector<TypingExample> examples;
};

// One record per line: "mention<TAB>type1,type2,...".
TypingDataset load_typing_dataset(const std::string& path);

struct TypingHyper {
  double lambda = 1e-4;       // L2 regularization
  std::uint32_t epochs = 20;
  double lr = 0.05;
  bool normalize_features = true;  // L2-normalize mention vectors
  std::uint64_t seed = 0;
};

// One linear hinge-loss scorer plus decision threshold per type.
struct TypingModel {
  std::vector<std::string> type_labels;          // sorted
  std::vector<std::vector<float>> weights;       // per type
  std::vector<float> bias;
  std::vector<double> thresholds;
  bool normalize_features = true;
};

// Mention string is normalized like the corpus (whitespace -> marker) and
// represented by its bag of ngrams.
std::vector<float> mention_features(const NgramEmbeddings& emb,
                                    const std::string& mention, NgramRange range,
                                    const RuleSet* tau, bool normalize,
                                    char32_t marker = kDefaultMarker);

TypingModel train_typing(const NgramEmbeddings& emb, const TypingDataset& train,
                         NgramRange range, const RuleSet* tau,
                         const TypingHyper& hyper);

// Per type, sweeps candidate thresholds over the sorted dev scores (plus 0
// and +inf) and keeps the F1-maximizing one; ties pick the higher threshold.
// A type never positive in dev gets +inf (never predict).
void tune_thresholds(TypingModel& model, const NgramEmbeddings& emb,
                     const TypingDataset& dev, NgramRange range,
                     const RuleSet* tau);

struct Metrics {
  double precision = 1;
  double recall = 1;
  double f1 = 0;
  std::uint64_t tp = 0, fp = 0, fn = 0;
};

// P = TP/(TP+FP) (1 if denominator 0), R = TP/(TP+FN) (1 if denominator 0),
// F1 harmonic mean (0 if P + R = 0).
Metrics micro_f1(const std::vector<std::pair<bool, bool>>& decisions);
Metrics metrics_from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn);

struct TypingReport {
  Metrics micro;
  std::map<std::string, Metrics> per_type;
};

TypingReport eval_typing(const TypingModel& model, const NgramEmbeddings& emb,
                         const TypingDataset& test, NgramRange range,
                         const RuleSet* tau);

// Raw per-type scores for a dataset (row per example, column per type).
std::vector<std::vector<double>> typing_scores(const TypingModel& model,
                                               const NgramEmbeddings& emb,
                                               const TypingDataset& data,
                                               NgramRange range,
                                               const RuleSet* tau);

}  // namespace nonsym
