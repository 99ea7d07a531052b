#include "nonsym/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "nonsym/rng.hpp"
#include "nonsym/utf8.hpp"

namespace nonsym {

void TrainConfig::validate() const {
  if (dim < 1) throw std::runtime_error("train: dim must be >= 1");
  if (window < 1) throw std::runtime_error("train: window must be >= 1");
  if (!(initial_lr > 0)) throw std::runtime_error("train: initial_lr must be > 0");
}

SegmentSource memory_source(std::vector<std::string> segments) {
  auto shared = std::make_shared<std::vector<std::string>>(std::move(segments));
  return [shared](const SegmentVisitor& visit) {
    for (const auto& s : *shared) visit(s, 0);
  };
}

SegmentSource corpus_source(Corpus corpus, SegmentationConfig config) {
  auto shared = std::make_shared<Corpus>(std::move(corpus));
  return [shared, config](const SegmentVisitor& visit) {
    multiple_segmentation(*shared, config,
                          [&](std::u32string_view s, std::uint32_t pass) {
                            visit(utf8::encode(s), pass);
                          });
  };
}

SegmentSource file_source(std::string path) {
  return [path](const SegmentVisitor& visit) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open segment stream: " + path);
    std::string token;
    while (in >> token) visit(token, 0);
  };
}

Vocab build_vocab(const SegmentSource& source, std::uint64_t min_count) {
  VocabBuilder builder;
  source([&](std::string_view unit, std::uint32_t) { builder.add(unit); });
  return builder.build(min_count);
}

namespace {

constexpr int kExpTableSize = 1000;
constexpr float kMaxExp = 6.0f;
constexpr std::size_t kNegTableSize = 10'000'000;

struct SigmoidTable {
  float values[kExpTableSize];
  SigmoidTable() {
    for (int i = 0; i < kExpTableSize; ++i) {
      float x = (float(i) / kExpTableSize * 2 - 1) * kMaxExp;
      float e = std::exp(x);
      values[i] = e / (e + 1);
    }
  }
  float operator()(float x) const {
    if (x >= kMaxExp) return 1.0f;
    if (x <= -kMaxExp) return 0.0f;
    int i = int((x + kMaxExp) * (kExpTableSize / kMaxExp / 2));
    return values[i];
  }
};

// frequency^(3/4) unigram table for negative sampling
std::vector<std::uint32_t> build_negative_table(const Vocab& vocab) {
  std::vector<std::uint32_t> table(kNegTableSize);
  double total = 0;
  for (std::uint64_t f : vocab.freq) total += std::pow(double(f), 0.75);
  std::size_t i = 0;
  double cumulative = std::pow(double(vocab.freq[0]), 0.75) / total;
  for (std::size_t t = 0; t < kNegTableSize; ++t) {
    table[t] = std::uint32_t(i);
    if (double(t) / kNegTableSize > cumulative && i + 1 < vocab.size()) {
      ++i;
      cumulative += std::pow(double(vocab.freq[i]), 0.75) / total;
    }
  }
  return table;
}

struct EncodedStream {
  std::vector<std::uint32_t> ids;
  std::vector<std::size_t> pass_start;  // ascending offsets into ids
};

EncodedStream encode_stream(const SegmentSource& source, const Vocab& vocab) {
  EncodedStream enc;
  std::int64_t current_pass = -1;
  source([&](std::string_view unit, std::uint32_t pass) {
    auto it = vocab.index.find(std::string(unit));
    if (it == vocab.index.end()) return;  // below min_count
    if (std::int64_t(pass) != current_pass) {
      enc.pass_start.push_back(enc.ids.size());
      current_pass = pass;
    }
    enc.ids.push_back(it->second);
  });
  return enc;
}

struct PassBounds {
  std::size_t begin = 0, end = 0;
};

PassBounds bounds_at(const EncodedStream& enc, std::size_t pos) {
  auto it = std::upper_bound(enc.pass_start.begin(), enc.pass_start.end(), pos);
  PassBounds b;
  b.begin = *(it - 1);
  b.end = (it == enc.pass_start.end()) ? enc.ids.size() : *it;
  return b;
}

}  // namespace

NgramEmbeddings train_sgns(const SegmentSource& source, const Vocab& vocab,
                           const TrainConfig& config) {
  config.validate();
  if (vocab.size() == 0) throw std::runtime_error("train: empty vocabulary");

  NgramEmbeddings emb;
  emb.vocab = vocab;
  emb.dim = config.dim;
  const std::uint32_t dim = config.dim;
  emb.vectors.resize(std::size_t(vocab.size()) * dim);

  // input vectors uniform in [-0.5/d, 0.5/d], keyed by (seed, unit index) so
  // initialization is stable under vocabulary renaming
  for (std::uint32_t i = 0; i < vocab.size(); ++i) {
    Rng rng(derive_seed(config.seed ^ 0x5eedf00dULL, i));
    float* row = emb.row(i);
    for (std::uint32_t d = 0; d < dim; ++d) {
      row[d] = float((rng.real() - 0.5) / dim);
    }
  }
  if (config.epochs == 0) return emb;

  std::vector<float> context(std::size_t(vocab.size()) * dim, 0.0f);
  EncodedStream enc = encode_stream(source, vocab);
  if (enc.ids.empty()) return emb;

  std::vector<std::uint32_t> neg_table;
  if (config.negatives > 0) neg_table = build_negative_table(vocab);
  static const SigmoidTable sigmoid;

  std::uint64_t total_freq = 0;
  for (std::uint64_t f : vocab.freq) total_freq += f;

  const std::uint64_t total_centers =
      std::uint64_t(enc.ids.size()) * config.epochs;
  std::atomic<std::uint64_t> progress{0};
  std::atomic<bool> failed{false};

  std::uint32_t workers = std::max(1u, config.workers);
  workers = std::uint32_t(std::min<std::size_t>(workers, enc.ids.size()));

  auto work = [&](std::uint32_t worker) {
    Rng rng(derive_seed(config.seed ^ 0x700c0ffeULL, worker));
    std::size_t begin = enc.ids.size() * worker / workers;
    std::size_t end = enc.ids.size() * (worker + 1) / workers;
    std::vector<float> grad(dim);
    float lr = config.initial_lr;
    std::uint64_t done_local = 0;

    for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
      PassBounds pass = bounds_at(enc, begin);
      for (std::size_t p = begin; p < end; ++p) {
        if (p >= pass.end) pass = bounds_at(enc, p);
        if (++done_local % 10000 == 0) {
          std::uint64_t done = progress.fetch_add(10000) + 10000;
          double remain = 1.0 - double(done) / double(total_centers);
          lr = config.initial_lr * float(std::max(remain, 1e-4));
        }
        std::uint32_t center = enc.ids[p];
        if (config.subsample_threshold > 0) {
          double f = double(vocab.freq[center]) / double(total_freq);
          double keep = (std::sqrt(f / config.subsample_threshold) + 1) *
                        config.subsample_threshold / f;
          if (keep < 1.0 && rng.real() >= keep) continue;
        }
        std::size_t win = 1 + std::size_t(rng.below(config.window));
        std::size_t lo = (p >= pass.begin + win) ? p - win : pass.begin;
        std::size_t hi = std::min(p + win + 1, pass.end);
        float* center_row = emb.row(center);
        for (std::size_t q = lo; q < hi; ++q) {
          if (q == p) continue;
          std::uint32_t ctx = enc.ids[q];
          std::fill(grad.begin(), grad.end(), 0.0f);
          for (std::uint32_t k = 0; k <= config.negatives; ++k) {
            std::uint32_t target;
            float label;
            if (k == 0) {
              target = ctx;
              label = 1.0f;
            } else {
              target = neg_table[rng.below(kNegTableSize)];
              if (target == ctx) continue;
              label = 0.0f;
            }
            float* target_row = context.data() + std::size_t(target) * dim;
            float dot = 0;
            for (std::uint32_t d = 0; d < dim; ++d) dot += center_row[d] * target_row[d];
            float g = (label - sigmoid(dot)) * lr;
            for (std::uint32_t d = 0; d < dim; ++d) {
              grad[d] += g * target_row[d];
              target_row[d] += g * center_row[d];
            }
          }
          for (std::uint32_t d = 0; d < dim; ++d) center_row[d] += grad[d];
        }
      }
      if (worker == 0) {
        // finiteness check once per epoch; a diverged run aborts immediately
        for (float v : emb.vectors) {
          if (!std::isfinite(v)) {
            failed.store(true);
            return;
          }
        }
      }
      if (failed.load()) return;
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (std::uint32_t w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  if (failed.load()) {
    throw std::runtime_error(
        "train: non-finite update detected (diverged); try a lower learning rate");
  }
  emb.check_finite();
  return emb;
}

NgramEmbeddings train_sgns(const SegmentSource& source, const TrainConfig& config) {
  Vocab vocab = build_vocab(source, config.min_count);
  return train_sgns(source, vocab, config);
}

}  // namespace nonsym
