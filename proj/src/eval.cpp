#include "nonsym/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "nonsym/rng.hpp"
#include "nonsym/utf8.hpp"

namespace nonsym {

void DenoiseConfig::validate() const {
  if (noise_lo > noise_hi || noise_hi >= context_len) {
    throw std::runtime_error("denoise: need 0 <= noise_lo <= noise_hi < context_len");
  }
  if (p_space < 0 || p_space > 1) {
    throw std::runtime_error("denoise: p_space must be in [0,1]");
  }
}

std::pair<std::u32string, std::size_t> make_noise_context(
    std::u32string_view clean, const DenoiseConfig& config,
    const Alphabet& alphabet, std::uint64_t seed, char32_t marker) {
  config.validate();
  if (clean.size() != config.context_len) {
    throw std::runtime_error("make_noise_context: context has wrong length");
  }
  Rng rng(seed);
  std::size_t pos =
      config.noise_lo + std::size_t(rng.below(config.noise_hi - config.noise_lo + 1));
  char32_t original = clean[pos];
  char32_t replacement;
  if (rng.real() < config.p_space && original != marker) {
    replacement = marker;
  } else {
    do {
      replacement = alphabet.symbols[rng.below(alphabet.symbols.size())];
    } while (replacement == original);
  }
  std::u32string noisy(clean);
  noisy[pos] = replacement;
  return {std::move(noisy), pos};
}

DenoisingSet build_denoising_set(const Corpus& corpus,
                                 const DenoiseConfig& config, char32_t marker) {
  config.validate();
  if (corpus.chars.size() < config.context_len) {
    throw std::runtime_error("denoise: corpus shorter than context_len");
  }
  std::size_t max_offset = corpus.chars.size() - config.context_len;
  if (config.n_contexts > max_offset + 1) {
    throw std::runtime_error("denoise: corpus too short for n_contexts distinct windows");
  }
  Alphabet alphabet = alphabet_of(corpus.chars);
  if (alphabet.size() < 2) {
    throw std::runtime_error("denoise: alphabet too small for noise generation");
  }

  DenoisingSet set;
  Rng rng(derive_seed(config.seed, 0x0ff5e75));
  std::unordered_set<std::size_t> used;
  set.clean.reserve(config.n_contexts);
  while (set.clean.size() < config.n_contexts) {
    std::size_t offset = rng.below(max_offset + 1);
    if (!used.insert(offset).second) continue;
    set.clean.push_back(corpus.chars.substr(offset, config.context_len));
  }
  set.noisy.reserve(config.n_contexts);
  for (std::size_t i = 0; i < set.clean.size(); ++i) {
    auto [noisy, pos] = make_noise_context(
        set.clean[i], config, alphabet, derive_seed(config.seed, 0xbad + i),
        marker);
    set.noisy.push_back(std::move(noisy));
    set.noise_positions.push_back(pos);
  }
  std::size_t n_queries = std::min(config.n_queries, config.n_contexts);
  std::unordered_set<std::size_t> picked;
  Rng qrng(derive_seed(config.seed, 0x9e3));
  while (set.query_indices.size() < n_queries) {
    std::size_t q = qrng.below(config.n_contexts);
    if (picked.insert(q).second) set.query_indices.push_back(q);
  }
  return set;
}

double mean_reciprocal_rank(const std::vector<std::size_t>& ranks) {
  if (ranks.empty()) return 0;
  double sum = 0;
  for (std::size_t r : ranks) sum += 1.0 / double(r);
  return sum / double(ranks.size());
}

namespace {

void normalize_in_place(float* v, std::size_t dim) {
  double norm = 0;
  for (std::size_t d = 0; d < dim; ++d) norm += double(v[d]) * v[d];
  if (norm == 0) return;
  float inv = float(1.0 / std::sqrt(norm));
  for (std::size_t d = 0; d < dim; ++d) v[d] *= inv;
}

void run_sharded(std::size_t count, std::uint32_t workers,
                 const std::function<void(std::size_t, std::size_t)>& body) {
  workers = std::max<std::uint32_t>(1, workers);
  if (workers == 1 || count < 2 * workers) {
    body(0, count);
    return;
  }
  std::vector<std::thread> threads;
  for (std::uint32_t w = 0; w < workers; ++w) {
    std::size_t begin = count * w / workers;
    std::size_t end = count * (w + 1) / workers;
    threads.emplace_back(body, begin, end);
  }
  for (auto& t : threads) t.join();
}

}  // namespace

DenoiseReport eval_denoising(const NgramEmbeddings& emb, const DenoisingSet& set,
                             ReprKind kind, const DenoiseConfig& config,
                             NgramRange range, const RuleSet* tau,
                             std::uint32_t workers) {
  const std::size_t n = set.clean.size();
  const std::size_t pool = 2 * n;
  const std::size_t width =
      kind == ReprKind::kBag ? 1 : (config.noise_hi - config.noise_lo + 1);
  const std::size_t repr_dim = width * emb.dim;

  // pool layout: [0,n) clean, [n,2n) noisy; every block L2-normalized
  // per position so similarity is a plain dot product
  std::vector<float> reprs(pool * repr_dim, 0.0f);
  run_sharded(pool, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const std::u32string& text = p < n ? set.clean[p] : set.noisy[p - n];
      float* dst = reprs.data() + p * repr_dim;
      if (kind == ReprKind::kBag) {
        SpanVector bag = bag_of_ngrams(emb, text, range, tau);
        std::copy(bag.values.begin(), bag.values.end(), dst);
        normalize_in_place(dst, emb.dim);
      } else {
        for (std::size_t i = 0; i < width; ++i) {
          PositionEmbedding pe =
              position_embedding(emb, text, config.noise_lo + i, range, tau);
          float* block = dst + i * emb.dim;
          std::copy(pe.values.begin(), pe.values.end(), block);
          normalize_in_place(block, emb.dim);
        }
      }
    }
  });

  DenoiseReport report;
  report.kind = kind;
  report.ranks.resize(set.query_indices.size());
  run_sharded(set.query_indices.size(), workers,
              [&](std::size_t begin, std::size_t end) {
                for (std::size_t qi = begin; qi < end; ++qi) {
                  std::size_t query = n + set.query_indices[qi];  // noisy twin
                  std::size_t twin = set.query_indices[qi];       // clean twin
                  const float* q = reprs.data() + query * repr_dim;
                  auto dot = [&](std::size_t p) {
                    const float* c = reprs.data() + p * repr_dim;
                    double s = 0;
                    for (std::size_t d = 0; d < repr_dim; ++d) s += double(q[d]) * c[d];
                    return s;
                  };
                  double twin_score = dot(twin);
                  std::size_t rank = 1;
                  for (std::size_t p = 0; p < pool; ++p) {
                    if (p == query || p == twin) continue;
                    if (dot(p) > twin_score) ++rank;
                  }
                  report.ranks[qi] = rank;
                }
              });
  report.mrr = mean_reciprocal_rank(report.ranks);
  return report;
}

// ---------------------------------------------------------------------------
// Entity typing
// ---------------------------------------------------------------------------

TypingDataset load_typing_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open typing dataset: " + path);
  TypingDataset data;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected \"mention<TAB>type1,type2\"");
    }
    TypingExample ex;
    ex.mention = line.substr(0, tab);
    std::string types = line.substr(tab + 1);
    std::size_t pos = 0;
    while (pos <= types.size()) {
      std::size_t comma = types.find(',', pos);
      std::string t = types.substr(pos, comma - pos);
      if (!t.empty()) ex.types.push_back(t);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (ex.types.empty()) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": mention has no types");
    }
    data.examples.push_back(std::move(ex));
  }
  return data;
}

std::vector<float> mention_features(const NgramEmbeddings& emb,
                                    const std::string& mention, NgramRange range,
                                    const RuleSet* tau, bool normalize,
                                    char32_t marker) {
  Corpus normalized = nonsym::normalize(mention, marker);
  SpanVector bag = bag_of_ngrams(emb, normalized.chars, range, tau);
  if (normalize) normalize_in_place(bag.values.data(), bag.values.size());
  return std::move(bag.values);
}

namespace {

std::vector<std::vector<float>> featurize(const NgramEmbeddings& emb,
                                          const TypingDataset& data,
                                          NgramRange range, const RuleSet* tau,
                                          bool normalize) {
  std::vector<std::vector<float>> out;
  out.reserve(data.examples.size());
  std::size_t empty = 0;
  for (const auto& ex : data.examples) {
    out.push_back(mention_features(emb, ex.mention, range, tau, normalize));
    bool zero = true;
    for (float v : out.back()) {
      if (v != 0) { zero = false; break; }
    }
    if (zero) ++empty;
  }
  if (empty > 0) {
    std::cerr << "typing: " << empty << " of " << data.examples.size()
              << " mentions have no known ngrams (zero vectors retained)\n";
  }
  return out;
}

double type_f1_at(const std::vector<double>& scores,
                  const std::vector<bool>& gold, double threshold) {
  std::uint64_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    bool predicted = scores[i] >= threshold;
    if (predicted && gold[i]) ++tp;
    else if (predicted) ++fp;
    else if (gold[i]) ++fn;
  }
  return metrics_from_counts(tp, fp, fn).f1;
}

}  // namespace

TypingModel train_typing(const NgramEmbeddings& emb, const TypingDataset& train,
                         NgramRange range, const RuleSet* tau,
                         const TypingHyper& hyper) {
  if (train.examples.empty()) {
    throw std::runtime_error("typing: empty training split");
  }
  TypingModel model;
  model.normalize_features = hyper.normalize_features;
  {
    std::unordered_set<std::string> seen;
    for (const auto& ex : train.examples) {
      for (const auto& t : ex.types) seen.insert(t);
    }
    model.type_labels.assign(seen.begin(), seen.end());
    std::sort(model.type_labels.begin(), model.type_labels.end());
  }
  const std::size_t n_types = model.type_labels.size();
  const std::size_t dim = emb.dim;
  model.weights.assign(n_types, std::vector<float>(dim, 0.0f));
  model.bias.assign(n_types, 0.0f);
  model.thresholds.assign(n_types, 0.0);

  auto features = featurize(emb, train, range, tau, hyper.normalize_features);
  std::vector<std::vector<bool>> gold(train.examples.size(),
                                      std::vector<bool>(n_types, false));
  for (std::size_t i = 0; i < train.examples.size(); ++i) {
    for (const auto& t : train.examples[i].types) {
      auto it = std::lower_bound(model.type_labels.begin(),
                                 model.type_labels.end(), t);
      gold[i][std::size_t(it - model.type_labels.begin())] = true;
    }
  }

  Rng rng(hyper.seed);
  std::vector<std::size_t> order(train.examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const float lr = float(hyper.lr);
  const float decay = float(1.0 - hyper.lr * hyper.lambda);
  for (std::uint32_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      std::swap(order[i], order[rng.below(i + 1)]);
    }
    for (std::size_t idx : order) {
      const std::vector<float>& x = features[idx];
      for (std::size_t t = 0; t < n_types; ++t) {
        float y = gold[idx][t] ? 1.0f : -1.0f;
        std::vector<float>& w = model.weights[t];
        double score = model.bias[t];
        for (std::size_t d = 0; d < dim; ++d) score += double(w[d]) * x[d];
        for (std::size_t d = 0; d < dim; ++d) w[d] *= decay;
        if (y * score < 1.0) {
          for (std::size_t d = 0; d < dim; ++d) w[d] += lr * y * x[d];
          model.bias[t] += lr * y;
        }
      }
    }
  }
  return model;
}

std::vector<std::vector<double>> typing_scores(const TypingModel& model,
                                               const NgramEmbeddings& emb,
                                               const TypingDataset& data,
                                               NgramRange range,
                                               const RuleSet* tau) {
  auto features = featurize(emb, data, range, tau, model.normalize_features);
  std::vector<std::vector<double>> scores(
      data.examples.size(), std::vector<double>(model.type_labels.size(), 0.0));
  for (std::size_t i = 0; i < features.size(); ++i) {
    for (std::size_t t = 0; t < model.type_labels.size(); ++t) {
      double s = model.bias[t];
      const std::vector<float>& w = model.weights[t];
      for (std::size_t d = 0; d < w.size(); ++d) s += double(w[d]) * features[i][d];
      scores[i][t] = s;
    }
  }
  return scores;
}

void tune_thresholds(TypingModel& model, const NgramEmbeddings& emb,
                     const TypingDataset& dev, NgramRange range,
                     const RuleSet* tau) {
  if (dev.examples.empty()) {
    throw std::runtime_error("typing: empty dev split");
  }
  auto scores = typing_scores(model, emb, dev, range, tau);
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < model.type_labels.size(); ++t) {
    std::vector<double> type_scores(dev.examples.size());
    std::vector<bool> gold(dev.examples.size(), false);
    bool any_positive = false;
    for (std::size_t i = 0; i < dev.examples.size(); ++i) {
      type_scores[i] = scores[i][t];
      for (const auto& label : dev.examples[i].types) {
        if (label == model.type_labels[t]) {
          gold[i] = true;
          any_positive = true;
        }
      }
    }
    if (!any_positive) {
      model.thresholds[t] = inf;
      continue;
    }
    std::vector<double> candidates = type_scores;
    candidates.push_back(0.0);
    candidates.push_back(inf);
    std::sort(candidates.begin(), candidates.end());
    double best_f1 = -1, best_threshold = inf;
    for (double threshold : candidates) {
      double f1 = type_f1_at(type_scores, gold, threshold);
      if (f1 > best_f1 || (f1 == best_f1 && threshold > best_threshold)) {
        best_f1 = f1;
        best_threshold = threshold;
      }
    }
    model.thresholds[t] = best_threshold;
  }
}

Metrics metrics_from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) {
  Metrics m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.precision = (tp + fp == 0) ? 1.0 : double(tp) / double(tp + fp);
  m.recall = (tp + fn == 0) ? 1.0 : double(tp) / double(tp + fn);
  m.f1 = (m.precision + m.recall == 0)
             ? 0.0
             : 2 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

Metrics micro_f1(const std::vector<std::pair<bool, bool>>& decisions) {
  std::uint64_t tp = 0, fp = 0, fn = 0;
  for (auto [predicted, gold] : decisions) {
    if (predicted && gold) ++tp;
    else if (predicted) ++fp;
    else if (gold) ++fn;
  }
  return metrics_from_counts(tp, fp, fn);
}

TypingReport eval_typing(const TypingModel& model, const NgramEmbeddings& emb,
                         const TypingDataset& test, NgramRange range,
                         const RuleSet* tau) {
  auto scores = typing_scores(model, emb, test, range, tau);
  TypingReport report;
  std::uint64_t tp = 0, fp = 0, fn = 0;
  for (std::size_t t = 0; t < model.type_labels.size(); ++t) {
    std::uint64_t ttp = 0, tfp = 0, tfn = 0;
    for (std::size_t i = 0; i < test.examples.size(); ++i) {
      bool predicted = scores[i][t] >= model.thresholds[t];
      bool gold = false;
      for (const auto& label : test.examples[i].types) {
        if (label == model.type_labels[t]) gold = true;
      }
      if (predicted && gold) ++ttp;
      else if (predicted) ++tfp;
      else if (gold) ++tfn;
    }
    report.per_type[model.type_labels[t]] = metrics_from_counts(ttp, tfp, tfn);
    tp += ttp;
    fp += tfp;
    fn += tfn;
  }
  report.micro = metrics_from_counts(tp, fp, fn);
  return report;
}

}  // namespace nonsym
