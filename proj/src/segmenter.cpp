#include "nonsym/segmenter.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "nonsym/rng.hpp"
#include "nonsym/utf8.hpp"

namespace nonsym {

void SegmentationConfig::validate() const {
  if (m < 1) throw std::runtime_error("segmentation: m must be >= 1");
  if (kmin < 1 || kmin > kmax) {
    throw std::runtime_error("segmentation: need 1 <= kmin <= kmax");
  }
}

void segment_sequence(std::u32string_view chars,
                      const std::function<std::size_t()>& draw_len,
                      const std::function<void(std::u32string_view)>& emit) {
  std::size_t i = 0;
  while (i < chars.size()) {
    std::size_t len = draw_len();
    len = std::min(len, chars.size() - i);
    emit(chars.substr(i, len));
    i += len;
  }
}

void for_each_segment_in_pass(const Corpus& corpus,
                              const SegmentationConfig& config,
                              std::uint32_t pass,
                              const std::function<void(std::u32string_view)>& fn) {
  config.validate();
  if (corpus.chars.empty()) return;
  Rng rng(derive_seed(config.seed, pass));
  std::size_t span = config.kmax - config.kmin + 1;
  segment_sequence(
      corpus.chars,
      [&] { return config.kmin + std::size_t(rng.below(span)); }, fn);
}

std::vector<std::u32string> random_segmentation(const Corpus& corpus,
                                                const SegmentationConfig& config,
                                                std::uint32_t pass) {
  std::vector<std::u32string> out;
  for_each_segment_in_pass(corpus, config, pass,
                           [&](std::u32string_view s) { out.emplace_back(s); });
  return out;
}

void multiple_segmentation(const Corpus& corpus, const SegmentationConfig& config,
                           const std::function<void(std::u32string_view,
                                                    std::uint32_t)>& fn) {
  config.validate();
  for (std::uint32_t pass = 0; pass < config.m; ++pass) {
    for_each_segment_in_pass(corpus, config, pass,
                             [&](std::u32string_view s) { fn(s, pass); });
  }
}

void write_segment_stream(const Corpus& corpus, const SegmentationConfig& config,
                          const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write segment stream: " + path);
  multiple_segmentation(corpus, config,
                        [&](std::u32string_view s, std::uint32_t) {
                          out << utf8::encode(s) << '\n';
                        });
}

namespace {

// 128-bit window fingerprints via two independent polynomial hashes, so the
// distinct counts are exact for any realistic corpus.
struct Fingerprinter {
  static constexpr std::uint64_t kBase1 = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kBase2 = 0xc2b2ae3d27d4eb4fULL;

  std::vector<std::uint64_t> prefix1, prefix2, pow1, pow2;

  explicit Fingerprinter(std::u32string_view chars) {
    std::size_t n = chars.size();
    prefix1.resize(n + 1);
    prefix2.resize(n + 1);
    pow1.resize(n + 1);
    pow2.resize(n + 1);
    pow1[0] = pow2[0] = 1;
    prefix1[0] = prefix2[0] = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t c = mix64(std::uint64_t(chars[i]) + 1);
      prefix1[i + 1] = prefix1[i] * kBase1 + c;
      prefix2[i + 1] = prefix2[i] * kBase2 + c;
      pow1[i + 1] = pow1[i] * kBase1;
      pow2[i + 1] = pow2[i] * kBase2;
    }
  }

  unsigned __int128 window(std::size_t begin, std::size_t end) const {
    std::uint64_t h1 = prefix1[end] - prefix1[begin] * pow1[end - begin];
    std::uint64_t h2 = prefix2[end] - prefix2[begin] * pow2[end - begin];
    return ((unsigned __int128)h1 << 64) | h2;
  }
};

struct FingerprintHash {
  std::size_t operator()(unsigned __int128 x) const {
    return std::size_t(x) ^ std::size_t(x >> 64);
  }
};

// For every length, walks windows left to right and records the running
// distinct count at each checkpoint (window fully inside the prefix).
// One set per length at a time keeps peak memory bounded.
std::vector<std::vector<std::uint64_t>> count_curve(
    const Corpus& corpus, std::uint32_t kmin, std::uint32_t kmax,
    NgramCountMode mode, char32_t marker,
    const std::vector<std::size_t>& checkpoints) {
  const std::u32string& chars = corpus.chars;
  Fingerprinter fp(chars);

  // next_marker[i] = smallest j >= i with chars[j] == marker (or len).
  std::vector<std::size_t> next_marker;
  if (mode == NgramCountMode::kSymbolic) {
    next_marker.assign(chars.size() + 1, chars.size());
    for (std::size_t i = chars.size(); i-- > 0;) {
      next_marker[i] = (chars[i] == marker) ? i : next_marker[i + 1];
    }
  }

  std::vector<std::vector<std::uint64_t>> counts(
      kmax - kmin + 1, std::vector<std::uint64_t>(checkpoints.size(), 0));
  std::unordered_set<unsigned __int128, FingerprintHash> seen;
  for (std::uint32_t n = kmin; n <= kmax; ++n) {
    seen.clear();
    std::size_t cp = 0;
    for (std::size_t end = n; end <= chars.size(); ++end) {
      while (cp < checkpoints.size() && checkpoints[cp] < end) {
        counts[n - kmin][cp] = seen.size();
        ++cp;
      }
      std::size_t begin = end - n;
      if (mode == NgramCountMode::kSymbolic && next_marker[begin] < end) {
        continue;
      }
      seen.insert(fp.window(begin, end));
    }
    for (; cp < checkpoints.size(); ++cp) counts[n - kmin][cp] = seen.size();
  }
  return counts;
}

}  // namespace

std::vector<std::pair<std::uint32_t, std::uint64_t>> count_distinct_ngrams(
    const Corpus& corpus, std::uint32_t kmin, std::uint32_t kmax,
    NgramCountMode mode, char32_t marker) {
  if (kmin < 1 || kmin > kmax) {
    throw std::runtime_error("count_distinct_ngrams: need 1 <= kmin <= kmax");
  }
  auto counts =
      count_curve(corpus, kmin, kmax, mode, marker, {corpus.chars.size()});
  std::vector<std::pair<std::uint32_t, std::uint64_t>> out;
  for (std::uint32_t n = kmin; n <= kmax; ++n) {
    out.emplace_back(n, counts[n - kmin][0]);
  }
  return out;
}

std::vector<NgramCurvePoint> ngram_growth_curve(
    const Corpus& corpus, std::uint32_t kmin, std::uint32_t kmax,
    const std::vector<std::size_t>& prefixes, char32_t marker) {
  if (kmin < 1 || kmin > kmax) {
    throw std::runtime_error("ngram_growth_curve: need 1 <= kmin <= kmax");
  }
  std::vector<std::size_t> checkpoints = prefixes;
  std::sort(checkpoints.begin(), checkpoints.end());
  std::vector<NgramCurvePoint> out;
  for (NgramCountMode mode :
       {NgramCountMode::kSymbolic, NgramCountMode::kNonsymbolic}) {
    auto counts = count_curve(corpus, kmin, kmax, mode, marker, checkpoints);
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      std::uint64_t total = 0;
      for (auto& per_len : counts) total += per_len[c];
      out.push_back(NgramCurvePoint{checkpoints[c], mode, total});
    }
  }
  return out;
}

}  // namespace nonsym
