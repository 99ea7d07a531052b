#include "nonsym/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nonsym {

std::optional<std::uint32_t> Vocab::lookup(std::string_view unit) const {
  auto it = index.find(std::string(unit));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

void VocabBuilder::add(std::string_view unit, std::uint64_t count) {
  counts_[std::string(unit)] += count;
}

Vocab VocabBuilder::build(std::uint64_t min_count) const {
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  kept.reserve(counts_.size());
  for (const auto& [unit, count] : counts_) {
    if (count >= min_count) kept.emplace_back(unit, count);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocab vocab;
  vocab.min_count = min_count;
  vocab.units.reserve(kept.size());
  vocab.freq.reserve(kept.size());
  for (std::uint32_t i = 0; i < kept.size(); ++i) {
    vocab.units.push_back(kept[i].first);
    vocab.freq.push_back(kept[i].second);
    vocab.index.emplace(kept[i].first, i);
  }
  return vocab;
}

void NgramEmbeddings::check_finite() const {
  for (float v : vectors) {
    if (!std::isfinite(v)) {
      throw std::runtime_error("embedding table contains non-finite values");
    }
  }
}

double cosine_between(const NgramEmbeddings& emb, std::uint32_t i, std::uint32_t j) {
  const float* a = emb.row(i);
  const float* b = emb.row(j);
  double dot = 0, na = 0, nb = 0;
  for (std::uint32_t d = 0; d < emb.dim; ++d) {
    dot += double(a[d]) * b[d];
    na += double(a[d]) * a[d];
    nb += double(b[d]) * b[d];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

void save_embeddings(const NgramEmbeddings& emb, const std::string& path) {
  emb.check_finite();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write embeddings file: " + path);
  out << emb.vocab.size() << ' ' << emb.dim << '\n';
  char buf[32];
  for (std::uint32_t i = 0; i < emb.vocab.size(); ++i) {
    out << emb.vocab.units[i];
    const float* v = emb.row(i);
    for (std::uint32_t d = 0; d < emb.dim; ++d) {
      std::snprintf(buf, sizeof buf, " %.6f", double(v[d]));
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

NgramEmbeddings load_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open embeddings file: " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path + ":1: missing header");
  }
  std::istringstream header(line);
  std::uint64_t count = 0;
  std::uint32_t dim = 0;
  std::string extra;
  if (!(header >> count >> dim) || (header >> extra) || dim == 0) {
    throw std::runtime_error(path + ":1: malformed header, expected \"V d\"");
  }
  NgramEmbeddings emb;
  emb.dim = dim;
  emb.vocab.min_count = 0;
  emb.vectors.reserve(count * dim);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string unit;
    fields >> unit;
    if (emb.vocab.size() == count) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": more unit lines than the header declares");
    }
    if (!emb.vocab.index.emplace(unit, std::uint32_t(emb.vocab.size())).second) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": duplicate unit \"" + unit + "\"");
    }
    emb.vocab.units.push_back(unit);
    emb.vocab.freq.push_back(0);
    for (std::uint32_t d = 0; d < dim; ++d) {
      float v;
      if (!(fields >> v)) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": expected " + std::to_string(dim) +
                                 " vector components");
      }
      emb.vectors.push_back(v);
    }
    if (fields >> extra) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": trailing fields beyond dimension " +
                               std::to_string(dim));
    }
  }
  if (emb.vocab.size() != count) {
    throw std::runtime_error(path + ": header declares " + std::to_string(count) +
                             " units but file has " +
                             std::to_string(emb.vocab.size()));
  }
  return emb;
}

}  // namespace nonsym
