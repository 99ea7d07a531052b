#include "nonsym/represent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "nonsym/utf8.hpp"

namespace nonsym {

namespace {

std::optional<std::uint32_t> lookup_ngram(const NgramEmbeddings& emb,
                                          std::u32string_view ngram,
                                          const RuleSet* tau) {
  if (tau != nullptr && !tau->rules.empty()) {
    return emb.lookup(utf8::encode(apply_tau(*tau, ngram)));
  }
  return emb.lookup(utf8::encode(ngram));
}

void add_row(std::vector<float>& acc, const NgramEmbeddings& emb,
             std::uint32_t idx) {
  const float* row = emb.row(idx);
  for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += row[d];
}

}  // namespace

SpanVector bag_of_ngrams(const NgramEmbeddings& emb, std::u32string_view text,
                         NgramRange range, const RuleSet* tau,
                         bool once_per_type) {
  SpanVector out;
  out.values.assign(emb.dim, 0.0f);
  std::unordered_set<std::string> counted;
  for (std::uint32_t k = range.kmin; k <= range.kmax; ++k) {
    if (k > text.size()) break;
    for (std::size_t start = 0; start + k <= text.size(); ++start) {
      std::u32string_view ngram = text.substr(start, k);
      if (once_per_type && !counted.insert(utf8::encode(ngram)).second) continue;
      auto idx = lookup_ngram(emb, ngram, tau);
      if (!idx) continue;
      add_row(out.values, emb, *idx);
      ++out.contributing;
    }
  }
  return out;
}

PositionEmbedding position_embedding(const NgramEmbeddings& emb,
                                     std::u32string_view text, std::size_t i,
                                     NgramRange range, const RuleSet* tau) {
  if (i >= text.size()) {
    throw std::runtime_error("position_embedding: index out of range");
  }
  PositionEmbedding out;
  out.position = i;
  out.values.assign(emb.dim, 0.0f);
  for (std::uint32_t k = range.kmin; k <= range.kmax; ++k) {
    if (k > text.size()) break;
    std::size_t first = (i + 1 >= k) ? i + 1 - k : 0;
    std::size_t last = std::min(i, text.size() - k);
    for (std::size_t start = first; start <= last; ++start) {
      auto idx = lookup_ngram(emb, text.substr(start, k), tau);
      if (!idx) continue;
      add_row(out.values, emb, *idx);
      ++out.contributing;
    }
  }
  return out;
}

ContextRepr context_repr(const NgramEmbeddings& emb, std::u32string_view text,
                         std::size_t lo, std::size_t hi, ReprKind kind,
                         NgramRange range, const RuleSet* tau) {
  if (lo > hi || hi >= text.size()) {
    throw std::runtime_error("context_repr: range out of bounds");
  }
  ContextRepr out;
  out.kind = kind;
  if (kind == ReprKind::kBag) {
    out.bag = bag_of_ngrams(emb, text, range, tau);
  } else {
    out.positions.reserve(hi - lo + 1);
    for (std::size_t i = lo; i <= hi; ++i) {
      out.positions.push_back(position_embedding(emb, text, i, range, tau));
    }
  }
  return out;
}

double cosine(const std::vector<float>& u, const std::vector<float>& v) {
  if (u.size() != v.size()) {
    throw std::runtime_error("cosine: dimension mismatch");
  }
  double dot = 0, nu = 0, nv = 0;
  for (std::size_t d = 0; d < u.size(); ++d) {
    dot += double(u[d]) * v[d];
    nu += double(u[d]) * u[d];
    nv += double(v[d]) * v[d];
  }
  if (nu == 0 || nv == 0) return 0.0;
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

double context_similarity(const ContextRepr& a, const ContextRepr& b) {
  if (a.kind != b.kind) {
    throw std::runtime_error("context_similarity: representation kind mismatch");
  }
  if (a.kind == ReprKind::kBag) {
    return cosine(a.bag.values, b.bag.values);
  }
  if (a.positions.size() != b.positions.size()) {
    throw std::runtime_error("context_similarity: position range width mismatch");
  }
  double sum = 0;
  for (std::size_t i = 0; i < a.positions.size(); ++i) {
    sum += cosine(a.positions[i].values, b.positions[i].values);
  }
  return sum / double(a.positions.size());
}

namespace {

bool is_ascii_alnum(char32_t c) {
  return (c >= U'0' && c <= U'9') || (c >= U'A' && c <= U'Z') ||
         (c >= U'a' && c <= U'z');
}

bool passes_filter(const std::u32string& unit, const KnnFilter& filter) {
  if (filter.exact_length && unit.size() != *filter.exact_length) return false;
  if (filter.alnum_only) {
    for (char32_t c : unit) {
      if (!is_ascii_alnum(c)) return false;
    }
  }
  if (!filter.marker_positions.empty()) {
    bool hit = false;
    for (std::size_t pos : filter.marker_positions) {
      if (pos >= 1 && pos <= unit.size() && unit[pos - 1] == filter.marker) {
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

}  // namespace

std::vector<Neighbor> knn_ngrams(const NgramEmbeddings& emb,
                                 const std::vector<float>& query_vector,
                                 std::size_t k, const KnnFilter& filter,
                                 const std::string& exclude_unit) {
  if (query_vector.size() != emb.dim) {
    throw std::runtime_error("knn: query vector dimension mismatch");
  }
  std::vector<Neighbor> scored;
  for (std::uint32_t i = 0; i < emb.vocab.size(); ++i) {
    const std::string& unit = emb.vocab.units[i];
    if (unit == exclude_unit) continue;
    if (filter.exact_length || filter.alnum_only ||
        !filter.marker_positions.empty()) {
      if (!passes_filter(utf8::decode(unit), filter)) continue;
    }
    const float* row = emb.row(i);
    double dot = 0, nq = 0, nc = 0;
    for (std::uint32_t d = 0; d < emb.dim; ++d) {
      dot += double(query_vector[d]) * row[d];
      nq += double(query_vector[d]) * query_vector[d];
      nc += double(row[d]) * row[d];
    }
    double c = (nq == 0 || nc == 0) ? 0.0 : dot / (std::sqrt(nq) * std::sqrt(nc));
    scored.push_back(Neighbor{unit, c});
  }
  std::size_t take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + take, scored.end(),
                    [](const Neighbor& a, const Neighbor& b) {
                      if (a.cosine != b.cosine) return a.cosine > b.cosine;
                      return a.unit < b.unit;
                    });
  scored.resize(take);
  return scored;
}

std::vector<Neighbor> knn_ngrams(const NgramEmbeddings& emb,
                                 const std::string& query, std::size_t k,
                                 const KnnFilter& filter) {
  auto idx = emb.lookup(query);
  if (!idx) {
    throw std::runtime_error("knn: unknown query ngram \"" + query + "\"");
  }
  std::vector<float> q(emb.row(*idx), emb.row(*idx) + emb.dim);
  return knn_ngrams(emb, q, k, filter, query);
}

std::vector<std::vector<double>> pairwise_cosine_report(
    const NgramEmbeddings& emb, const std::vector<std::string>& ngrams) {
  std::vector<std::uint32_t> indices;
  for (const auto& g : ngrams) {
    auto idx = emb.lookup(g);
    if (!idx) {
      throw std::runtime_error("pairwise cosine: ngram \"" + g +
                               "\" not in embeddings");
    }
    indices.push_back(*idx);
  }
  std::vector<std::vector<double>> matrix(
      ngrams.size(), std::vector<double>(ngrams.size(), 0.0));
  for (std::size_t a = 0; a < indices.size(); ++a) {
    matrix[a][a] = 1.0;
    for (std::size_t b = a + 1; b < indices.size(); ++b) {
      double c = cosine_between(emb, indices[a], indices[b]);
      matrix[a][b] = c;
      matrix[b][a] = c;
    }
  }
  return matrix;
}

}  // namespace nonsym
