#include "nonsym/transducer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "nonsym/utf8.hpp"

namespace nonsym {

namespace {

std::u32string apply_substitute(std::u32string_view g, char32_t a1, char32_t a2) {
  std::u32string out(g);
  for (char32_t& c : out) {
    if (c == a1) c = a2;
  }
  return out;
}

std::u32string apply_predelete(std::u32string_view g, char32_t a1, char32_t a2) {
  std::u32string out;
  out.reserve(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    bool anchored = (j == 0) ? (a2 == kBoundary) : (g[j - 1] == a2);
    if (g[j] == a1 && anchored) continue;
    out.push_back(g[j]);
  }
  return out;
}

std::u32string apply_postdelete(std::u32string_view g, char32_t a1, char32_t a2) {
  std::u32string out;
  out.reserve(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    bool anchored =
        (j + 1 == g.size()) ? (a2 == kBoundary) : (g[j + 1] == a2);
    if (g[j] == a1 && anchored) continue;
    out.push_back(g[j]);
  }
  return out;
}

std::u32string apply_rule_pass(const Rule& rule, std::u32string_view g) {
  switch (rule.kind) {
    case RuleKind::kSubstitute:
      return apply_substitute(g, rule.a1, rule.a2);
    case RuleKind::kPredelete:
      return apply_predelete(g, rule.a1, rule.a2);
    case RuleKind::kPostdelete:
      return apply_postdelete(g, rule.a1, rule.a2);
  }
  return std::u32string(g);
}

struct RuleKey {
  RuleKind kind;
  char32_t a1;
  char32_t a2;
  bool operator==(const RuleKey& o) const {
    return kind == o.kind && a1 == o.a1 && a2 == o.a2;
  }
  bool operator<(const RuleKey& o) const {
    if (kind != o.kind) return kind < o.kind;
    if (a1 != o.a1) return a1 < o.a1;
    return a2 < o.a2;
  }
};

struct RuleKeyHash {
  std::size_t operator()(const RuleKey& k) const {
    std::size_t h = std::size_t(k.kind);
    h = h * 0x9e3779b97f4a7c15ULL + k.a1;
    h = h * 0x9e3779b97f4a7c15ULL + k.a2;
    return h;
  }
};

using PairCosines = std::unordered_map<RuleKey, std::vector<double>, RuleKeyHash>;

void collect_for_unit(const NgramEmbeddings& emb,
                      const std::vector<std::u32string>& decoded,
                      const std::vector<char32_t>& alphabet, std::uint32_t i,
                      PairCosines& acc) {
  const std::u32string& g = decoded[i];
  auto probe = [&](const RuleKey& key, const std::u32string& image) {
    if (image == g) return;
    auto it = emb.vocab.index.find(utf8::encode(image));
    if (it == emb.vocab.index.end()) return;
    acc[key].push_back(cosine_between(emb, i, it->second));
  };

  // substitutions: distinct characters of g x alphabet
  std::u32string distinct(g);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  for (char32_t a1 : distinct) {
    for (char32_t a2 : alphabet) {
      if (a2 == a1) continue;
      probe({RuleKind::kSubstitute, a1, a2}, apply_substitute(g, a1, a2));
    }
  }
  // deletions: (character, observed anchor) pairs present in g
  std::vector<RuleKey> keys;
  for (std::size_t j = 0; j < g.size(); ++j) {
    keys.push_back({RuleKind::kPredelete, g[j], j == 0 ? kBoundary : g[j - 1]});
    keys.push_back({RuleKind::kPostdelete, g[j],
                    j + 1 == g.size() ? kBoundary : g[j + 1]});
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  for (const RuleKey& key : keys) {
    probe(key, key.kind == RuleKind::kPredelete
                   ? apply_predelete(g, key.a1, key.a2)
                   : apply_postdelete(g, key.a1, key.a2));
  }
}

}  // namespace

std::optional<std::u32string> match_rule(const Rule& rule, std::u32string_view g) {
  std::u32string image = apply_rule_pass(rule, g);
  if (image == g) return std::nullopt;
  return image;
}

std::vector<Rule> score_operations(const NgramEmbeddings& emb,
                                   std::uint64_t min_support,
                                   std::uint32_t workers) {
  if (emb.vocab.size() == 0) return {};
  std::vector<std::u32string> decoded;
  decoded.reserve(emb.vocab.size());
  for (const auto& unit : emb.vocab.units) {
    decoded.push_back(utf8::decode(unit));
  }
  std::vector<char32_t> alphabet;
  for (const auto& g : decoded) alphabet.insert(alphabet.end(), g.begin(), g.end());
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());

  workers = std::max(1u, workers);
  std::vector<PairCosines> shards(workers);
  auto work = [&](std::uint32_t w) {
    std::uint32_t begin = std::uint32_t(std::uint64_t(decoded.size()) * w / workers);
    std::uint32_t end =
        std::uint32_t(std::uint64_t(decoded.size()) * (w + 1) / workers);
    for (std::uint32_t i = begin; i < end; ++i) {
      collect_for_unit(emb, decoded, alphabet, i, shards[w]);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (std::uint32_t w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  PairCosines merged = std::move(shards[0]);
  for (std::uint32_t w = 1; w < workers; ++w) {
    for (auto& [key, cosines] : shards[w]) {
      auto& dst = merged[key];
      dst.insert(dst.end(), cosines.begin(), cosines.end());
    }
  }

  std::vector<Rule> out;
  for (auto& [key, cosines] : merged) {
    if (cosines.size() < min_support) continue;
    // sorted summation keeps scores independent of accumulation order
    std::sort(cosines.begin(), cosines.end());
    double sum = 0;
    for (double c : cosines) sum += c;
    out.push_back(Rule{key.kind, key.a1, key.a2, sum / double(cosines.size()),
                       cosines.size()});
  }
  std::sort(out.begin(), out.end(), [](const Rule& a, const Rule& b) {
    if (a.score != b.score) return a.score > b.score;
    RuleKey ka{a.kind, a.a1, a.a2}, kb{b.kind, b.a1, b.a2};
    return ka < kb;
  });
  return out;
}

namespace {

char32_t find_root(std::unordered_map<char32_t, char32_t>& parent, char32_t c) {
  while (parent[c] != c) {
    parent[c] = parent[parent[c]];
    c = parent[c];
  }
  return c;
}

}  // namespace

RuleSet make_ruleset(std::vector<Rule> scored, std::uint32_t max_operations,
                     const std::unordered_map<char32_t, std::uint64_t>&
                         char_frequency) {
  RuleSet rs;
  rs.max_operations = max_operations;
  if (scored.size() > max_operations) scored.resize(max_operations);

  // substitution equivalence classes (undirected graph of a1--a2)
  std::unordered_map<char32_t, char32_t> parent;
  for (const Rule& r : scored) {
    if (r.kind != RuleKind::kSubstitute) continue;
    parent.try_emplace(r.a1, r.a1);
    parent.try_emplace(r.a2, r.a2);
    char32_t ra = find_root(parent, r.a1);
    char32_t rb = find_root(parent, r.a2);
    if (ra != rb) parent[ra] = rb;
  }
  std::unordered_map<char32_t, std::vector<char32_t>> classes;
  for (auto& [c, _] : parent) classes[find_root(parent, c)].push_back(c);
  for (auto& [root, members] : classes) {
    std::sort(members.begin(), members.end());
    char32_t canon = members.front();
    std::uint64_t best = 0;
    {
      auto it = char_frequency.find(canon);
      best = it == char_frequency.end() ? 0 : it->second;
    }
    for (char32_t c : members) {
      auto it = char_frequency.find(c);
      std::uint64_t f = it == char_frequency.end() ? 0 : it->second;
      if (f > best) {
        best = f;
        canon = c;
      }
    }
    for (char32_t c : members) {
      if (c != canon) rs.canonical.emplace(c, canon);
    }
  }

  // rewrite substitutions so every non-canonical endpoint maps onto its
  // class canon; drop identities and dups
  std::vector<RuleKey> seen;
  auto push = [&](Rule r) {
    RuleKey key{r.kind, r.a1, r.a2};
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) return;
    seen.push_back(key);
    rs.rules.push_back(r);
  };
  for (const Rule& r : scored) {
    if (r.kind != RuleKind::kSubstitute) {
      push(r);
      continue;
    }
    for (char32_t endpoint : {r.a1, r.a2}) {
      char32_t canon = rs.canon(endpoint);
      if (endpoint == canon) continue;
      Rule rewritten = r;
      rewritten.a1 = endpoint;
      rewritten.a2 = canon;
      push(rewritten);
    }
  }
  return rs;
}

RuleSet learn_tau(const NgramEmbeddings& emb, std::uint32_t max_operations,
                  std::uint64_t min_support, std::uint32_t workers) {
  std::vector<Rule> scored = score_operations(emb, min_support, workers);
  std::unordered_map<char32_t, std::uint64_t> char_frequency;
  for (std::uint32_t i = 0; i < emb.vocab.size(); ++i) {
    std::uint64_t weight = emb.vocab.freq[i] ? emb.vocab.freq[i] : 1;
    for (char32_t c : utf8::decode(emb.vocab.units[i])) {
      char_frequency[c] += weight;
    }
  }
  return make_ruleset(std::move(scored), max_operations, char_frequency);
}

std::u32string apply_tau(const RuleSet& rules, std::u32string_view g,
                         std::uint32_t max_iterations) {
  std::u32string current(g);
  for (std::uint32_t iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (const Rule& r : rules.rules) {
      std::u32string next = apply_rule_pass(r, current);
      if (next != current) {
        current = std::move(next);
        changed = true;
      }
    }
    if (!changed) break;
  }
  return current;
}

std::string apply_tau_utf8(const RuleSet& rules, std::string_view g,
                           std::uint32_t max_iterations) {
  if (rules.rules.empty()) return std::string(g);
  return utf8::encode(apply_tau(rules, utf8::decode(g), max_iterations));
}

namespace {

const char* kind_name(RuleKind kind) {
  switch (kind) {
    case RuleKind::kSubstitute: return "SUBSTITUTE";
    case RuleKind::kPredelete: return "PREDELETE";
    case RuleKind::kPostdelete: return "POSTDELETE";
  }
  return "?";
}

std::string char_field(char32_t c) {
  return c == kBoundary ? "#BOUNDARY#" : utf8::encode_char(c);
}

char32_t parse_char_field(std::string_view field, std::size_t lineno) {
  if (field == "#BOUNDARY#") return kBoundary;
  std::u32string decoded = utf8::decode(field);
  if (decoded.size() != 1) {
    throw std::runtime_error("rules line " + std::to_string(lineno) +
                             ": expected a single character");
  }
  return decoded[0];
}

}  // namespace

std::string serialize_ruleset(const RuleSet& rules) {
  std::ostringstream out;
  char buf[64];
  for (const Rule& r : rules.rules) {
    std::snprintf(buf, sizeof buf, "%.17g\t%llu", r.score,
                  (unsigned long long)r.support);
    out << kind_name(r.kind) << '\t' << char_field(r.a1) << '\t'
        << char_field(r.a2) << '\t' << buf << '\n';
  }
  std::vector<std::pair<char32_t, char32_t>> canon(rules.canonical.begin(),
                                                   rules.canonical.end());
  std::sort(canon.begin(), canon.end());
  for (auto [from, to] : canon) {
    out << "CANON\t" << char_field(from) << '\t' << char_field(to) << '\n';
  }
  return out.str();
}

RuleSet parse_ruleset(std::string_view text) {
  RuleSet rs;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      std::size_t tab = line.find('\t', pos);
      fields.push_back(line.substr(pos, tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (fields[0] == "CANON") {
      if (fields.size() != 3) {
        throw std::runtime_error("rules line " + std::to_string(lineno) +
                                 ": CANON needs 2 fields");
      }
      rs.canonical.emplace(parse_char_field(fields[1], lineno),
                           parse_char_field(fields[2], lineno));
      continue;
    }
    if (fields.size() != 5) {
      throw std::runtime_error("rules line " + std::to_string(lineno) +
                               ": expected 5 tab-separated fields");
    }
    Rule r;
    if (fields[0] == "SUBSTITUTE") r.kind = RuleKind::kSubstitute;
    else if (fields[0] == "PREDELETE") r.kind = RuleKind::kPredelete;
    else if (fields[0] == "POSTDELETE") r.kind = RuleKind::kPostdelete;
    else {
      throw std::runtime_error("rules line " + std::to_string(lineno) +
                               ": unknown rule kind \"" + fields[0] + "\"");
    }
    r.a1 = parse_char_field(fields[1], lineno);
    r.a2 = parse_char_field(fields[2], lineno);
    r.score = std::stod(fields[3]);
    r.support = std::stoull(fields[4]);
    rs.rules.push_back(r);
  }
  rs.max_operations = std::uint32_t(rs.rules.size());
  return rs;
}

void save_ruleset(const RuleSet& rules, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write rules file: " + path);
  out << serialize_ruleset(rules);
}

RuleSet load_ruleset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open rules file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_ruleset(buf.str());
}

}  // namespace nonsym
