// Command-line front end: each subcommand maps onto one library operation and
// every run writes a manifest (config echo + input digests) next to its
// output. Exit codes: 0 ok, 1 usage error, 2 data error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "nonsym/corpus.hpp"
#include "nonsym/eval.hpp"
#include "nonsym/represent.hpp"
#include "nonsym/segmenter.hpp"
#include "nonsym/trainer.hpp"
#include "nonsym/transducer.hpp"
#include "nonsym/utf8.hpp"

using json = nlohmann::json;

namespace {

std::uint64_t fnv1a_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

class Manifest {
 public:
  void set(const std::string& key, const std::string& value) {
    entries_[key] = value;
  }
  void set(const std::string& key, std::uint64_t value) {
    entries_[key] = std::to_string(value);
  }
  void set(const std::string& key, double value) {
    std::ostringstream s;
    s << value;
    entries_[key] = s.str();
  }
  void input(const std::string& name, const std::string& path) {
    char hex[32];
    std::snprintf(hex, sizeof hex, "%016llx",
                  (unsigned long long)fnv1a_digest(path));
    entries_["digest." + name] = hex;
    entries_["input." + name] = path;
  }
  void write(const std::string& output_path) const {
    std::ofstream out(output_path + ".manifest");
    for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
  }

 private:
  std::map<std::string, std::string> entries_;
};

char32_t parse_marker(const std::string& s) {
  std::u32string decoded = nonsym::utf8::decode(s);
  if (decoded.size() != 1) {
    throw CLI::ValidationError("--marker must be a single character");
  }
  return decoded[0];
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& s) {
  std::size_t colon = s.find(':');
  if (colon == std::string::npos) {
    throw CLI::ValidationError("range must look like lo:hi");
  }
  return {std::stoull(s.substr(0, colon)), std::stoull(s.substr(colon + 1))};
}

std::vector<std::size_t> parse_size_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::istringstream in(s);
  std::string field;
  while (std::getline(in, field, ',')) {
    if (!field.empty()) out.push_back(std::stoull(field));
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << text;
}

json metrics_to_json(const nonsym::Metrics& m) {
  return json{{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
              {"tp", m.tp},               {"fp", m.fp},         {"fn", m.fn}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nonsym: tokenization-free text representation toolkit"};
  app.require_subcommand(1);

  std::string input, output, marker_str = "@";
  std::uint64_t seed = 0;
  std::uint32_t workers = 1;

  // ---- normalize ----
  auto* normalize = app.add_subcommand(
      "normalize", "Collapse whitespace runs to the marker character");
  normalize->set_config("--config");
  normalize->add_option("--input", input, "raw UTF-8 text file")->required();
  normalize->add_option("--output", output, "normalized corpus file")->required();
  normalize->add_option("--marker", marker_str, "whitespace marker (default @)");
  normalize->callback([&] {
    char32_t marker = parse_marker(marker_str);
    nonsym::Corpus corpus = nonsym::load_corpus(input, marker);
    write_text(output, nonsym::utf8::encode(corpus.chars));
    Manifest m;
    m.set("subcommand", "normalize");
    m.set("marker", marker_str);
    m.input("input", input);
    m.write(output);
  });

  // ---- permute ----
  auto* permute = app.add_subcommand(
      "permute", "Apply an alphabet permutation with a whitespace mode");
  std::string mode_str = "original", perm_in, perm_out;
  permute->set_config("--config");
  permute->add_option("--input", input, "normalized corpus file")->required();
  permute->add_option("--output", output, "permuted corpus file")->required();
  permute->add_option("--seed", seed, "permutation seed")->envname("NONSYM_SEED");
  permute->add_option("--mode", mode_str, "original|substitute")
      ->check(CLI::IsMember({"original", "substitute"}));
  permute->add_option("--perm-in", perm_in, "load permutation instead of generating");
  permute->add_option("--perm-out", perm_out, "save the permutation used");
  permute->add_option("--marker", marker_str, "whitespace marker");
  permute->callback([&] {
    char32_t marker = parse_marker(marker_str);
    nonsym::Corpus corpus = nonsym::load_corpus(input, marker);
    nonsym::Permutation pi =
        perm_in.empty()
            ? nonsym::generate_permutation(nonsym::alphabet_of(corpus.chars), seed)
            : nonsym::load_permutation(perm_in);
    auto mode = mode_str == "original" ? nonsym::WhitespaceMode::kOriginal
                                       : nonsym::WhitespaceMode::kSubstitute;
    nonsym::Corpus permuted = nonsym::whitespace_mode(corpus, pi, mode, marker);
    write_text(output, nonsym::utf8::encode(permuted.chars));
    if (!perm_out.empty()) nonsym::save_permutation(pi, perm_out);
    Manifest m;
    m.set("subcommand", "permute");
    m.set("seed", seed);
    m.set("mode", mode_str);
    m.input("input", input);
    if (!perm_in.empty()) m.input("permutation", perm_in);
    m.write(output);
  });

  // ---- segment ----
  auto* segment = app.add_subcommand(
      "segment", "Multiple random segmentation of a normalized corpus");
  nonsym::SegmentationConfig seg_config;
  segment->set_config("--config");
  segment->add_option("--input", input, "normalized corpus file")->required();
  segment->add_option("--output", output, "segment stream file")->required();
  segment->add_option("--m", seg_config.m, "number of passes (default 50)");
  segment->add_option("--kmin", seg_config.kmin, "min segment length (default 3)");
  segment->add_option("--kmax", seg_config.kmax, "max segment length (default 9)");
  segment->add_option("--seed", seg_config.seed, "seed")->envname("NONSYM_SEED");
  segment->add_option("--marker", marker_str, "whitespace marker");
  segment->callback([&] {
    nonsym::Corpus corpus = nonsym::load_corpus(input, parse_marker(marker_str));
    nonsym::write_segment_stream(corpus, seg_config, output);
    Manifest m;
    m.set("subcommand", "segment");
    m.set("m", std::uint64_t(seg_config.m));
    m.set("kmin", std::uint64_t(seg_config.kmin));
    m.set("kmax", std::uint64_t(seg_config.kmax));
    m.set("seed", seg_config.seed);
    m.input("input", input);
    m.write(output);
  });

  // ---- count-ngrams ----
  auto* count = app.add_subcommand(
      "count-ngrams", "Distinct-ngram counts, symbolic vs nonsymbolic");
  std::uint32_t c_kmin = 3, c_kmax = 10;
  std::string prefixes_str;
  count->set_config("--config");
  count->add_option("--input", input, "normalized corpus file")->required();
  count->add_option("--output", output, "CSV output (prefix_size,mode,count)")
      ->required();
  count->add_option("--kmin", c_kmin, "min ngram length (default 3)");
  count->add_option("--kmax", c_kmax, "max ngram length (default 10)");
  count->add_option("--prefixes", prefixes_str,
                    "comma-separated prefix sizes in characters "
                    "(default: full corpus)");
  count->add_option("--marker", marker_str, "whitespace marker");
  count->callback([&] {
    char32_t marker = parse_marker(marker_str);
    nonsym::Corpus corpus = nonsym::load_corpus(input, marker);
    std::vector<std::size_t> prefixes =
        prefixes_str.empty() ? std::vector<std::size_t>{corpus.chars.size()}
                             : parse_size_list(prefixes_str);
    auto curve = nonsym::ngram_growth_curve(corpus, c_kmin, c_kmax, prefixes, marker);
    std::ostringstream csv;
    csv << "prefix_size,mode,count\n";
    for (const auto& point : curve) {
      csv << point.prefix_size << ','
          << (point.mode == nonsym::NgramCountMode::kSymbolic ? "symbolic"
                                                              : "nonsymbolic")
          << ',' << point.count << '\n';
    }
    write_text(output, csv.str());
    Manifest m;
    m.set("subcommand", "count-ngrams");
    m.set("kmin", std::uint64_t(c_kmin));
    m.set("kmax", std::uint64_t(c_kmax));
    m.input("input", input);
    m.write(output);
  });

  // ---- train ----
  auto* train = app.add_subcommand(
      "train", "Skipgram-with-negative-sampling training over a segment stream");
  nonsym::TrainConfig train_config;
  train->set_config("--config");
  train->add_option("--segments", input, "segment stream file")->required();
  train->add_option("--output", output, "embeddings file")->required();
  train->add_option("--dim", train_config.dim, "vector size (default 200)");
  train->add_option("--window", train_config.window, "max window in units (default 5)");
  train->add_option("--negatives", train_config.negatives, "negative samples (default 5)");
  train->add_option("--epochs", train_config.epochs, "training iterations (default 1)");
  train->add_option("--lr", train_config.initial_lr, "starting learning rate (default .025)");
  train->add_option("--min-count", train_config.min_count, "min unit frequency (default 5)");
  train->add_option("--subsample", train_config.subsample_threshold,
                    "subsampling threshold (default 0 = off)");
  train->add_option("--workers", train_config.workers, "worker threads");
  train->add_option("--seed", train_config.seed, "seed")->envname("NONSYM_SEED");
  train->callback([&] {
    nonsym::SegmentSource source = nonsym::file_source(input);
    nonsym::NgramEmbeddings emb = nonsym::train_sgns(source, train_config);
    nonsym::save_embeddings(emb, output);
    Manifest m;
    m.set("subcommand", "train");
    m.set("dim", std::uint64_t(train_config.dim));
    m.set("window", std::uint64_t(train_config.window));
    m.set("negatives", std::uint64_t(train_config.negatives));
    m.set("epochs", std::uint64_t(train_config.epochs));
    m.set("lr", double(train_config.initial_lr));
    m.set("min_count", train_config.min_count);
    m.set("seed", train_config.seed);
    m.input("segments", input);
    m.write(output);
  });

  // ---- learn-tau ----
  auto* learn = app.add_subcommand(
      "learn-tau", "Mine the string transduction from embedding geometry");
  std::uint32_t n_o = 200;
  std::uint64_t min_support = 10;
  learn->set_config("--config");
  learn->add_option("--embeddings", input, "embeddings file")->required();
  learn->add_option("--output", output, "rules file")->required();
  learn->add_option("--no", n_o, "number of operations kept (default 200)");
  learn->add_option("--min-support", min_support, "min matched pairs (default 10)");
  learn->add_option("--workers", workers, "worker threads");
  learn->callback([&] {
    nonsym::NgramEmbeddings emb = nonsym::load_embeddings(input);
    nonsym::RuleSet rules = nonsym::learn_tau(emb, n_o, min_support, workers);
    nonsym::save_ruleset(rules, output);
    Manifest m;
    m.set("subcommand", "learn-tau");
    m.set("no", std::uint64_t(n_o));
    m.set("min_support", min_support);
    m.input("embeddings", input);
    m.write(output);
  });

  // ---- apply-tau ----
  auto* apply = app.add_subcommand(
      "apply-tau", "Map every segment of a stream through the transduction");
  std::string rules_path;
  apply->set_config("--config");
  apply->add_option("--rules", rules_path, "rules file")->required();
  apply->add_option("--segments", input, "segment stream file")->required();
  apply->add_option("--output", output, "transformed segment stream")->required();
  apply->callback([&] {
    nonsym::RuleSet rules = nonsym::load_ruleset(rules_path);
    std::ifstream in(input, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open segment stream: " + input);
    std::ofstream out(output, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + output);
    std::string token;
    while (in >> token) out << nonsym::apply_tau_utf8(rules, token) << '\n';
    Manifest m;
    m.set("subcommand", "apply-tau");
    m.input("rules", rules_path);
    m.input("segments", input);
    m.write(output);
  });

  // ---- embed-context ----
  auto* embed = app.add_subcommand(
      "embed-context", "Bag or positional representation of a text span");
  std::string text, kind_str = "bag", range_str;
  nonsym::NgramRange ngram_range;
  embed->set_config("--config");
  embed->add_option("--embeddings", input, "embeddings file")->required();
  embed->add_option("--text", text, "text to represent (normalized inline)")
      ->required();
  embed->add_option("--output", output, "representation file")->required();
  embed->add_option("--kind", kind_str, "bag|positional")
      ->check(CLI::IsMember({"bag", "positional"}));
  embed->add_option("--range", range_str, "lo:hi character range (positional)");
  embed->add_option("--kmin", ngram_range.kmin, "min ngram length (default 3)");
  embed->add_option("--kmax", ngram_range.kmax, "max ngram length (default 9)");
  embed->add_option("--rules", rules_path, "optional rules file (tau)");
  embed->add_option("--marker", marker_str, "whitespace marker");
  embed->callback([&] {
    nonsym::NgramEmbeddings emb = nonsym::load_embeddings(input);
    nonsym::RuleSet rules;
    if (!rules_path.empty()) rules = nonsym::load_ruleset(rules_path);
    const nonsym::RuleSet* tau = rules_path.empty() ? nullptr : &rules;
    nonsym::Corpus normalized = nonsym::normalize(text, parse_marker(marker_str));
    std::ostringstream lines;
    auto emit = [&](const std::string& label, const std::vector<float>& v) {
      lines << label;
      char buf[32];
      for (float x : v) {
        std::snprintf(buf, sizeof buf, " %.6f", double(x));
        lines << buf;
      }
      lines << '\n';
    };
    if (kind_str == "bag") {
      nonsym::SpanVector bag =
          nonsym::bag_of_ngrams(emb, normalized.chars, ngram_range, tau);
      emit("bag", bag.values);
    } else {
      auto [lo, hi] = range_str.empty()
                          ? std::pair<std::size_t, std::size_t>{0,
                                normalized.chars.size() - 1}
                          : parse_range(range_str);
      nonsym::ContextRepr repr =
          nonsym::context_repr(emb, normalized.chars, lo, hi,
                               nonsym::ReprKind::kPositional, ngram_range, tau);
      for (const auto& pe : repr.positions) {
        emit(std::to_string(pe.position), pe.values);
      }
    }
    write_text(output, lines.str());
    Manifest m;
    m.set("subcommand", "embed-context");
    m.set("kind", kind_str);
    m.input("embeddings", input);
    m.write(output);
  });

  // ---- knn ----
  auto* knn = app.add_subcommand("knn", "Nearest ngrams by cosine, with filters");
  std::string query, marker_pos_str;
  std::size_t k = 10, exact_length = 0;
  bool alnum_only = false;
  knn->set_config("--config");
  knn->add_option("--embeddings", input, "embeddings file")->required();
  knn->add_option("--query", query, "query ngram (must be in the vocabulary)")
      ->required();
  knn->add_option("--k", k, "neighbors to return (default 10)");
  knn->add_option("--length", exact_length, "restrict candidates to this length");
  knn->add_flag("--alnum-only", alnum_only, "alphanumeric candidates only");
  knn->add_option("--marker-positions", marker_pos_str,
                  "marker must occur at one of these 1-based positions, e.g. 3,4,5,6,7");
  knn->add_option("--output", output, "CSV output (default stdout)");
  knn->add_option("--marker", marker_str, "whitespace marker");
  knn->callback([&] {
    nonsym::NgramEmbeddings emb = nonsym::load_embeddings(input);
    nonsym::KnnFilter filter;
    if (exact_length > 0) filter.exact_length = exact_length;
    filter.alnum_only = alnum_only;
    if (!marker_pos_str.empty()) {
      filter.marker_positions = parse_size_list(marker_pos_str);
    }
    filter.marker = parse_marker(marker_str);
    auto neighbors = nonsym::knn_ngrams(emb, query, k, filter);
    std::ostringstream csv;
    csv << "rank,ngram,cosine\n";
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
      csv << (i + 1) << ',' << neighbors[i].unit << ',' << neighbors[i].cosine
          << '\n';
    }
    if (output.empty()) {
      std::cout << csv.str();
    } else {
      write_text(output, csv.str());
      Manifest m;
      m.set("subcommand", "knn");
      m.set("query", query);
      m.input("embeddings", input);
      m.write(output);
    }
  });

  // ---- eval-denoise ----
  auto* denoise = app.add_subcommand(
      "eval-denoise", "Text denoising MRR over a noisy-context pool");
  nonsym::DenoiseConfig den_config;
  std::string corpus_path, repr_str = "bag", noise_range_str;
  denoise->set_config("--config");
  denoise->add_option("--embeddings", input, "embeddings file")->required();
  denoise->add_option("--corpus", corpus_path, "normalized corpus file")->required();
  denoise->add_option("--output", output, "JSON report")->required();
  denoise->add_option("--contexts", den_config.n_contexts, "pool size (clean contexts)");
  denoise->add_option("--queries", den_config.n_queries, "number of noise queries");
  denoise->add_option("--context-len", den_config.context_len, "context length (default 40)");
  denoise->add_option("--range", noise_range_str, "noise position range lo:hi (default 15:25)");
  denoise->add_option("--p-space", den_config.p_space, "probability of marker noise (default .5)");
  denoise->add_option("--repr", repr_str, "bag|positional")
      ->check(CLI::IsMember({"bag", "positional"}));
  denoise->add_option("--kmin", ngram_range.kmin, "min ngram length");
  denoise->add_option("--kmax", ngram_range.kmax, "max ngram length");
  denoise->add_option("--rules", rules_path, "optional rules file (tau)");
  denoise->add_option("--workers", workers, "worker threads");
  denoise->add_option("--seed", den_config.seed, "seed")->envname("NONSYM_SEED");
  denoise->add_option("--marker", marker_str, "whitespace marker");
  denoise->callback([&] {
    char32_t marker = parse_marker(marker_str);
    if (!noise_range_str.empty()) {
      auto [lo, hi] = parse_range(noise_range_str);
      den_config.noise_lo = lo;
      den_config.noise_hi = hi;
    }
    nonsym::NgramEmbeddings emb = nonsym::load_embeddings(input);
    nonsym::Corpus corpus = nonsym::load_corpus(corpus_path, marker);
    nonsym::RuleSet rules;
    if (!rules_path.empty()) rules = nonsym::load_ruleset(rules_path);
    nonsym::DenoisingSet set = nonsym::build_denoising_set(corpus, den_config, marker);
    auto kind = repr_str == "bag" ? nonsym::ReprKind::kBag
                                  : nonsym::ReprKind::kPositional;
    nonsym::DenoiseReport report = nonsym::eval_denoising(
        emb, set, kind, den_config, ngram_range,
        rules_path.empty() ? nullptr : &rules, workers);
    json doc;
    doc["config"] = {{"contexts", den_config.n_contexts},
                     {"queries", den_config.n_queries},
                     {"context_len", den_config.context_len},
                     {"noise_lo", den_config.noise_lo},
                     {"noise_hi", den_config.noise_hi},
                     {"p_space", den_config.p_space},
                     {"seed", den_config.seed},
                     {"repr", repr_str},
                     {"kmin", ngram_range.kmin},
                     {"kmax", ngram_range.kmax}};
    doc["mrr"] = report.mrr;
    doc["ranks"] = report.ranks;
    write_text(output, doc.dump(2) + "\n");
    Manifest m;
    m.set("subcommand", "eval-denoise");
    m.set("repr", repr_str);
    m.set("seed", den_config.seed);
    m.input("embeddings", input);
    m.input("corpus", corpus_path);
    m.write(output);
  });

  // ---- eval-typing ----
  auto* typing = app.add_subcommand(
      "eval-typing", "Entity typing micro F1 with dev-tuned thresholds");
  nonsym::TypingHyper hyper;
  std::string train_path, dev_path, test_path;
  bool no_normalize = false;
  typing->set_config("--config");
  typing->add_option("--embeddings", input, "embeddings file")->required();
  typing->add_option("--train", train_path, "train split")->required();
  typing->add_option("--dev", dev_path, "dev split")->required();
  typing->add_option("--test", test_path, "test split")->required();
  typing->add_option("--output", output, "JSON report")->required();
  typing->add_option("--kmin", ngram_range.kmin, "min ngram length");
  typing->add_option("--kmax", ngram_range.kmax, "max ngram length");
  typing->add_option("--rules", rules_path, "optional rules file (tau)");
  typing->add_option("--lambda", hyper.lambda, "L2 regularization (default 1e-4)");
  typing->add_option("--epochs", hyper.epochs, "SGD epochs (default 20)");
  typing->add_option("--lr", hyper.lr, "SGD learning rate (default .05)");
  typing->add_flag("--no-normalize", no_normalize, "skip feature L2 normalization");
  typing->add_option("--seed", hyper.seed, "seed")->envname("NONSYM_SEED");
  typing->callback([&] {
    hyper.normalize_features = !no_normalize;
    nonsym::NgramEmbeddings emb = nonsym::load_embeddings(input);
    nonsym::RuleSet rules;
    if (!rules_path.empty()) rules = nonsym::load_ruleset(rules_path);
    const nonsym::RuleSet* tau = rules_path.empty() ? nullptr : &rules;
    nonsym::TypingDataset train_set = nonsym::load_typing_dataset(train_path);
    nonsym::TypingDataset dev_set = nonsym::load_typing_dataset(dev_path);
    nonsym::TypingDataset test_set = nonsym::load_typing_dataset(test_path);
    nonsym::TypingModel model =
        nonsym::train_typing(emb, train_set, ngram_range, tau, hyper);
    nonsym::tune_thresholds(model, emb, dev_set, ngram_range, tau);
    nonsym::TypingReport report =
        nonsym::eval_typing(model, emb, test_set, ngram_range, tau);
    json doc;
    doc["config"] = {{"lambda", hyper.lambda},   {"epochs", hyper.epochs},
                     {"lr", hyper.lr},           {"seed", hyper.seed},
                     {"kmin", ngram_range.kmin}, {"kmax", ngram_range.kmax},
                     {"normalize", hyper.normalize_features}};
    doc["micro"] = metrics_to_json(report.micro);
    for (const auto& [label, m] : report.per_type) {
      doc["per_type"][label] = metrics_to_json(m);
    }
    write_text(output, doc.dump(2) + "\n");
    Manifest m;
    m.set("subcommand", "eval-typing");
    m.set("seed", hyper.seed);
    m.input("embeddings", input);
    m.input("train", train_path);
    m.input("dev", dev_path);
    m.input("test", test_path);
    m.write(output);
  });

  // ---- report ----
  auto* report_cmd = app.add_subcommand("report", "Summarize a JSON report");
  report_cmd->add_option("--input", input, "JSON report file")->required();
  report_cmd->callback([&] {
    std::ifstream in(input);
    if (!in) throw std::runtime_error("cannot open report: " + input);
    json doc = json::parse(in);
    if (doc.contains("mrr")) {
      std::cout << "MRR: " << doc["mrr"].get<double>() << " over "
                << doc["ranks"].size() << " queries\n";
    }
    if (doc.contains("micro")) {
      auto& m = doc["micro"];
      std::cout << "micro P/R/F1: " << m["precision"].get<double>() << " / "
                << m["recall"].get<double>() << " / " << m["f1"].get<double>()
                << '\n';
    }
    if (doc.contains("per_type")) {
      for (auto& [label, m] : doc["per_type"].items()) {
        std::cout << "  " << label << " F1 " << m["f1"].get<double>() << '\n';
      }
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
