// Copyright 2026 The CSG Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Command-line front end. Every subcommand accepts --config FILE with
// "key=value" lines named after its long flags; flags given on the command
// line take precedence. Keys starting with "run." are ignored so that a run
// manifest can be passed back as a config file.

#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "csg/corpus.hpp"
#include "csg/error.hpp"
#include "csg/eval.hpp"
#include "csg/manifest.hpp"
#include "csg/probe.hpp"
#include "csg/synthetic.hpp"
#include "csg/trainer.hpp"
#include "csg/vectors_io.hpp"
#include "csg/vocab.hpp"

#ifndef CSG_DEFAULT_DATA_DIR
#define CSG_DEFAULT_DATA_DIR "data/eval"
#endif

namespace csg::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kData = 3, kNumeric = 4 };

/// Replaces "--config FILE" in `args` (subcommand first) by one "--key=value"
/// argument per entry of FILE that the command line does not already set.
/// Unknown keys surface as parse errors.
inline std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      path = args[++i];
    } else if (args[i].starts_with("--config=")) {
      path = args[i].substr(9);
    } else {
      kept.push_back(args[i]);
    }
  }
  if (!path) return kept;
  std::ifstream in(*path);
  if (!in) throw UsageError("cannot open config file: " + *path);
  auto given = [&](const std::string& key) {
    const std::string flag = "--" + key;
    return std::any_of(kept.begin(), kept.end(), [&](const std::string& a) {
      return a == flag || (a.starts_with(flag) && a.size() > flag.size() && a[flag.size()] == '=');
    });
  };
  std::vector<std::string> extra;
  for (const auto& [key, value] : read_key_values(in, *path)) {
    if (key.starts_with("run.") || given(key)) continue;
    extra.push_back("--" + key + "=" + value);
  }
  kept.insert(kept.end(), extra.begin(), extra.end());
  return kept;
}

namespace detail {

template <class T>
std::string num(T v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string fixed(double v, int places) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", places, v);
  return buf;
}

inline std::string flag(bool b) { return b ? "true" : "false"; }

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline GammaSchedule parse_gamma(const std::string& s) {
  if (s == "linear") return LinearGamma{};
  if (s == "random") return RandomGamma{};
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !(v >= 0.0 && v <= 1.0)) {
    throw UsageError("--gamma must be a number in [0, 1], 'linear' or 'random'; got '" + s + "'");
  }
  return FixedGamma{v};
}

inline Architecture parse_arch(const std::string& s) {
  if (s == "sg") return Architecture::SkipGram;
  if (s == "cbow") return Architecture::Cbow;
  if (s == "csg") return Architecture::Contextual;
  throw UsageError("unknown architecture '" + s + "'");
}

inline VectorFormat parse_format(const std::string& s, const std::string& path) {
  if (s == "auto") return format_for_path(path);
  if (s == "text") return VectorFormat::Text;
  if (s == "binary") return VectorFormat::Binary;
  throw UsageError("unknown vector format '" + s + "'");
}

/// "vectors.bin" -> "vectors.txt"; anything else gets ".txt" appended.
inline std::string text_sibling(const std::string& path) {
  std::filesystem::path p(path);
  if (p.extension() == ".bin") return p.replace_extension(".txt").string();
  return path + ".txt";
}

inline std::string resolve_dataset(const std::string& name, const std::string& data_dir,
                                   const std::vector<std::pair<std::string, std::string>>& known) {
  for (const auto& [key, file] : known) {
    if (name == key) {
      const auto path = (std::filesystem::path(data_dir) / file).string();
      if (!std::filesystem::exists(path)) throw UsageError("dataset '" + name + "' not found at " + path);
      return path;
    }
  }
  if (!std::filesystem::exists(name)) throw UsageError("dataset '" + name + "' is neither a known name nor a file");
  return name;
}

inline std::string default_data_dir() {
  if (const char* env = std::getenv("CSG_DATA_DIR")) return env;
  return CSG_DEFAULT_DATA_DIR;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

inline void emit_summary(const KeyValues& kv, const std::string& path, std::ostream& out) {
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path);
  for (const auto& [k, v] : kv) f << k << '=' << v << '\n';
}

inline CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& description) {
  CLI::App* sub = app.add_subcommand(name, description);
  // Consumed by expand_config before parsing; declared here for --help.
  sub->add_option("--config", "key=value file of flag defaults");
  return sub;
}

class Logger {
 public:
  explicit Logger(std::ostream& err) : err_(err) {}
  void operator()(const std::string& msg) const { err_ << "csg: " << msg << '\n' << std::flush; }

 private:
  std::ostream& err_;
};

// ---------------------------------------------------------------- preprocess

struct PreprocessArgs {
  std::string input = "-";
  std::string output = "-";
  std::size_t min_tokens = 10;
  double sample_rate = 1.0;
  std::uint64_t seed = 1;
  std::size_t chunk_len = 1000;
  bool unstructured = false;
};

inline void add_preprocess(CLI::App& app, PreprocessArgs& a) {
  auto* sub = add_command(app, "preprocess", "Lowercase, split and sample raw text into one sentence per line");
  sub->add_option("--input", a.input, "Raw text file, '-' for stdin")->capture_default_str();
  sub->add_option("--output", a.output, "Output file, '-' for stdout")->capture_default_str();
  sub->add_option("--min-tokens", a.min_tokens, "Drop sentences shorter than this")->capture_default_str();
  sub->add_option("--sample-rate", a.sample_rate, "Keep each sentence with this probability")->capture_default_str();
  sub->add_option("--seed", a.seed, "Sampling seed")->capture_default_str();
  sub->add_option("--chunk-len", a.chunk_len, "Pseudo-sentence length in --unstructured mode")->capture_default_str();
  sub->add_flag("--unstructured", a.unstructured, "Input is one token stream; cut it into fixed-length chunks");
}

inline int run_preprocess(const PreprocessArgs& a, std::ostream& stdout_stream, const Logger& log) {
  const auto started = std::chrono::steady_clock::now();
  std::ifstream in_file;
  std::istream* in = &std::cin;
  if (a.input != "-") {
    if (!std::filesystem::exists(a.input)) throw UsageError("input file not found: " + a.input);
    in_file = open_in(a.input);
    in = &in_file;
  }
  std::ofstream out_file;
  std::ostream* out = &stdout_stream;
  if (a.output != "-") {
    out_file.open(a.output, std::ios::binary);
    if (!out_file) throw DataError("cannot write " + a.output);
    out = &out_file;
  }

  SentenceSampler sampler(a.sample_rate, a.seed);
  std::uint64_t kept = 0, kept_tokens = 0;
  auto sink = [&](Sentence&& s) {
    if (!sampler.keep()) return;
    ++kept;
    kept_tokens += s.tokens.size();
    write_sentence(*out, s);
  };

  Fnv1a checksum;
  CorpusStats stats;
  std::string line;
  if (a.unstructured) {
    Chunker chunker(a.chunk_len);
    std::string lowered;
    while (std::getline(*in, line)) {
      checksum.update(line);
      checksum.update("\n");
      stats.invalid_utf8 += utf8::lowercase(line, lowered);
      for_each_token(lowered, [&](std::string_view t) {
        ++stats.total_tokens;
        chunker.push(std::string(t), sink);
      });
    }
    chunker.finish(sink);
  } else {
    if (a.min_tokens < 1) throw UsageError("--min-tokens must be >= 1");
    Preprocessor pre(a.min_tokens);
    while (std::getline(*in, line)) {
      checksum.update(line);
      checksum.update("\n");
      pre.feed_line(line, sink);
    }
    stats = pre.stats();
  }
  out->flush();
  if (!*out) throw DataError("failed writing " + a.output);

  log("kept " + std::to_string(kept) + " sentences (" + std::to_string(kept_tokens) + " tokens); dropped " +
      std::to_string(stats.sentences_dropped) + " short sentences");
  if (stats.invalid_utf8 > 0) log(std::to_string(stats.invalid_utf8) + " invalid UTF-8 sequences replaced");

  if (a.output != "-") {
    RunManifest m;
    m.set("input", a.input);
    m.set("output", a.output);
    m.set("min-tokens", std::to_string(a.min_tokens));
    m.set("sample-rate", num(a.sample_rate));
    m.set("seed", std::to_string(a.seed));
    m.set("chunk-len", std::to_string(a.chunk_len));
    m.set("unstructured", flag(a.unstructured));
    m.note("input_checksum", hex64(checksum.digest()));
    m.note("sentences_kept", std::to_string(kept));
    m.note("tokens_kept", std::to_string(kept_tokens));
    m.note("sentences_dropped", std::to_string(stats.sentences_dropped));
    m.note("invalid_utf8", std::to_string(stats.invalid_utf8));
    m.note("wall_seconds", fixed(std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count(), 3));
    m.write(a.output + ".manifest");
  }
  return kOk;
}

// --------------------------------------------------------------------- train

struct TrainArgs {
  std::string corpus;
  std::string output;
  std::string vocab;
  std::string arch = "csg";
  std::string fusion = "ef";
  std::string gamma = "linear";
  std::size_t dim = 200;
  std::size_t window = 5;
  std::size_t negative = 5;
  int epochs = 5;
  float lr = 0.025f;
  std::uint64_t min_count = 5;
  int threads = 1;
  std::uint64_t seed = 1;
  double subsample = 0;
  bool dynamic_window = false;
  bool exclude_target = false;
  std::size_t noise_table_size = NoiseTable::kDefaultSize;
  bool save_text = false;
  std::string probe_center;
  std::string probe_words;
  std::string probe_output;

  CLI::Option* fusion_opt = nullptr;
  CLI::Option* gamma_opt = nullptr;
  CLI::Option* subsample_opt = nullptr;
};

inline void add_train(CLI::App& app, TrainArgs& a) {
  auto* sub = add_command(app, "train", "Train word vectors on a preprocessed corpus");
  sub->add_option("--corpus", a.corpus, "Preprocessed corpus, one sentence per line")->required();
  sub->add_option("--output", a.output, "Vector file; .bin selects the binary format")->required();
  sub->add_option("--vocab", a.vocab, "Reuse a saved vocabulary instead of counting the corpus");
  sub->add_option("--arch", a.arch, "sg, cbow or csg")
      ->check(CLI::IsMember({"sg", "cbow", "csg"}))
      ->capture_default_str();
  a.fusion_opt = sub->add_option("--fusion", a.fusion, "ef (early) or lf (late); csg only")
                     ->check(CLI::IsMember({"ef", "lf"}))
                     ->capture_default_str();
  a.gamma_opt =
      sub->add_option("--gamma", a.gamma, "Fusion weight in [0,1], linear or random; csg only")->capture_default_str();
  sub->add_option("--dim", a.dim, "Vector dimension")->capture_default_str();
  sub->add_option("--window", a.window, "Context window radius")->capture_default_str();
  sub->add_option("--negative", a.negative, "Negative samples per positive")->capture_default_str();
  sub->add_option("--epochs", a.epochs, "Training epochs")->capture_default_str();
  sub->add_option("--lr", a.lr, "Initial learning rate")->capture_default_str();
  sub->add_option("--min-count", a.min_count, "Discard words rarer than this")->capture_default_str();
  sub->add_option("--threads", a.threads, "Worker threads")->capture_default_str();
  sub->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  a.subsample_opt = sub->add_option("--subsample", a.subsample, "Frequent-word subsampling threshold (off by default)");
  sub->add_flag("--dynamic-window", a.dynamic_window, "Shrink the window at random per center word");
  sub->add_flag("--exclude-target-from-context", a.exclude_target, "Leave the predicted word out of the context vector");
  sub->add_option("--noise-table-size", a.noise_table_size, "Unigram noise table entries")->capture_default_str();
  sub->add_flag("--save-text", a.save_text, "Also write the vectors in text format");
  sub->add_option("--probe-center", a.probe_center, "Log prediction scores for this center word");
  sub->add_option("--probe-words", a.probe_words, "Comma-separated neighbor words to track");
  sub->add_option("--probe-output", a.probe_output, "Probe CSV path (default <output>.probe.csv)");
}

inline TrainConfig to_config(const TrainArgs& a) {
  TrainConfig cfg;
  cfg.architecture = parse_arch(a.arch);
  const bool csg = cfg.architecture == Architecture::Contextual;
  if (!csg && (a.fusion_opt->count() > 0 || a.gamma_opt->count() > 0)) {
    throw UsageError("--fusion and --gamma require --arch csg");
  }
  if (!csg && a.exclude_target) throw UsageError("--exclude-target-from-context requires --arch csg");
  if (csg) {
    cfg.fusion.method = a.fusion == "lf" ? Fusion::Late : Fusion::Early;
    cfg.fusion.schedule = parse_gamma(a.gamma);
  }
  cfg.dim = a.dim;
  cfg.window = a.window;
  cfg.negatives = a.negative;
  cfg.epochs = a.epochs;
  cfg.initial_lr = a.lr;
  cfg.min_count = a.min_count;
  cfg.threads = a.threads;
  cfg.seed = a.seed;
  if (a.subsample_opt->count() > 0) cfg.subsample = a.subsample;
  cfg.dynamic_window = a.dynamic_window;
  cfg.exclude_target_from_context = a.exclude_target;
  cfg.noise_table_size = a.noise_table_size;
  cfg.validate();
  return cfg;
}

inline int run_train(const TrainArgs& a, const Logger& log) {
  const auto started = std::chrono::steady_clock::now();
  const TrainConfig cfg = to_config(a);
  if (a.probe_center.empty() && !a.probe_words.empty()) throw UsageError("--probe-words requires --probe-center");
  if (!std::filesystem::exists(a.corpus)) throw UsageError("corpus not found: " + a.corpus);
  if (!a.vocab.empty() && !std::filesystem::exists(a.vocab)) throw UsageError("vocabulary not found: " + a.vocab);

  const CorpusText corpus = CorpusText::open(a.corpus);
  Vocabulary vocab;
  if (a.vocab.empty()) {
    vocab = build_vocab(corpus, cfg.min_count);
  } else {
    auto in = open_in(a.vocab);
    vocab = Vocabulary::load(in);
  }
  log("vocabulary: " + std::to_string(vocab.size()) + " words, " + std::to_string(vocab.total_count()) + " tokens");

  std::optional<PredictionProbe> probe;
  if (!a.probe_center.empty()) probe.emplace(vocab, a.probe_center, split_list(a.probe_words));

  TrainHooks hooks;
  hooks.probe = probe ? &*probe : nullptr;
  hooks.on_epoch = [&](const EpochReport& r) {
    log("epoch " + std::to_string(r.epoch) + "/" + std::to_string(cfg.epochs) + ": " + std::to_string(r.words) +
        " words, " + fixed(r.words_per_sec, 0) + " words/s, lr " + fixed(r.lr, 6) + ", gamma " + fixed(r.gamma, 3));
  };
  const TrainResult result = train(corpus, vocab, cfg, hooks);

  RunManifest m;
  m.set("corpus", a.corpus);
  m.set("output", a.output);
  if (!a.vocab.empty()) m.set("vocab", a.vocab);
  m.set("arch", a.arch);
  if (cfg.architecture == Architecture::Contextual) {
    m.set("fusion", a.fusion);
    m.set("gamma", a.gamma);
    m.set("exclude-target-from-context", flag(a.exclude_target));
  }
  m.set("dim", std::to_string(cfg.dim));
  m.set("window", std::to_string(cfg.window));
  m.set("negative", std::to_string(cfg.negatives));
  m.set("epochs", std::to_string(cfg.epochs));
  m.set("lr", num(cfg.initial_lr));
  m.set("min-count", std::to_string(cfg.min_count));
  m.set("threads", std::to_string(cfg.threads));
  m.set("seed", std::to_string(cfg.seed));
  if (cfg.subsample) m.set("subsample", num(*cfg.subsample));
  m.set("dynamic-window", flag(cfg.dynamic_window));
  m.set("noise-table-size", std::to_string(cfg.noise_table_size));
  m.set("save-text", flag(a.save_text));
  if (probe) {
    m.set("probe-center", a.probe_center);
    m.set("probe-words", a.probe_words);
  }

  const auto words = vocab.words();
  save_vectors(a.output, words, result.model.input, format_for_path(a.output));
  m.note("output.vectors", a.output);
  if (a.save_text && format_for_path(a.output) != VectorFormat::Text) {
    const auto text_path = text_sibling(a.output);
    save_vectors(text_path, words, result.model.input, VectorFormat::Text);
    m.note("output.text", text_path);
  }
  const auto vocab_path = a.output + ".vocab";
  {
    std::ofstream vout(vocab_path);
    if (!vout) throw DataError("cannot write " + vocab_path);
    vocab.save(vout);
  }
  m.note("output.vocab", vocab_path);
  if (probe) {
    const auto probe_path = a.probe_output.empty() ? a.output + ".probe.csv" : a.probe_output;
    std::ofstream pout(probe_path);
    if (!pout) throw DataError("cannot write " + probe_path);
    write_probe_csv(pout, probe->records());
    m.note("output.probe", probe_path);
    m.set("probe-output", probe_path);
  }

  m.note("corpus_checksum", hex64(fnv1a(corpus.view())));
  m.note("corpus_bytes", std::to_string(corpus.size()));
  m.note("vocab_size", std::to_string(vocab.size()));
  for (const auto& r : result.epochs) {
    const auto prefix = "epoch." + std::to_string(r.epoch) + ".";
    m.note(prefix + "gamma", num(r.gamma));
    m.note(prefix + "lr", num(r.lr));
    m.note(prefix + "words", std::to_string(r.words));
    m.note(prefix + "words_per_sec", fixed(r.words_per_sec, 0));
  }
  m.note("wall_seconds", fixed(std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count(), 3));
  m.write(a.output + ".manifest");
  log("wrote " + a.output);
  return kOk;
}

// ---------------------------------------------------------------- evaluation

struct EvalArgs {
  std::string vectors;
  std::string format = "auto";
  std::string dataset;
  std::string data_dir = default_data_dir();
  std::string summary;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

inline CLI::App* add_eval_common(CLI::App& app, const std::string& name, const std::string& description,
                                 const std::string& dataset_help, EvalArgs& a) {
  auto* sub = add_command(app, name, description);
  sub->add_option("--vectors", a.vectors, "word2vec vector file")->required();
  sub->add_option("--format", a.format, "auto, text or binary")
      ->check(CLI::IsMember({"auto", "text", "binary"}))
      ->capture_default_str();
  sub->add_option("--dataset", a.dataset, dataset_help)->required();
  sub->add_option("--data-dir", a.data_dir, "Directory holding the named datasets")->capture_default_str();
  sub->add_option("--summary", a.summary, "Also write the key=value summary to this file");
  return sub;
}

inline Embeddings load_embeddings(const EvalArgs& a, const Logger& log) {
  if (!std::filesystem::exists(a.vectors)) throw UsageError("vector file not found: " + a.vectors);
  const auto wv = load_vectors(a.vectors, parse_format(a.format, a.vectors));
  log("loaded " + std::to_string(wv.words.size()) + " vectors of dimension " + std::to_string(wv.vectors.dim()));
  return Embeddings(wv);
}

inline const std::vector<std::pair<std::string, std::string>>& similarity_datasets() {
  static const std::vector<std::pair<std::string, std::string>> k = {
      {"simlex", "simlex999.txt"}, {"ws353", "wordsim353.tsv"}, {"men", "men.txt"}};
  return k;
}

inline const std::vector<std::pair<std::string, std::string>>& analogy_datasets() {
  static const std::vector<std::pair<std::string, std::string>> k = {{"google", "questions-words.txt"},
                                                                     {"msr", "msr.txt"}};
  return k;
}

inline int run_eval_sim(const EvalArgs& a, std::ostream& out, const Logger& log) {
  const auto path = resolve_dataset(a.dataset, a.data_dir, similarity_datasets());
  const Embeddings emb = load_embeddings(a, log);
  auto in = open_in(path);
  const auto ds = load_similarity(in, a.dataset);
  const auto r = eval_similarity(emb, ds);
  log(a.dataset + ": rho x100 = " + fixed(100.0 * r.rho, 2) + " over " + std::to_string(r.pairs_used) + " pairs (" +
      std::to_string(r.pairs_skipped) + " skipped)");
  emit_summary({{"dataset", a.dataset},
                {"vectors", a.vectors},
                {"rho", num(r.rho)},
                {"rho_x100", fixed(100.0 * r.rho, 2)},
                {"pairs_used", std::to_string(r.pairs_used)},
                {"pairs_skipped", std::to_string(r.pairs_skipped)}},
               a.summary, out);
  return kOk;
}

inline AnalogyDataset load_analogy_file(const std::string& path, const std::string& name) {
  auto in = open_in(path);
  std::string line;
  bool sectioned = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == ':') {
      sectioned = true;
      break;
    }
  }
  in.clear();
  in.seekg(0);
  return sectioned ? load_google_analogy(in, name) : load_msr_analogy(in, name);
}

inline int run_eval_analogy(const EvalArgs& a, std::ostream& out, const Logger& log) {
  const auto path = resolve_dataset(a.dataset, a.data_dir, analogy_datasets());
  const Embeddings emb = load_embeddings(a, log);
  const auto ds = load_analogy_file(path, a.dataset);
  const auto r = eval_analogy(emb, ds, a.threads);
  KeyValues kv = {{"dataset", a.dataset}, {"vectors", a.vectors}};
  auto add = [&](const std::string& prefix, const SectionResult& s) {
    kv.emplace_back(prefix + ".accuracy", fixed(100.0 * s.accuracy(), 2));
    kv.emplace_back(prefix + ".correct", std::to_string(s.correct));
    kv.emplace_back(prefix + ".answerable", std::to_string(s.answerable));
    kv.emplace_back(prefix + ".unanswerable", std::to_string(s.unanswerable));
  };
  add("overall", r.overall);
  add("semantic", r.semantic);
  add("syntactic", r.syntactic);
  for (const auto& s : r.sections) add("section." + s.name, s);
  log(a.dataset + ": accuracy " + fixed(100.0 * r.overall.accuracy(), 2) + "% (semantic " +
      fixed(100.0 * r.semantic.accuracy(), 2) + "%, syntactic " + fixed(100.0 * r.syntactic.accuracy(), 2) + "%), " +
      std::to_string(r.overall.unanswerable) + " unanswerable");
  emit_summary(kv, a.summary, out);
  return kOk;
}

// -------------------------------------------------------------- probe-report

struct ProbeReportArgs {
  std::vector<std::string> inputs;
  std::vector<std::string> labels;
  std::string summary;
};

inline void add_probe_report(CLI::App& app, ProbeReportArgs& a) {
  auto* sub = add_command(app, "probe-report", "Tabulate probe CSV files by word and epoch");
  sub->add_option("--probe", a.inputs, "Probe CSV files written by train")->required();
  sub->add_option("--label", a.labels, "Column labels, one per probe file (default: file names)");
  sub->add_option("--summary", a.summary, "Also write the key=value summary to this file");
}

inline int run_probe_report(const ProbeReportArgs& a, std::ostream& out) {
  if (!a.labels.empty() && a.labels.size() != a.inputs.size()) {
    throw UsageError("--label must be given once per --probe file");
  }
  struct Table {
    std::string label;
    std::vector<ProbeRecord> records;
  };
  std::vector<Table> tables;
  std::vector<std::string> words;
  int max_epoch = 0;
  for (std::size_t i = 0; i < a.inputs.size(); ++i) {
    if (!std::filesystem::exists(a.inputs[i])) throw UsageError("probe file not found: " + a.inputs[i]);
    auto in = open_in(a.inputs[i]);
    Table t{a.labels.empty() ? std::filesystem::path(a.inputs[i]).stem().string() : a.labels[i], read_probe_csv(in)};
    for (const auto& r : t.records) {
      max_epoch = std::max(max_epoch, r.epoch);
      if (std::find(words.begin(), words.end(), r.context_word) == words.end()) words.push_back(r.context_word);
    }
    tables.push_back(std::move(t));
  }

  KeyValues kv;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-14s %-10s", "word", "model");
  out << buf;
  for (int e = 1; e <= max_epoch; ++e) {
    std::snprintf(buf, sizeof buf, " %8s", ("ep" + std::to_string(e)).c_str());
    out << buf;
  }
  out << '\n';
  for (const auto& w : words) {
    for (const auto& t : tables) {
      std::snprintf(buf, sizeof buf, "%-14s %-10s", w.c_str(), t.label.c_str());
      out << buf;
      for (int e = 1; e <= max_epoch; ++e) {
        const auto it = std::find_if(t.records.begin(), t.records.end(),
                                     [&](const ProbeRecord& r) { return r.epoch == e && r.context_word == w; });
        std::string cell = "-";
        if (it != t.records.end() && it->mean_score_x100) {
          cell = fixed(*it->mean_score_x100, 2);
          kv.emplace_back(t.label + "." + w + ".epoch" + std::to_string(e), cell);
        }
        std::snprintf(buf, sizeof buf, " %8s", cell.c_str());
        out << buf;
      }
      out << '\n';
    }
  }
  if (!a.summary.empty()) {
    std::ofstream f(a.summary);
    if (!f) throw DataError("cannot write " + a.summary);
    for (const auto& [k, v] : kv) f << k << '=' << v << '\n';
  }
  return kOk;
}

// ------------------------------------------------------------------- convert

struct ConvertArgs {
  std::string input;
  std::string output;
  std::string from = "auto";
  std::string to = "auto";
};

inline void add_convert(CLI::App& app, ConvertArgs& a) {
  auto* sub = add_command(app, "convert", "Transcode vectors between the text and binary formats");
  sub->add_option("--input", a.input, "Source vector file")->required();
  sub->add_option("--output", a.output, "Destination vector file")->required();
  sub->add_option("--from", a.from, "auto, text or binary")
      ->check(CLI::IsMember({"auto", "text", "binary"}))
      ->capture_default_str();
  sub->add_option("--to", a.to, "auto, text or binary")
      ->check(CLI::IsMember({"auto", "text", "binary"}))
      ->capture_default_str();
}

inline int run_convert(const ConvertArgs& a, const Logger& log) {
  if (!std::filesystem::exists(a.input)) throw UsageError("input file not found: " + a.input);
  const auto from = parse_format(a.from, a.input);
  const auto to = parse_format(a.to, a.output);
  const auto wv = load_vectors(a.input, from);
  save_vectors(a.output, wv.words, wv.vectors, to);
  RunManifest m;
  m.set("input", a.input);
  m.set("output", a.output);
  m.set("from", from == VectorFormat::Text ? "text" : "binary");
  m.set("to", to == VectorFormat::Text ? "text" : "binary");
  m.note("rows", std::to_string(wv.words.size()));
  m.note("dim", std::to_string(wv.vectors.dim()));
  m.write(a.output + ".manifest");
  log("converted " + std::to_string(wv.words.size()) + " vectors to " + a.output);
  return kOk;
}

// --------------------------------------------------------------------- bench

struct BenchArgs {
  std::string corpus;
  std::size_t tokens = 2'000'000;
  std::size_t vocab_size = 30'000;
  std::string archs = "sg,cbow,csg-ef,csg-lf";
  std::size_t dim = 200;
  std::size_t window = 5;
  std::size_t negative = 5;
  std::uint64_t min_count = 5;
  int threads = 1;
  std::uint64_t seed = 1;
  std::string summary;
};

inline void add_bench(CLI::App& app, BenchArgs& a) {
  auto* sub = add_command(app, "bench", "Measure training throughput per architecture");
  sub->add_option("--corpus", a.corpus, "Corpus to train on (default: synthetic Zipf text)");
  sub->add_option("--tokens", a.tokens, "Synthetic corpus length")->capture_default_str();
  sub->add_option("--vocab-size", a.vocab_size, "Synthetic vocabulary size")->capture_default_str();
  sub->add_option("--arch", a.archs, "Comma-separated list of sg, cbow, csg-ef, csg-lf")->capture_default_str();
  sub->add_option("--dim", a.dim, "Vector dimension")->capture_default_str();
  sub->add_option("--window", a.window, "Context window radius")->capture_default_str();
  sub->add_option("--negative", a.negative, "Negative samples per positive")->capture_default_str();
  sub->add_option("--min-count", a.min_count, "Discard words rarer than this")->capture_default_str();
  sub->add_option("--threads", a.threads, "Worker threads")->capture_default_str();
  sub->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  sub->add_option("--summary", a.summary, "Also write the key=value summary to this file");
}

inline int run_bench(const BenchArgs& a, std::ostream& out, const Logger& log) {
  CorpusText corpus = [&] {
    if (a.corpus.empty()) return CorpusText::from_string(zipf_corpus(a.tokens, a.vocab_size, 20, a.seed));
    if (!std::filesystem::exists(a.corpus)) throw UsageError("corpus not found: " + a.corpus);
    return CorpusText::open(a.corpus);
  }();
  const Vocabulary vocab = build_vocab(corpus, a.min_count);
  KeyValues kv = {{"threads", std::to_string(a.threads)},
                  {"dim", std::to_string(a.dim)},
                  {"negative", std::to_string(a.negative)},
                  {"window", std::to_string(a.window)},
                  {"vocab_size", std::to_string(vocab.size())}};
  for (const auto& name : split_list(a.archs)) {
    TrainConfig cfg;
    cfg.dim = a.dim;
    cfg.window = a.window;
    cfg.negatives = a.negative;
    cfg.epochs = 1;
    cfg.min_count = a.min_count;
    cfg.threads = a.threads;
    cfg.seed = a.seed;
    if (name == "sg") {
      cfg.architecture = Architecture::SkipGram;
    } else if (name == "cbow") {
      cfg.architecture = Architecture::Cbow;
    } else if (name == "csg-ef" || name == "csg-lf") {
      cfg.architecture = Architecture::Contextual;
      cfg.fusion = {name == "csg-ef" ? Fusion::Early : Fusion::Late, FixedGamma{0.5}};
    } else {
      throw UsageError("unknown bench architecture '" + name + "'");
    }
    const auto result = train(corpus, vocab, cfg);
    const double per_thread = result.epochs.front().words_per_sec / a.threads;
    log(name + ": " + fixed(per_thread, 0) + " tokens/s/thread");
    kv.emplace_back(name + ".tokens_per_sec_per_thread", fixed(per_thread, 0));
  }
  emit_summary(kv, a.summary, out);
  return kOk;
}

}  // namespace detail

/// Runs the command line `args` (program name first). Returns the exit code.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using namespace detail;
  CLI::App app{"csg: contextual skip-gram word vectors"};
  app.require_subcommand(1);
  app.name(args.empty() ? "csg" : std::filesystem::path(args.front()).filename().string());

  PreprocessArgs pre;
  TrainArgs tr;
  EvalArgs sim, ana;
  ProbeReportArgs probe;
  ConvertArgs conv;
  BenchArgs bench;
  add_preprocess(app, pre);
  add_train(app, tr);
  add_eval_common(app, "eval-sim", "Word similarity: Spearman rho against human scores",
                  "simlex, ws353, men or a file path", sim);
  add_eval_common(app, "eval-analogy", "Word analogy accuracy with 3CosAdd", "google, msr or a file path", ana)
      ->add_option("--threads", ana.threads, "Worker threads")
      ->capture_default_str();
  add_probe_report(app, probe);
  add_convert(app, conv);
  add_bench(app, bench);

  if (!args.empty()) args.erase(args.begin());
  try {
    args = expand_config(std::move(args));
  } catch (const UsageError& e) {
    err << "csg: error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "csg: error: " << e.what() << '\n';
    return kData;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  const Logger log(err);
  try {
    if (app.got_subcommand("preprocess")) return run_preprocess(pre, out, log);
    if (app.got_subcommand("train")) return run_train(tr, log);
    if (app.got_subcommand("eval-sim")) return run_eval_sim(sim, out, log);
    if (app.got_subcommand("eval-analogy")) return run_eval_analogy(ana, out, log);
    if (app.got_subcommand("probe-report")) return run_probe_report(probe, out);
    if (app.got_subcommand("convert")) return run_convert(conv, log);
    if (app.got_subcommand("bench")) return run_bench(bench, out, log);
  } catch (const UsageError& e) {
    err << "csg: error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericError& e) {
    err << "csg: numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    err << "csg: error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}

inline int run(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc)); }

}  // namespace csg::cli
