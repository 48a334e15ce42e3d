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

// Intrinsic evaluation: word similarity (Spearman rank correlation of cosine
// similarities against human scores) and word analogy (3CosAdd, top-1).
// Both work on unit-normalized input vectors; words missing from the
// embedding make a pair or question unanswerable and are counted, not scored.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "csg/corpus.hpp"
#include "csg/error.hpp"
#include "csg/model.hpp"
#include "csg/utf8.hpp"
#include "csg/vectors_io.hpp"
#include "csg/vocab.hpp"

namespace csg {

/// 1-based ranks; tied values share the mean of the ranks they span.
inline std::vector<double> fractional_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

/// Spearman's rho: Pearson correlation of fractional ranks.
inline double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw UsageError("spearman: inputs differ in length");
  if (xs.size() < 2) throw UndefinedCorrelationError("spearman: need at least two observations");
  const auto rx = fractional_ranks(xs);
  const auto ry = fractional_ranks(ys);
  const double n = static_cast<double>(rx.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) throw UndefinedCorrelationError("spearman: an input has no rank variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

struct SimilarityPair {
  std::string word_a;
  std::string word_b;
  double human_score = 0;
};

struct SimilarityDataset {
  std::string name;
  std::vector<SimilarityPair> pairs;
};

enum class SectionKind { Semantic, Syntactic };

struct AnalogyQuestion {
  std::string a, b, c, d;
};

struct AnalogySection {
  std::string name;
  SectionKind kind = SectionKind::Semantic;
  std::vector<AnalogyQuestion> questions;
};

struct AnalogyDataset {
  std::string name;
  std::vector<AnalogySection> sections;
};

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out;
  utf8::lowercase(s, out);
  return out;
}

inline std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  const char sep = line.find('\t') != std::string_view::npos ? '\t' : line.find(',') != std::string_view::npos ? ',' : 0;
  if (sep == 0) {
    for_each_token(line, [&](std::string_view t) { fields.emplace_back(t); });
    return fields;
  }
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(sep, start);
    std::string_view f = line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    while (!f.empty() && is_space(f.front())) f.remove_prefix(1);
    while (!f.empty() && is_space(f.back())) f.remove_suffix(1);
    fields.emplace_back(f);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return fields;
}

inline std::optional<double> parse_number(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace detail

/// Parses word-pair similarity files: SimLex-999 (tab-separated, header with a
/// SimLex999 column), WordSim-353 (tab- or comma-separated, optional header),
/// MEN (space-separated triples). Lines starting with '#' are comments.
inline SimilarityDataset load_similarity(std::istream& in, std::string name) {
  SimilarityDataset ds{std::move(name), {}};
  std::size_t score_col = 2;
  bool seen_data = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
    const auto fields = detail::split_fields(line);
    const auto where = ds.name + " line " + std::to_string(lineno);
    if (fields.size() < 3) throw DataError(where + ": expected word, word, score");
    const auto score = fields.size() > score_col ? detail::parse_number(fields[score_col]) : std::nullopt;
    if (!score) {
      if (seen_data) throw DataError(where + ": bad score");
      // Header row: prefer a named score column.
      for (std::size_t i = 2; i < fields.size(); ++i) {
        const auto f = detail::lower(fields[i]);
        if (f == "simlex999" || f.starts_with("human")) score_col = i;
      }
      seen_data = true;
      continue;
    }
    seen_data = true;
    ds.pairs.push_back({detail::lower(fields[0]), detail::lower(fields[1]), *score});
  }
  if (ds.pairs.empty()) throw DataError(ds.name + ": no similarity pairs");
  return ds;
}

/// Google analogy format: ": section" headers followed by "a b c d" lines.
/// Sections named gram* are syntactic, the rest semantic.
inline AnalogyDataset load_google_analogy(std::istream& in, std::string name) {
  AnalogyDataset ds{std::move(name), {}};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line[0] == ':') {
      std::vector<std::string> parts;
      for_each_token(std::string_view(line).substr(1), [&](std::string_view t) { parts.emplace_back(t); });
      if (parts.empty()) throw DataError(ds.name + " line " + std::to_string(lineno) + ": empty section name");
      const auto kind = parts[0].starts_with("gram") ? SectionKind::Syntactic : SectionKind::Semantic;
      ds.sections.push_back({parts[0], kind, {}});
      continue;
    }
    std::vector<std::string> w;
    for_each_token(line, [&](std::string_view t) { w.push_back(detail::lower(t)); });
    if (w.size() != 4) throw DataError(ds.name + " line " + std::to_string(lineno) + ": expected four words");
    if (ds.sections.empty()) ds.sections.push_back({"default", SectionKind::Semantic, {}});
    ds.sections.back().questions.push_back({w[0], w[1], w[2], w[3]});
  }
  if (ds.sections.empty()) throw DataError(ds.name + ": no analogy questions");
  return ds;
}

/// MSR format: four words per line, all syntactic.
inline AnalogyDataset load_msr_analogy(std::istream& in, std::string name) {
  AnalogyDataset ds{name, {{name, SectionKind::Syntactic, {}}}};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::vector<std::string> w;
    for_each_token(line, [&](std::string_view t) { w.push_back(detail::lower(t)); });
    if (w.empty()) continue;
    if (w.size() != 4) throw DataError(ds.name + " line " + std::to_string(lineno) + ": expected four words");
    ds.sections[0].questions.push_back({w[0], w[1], w[2], w[3]});
  }
  if (ds.sections[0].questions.empty()) throw DataError(ds.name + ": no analogy questions");
  return ds;
}

/// Unit-normalized embedding table with word lookup. Zero vectors stay zero.
class Embeddings {
 public:
  Embeddings(std::vector<std::string> words, const Matrix& vectors)
      : words_(std::move(words)), unit_(vectors.rows(), vectors.dim()) {
    if (words_.size() != vectors.rows()) throw UsageError("embedding words and vectors disagree in size");
    for (std::size_t r = 0; r < words_.size(); ++r) {
      ids_.emplace(words_[r], r);
      const float* src = vectors.row_ptr(r);
      double norm = 0;
      for (std::size_t c = 0; c < vectors.dim(); ++c) norm += static_cast<double>(src[c]) * src[c];
      norm = std::sqrt(norm);
      float* dst = unit_.row_ptr(r);
      for (std::size_t c = 0; c < vectors.dim(); ++c) dst[c] = norm > 0 ? static_cast<float>(src[c] / norm) : 0.0f;
    }
  }

  /// Input vectors of a trained model.
  Embeddings(const Vocabulary& vocab, const Model& model)
      : Embeddings(std::vector<std::string>(vocab.words().begin(), vocab.words().end()), model.input) {}

  explicit Embeddings(const WordVectors& wv) : Embeddings(wv.words, wv.vectors) {}

  std::size_t size() const { return words_.size(); }
  std::size_t dim() const { return unit_.dim(); }
  const std::string& word(std::size_t i) const { return words_[i]; }
  const Matrix& unit_vectors() const { return unit_; }

  std::optional<std::size_t> find(std::string_view w) const {
    const auto it = ids_.find(w);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  double cosine(std::size_t a, std::size_t b) const {
    return vec::dot(unit_.row_ptr(a), unit_.row_ptr(b), unit_.stride());
  }

 private:
  std::vector<std::string> words_;
  StringMap<std::size_t> ids_;
  Matrix unit_;
};

struct SimilarityResult {
  double rho = 0;
  std::size_t pairs_used = 0;
  std::size_t pairs_skipped = 0;
};

inline SimilarityResult eval_similarity(const Embeddings& emb, const SimilarityDataset& ds) {
  std::vector<double> model_scores, human_scores;
  SimilarityResult res;
  for (const auto& p : ds.pairs) {
    const auto a = emb.find(p.word_a);
    const auto b = emb.find(p.word_b);
    if (!a || !b) {
      ++res.pairs_skipped;
      continue;
    }
    model_scores.push_back(emb.cosine(*a, *b));
    human_scores.push_back(p.human_score);
  }
  res.pairs_used = model_scores.size();
  if (res.pairs_used == 0) throw DataError(ds.name + ": every pair has an out-of-vocabulary word");
  res.rho = spearman(model_scores, human_scores);
  return res;
}

inline SimilarityResult eval_similarity(const Model& model, const Vocabulary& vocab, const SimilarityDataset& ds) {
  return eval_similarity(Embeddings(vocab, model), ds);
}

/// 3CosAdd: the word maximizing cos(unit(u_b + u_c - u_a), u_w) over all
/// words other than a, b and c. Ties go to the lower index.
inline std::optional<std::size_t> analogy_argmax(const Embeddings& emb, std::size_t a, std::size_t b, std::size_t c) {
  const Matrix& u = emb.unit_vectors();
  const std::size_t n = u.stride();
  std::vector<float> q(n);
  const float* ua = u.row_ptr(a);
  const float* ub = u.row_ptr(b);
  const float* uc = u.row_ptr(c);
  for (std::size_t i = 0; i < n; ++i) q[i] = ub[i] + uc[i] - ua[i];
  // |q| is shared by every candidate, so the raw dot product ranks like cosine.
  std::optional<std::size_t> best;
  float best_score = -std::numeric_limits<float>::infinity();
  for (std::size_t w = 0; w < emb.size(); ++w) {
    if (w == a || w == b || w == c) continue;
    const float s = vec::dot(q.data(), u.row_ptr(w), n);
    if (s > best_score) {
      best_score = s;
      best = w;
    }
  }
  return best;
}

struct SectionResult {
  std::string name;
  SectionKind kind = SectionKind::Semantic;
  std::size_t correct = 0;
  std::size_t answerable = 0;
  std::size_t unanswerable = 0;

  double accuracy() const { return answerable ? static_cast<double>(correct) / static_cast<double>(answerable) : 0.0; }
};

struct AnalogyResult {
  std::vector<SectionResult> sections;
  SectionResult semantic{"semantic", SectionKind::Semantic};
  SectionResult syntactic{"syntactic", SectionKind::Syntactic};
  SectionResult overall{"overall", SectionKind::Semantic};
};

inline AnalogyResult eval_analogy(const Embeddings& emb, const AnalogyDataset& ds, unsigned threads = 1) {
  AnalogyResult res;
  for (const auto& section : ds.sections) {
    SectionResult sr{section.name, section.kind};
    struct Job {
      std::size_t a, b, c, d;
    };
    std::vector<Job> jobs;
    for (const auto& q : section.questions) {
      const auto a = emb.find(q.a), b = emb.find(q.b), c = emb.find(q.c), d = emb.find(q.d);
      if (!a || !b || !c || !d) {
        ++sr.unanswerable;
        continue;
      }
      jobs.push_back({*a, *b, *c, *d});
    }
    sr.answerable = jobs.size();
    std::vector<char> hit(jobs.size(), 0);
    auto solve = [&](std::size_t begin, std::size_t step) {
      for (std::size_t i = begin; i < jobs.size(); i += step) {
        const auto& j = jobs[i];
        hit[i] = analogy_argmax(emb, j.a, j.b, j.c) == j.d;
      }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, jobs.size()));
    if (workers == 1) {
      solve(0, 1);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(solve, t, workers);
      for (auto& th : pool) th.join();
    }
    sr.correct = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
    auto& total = section.kind == SectionKind::Semantic ? res.semantic : res.syntactic;
    for (SectionResult* t : {&total, &res.overall}) {
      t->correct += sr.correct;
      t->answerable += sr.answerable;
      t->unanswerable += sr.unanswerable;
    }
    res.sections.push_back(std::move(sr));
  }
  return res;
}

inline AnalogyResult eval_analogy(const Model& model, const Vocabulary& vocab, const AnalogyDataset& ds,
                                  unsigned threads = 1) {
  return eval_analogy(Embeddings(vocab, model), ds, threads);
}

}  // namespace csg
