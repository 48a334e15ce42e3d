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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <concepts>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include "csg/corpus.hpp"
#include "csg/error.hpp"

namespace csg {

using WordId = std::int32_t;

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
};

template <class V>
using StringMap = std::unordered_map<std::string, V, StringHash, std::equal_to<>>;

/// Word inventory ordered by descending frequency, ties broken by byte-wise
/// lexicographic order. Immutable once built.
class Vocabulary {
 public:
  Vocabulary() = default;

  static Vocabulary from_counts(const StringMap<std::uint64_t>& counts, std::uint64_t min_count) {
    if (min_count < 1) throw UsageError("min_count must be >= 1");
    std::vector<std::pair<std::string, std::uint64_t>> kept;
    for (const auto& [w, c] : counts) {
      if (c >= min_count) kept.emplace_back(w, c);
    }
    if (kept.empty()) throw EmptyVocabularyError("no word occurs at least min_count times");
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    Vocabulary v;
    for (auto& [w, c] : kept) v.append(std::move(w), c);
    return v;
  }

  /// Reads `word<TAB>count` lines in descending count order.
  static Vocabulary load(std::istream& in) {
    Vocabulary v;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto tab = line.find('\t');
      const auto where = " (line " + std::to_string(lineno) + ")";
      if (tab == std::string::npos || tab == 0) throw DataError("malformed vocabulary entry" + where);
      std::string word = line.substr(0, tab);
      std::uint64_t count = 0;
      try {
        std::size_t used = 0;
        count = std::stoull(line.substr(tab + 1), &used);
        if (used != line.size() - tab - 1) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw DataError("bad count in vocabulary" + where);
      }
      if (count == 0) throw DataError("zero count in vocabulary" + where);
      if (!v.counts_.empty() && count > v.counts_.back()) throw DataError("vocabulary not sorted by count" + where);
      if (v.ids_.contains(word)) throw DataError("duplicate vocabulary word '" + word + "'" + where);
      v.append(std::move(word), count);
    }
    if (v.empty()) throw EmptyVocabularyError("vocabulary file is empty");
    return v;
  }

  void save(std::ostream& out) const {
    for (std::size_t i = 0; i < words_.size(); ++i) out << words_[i] << '\t' << counts_[i] << '\n';
  }

  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  const std::string& word(WordId id) const { return words_[static_cast<std::size_t>(id)]; }
  std::uint64_t count(WordId id) const { return counts_[static_cast<std::size_t>(id)]; }
  std::uint64_t total_count() const { return total_; }
  std::span<const std::string> words() const { return words_; }
  std::span<const std::uint64_t> counts() const { return counts_; }

  std::optional<WordId> find(std::string_view w) const {
    const auto it = ids_.find(w);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  /// Id of `w`, or -1 when out of vocabulary.
  WordId lookup(std::string_view w) const {
    const auto it = ids_.find(w);
    return it == ids_.end() ? -1 : it->second;
  }

 private:
  void append(std::string w, std::uint64_t c) {
    ids_.emplace(w, static_cast<WordId>(words_.size()));
    words_.push_back(std::move(w));
    counts_.push_back(c);
    total_ += c;
  }

  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  StringMap<WordId> ids_;
  std::uint64_t total_ = 0;
};

class WordCounter {
 public:
  void add(std::string_view token) {
    const auto it = counts_.find(token);
    if (it != counts_.end()) {
      ++it->second;
    } else {
      counts_.emplace(std::string(token), 1);
    }
  }

  void add(const Sentence& s) {
    for (const auto& t : s.tokens) add(t);
  }

  Vocabulary build(std::uint64_t min_count) const { return Vocabulary::from_counts(counts_, min_count); }

 private:
  StringMap<std::uint64_t> counts_;
};

template <class Range>
  requires(!std::same_as<std::remove_cvref_t<Range>, CorpusText>)
Vocabulary build_vocab(Range&& sentences, std::uint64_t min_count) {
  WordCounter counter;
  for (const auto& s : sentences) counter.add(s);
  return counter.build(min_count);
}

inline Vocabulary build_vocab(const CorpusText& text, std::uint64_t min_count) {
  WordCounter counter;
  for_each_token(text.view(), [&](std::string_view t) { counter.add(t); });
  return counter.build(min_count);
}

/// Index in [0, n) from one engine call. Full-range 64-bit engines use a
/// multiply-shift reduction (bias below n / 2^64); others fall back to modulo.
template <class Rng>
std::size_t uniform_index(Rng& rng, std::size_t n) {
  if constexpr (Rng::min() == 0 && Rng::max() == std::numeric_limits<std::uint64_t>::max()) {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
  } else {
    return static_cast<std::size_t>(rng() % n);
  }
}

/// Keep probability for frequent-word subsampling with threshold `t`:
/// min(1, sqrt(t/f) + t/f) where f is the word's share of the corpus.
inline double subsample_keep_probability(std::uint64_t count, std::uint64_t total, double t) {
  const double ratio = t / (static_cast<double>(count) / static_cast<double>(total));
  return std::min(1.0, std::sqrt(ratio) + ratio);
}

/// Unigram^power sampling table for negative draws. Word w owns a contiguous
/// block of round(cum_w * size) - round(cum_{w-1} * size) entries, which is
/// within one entry of its exact share.
///
/// The table is stored as block ends plus a guide of the owner of every
/// 2^shift-th entry, so a lookup touches a few kilobytes per word instead of
/// the full table.
class NoiseTable {
 public:
  static constexpr double kDefaultPower = 0.75;
  static constexpr std::size_t kDefaultSize = 10'000'000;
  static constexpr int kMaxRetries = 16;

  NoiseTable(std::span<const std::uint64_t> counts, double power = kDefaultPower,
             std::size_t table_size = kDefaultSize)
      : size_(table_size), power_(power) {
    if (counts.empty()) throw EmptyVocabularyError("noise table needs a non-empty vocabulary");
    if (!(power > 0.0)) throw UsageError("noise power must be positive");
    if (table_size < counts.size()) throw UsageError("noise table size must be >= vocabulary size");
    if (table_size > std::numeric_limits<std::uint32_t>::max()) throw UsageError("noise table size is too large");
    long double norm = 0;
    for (auto c : counts) norm += std::pow(static_cast<long double>(c), static_cast<long double>(power));
    ends_.resize(counts.size());
    long double cum = 0;
    std::size_t begin = 0;
    for (std::size_t w = 0; w < counts.size(); ++w) {
      cum += std::pow(static_cast<long double>(counts[w]), static_cast<long double>(power));
      std::size_t end = w + 1 == counts.size()
                            ? table_size
                            : static_cast<std::size_t>(std::llround(cum / norm * table_size));
      end = std::clamp(end, begin, table_size);
      ends_[w] = static_cast<std::uint32_t>(end);
      begin = end;
    }
    // About two guide slots per word.
    while (shift_ > 0 && (table_size >> shift_) < 2 * counts.size()) --shift_;
    guide_.resize((table_size >> shift_) + 1);
    std::size_t w = 0;
    for (std::size_t g = 0; g < guide_.size(); ++g) {
      const std::size_t j = std::min(g << shift_, table_size - 1);
      while (ends_[w] <= j) ++w;
      guide_[g] = static_cast<WordId>(w);
    }
  }

  NoiseTable(const Vocabulary& vocab, double power = kDefaultPower, std::size_t table_size = kDefaultSize)
      : NoiseTable(vocab.counts(), power, table_size) {}

  std::size_t size() const { return size_; }
  double power() const { return power_; }

  /// Owner of table entry j < size().
  WordId entry(std::size_t j) const {
    auto w = static_cast<std::size_t>(guide_[j >> shift_]);
    while (ends_[w] <= j) ++w;
    return static_cast<WordId>(w);
  }

  /// The full table, materialized.
  std::vector<WordId> entries() const {
    std::vector<WordId> out(size_);
    std::size_t begin = 0;
    for (std::size_t w = 0; w < ends_.size(); ++w) {
      std::fill(out.begin() + static_cast<std::ptrdiff_t>(begin), out.begin() + static_cast<std::ptrdiff_t>(ends_[w]),
                static_cast<WordId>(w));
      begin = ends_[w];
    }
    return out;
  }

  template <class Rng>
  WordId draw(Rng& rng) const {
    return entry(uniform_index(rng, size_));
  }

  /// Fills `out` with draws; a draw equal to `exclude` is redrawn up to
  /// kMaxRetries times and then kept.
  template <class Rng>
  void draw_negatives(WordId exclude, Rng& rng, std::span<WordId> out) const {
    for (auto& slot : out) {
      WordId w = draw(rng);
      for (int r = 0; r < kMaxRetries && w == exclude; ++r) w = draw(rng);
      slot = w;
    }
  }

  template <class Rng>
  std::vector<WordId> draw_negatives(std::size_t k, WordId exclude, Rng& rng) const {
    std::vector<WordId> out(k);
    draw_negatives(exclude, rng, std::span<WordId>(out));
    return out;
  }

 private:
  std::size_t size_;
  double power_;
  std::vector<std::uint32_t> ends_;
  std::vector<WordId> guide_;
  int shift_ = 32;
};

}  // namespace csg
