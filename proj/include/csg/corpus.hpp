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

// Corpus ingestion: lowercasing, sentence splitting, length filtering,
// sentence sampling and fixed-length chunking of unstructured token streams.
// Preprocessed corpora are stored one sentence per line, tokens separated by
// single spaces.

#pragma once

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "csg/error.hpp"
#include "csg/utf8.hpp"

namespace csg {

struct Sentence {
  std::vector<std::string> tokens;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const Sentence&) const = default;
};

struct CorpusStats {
  std::uint64_t total_tokens = 0;       // tokens in retained sentences
  std::uint64_t total_sentences = 0;    // retained sentences
  std::uint64_t sentences_dropped = 0;  // shorter than the minimum
  std::uint64_t invalid_utf8 = 0;       // replaced byte sequences
};

constexpr bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

constexpr bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

/// Calls `fn(std::string_view)` for every whitespace-separated token.
template <class Fn>
void for_each_token(std::string_view text, Fn&& fn) {
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < n && !is_space(text[i])) ++i;
    if (i > start) fn(text.substr(start, i - start));
  }
}

inline void write_sentence(std::ostream& out, const Sentence& s) {
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    if (i) out.put(' ');
    out << s.tokens[i];
  }
  out.put('\n');
}

/// Line-at-a-time sentence splitter. Each input line is treated as a
/// paragraph: a sentence ends at a token whose trailing run of `.`, `!` or `?`
/// is followed by whitespace, and at the end of the line. The trailing run is
/// removed from the token, and the token is dropped if nothing remains.
class Preprocessor {
 public:
  explicit Preprocessor(std::size_t min_sentence_tokens) : min_tokens_(min_sentence_tokens) {
    if (min_sentence_tokens < 1) throw UsageError("min_sentence_tokens must be >= 1");
  }

  template <class Sink>
  void feed_line(std::string_view line, Sink&& sink) {
    stats_.invalid_utf8 += utf8::lowercase(line, lowered_);
    for_each_token(lowered_, [&](std::string_view tok) {
      std::size_t keep = tok.size();
      while (keep > 0 && is_terminal(tok[keep - 1])) --keep;
      const bool boundary = keep < tok.size();
      if (keep > 0) current_.tokens.emplace_back(tok.substr(0, keep));
      if (boundary) flush(sink);
    });
    flush(sink);
  }

  const CorpusStats& stats() const { return stats_; }

 private:
  template <class Sink>
  void flush(Sink& sink) {
    if (current_.tokens.empty()) return;
    if (current_.tokens.size() < min_tokens_) {
      ++stats_.sentences_dropped;
    } else {
      ++stats_.total_sentences;
      stats_.total_tokens += current_.tokens.size();
      sink(std::move(current_));
    }
    current_ = Sentence{};
  }

  std::size_t min_tokens_;
  CorpusStats stats_;
  Sentence current_;
  std::string lowered_;
};

/// Runs the preprocessing pipeline over every line of `in`.
template <class Sink>
CorpusStats preprocess(std::istream& in, std::size_t min_sentence_tokens, Sink&& sink) {
  Preprocessor pre(min_sentence_tokens);
  std::string line;
  while (std::getline(in, line)) pre.feed_line(line, sink);
  return pre.stats();
}

/// Independent Bernoulli(rate) retention decisions from a seeded generator.
class SentenceSampler {
 public:
  SentenceSampler(double rate, std::uint64_t seed) : rate_(rate), rng_(seed) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw UsageError("sample rate must lie in [0, 1]");
  }

  bool keep() {
    // 53-bit uniform in [0, 1); rate 1 always keeps, rate 0 never does.
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    return u < rate_;
  }

 private:
  double rate_;
  std::mt19937_64 rng_;
};

template <class Range, class Sink>
void sample_sentences(Range&& sentences, double rate, std::uint64_t seed, Sink&& sink) {
  SentenceSampler sampler(rate, seed);
  for (auto&& s : sentences) {
    if (sampler.keep()) sink(s);
  }
}

/// Groups a token stream into pseudo-sentences of exactly `max_len` tokens;
/// `finish` emits the shorter remainder, if any.
class Chunker {
 public:
  explicit Chunker(std::size_t max_len) : max_len_(max_len) {
    if (max_len < 1) throw UsageError("chunk length must be >= 1");
  }

  template <class Sink>
  void push(std::string token, Sink&& sink) {
    current_.tokens.push_back(std::move(token));
    if (current_.tokens.size() == max_len_) emit(sink);
  }

  template <class Sink>
  void finish(Sink&& sink) {
    if (!current_.tokens.empty()) emit(sink);
  }

 private:
  template <class Sink>
  void emit(Sink& sink) {
    sink(std::move(current_));
    current_ = Sentence{};
    current_.tokens.reserve(max_len_);
  }

  std::size_t max_len_;
  Sentence current_;
};

template <class Range, class Sink>
void chunk_unstructured(Range&& tokens, std::size_t max_len, Sink&& sink) {
  Chunker chunker(max_len);
  for (auto&& t : tokens) chunker.push(std::string(t), sink);
  chunker.finish(sink);
}

/// Read-only view of a preprocessed corpus, either memory-mapped from disk or
/// owned in memory.
class CorpusText {
 public:
  static CorpusText from_string(std::string text) {
    CorpusText c;
    c.owned_ = std::make_shared<std::string>(std::move(text));
    c.view_ = *c.owned_;
    return c;
  }

  static CorpusText open(const std::string& path) {
    const int fd = ::open(path.c_str(), O_RDONLY);
    if (fd < 0) throw DataError("cannot open corpus: " + path);
    struct stat st {};
    if (::fstat(fd, &st) != 0) {
      ::close(fd);
      throw DataError("cannot stat corpus: " + path);
    }
    CorpusText c;
    const auto size = static_cast<std::size_t>(st.st_size);
    if (size > 0) {
      void* addr = ::mmap(nullptr, size, PROT_READ, MAP_PRIVATE, fd, 0);
      if (addr == MAP_FAILED) {
        ::close(fd);
        throw DataError("cannot map corpus: " + path);
      }
      c.mapping_ = std::shared_ptr<void>(addr, [size](void* p) { ::munmap(p, size); });
      c.view_ = std::string_view(static_cast<const char*>(addr), size);
    }
    ::close(fd);
    return c;
  }

  std::string_view view() const { return view_; }
  std::size_t size() const { return view_.size(); }

  /// Splits the text into `parts` byte ranges whose boundaries are moved
  /// forward to the next line start. Ranges may be empty.
  std::vector<std::pair<std::size_t, std::size_t>> partition(std::size_t parts) const {
    std::vector<std::size_t> cuts{0};
    for (std::size_t p = 1; p < parts; ++p) {
      std::size_t pos = view_.size() * p / parts;
      if (pos > 0 && view_[pos - 1] != '\n') {
        const std::size_t nl = view_.find('\n', pos);
        pos = nl == std::string_view::npos ? view_.size() : nl + 1;
      }
      cuts.push_back(std::max(pos, cuts.back()));
    }
    cuts.push_back(view_.size());
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    for (std::size_t p = 0; p < parts; ++p) ranges.emplace_back(cuts[p], cuts[p + 1]);
    return ranges;
  }

  /// Calls `fn(std::string_view)` for every line within [begin, end).
  template <class Fn>
  void for_each_line(std::size_t begin, std::size_t end, Fn&& fn) const {
    std::size_t pos = begin;
    while (pos < end) {
      std::size_t nl = view_.find('\n', pos);
      if (nl == std::string_view::npos || nl > end) nl = end;
      fn(view_.substr(pos, nl - pos));
      pos = nl + 1;
    }
  }

 private:
  std::shared_ptr<std::string> owned_;
  std::shared_ptr<void> mapping_;
  std::string_view view_;
};

}  // namespace csg
