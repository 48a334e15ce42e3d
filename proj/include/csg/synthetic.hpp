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


// Synthetic corpora for benchmarks and smoke tests.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "csg/error.hpp"

namespace csg {

/// Sentences of `sentence_len` tokens drawn from a Zipf(1) law over
/// `vocab_size` words named w0, w1, ...; one sentence per line.
inline std::string zipf_corpus(std::size_t tokens, std::size_t vocab_size, std::size_t sentence_len,
                               std::uint64_t seed) {
  if (vocab_size == 0 || sentence_len == 0) throw UsageError("zipf_corpus: sizes must be positive");
  std::vector<double> weights(vocab_size);
  for (std::size_t r = 0; r < vocab_size; ++r) weights[r] = 1.0 / static_cast<double>(r + 1);
  std::discrete_distribution<std::size_t> dist(weights.begin(), weights.end());
  std::mt19937_64 rng(seed);
  std::string out;
  out.reserve(tokens * 6);
  for (std::size_t i = 0; i < tokens; ++i) {
    out += 'w';
    out += std::to_string(dist(rng));
    out += (i + 1) % sentence_len == 0 || i + 1 == tokens ? '\n' : ' ';
  }
  return out;
}

struct ProbeCorpusSpec {
  std::size_t sentences = 5000;
  std::size_t sentence_len = 12;
  std::size_t background_vocab = 1000;
  double filler_rate = 0.4;   // per token, word "f"
  double center_rate = 0.3;   // per sentence, word "x"
  double content_rate = 0.05; // per "x" sentence, word "c" within 3 positions
  std::uint64_t seed = 1;
};

/// Zipf background words b0, b1, ... with a frequent filler "f", a center
/// word "x", and a rare content word "c" that only appears close to "x".
inline std::string probe_corpus(const ProbeCorpusSpec& spec) {
  if (spec.sentence_len < 4 || spec.background_vocab == 0) throw UsageError("probe_corpus: sizes too small");
  std::vector<double> weights(spec.background_vocab);
  for (std::size_t r = 0; r < weights.size(); ++r) weights[r] = 1.0 / static_cast<double>(r + 1);
  std::discrete_distribution<std::size_t> background(weights.begin(), weights.end());
  std::uniform_real_distribution<double> unit;
  std::mt19937_64 rng(spec.seed);
  const std::size_t n = spec.sentence_len;
  std::string out;
  std::vector<std::string> toks(n);
  for (std::size_t s = 0; s < spec.sentences; ++s) {
    for (auto& t : toks) t = unit(rng) < spec.filler_rate ? "f" : "b" + std::to_string(background(rng));
    if (unit(rng) < spec.center_rate) {
      const std::size_t p = rng() % n;
      toks[p] = "x";
      if (unit(rng) < spec.content_rate) {
        std::size_t q = p + 1 + rng() % 3;
        if (q >= n) q = p - 1 - rng() % 3;
        toks[q] = "c";
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      out += toks[i];
      out += i + 1 < n ? ' ' : '\n';
    }
  }
  return out;
}

}  // namespace csg
