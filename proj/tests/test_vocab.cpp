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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "csg/corpus.hpp"
#include "csg/vocab.hpp"
#include "oracles/chi_square.hpp"

namespace csg {
namespace {

Vocabulary vocab_of(const std::string& text, std::uint64_t min_count) {
  return build_vocab(CorpusText::from_string(text), min_count);
}

TEST(BuildVocab, MinCountFilters) {
  const auto v = vocab_of("a a a b", 2);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v.word(0), "a");
  EXPECT_EQ(v.count(0), 3u);
  EXPECT_FALSE(v.find("b"));
  EXPECT_EQ(v.lookup("b"), -1);
}

TEST(BuildVocab, SortedByDescendingCount) {
  const auto v = vocab_of("a b b", 1);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v.word(0), "b");
  EXPECT_EQ(v.count(0), 2u);
  EXPECT_EQ(v.word(1), "a");
  EXPECT_EQ(*v.find("b"), 0);
}

TEST(BuildVocab, TiesBrokenLexicographically) {
  const auto v = vocab_of("pear apple fig fig", 1);
  EXPECT_EQ(std::vector<std::string>(v.words().begin(), v.words().end()),
            (std::vector<std::string>{"fig", "apple", "pear"}));
}

TEST(BuildVocab, EmptyResultThrows) {
  EXPECT_THROW(vocab_of("a b c", 2), EmptyVocabularyError);
  EXPECT_THROW(vocab_of("", 1), EmptyVocabularyError);
}

TEST(BuildVocab, OrderInsensitive) {
  std::vector<Sentence> s = {{{"x", "y", "z"}}, {{"y", "y"}}, {{"z", "w", "x", "x"}}};
  const auto a = build_vocab(s, 1);
  std::reverse(s.begin(), s.end());
  for (auto& sent : s) std::reverse(sent.tokens.begin(), sent.tokens.end());
  const auto b = build_vocab(s, 1);
  EXPECT_TRUE(std::equal(a.words().begin(), a.words().end(), b.words().begin(), b.words().end()));
  EXPECT_TRUE(std::equal(a.counts().begin(), a.counts().end(), b.counts().begin(), b.counts().end()));
}

TEST(BuildVocab, FixtureMatchesHandCount) {
  std::ifstream in(CSG_TEST_DATA_DIR "/fixture30.txt");
  std::vector<Sentence> sentences;
  preprocess(in, 10, [&](Sentence&& s) { sentences.push_back(std::move(s)); });
  const auto v1 = build_vocab(sentences, 1);
  const auto v2 = build_vocab(sentences, 2);
  EXPECT_EQ(v1.size(), 286u);
  EXPECT_EQ(v2.size(), 50u);
  EXPECT_EQ(v1.count(v1.lookup("the")), 49u);
  EXPECT_EQ(v1.count(v1.lookup("ice")), 11u);
  EXPECT_EQ(v1.word(0), "the");
  EXPECT_EQ(v1.total_count(), 446u);
}

TEST(Vocabulary, SaveLoadRoundTrip) {
  const auto v = vocab_of("the cat the dog the cat bird", 1);
  std::stringstream ss;
  v.save(ss);
  EXPECT_EQ(ss.str(), "the\t3\ncat\t2\nbird\t1\ndog\t1\n");
  const auto back = Vocabulary::load(ss);
  EXPECT_TRUE(std::equal(v.words().begin(), v.words().end(), back.words().begin(), back.words().end()));
  EXPECT_EQ(back.total_count(), v.total_count());
}

TEST(Vocabulary, LoadRejectsMalformed) {
  for (const char* bad : {"a 3\n", "a\tx\n", "a\t1\nb\t2\n", "a\t2\na\t1\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW(Vocabulary::load(in), DataError) << bad;
  }
}

TEST(Subsample, KeepProbability) {
  EXPECT_DOUBLE_EQ(subsample_keep_probability(1, 1'000'000, 1e-3), 1.0);
  // f = 0.1, t = 1e-3: sqrt(0.01) + 0.01 = 0.11
  EXPECT_NEAR(subsample_keep_probability(100'000, 1'000'000, 1e-3), 0.11, 1e-12);
}

std::map<WordId, std::size_t> entry_counts(const NoiseTable& t) {
  std::map<WordId, std::size_t> m;
  for (WordId w : t.entries()) ++m[w];
  return m;
}

TEST(NoiseTable, SixteenToOneSplitsEightToOne) {
  const std::vector<std::uint64_t> counts{16, 1};
  const NoiseTable t(counts, 0.75, 9);
  const auto m = entry_counts(t);
  EXPECT_EQ(m.at(0), 8u);
  EXPECT_EQ(m.at(1), 1u);
}

TEST(NoiseTable, SingleWord) {
  const std::vector<std::uint64_t> counts{5};
  const NoiseTable t(counts, 0.75, 100);
  const auto e = t.entries();
  EXPECT_TRUE(std::all_of(e.begin(), e.end(), [](WordId w) { return w == 0; }));
}

// Reference table: word w fills round(cum_w * size) - round(cum_{w-1} * size)
// slots, written out in full.
std::vector<WordId> naive_table(const std::vector<std::uint64_t>& counts, double power, std::size_t size) {
  long double norm = 0, cum = 0;
  for (auto c : counts) norm += std::pow(static_cast<long double>(c), static_cast<long double>(power));
  std::vector<WordId> table;
  for (std::size_t w = 0; w < counts.size(); ++w) {
    cum += std::pow(static_cast<long double>(counts[w]), static_cast<long double>(power));
    const std::size_t end = w + 1 == counts.size() ? size : static_cast<std::size_t>(std::llround(cum / norm * size));
    while (table.size() < end) table.push_back(static_cast<WordId>(w));
  }
  return table;
}

TEST(NoiseTable, LookupMatchesFullTable) {
  std::mt19937_64 rng(8);
  for (std::size_t vocab : {1u, 2u, 7u, 300u, 5000u}) {
    std::vector<std::uint64_t> counts(vocab);
    for (std::size_t w = 0; w < vocab; ++w) counts[w] = 1 + 100000 / (w + 1) + rng() % 3;
    for (std::size_t size : {vocab, vocab + 1, std::size_t{1000}, std::size_t{65536}, std::size_t{1000003}}) {
      if (size < vocab) continue;
      const NoiseTable t(counts, 0.75, size);
      const auto want = naive_table(counts, 0.75, size);
      ASSERT_EQ(want.size(), size);
      for (std::size_t j = 0; j < size; ++j) ASSERT_EQ(t.entry(j), want[j]) << vocab << " " << size << " " << j;
    }
  }
}

TEST(NoiseTable, UniformCountsShareEvenly) {
  const std::vector<std::uint64_t> counts(7, 3);
  const NoiseTable t(counts, 0.75, 1000);
  for (const auto& [w, n] : entry_counts(t)) {
    EXPECT_GE(n, 1000 / 7);
    EXPECT_LE(n, 1000 / 7 + 1);
  }
}

TEST(NoiseTable, SharesAreRoundedProportions) {
  std::vector<std::uint64_t> counts;
  for (int i = 0; i < 100; ++i) counts.push_back(static_cast<std::uint64_t>(1 + (i * 37) % 500));
  const std::size_t size = 100'003;
  const NoiseTable t(counts, 0.75, size);
  double z = 0;
  for (auto c : counts) z += std::pow(static_cast<double>(c), 0.75);
  const auto m = entry_counts(t);
  for (std::size_t w = 0; w < counts.size(); ++w) {
    const double expect = size * std::pow(static_cast<double>(counts[w]), 0.75) / z;
    EXPECT_NEAR(static_cast<double>(m.count(static_cast<WordId>(w)) ? m.at(static_cast<WordId>(w)) : 0), expect, 1.0)
        << "word " << w;
  }
  EXPECT_EQ(t.size(), size);
}

TEST(NoiseTable, RejectsBadShape) {
  const std::vector<std::uint64_t> counts{3, 2, 1};
  EXPECT_THROW(NoiseTable(counts, 0.75, 2), UsageError);
  EXPECT_THROW(NoiseTable(counts, 0.0, 100), UsageError);
}

TEST(DrawNegatives, DegenerateSingleWordKeepsExcluded) {
  const std::vector<std::uint64_t> counts{5};
  const NoiseTable t(counts, 0.75, 10);
  std::mt19937_64 rng(1);
  const auto negs = t.draw_negatives(5, 0, rng);
  EXPECT_EQ(negs, std::vector<WordId>(5, 0));
}

TEST(DrawNegatives, ExcludedWordIsRedrawn) {
  // Two equal entries: a slot keeps the excluded word only if all 17 draws
  // (first try plus 16 retries) hit it.
  const std::vector<std::uint64_t> counts{1, 1};
  const NoiseTable t(counts, 0.75, 2);
  std::mt19937_64 rng(3);
  std::size_t kept = 0;
  for (int i = 0; i < 20000; ++i) {
    for (WordId w : t.draw_negatives(5, 0, rng)) kept += w == 0;
  }
  EXPECT_LE(kept, 5u);
}

TEST(DrawNegatives, RetryCapKeepsExcludedWord) {
  // 8 of 9 entries are word 0, so the excluded word survives all 17 draws
  // with probability (8/9)^17.
  const std::vector<std::uint64_t> counts{16, 1};
  const NoiseTable t(counts, 0.75, 9);
  std::mt19937_64 rng(3);
  std::size_t kept = 0, total = 0;
  for (int i = 0; i < 20000; ++i) {
    for (WordId w : t.draw_negatives(5, 0, rng)) kept += w == 0, ++total;
  }
  const double expected = std::pow(8.0 / 9.0, 17);
  const double sd = std::sqrt(expected * (1 - expected) / static_cast<double>(total));
  EXPECT_NEAR(static_cast<double>(kept) / static_cast<double>(total), expected, 5 * sd);
}

TEST(DrawNegatives, EightToOneFrequency) {
  const std::vector<std::uint64_t> counts{16, 1};
  const NoiseTable t(counts, 0.75, 9);
  std::mt19937_64 rng(99);
  std::size_t c0 = 0, c1 = 0;
  for (int trial = 0; trial < 100000; ++trial) {
    for (WordId w : t.draw_negatives(5, -1, rng)) (w == 0 ? c0 : c1)++;
  }
  const double ratio = static_cast<double>(c0) / static_cast<double>(c1);
  EXPECT_NEAR(ratio, 8.0, 8.0 * 0.05);
}

TEST(DrawNegatives, SameSeedSameDraws) {
  const std::vector<std::uint64_t> counts{10, 7, 5, 3, 1};
  const NoiseTable t(counts, 0.75, 1000);
  std::mt19937_64 a(17), b(17);
  EXPECT_EQ(t.draw_negatives(50, 2, a), t.draw_negatives(50, 2, b));
}

TEST(DrawNegatives, ChiSquareAgainstPowerLaw) {
  std::vector<std::uint64_t> counts;
  std::mt19937_64 gen(2024);
  for (int i = 0; i < 100; ++i) counts.push_back(1 + gen() % 10000);
  std::sort(counts.rbegin(), counts.rend());
  const NoiseTable t(counts);
  std::vector<double> p(counts.size());
  double z = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) z += p[i] = std::pow(static_cast<double>(counts[i]), 0.75);
  for (auto& x : p) x /= z;
  std::vector<std::uint64_t> observed(counts.size(), 0);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1'000'000; ++i) ++observed[static_cast<std::size_t>(t.draw(rng))];
  const auto r = oracle::chi_square(observed, p);
  EXPECT_GT(r.p_value, 0.001) << "chi2 = " << r.statistic;
}

}  // namespace
}  // namespace csg
