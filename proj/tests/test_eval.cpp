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

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "csg/eval.hpp"
#include "oracles/analogy_scan.hpp"
#include "oracles/spearman_bruteforce.hpp"

namespace csg {
namespace {

TEST(FractionalRanks, TiesShareMeanRank) {
  const std::vector<double> xs{10, 20, 20, 5, 20};
  EXPECT_EQ(fractional_ranks(xs), (std::vector<double>{2, 4, 4, 1, 4}));
}

TEST(Spearman, KnownValues) {
  EXPECT_DOUBLE_EQ(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{10, 20, 30, 40}), 1.0);
  EXPECT_DOUBLE_EQ(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{4, 3, 2, 1}), -1.0);
  // d = (0, 1, -1, 0, 0): rho = 1 - 6 * 2 / (5 * 24) = 0.9.
  EXPECT_NEAR(spearman(std::vector<double>{1, 2, 3, 4, 5}, std::vector<double>{1, 3, 2, 4, 5}), 0.9, 1e-15);
}

TEST(Spearman, MatchesBruteForceOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> len(2, 60), small(0, 5);
  std::normal_distribution<double> normal;
  int compared = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = len(rng);
    const bool ties = trial % 2 == 0;
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
      xs[i] = ties ? small(rng) : normal(rng);
      ys[i] = ties ? small(rng) + 0.5 * xs[i] : normal(rng) + xs[i];
    }
    const auto rx = fractional_ranks(xs), ry = fractional_ranks(ys);
    if (std::adjacent_find(rx.begin(), rx.end(), std::not_equal_to<>()) == rx.end() ||
        std::adjacent_find(ry.begin(), ry.end(), std::not_equal_to<>()) == ry.end()) {
      EXPECT_THROW(spearman(xs, ys), UndefinedCorrelationError);
      continue;
    }
    EXPECT_NEAR(spearman(xs, ys), oracle::spearman(xs, ys), 1e-10) << "trial " << trial;
    ++compared;
  }
  EXPECT_GT(compared, 950);
}

TEST(Spearman, InvariantUnderMonotoneTransforms) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  std::vector<double> xs(40), ys(40);
  for (int i = 0; i < 40; ++i) xs[i] = normal(rng), ys[i] = xs[i] + normal(rng);
  const double rho = spearman(xs, ys);
  std::vector<double> tx(40);
  for (int i = 0; i < 40; ++i) tx[i] = std::exp(3 * xs[i]) + 7;
  EXPECT_DOUBLE_EQ(spearman(tx, ys), rho);
  for (auto& y : ys) y = -y;
  EXPECT_DOUBLE_EQ(spearman(xs, ys), -rho);
}

TEST(Spearman, Errors) {
  EXPECT_THROW(spearman(std::vector<double>{1}, std::vector<double>{1}), UndefinedCorrelationError);
  EXPECT_THROW(spearman(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), UndefinedCorrelationError);
  EXPECT_THROW(spearman(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), UsageError);
}

Matrix matrix_from(const std::vector<std::vector<float>>& rows) {
  Matrix m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

TEST(Embeddings, NormalizesAndKeepsZeroRows) {
  const Embeddings emb({"a", "b", "z"}, matrix_from({{3, 4}, {0, 2}, {0, 0}}));
  EXPECT_NEAR(emb.unit_vectors()(0, 0), 0.6f, 1e-7);
  EXPECT_NEAR(emb.cosine(0, 1), 0.8, 1e-7);
  EXPECT_EQ(emb.cosine(0, 2), 0.0);
  EXPECT_EQ(emb.find("b"), 1u);
  EXPECT_FALSE(emb.find("c"));
}

TEST(EvalSimilarity, PerfectOrderingAndSkips) {
  // Unit circle angles: cosine with word 0 falls as the angle grows.
  std::vector<std::vector<float>> rows;
  std::vector<std::string> words;
  for (int i = 0; i < 6; ++i) {
    rows.push_back({static_cast<float>(std::cos(0.25 * i)), static_cast<float>(std::sin(0.25 * i))});
    words.push_back("w" + std::to_string(i));
  }
  const Embeddings emb(words, matrix_from(rows));
  SimilarityDataset ds{"toy", {}};
  for (int i = 1; i < 6; ++i) ds.pairs.push_back({"w0", "w" + std::to_string(i), 10.0 - i});
  ds.pairs.push_back({"w0", "missing", 3.0});
  const auto res = eval_similarity(emb, ds);
  EXPECT_DOUBLE_EQ(res.rho, 1.0);
  EXPECT_EQ(res.pairs_used, 5u);
  EXPECT_EQ(res.pairs_skipped, 1u);
}

TEST(EvalSimilarity, NormalizingTwiceChangesNothing) {
  std::mt19937_64 rng(3);
  std::normal_distribution<float> normal;
  std::vector<std::vector<float>> rows(30, std::vector<float>(8));
  std::vector<std::string> words;
  for (int w = 0; w < 30; ++w) {
    for (auto& x : rows[w]) x = normal(rng) * (w + 1);
    words.push_back("w" + std::to_string(w));
  }
  SimilarityDataset ds{"toy", {}};
  for (int i = 0; i + 1 < 30; ++i) ds.pairs.push_back({words[i], words[i + 1], static_cast<double>((i * 7) % 11)});
  const Embeddings once(words, matrix_from(rows));
  const Embeddings twice(words, once.unit_vectors());
  EXPECT_NEAR(eval_similarity(once, ds).rho, eval_similarity(twice, ds).rho, 1e-12);
}

TEST(EvalSimilarity, AllMissingOrConstantScoresFail) {
  const Embeddings emb({"a", "b", "c"}, matrix_from({{1, 0}, {0, 1}, {1, 1}}));
  EXPECT_THROW(eval_similarity(emb, SimilarityDataset{"x", {{"q", "r", 1.0}}}), DataError);
  // Identical word pairs all score cosine 1: no rank variance.
  EXPECT_THROW(eval_similarity(emb, SimilarityDataset{"x", {{"a", "a", 1.0}, {"b", "b", 2.0}}}),
               UndefinedCorrelationError);
}

TEST(LoadSimilarity, FormatsAndHeaders) {
  std::istringstream simlex("word1\tword2\tPOS\tSimLex999\tconc(w1)\nOld\tnew\tA\t1.58\t2.72\nsmart\tintelligent\tA\t9.2\t1.75\n");
  const auto a = load_similarity(simlex, "simlex");
  ASSERT_EQ(a.pairs.size(), 2u);
  EXPECT_EQ(a.pairs[0].word_a, "old");
  EXPECT_DOUBLE_EQ(a.pairs[1].human_score, 9.2);

  std::istringstream ws("Word 1,Word 2,Human (mean)\nlove,sex,6.77\ntiger,cat,7.35\n");
  EXPECT_EQ(load_similarity(ws, "ws").pairs.size(), 2u);

  std::istringstream men("sun sunlight 50.000000\nautomobile car 50.000000\n");
  EXPECT_DOUBLE_EQ(load_similarity(men, "men").pairs[1].human_score, 50.0);

  std::istringstream bad("a b 1\nc d x\n");
  EXPECT_THROW(load_similarity(bad, "bad"), DataError);
  std::istringstream empty("# nothing\n");
  EXPECT_THROW(load_similarity(empty, "empty"), DataError);
}

std::ifstream open_eval(const std::string& name) {
  std::ifstream in(std::string(CSG_EVAL_DATA_DIR) + "/" + name);
  EXPECT_TRUE(in) << name;
  return in;
}

TEST(LoadSimilarity, ShippedDatasets) {
  auto simlex = open_eval("simlex999.txt");
  EXPECT_EQ(load_similarity(simlex, "simlex").pairs.size(), 999u);
  auto ws = open_eval("wordsim353.tsv");
  EXPECT_EQ(load_similarity(ws, "ws353").pairs.size(), 353u);
  auto men = open_eval("men.txt");
  EXPECT_EQ(load_similarity(men, "men").pairs.size(), 3000u);
}

TEST(LoadAnalogy, ShippedDatasets) {
  auto google = open_eval("questions-words.txt");
  const auto g = load_google_analogy(google, "google");
  std::size_t semantic = 0, syntactic = 0;
  for (const auto& s : g.sections) (s.kind == SectionKind::Semantic ? semantic : syntactic) += s.questions.size();
  EXPECT_EQ(g.sections.size(), 14u);
  EXPECT_EQ(semantic, 8869u);
  EXPECT_EQ(syntactic, 10675u);
  EXPECT_EQ(g.sections[0].questions[0].a, "athens");

  auto msr = open_eval("msr.txt");
  const auto m = load_msr_analogy(msr, "msr");
  ASSERT_EQ(m.sections.size(), 1u);
  EXPECT_EQ(m.sections[0].kind, SectionKind::Syntactic);
  EXPECT_EQ(m.sections[0].questions.size(), 8000u);
}

TEST(LoadAnalogy, RejectsMalformedLines) {
  std::istringstream g(": s\na b c\n");
  EXPECT_THROW(load_google_analogy(g, "g"), DataError);
  std::istringstream m("a b c d e\n");
  EXPECT_THROW(load_msr_analogy(m, "m"), DataError);
}

Embeddings royal_toy() {
  // king - man + woman lands on queen.
  return Embeddings({"man", "woman", "king", "queen", "apple"},
                    matrix_from({{1, 0, 0}, {0, 1, 0}, {1, 0, 1}, {0, 1, 1}, {0.5f, 0.5f, -1}}));
}

TEST(AnalogyArgmax, SolvesToyAnalogy) {
  const auto emb = royal_toy();
  EXPECT_EQ(analogy_argmax(emb, 0, 2, 1), 3u);
  EXPECT_EQ(analogy_argmax(emb, 1, 0, 3), 2u);
}

TEST(AnalogyArgmax, ExcludesQueryWords) {
  // Identity question a:a :: c:? can never answer a or c.
  const auto emb = royal_toy();
  const auto got = analogy_argmax(emb, 2, 2, 3);
  ASSERT_TRUE(got);
  EXPECT_NE(*got, 2u);
  EXPECT_NE(*got, 3u);
  // (a, b, a, b): b + a - a = b, but b is excluded, so it is always wrong.
  const AnalogyDataset ds{"id",
                          {{"s", SectionKind::Semantic, {{"king", "king", "queen", "queen"}, {"man", "king", "man", "king"}}}}};
  const auto res = eval_analogy(emb, ds);
  EXPECT_EQ(res.overall.correct, 0u);
  EXPECT_EQ(res.overall.answerable, 2u);
}

TEST(AnalogyArgmax, MatchesExhaustiveScan) {
  std::mt19937_64 rng(77);
  std::normal_distribution<float> normal;
  oracle::Vectors raw(50, std::vector<double>(10));
  std::vector<std::vector<float>> rows(50, std::vector<float>(10));
  std::vector<std::string> words;
  for (int w = 0; w < 50; ++w) {
    for (int i = 0; i < 10; ++i) rows[w][i] = normal(rng) * (1 + w % 3), raw[w][i] = rows[w][i];
    words.push_back("w" + std::to_string(w));
  }
  const Embeddings emb(words, matrix_from(rows));
  int checked = 0;
  for (std::size_t a = 0; a < 50; a += 3) {
    for (std::size_t b = 1; b < 50; b += 7) {
      for (std::size_t c = 2; c < 50; c += 5) {
        if (a == b || b == c || a == c) continue;
        ASSERT_EQ(analogy_argmax(emb, a, b, c), oracle::analogy(raw, a, b, c)) << a << " " << b << " " << c;
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 500);
}

TEST(EvalAnalogy, ScaleInvariantAndCountsUnanswerable) {
  const auto base = royal_toy();
  const Embeddings scaled({"man", "woman", "king", "queen", "apple"},
                          matrix_from({{5, 0, 0}, {0, 0.1f, 0}, {2, 0, 2}, {0, 3, 3}, {5, 5, -10}}));
  const AnalogyDataset ds{"toy",
                          {{"royal", SectionKind::Semantic, {{"man", "king", "woman", "queen"}, {"man", "x", "y", "z"}}},
                           {"gram-plural", SectionKind::Syntactic, {{"woman", "man", "queen", "king"}}}}};
  for (const auto* emb : {&base, &scaled}) {
    for (unsigned threads : {1u, 3u}) {
      const auto res = eval_analogy(*emb, ds, threads);
      EXPECT_EQ(res.semantic.correct, 1u);
      EXPECT_EQ(res.semantic.unanswerable, 1u);
      EXPECT_EQ(res.syntactic.correct, 1u);
      EXPECT_EQ(res.overall.answerable, 2u);
      EXPECT_DOUBLE_EQ(res.overall.accuracy(), 1.0);
    }
  }
}

}  // namespace
}  // namespace csg
