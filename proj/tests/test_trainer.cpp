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
#include <string>
#include <vector>

#include "csg/synthetic.hpp"
#include "csg/trainer.hpp"

namespace csg {
namespace {

TrainConfig small_config(Architecture arch) {
  TrainConfig c;
  c.architecture = arch;
  c.dim = 16;
  c.window = 3;
  c.negatives = 3;
  c.epochs = 2;
  c.min_count = 1;
  c.noise_table_size = 10000;
  c.seed = 5;
  return c;
}

struct Toy {
  CorpusText corpus;
  Vocabulary vocab;
};

Toy zipf_toy(std::size_t tokens = 20000) {
  auto corpus = CorpusText::from_string(zipf_corpus(tokens, 300, 12, 3));
  auto vocab = build_vocab(corpus, 1);
  return {std::move(corpus), std::move(vocab)};
}

TEST(Train, SingleThreadIsDeterministic) {
  const auto toy = zipf_toy();
  for (auto arch : {Architecture::SkipGram, Architecture::Cbow, Architecture::Contextual}) {
    const auto cfg = small_config(arch);
    const auto a = train(toy.corpus, toy.vocab, cfg);
    const auto b = train(toy.corpus, toy.vocab, cfg);
    EXPECT_TRUE(a.model.identical(b.model));
    auto other = cfg;
    other.seed = 6;
    EXPECT_FALSE(a.model.identical(train(toy.corpus, toy.vocab, other).model));
  }
}

TEST(Train, RandomGammaIsDeterministic) {
  const auto toy = zipf_toy();
  auto cfg = small_config(Architecture::Contextual);
  cfg.fusion = {Fusion::Late, RandomGamma{}};
  const auto a = train(toy.corpus, toy.vocab, cfg);
  const auto b = train(toy.corpus, toy.vocab, cfg);
  EXPECT_TRUE(a.model.identical(b.model));
  for (const auto& e : a.epochs) EXPECT_NEAR(e.gamma, 0.5, 0.05);
}

TEST(Train, EpochReports) {
  const auto toy = zipf_toy();
  auto cfg = small_config(Architecture::Contextual);
  cfg.epochs = 5;
  std::vector<int> seen;
  TrainHooks hooks;
  hooks.on_epoch = [&](const EpochReport& r) { seen.push_back(r.epoch); };
  const auto result = train(toy.corpus, toy.vocab, cfg, hooks);
  ASSERT_EQ(result.epochs.size(), 5u);
  EXPECT_EQ(seen, (std::vector<int>{1, 2, 3, 4, 5}));
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(result.epochs[i].words, 20000u);
    EXPECT_DOUBLE_EQ(result.epochs[i].gamma, static_cast<double>(i) / 4.0);
    if (i > 0) {
      EXPECT_LT(result.epochs[i].lr, result.epochs[i - 1].lr);
    }
  }
  EXPECT_NEAR(result.epochs.back().lr, cfg.initial_lr * 1e-4f, 1e-9);
}

TEST(Train, ContextualGammaZeroEqualsSkipGram) {
  const auto toy = zipf_toy();
  const auto sg = train(toy.corpus, toy.vocab, small_config(Architecture::SkipGram));
  for (Fusion f : {Fusion::Early, Fusion::Late}) {
    auto cfg = small_config(Architecture::Contextual);
    cfg.fusion = {f, FixedGamma{0.0}};
    EXPECT_TRUE(train(toy.corpus, toy.vocab, cfg).model.identical(sg.model));
  }
}

TEST(Train, ContextualGammaZeroProbeEqualsSkipGramProbe) {
  const auto toy = zipf_toy();
  const std::vector<std::string> tracked{"w0", "w1", "w5"};
  PredictionProbe sg_probe(toy.vocab, "w2", tracked), csg_probe(toy.vocab, "w2", tracked);
  train(toy.corpus, toy.vocab, small_config(Architecture::SkipGram), {nullptr, &sg_probe});
  auto cfg = small_config(Architecture::Contextual);
  cfg.fusion = {Fusion::Early, FixedGamma{0.0}};
  train(toy.corpus, toy.vocab, cfg, {nullptr, &csg_probe});
  ASSERT_EQ(sg_probe.records().size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(sg_probe.records()[i], csg_probe.records()[i]);
    EXPECT_GT(sg_probe.records()[i].observations, 0u);
  }
}

TEST(Train, CoOccurringPairScoreRises) {
  std::string text;
  for (int i = 0; i < 20; ++i) text += "the cat sat on the mat\nthe dog ran in the park\n";
  const auto corpus = CorpusText::from_string(text);
  const auto vocab = build_vocab(corpus, 1);
  for (auto arch : {Architecture::SkipGram, Architecture::Contextual}) {
    auto cfg = small_config(arch);
    cfg.epochs = 50;
    cfg.window = 2;
    cfg.negatives = 2;
    cfg.initial_lr = 0.05f;
    PredictionProbe probe(vocab, "cat", {"sat"});
    train(corpus, vocab, cfg, {nullptr, &probe});
    const auto recs = probe.records();
    ASSERT_EQ(recs.size(), 50u);
    EXPECT_GT(*recs[9].mean_score_x100, *recs.front().mean_score_x100 + 5);
    EXPECT_GT(*recs.back().mean_score_x100, *recs.front().mean_score_x100 + 15);
  }
}

TEST(Train, MultiThreadFinishesFinite) {
  const auto toy = zipf_toy(100000);
  for (auto arch : {Architecture::SkipGram, Architecture::Cbow, Architecture::Contextual}) {
    auto cfg = small_config(arch);
    cfg.threads = 4;
    const auto result = train(toy.corpus, toy.vocab, cfg);
    EXPECT_TRUE(result.model.all_finite());
    for (const auto& e : result.epochs) EXPECT_EQ(e.words, 100000u);
  }
}

TEST(Train, OptionalBehaviorsRun) {
  const auto toy = zipf_toy();
  auto cfg = small_config(Architecture::Contextual);
  cfg.subsample = 1e-3;
  cfg.dynamic_window = true;
  cfg.exclude_target_from_context = true;
  const auto result = train(toy.corpus, toy.vocab, cfg);
  EXPECT_TRUE(result.model.all_finite());
}

TEST(Train, DivergenceRaisesNumericError) {
  const auto toy = zipf_toy();
  auto cfg = small_config(Architecture::SkipGram);
  cfg.initial_lr = 1e30f;
  EXPECT_THROW(train(toy.corpus, toy.vocab, cfg), NumericError);
}

TEST(Train, RejectsBadInput) {
  const auto toy = zipf_toy(1000);
  auto cfg = small_config(Architecture::SkipGram);
  cfg.epochs = 0;
  EXPECT_THROW(train(toy.corpus, toy.vocab, cfg), UsageError);
  cfg = small_config(Architecture::Contextual);
  cfg.fusion = {Fusion::Early, FixedGamma{2.0}};
  EXPECT_THROW(train(toy.corpus, toy.vocab, cfg), UsageError);

  const auto empty = CorpusText::from_string("");
  EXPECT_THROW(train(empty, build_vocab(empty, 1), small_config(Architecture::SkipGram)), EmptyVocabularyError);
  const auto oov = CorpusText::from_string("nothing here is known\n");
  EXPECT_THROW(train(oov, toy.vocab, small_config(Architecture::SkipGram)), DataError);
}

TEST(Train, CbowRejectsProbe) {
  const auto toy = zipf_toy(1000);
  PredictionProbe probe(toy.vocab, "w0", {"w1"});
  EXPECT_THROW(train(toy.corpus, toy.vocab, small_config(Architecture::Cbow), {nullptr, &probe}), UsageError);
}

}  // namespace
}  // namespace csg
