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

// Multi-epoch training driver.
//
// Each epoch the corpus is split into `threads` byte ranges aligned to line
// starts and every worker trains its range. Workers read and write embedding
// rows without synchronization; updates may be lost under contention. Runs
// are bitwise reproducible only with a single thread.

#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "csg/corpus.hpp"
#include "csg/error.hpp"
#include "csg/kernels.hpp"
#include "csg/model.hpp"
#include "csg/probe.hpp"
#include "csg/vocab.hpp"

namespace csg {

struct TrainConfig {
  Architecture architecture = Architecture::Contextual;
  FusionSpec fusion;
  std::size_t dim = 200;
  std::size_t window = 5;
  std::size_t negatives = 5;
  int epochs = 5;
  float initial_lr = 0.025f;
  std::uint64_t min_count = 5;
  int threads = 1;
  std::uint64_t seed = 1;
  std::optional<double> subsample;
  bool dynamic_window = false;
  bool exclude_target_from_context = false;
  std::size_t noise_table_size = NoiseTable::kDefaultSize;

  void validate() const {
    if (epochs < 1) throw UsageError("epochs must be >= 1");
    if (window < 1) throw UsageError("window must be >= 1");
    if (dim < 1) throw UsageError("dim must be >= 1");
    if (negatives < 1) throw UsageError("negative must be >= 1");
    if (!(initial_lr > 0.0f)) throw UsageError("lr must be positive");
    if (min_count < 1) throw UsageError("min-count must be >= 1");
    if (threads < 1) throw UsageError("threads must be >= 1");
    if (subsample && !(*subsample > 0.0)) throw UsageError("subsample threshold must be positive");
    if (architecture == Architecture::Contextual) fusion.validate();
  }
};

struct EpochReport {
  int epoch = 0;
  std::uint64_t words = 0;  // in-vocabulary tokens read this epoch
  double seconds = 0;
  double words_per_sec = 0;
  float lr = 0;       // learning rate at the end of the epoch
  double gamma = 0;   // fusion weight; mean of the draws for the random schedule
};

struct TrainResult {
  Model model;
  std::vector<EpochReport> epochs;
};

struct TrainHooks {
  std::function<void(const EpochReport&)> on_epoch;
  PredictionProbe* probe = nullptr;
};

namespace detail {

class TrainerRun {
 public:
  TrainerRun(const CorpusText& corpus, const Vocabulary& vocab, const TrainConfig& config, TrainHooks& hooks)
      : corpus_(corpus),
        vocab_(vocab),
        config_(config),
        hooks_(hooks),
        noise_(vocab, NoiseTable::kDefaultPower, std::max(config.noise_table_size, vocab.size())),
        model_(init_model(vocab.size(), config.dim, config.seed)) {
    if (config.subsample) {
      keep_.resize(vocab.size());
      for (std::size_t w = 0; w < vocab.size(); ++w) {
        keep_[w] = subsample_keep_probability(vocab.counts()[w], vocab.total_count(), *config.subsample);
      }
    }
    if (hooks.probe && config.architecture == Architecture::Cbow) {
      throw UsageError("the prediction probe applies to sg and csg only");
    }
  }

  TrainResult run() {
    words_per_epoch_ = count_words();
    if (words_per_epoch_ == 0) throw DataError("corpus contains no in-vocabulary tokens");
    words_total_ = words_per_epoch_ * static_cast<std::uint64_t>(config_.epochs);
    TrainResult result;
    const auto ranges = corpus_.partition(static_cast<std::size_t>(config_.threads));
    for (int epoch = 1; epoch <= config_.epochs; ++epoch) {
      const auto start = std::chrono::steady_clock::now();
      std::mt19937_64 gamma_rng(config_.seed ^ 0x9E3779B97F4A7C15ULL);
      epoch_gamma_ = gamma_for(config_.fusion, epoch, config_.epochs, gamma_rng);
      if (hooks_.probe) hooks_.probe->begin_epoch(epoch, ranges.size());
      std::vector<WorkerStats> stats(ranges.size());
      const std::uint64_t done_before = words_done_.load();
      if (ranges.size() == 1) {
        work(0, ranges[0], epoch, stats[0]);
      } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < ranges.size(); ++t) {
          pool.emplace_back([&, t] { work(t, ranges[t], epoch, stats[t]); });
        }
        for (auto& th : pool) th.join();
      }
      if (!model_.all_finite()) {
        throw NumericError("non-finite value in the model after epoch " + std::to_string(epoch));
      }
      if (hooks_.probe) hooks_.probe->end_epoch();

      EpochReport rep;
      rep.epoch = epoch;
      rep.words = words_done_.load() - done_before;
      rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      rep.words_per_sec = rep.seconds > 0 ? static_cast<double>(rep.words) / rep.seconds : 0.0;
      rep.lr = lr_schedule(config_.initial_lr, words_done_.load(), words_total_);
      if (config_.architecture == Architecture::Contextual && config_.fusion.is_random()) {
        double sum = 0;
        std::uint64_t n = 0;
        for (const auto& s : stats) sum += s.gamma_sum, n += s.gamma_draws;
        rep.gamma = n ? sum / static_cast<double>(n) : 0.0;
      } else {
        rep.gamma = config_.architecture == Architecture::Contextual ? epoch_gamma_ : 0.0;
      }
      if (hooks_.on_epoch) hooks_.on_epoch(rep);
      result.epochs.push_back(rep);
    }
    result.model = std::move(model_);
    return result;
  }

 private:
  struct WorkerStats {
    double gamma_sum = 0;
    std::uint64_t gamma_draws = 0;
  };

  std::uint64_t count_words() const {
    std::uint64_t n = 0;
    for_each_token(corpus_.view(), [&](std::string_view t) { n += vocab_.lookup(t) >= 0; });
    return n;
  }

  void work(std::size_t worker, std::pair<std::size_t, std::size_t> range, int epoch, WorkerStats& stats) {
    std::seed_seq seq{config_.seed, static_cast<std::uint64_t>(worker), static_cast<std::uint64_t>(epoch)};
    std::mt19937_64 rng(seq);
    KernelWorkspace ws(model_.input.stride());
    const SigmoidTable sigma;
    std::vector<WordId> sentence;
    std::vector<WordId> negatives(config_.negatives);
    std::vector<WordId> context;
    float lr = lr_schedule(config_.initial_lr, words_done_.load(std::memory_order_relaxed), words_total_);

    corpus_.for_each_line(range.first, range.second, [&](std::string_view line) {
      sentence.clear();
      std::uint64_t read = 0;
      for_each_token(line, [&](std::string_view tok) {
        const WordId id = vocab_.lookup(tok);
        if (id < 0) return;
        ++read;
        if (!keep_.empty() && keep_[static_cast<std::size_t>(id)] < uniform01(rng)) return;
        sentence.push_back(id);
      });
      if (!sentence.empty()) train_sentence(worker, sentence, lr, rng, sigma, ws, negatives, context, stats);
      const std::uint64_t done = words_done_.fetch_add(read, std::memory_order_relaxed) + read;
      lr = lr_schedule(config_.initial_lr, done, words_total_);
    });
  }

  void train_sentence(std::size_t worker, std::span<const WordId> s, float lr, std::mt19937_64& rng,
                      const SigmoidTable& sigma, KernelWorkspace& ws, std::vector<WordId>& negatives,
                      std::vector<WordId>& context, WorkerStats& stats) {
    const std::size_t n = s.size();
    PredictionProbe* probe = hooks_.probe;
    for (std::size_t t = 0; t < n; ++t) {
      std::size_t c = config_.window;
      if (config_.dynamic_window) c = config_.window - static_cast<std::size_t>(rng() % config_.window);
      const std::size_t lo = t >= c ? t - c : 0;
      const std::size_t hi = std::min(n - 1, t + c);
      const WordId center = s[t];

      switch (config_.architecture) {
        case Architecture::SkipGram:
          draw_window_negatives(s, t, lo, hi, rng, negatives);
          for (std::size_t j = lo, p = 0; j <= hi; ++j) {
            if (j == t) continue;
            const auto neg = pair_negatives(negatives, p++);
            if (probe && center == probe->center()) probe_sg(worker, center, s[j]);
            train_pair_sg(model_, center, s[j], neg, lr, sigma, ws);
          }
          break;

        case Architecture::Contextual: {
          float gamma = static_cast<float>(epoch_gamma_);
          if (config_.fusion.is_random()) {
            gamma = static_cast<float>(uniform01(rng));
            stats.gamma_sum += gamma;
            ++stats.gamma_draws;
          }
          float* v_con = ws.context.data();
          if (!config_.exclude_target_from_context) context_vector(model_.input, s, t, c, v_con);
          draw_window_negatives(s, t, lo, hi, rng, negatives);
          for (std::size_t j = lo, p = 0; j <= hi; ++j) {
            if (j == t) continue;
            if (config_.exclude_target_from_context) context_vector(model_.input, s, t, c, v_con, j);
            const auto neg = pair_negatives(negatives, p++);
            if (probe && center == probe->center()) probe_csg(worker, center, s[j], v_con, gamma);
            train_pair_csg(model_, center, s[j], v_con, gamma, config_.fusion.method, neg, lr, sigma, ws);
          }
          break;
        }

        case Architecture::Cbow:
          context.clear();
          for (std::size_t j = lo; j <= hi; ++j) {
            if (j != t) context.push_back(s[j]);
          }
          if (context.empty()) break;
          negatives.resize(config_.negatives);
          noise_.draw_negatives(center, rng, std::span<WordId>(negatives));
          train_pair_cbow(model_, center, context, negatives, lr, sigma, ws);
          break;
      }
    }
  }

  // Negatives for every (center, target) pair of the window, drawn in pair
  // order and stored back to back.
  void draw_window_negatives(std::span<const WordId> s, std::size_t t, std::size_t lo, std::size_t hi,
                             std::mt19937_64& rng, std::vector<WordId>& negatives) const {
    const std::size_t k = config_.negatives;
    negatives.resize((hi - lo) * k);
    std::size_t p = 0;
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j == t) continue;
      noise_.draw_negatives(s[j], rng, std::span<WordId>(negatives).subspan(p++ * k, k));
    }
  }

  std::span<const WordId> pair_negatives(const std::vector<WordId>& negatives, std::size_t p) const {
    return std::span<const WordId>(negatives).subspan(p * config_.negatives, config_.negatives);
  }

  void probe_sg(std::size_t worker, WordId center, WordId target) {
    const int slot = hooks_.probe->slot(target);
    if (slot < 0) return;
    const double d = vec::dot(model_.input.row_ptr(center), model_.output.row_ptr(target), model_.input.stride());
    hooks_.probe->record(worker, slot, exact_sigmoid(d));
  }

  void probe_csg(std::size_t worker, WordId center, WordId target, const float* v_con, float gamma) {
    const int slot = hooks_.probe->slot(target);
    if (slot < 0) return;
    const std::size_t n = model_.input.stride();
    const float* vc = model_.input.row_ptr(center);
    const float* vo = model_.output.row_ptr(target);
    double score;
    if (config_.fusion.method == Fusion::Early) {
      std::vector<float> fused(n);
      for (std::size_t i = 0; i < n; ++i) fused[i] = gamma * v_con[i] + (1.0f - gamma) * vc[i];
      score = exact_sigmoid(vec::dot(fused.data(), vo, n));
    } else {
      score = gamma * exact_sigmoid(vec::dot(v_con, vo, n)) + (1.0 - gamma) * exact_sigmoid(vec::dot(vc, vo, n));
    }
    hooks_.probe->record(worker, slot, score);
  }

  const CorpusText& corpus_;
  const Vocabulary& vocab_;
  const TrainConfig& config_;
  TrainHooks& hooks_;
  NoiseTable noise_;
  Model model_;
  std::vector<double> keep_;
  std::uint64_t words_per_epoch_ = 0;
  std::uint64_t words_total_ = 0;
  std::atomic<std::uint64_t> words_done_{0};
  double epoch_gamma_ = 0;
};

}  // namespace detail

/// Trains a model over `corpus` (one sentence per line). Out-of-vocabulary
/// tokens are removed before windowing.
inline TrainResult train(const CorpusText& corpus, const Vocabulary& vocab, const TrainConfig& config,
                         TrainHooks hooks = {}) {
  config.validate();
  if (vocab.empty()) throw EmptyVocabularyError("cannot train with an empty vocabulary");
  detail::TrainerRun run(corpus, vocab, config, hooks);
  return run.run();
}

}  // namespace csg
