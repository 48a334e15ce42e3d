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

// Scoring functions and per-pair SGD updates for skip-gram (SG), CBOW and
// contextual skip-gram (CSG).
//
// CSG predicts a neighbor w_{t+i} of the center word w_t from both v_{w_t} and
// a context vector v_con, the sum of the input vectors of every other word in
// the window. The two are combined with a fusion weight gamma in [0, 1]:
//
//   early fusion  s_EF = sigma((gamma * v_con + (1 - gamma) * v_t) . v'_{t+i})
//   late fusion   s_LF = gamma * sigma(v_con . v'_{t+i}) + (1 - gamma) * sigma(v_t . v'_{t+i})
//
// Training uses the same update shape as SG with g = label - s:
//
//   v_t          += lr * sum_samples g * v'_sample   (applied after all samples)
//   v'_sample    += lr * g * v_t                      (applied per sample)
//
// Context words' input vectors are not updated.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "csg/error.hpp"
#include "csg/model.hpp"
#include "csg/vocab.hpp"

namespace csg {

enum class Architecture { SkipGram, Cbow, Contextual };
enum class Fusion { Early, Late };

struct FixedGamma {
  double value = 0.0;
};
struct LinearGamma {};
struct RandomGamma {};

using GammaSchedule = std::variant<FixedGamma, LinearGamma, RandomGamma>;

struct FusionSpec {
  Fusion method = Fusion::Early;
  GammaSchedule schedule = LinearGamma{};

  bool is_random() const { return std::holds_alternative<RandomGamma>(schedule); }

  void validate() const {
    if (const auto* f = std::get_if<FixedGamma>(&schedule)) {
      if (!(f->value >= 0.0 && f->value <= 1.0)) throw UsageError("fusion weight must lie in [0, 1]");
      if (method == Fusion::Late && f->value == 1.0) {
        throw UsageError("late fusion with gamma = 1 is identical to early fusion with gamma = 1; use --fusion ef");
      }
    }
  }
};

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit engine.
template <class Rng>
double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Fusion weight for `current_epoch` (1-based). The linear schedule rises from
/// 0 at the first epoch to 1 at the last, and is 0 when there is only one
/// epoch. The random schedule draws a fresh value on every call.
template <class Rng>
double gamma_for(const FusionSpec& spec, int current_epoch, int total_epochs, Rng& rng) {
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, FixedGamma>) {
          return s.value;
        } else if constexpr (std::is_same_v<S, LinearGamma>) {
          if (total_epochs <= 1) return 0.0;
          return static_cast<double>(current_epoch - 1) / static_cast<double>(total_epochs - 1);
        } else {
          return uniform01(rng);
        }
      },
      spec.schedule);
}

inline constexpr double kMinLearningRateFraction = 1e-4;

/// Linear decay over the whole multi-epoch token budget, floored at
/// 1e-4 * initial.
inline float lr_schedule(float initial, std::uint64_t words_done, std::uint64_t words_total) {
  if (words_total == 0) return initial;
  const double progress = static_cast<double>(words_done) / static_cast<double>(words_total);
  return static_cast<float>(initial * std::max(kMinLearningRateFraction, 1.0 - progress));
}

/// Scratch rows for one worker.
struct KernelWorkspace {
  explicit KernelWorkspace(std::size_t stride) : fused(stride, 0.0f), grad(stride, 0.0f), context(stride, 0.0f) {}

  std::vector<float, AlignedAllocator<float, 64>> fused;
  std::vector<float, AlignedAllocator<float, 64>> grad;
  std::vector<float, AlignedAllocator<float, 64>> context;
};

/// Sums the input rows of sentence[center - window .. center + window],
/// clipped at the sentence ends, skipping the center position and the
/// optional `skip` position. `out` must hold input.stride() floats.
inline void context_vector(const Matrix& input, std::span<const WordId> sentence, std::size_t center,
                           std::size_t window, float* out, std::size_t skip = SIZE_MAX) {
  const std::size_t n = input.stride();
  std::fill(out, out + n, 0.0f);
  const std::size_t lo = center >= window ? center - window : 0;
  const std::size_t hi = std::min(sentence.size() - 1, center + window);
  for (std::size_t j = lo; j <= hi; ++j) {
    if (j == center || j == skip) continue;
    vec::add(input.row_ptr(static_cast<std::size_t>(sentence[j])), out, n);
  }
}

inline std::vector<float> context_vector(const Matrix& input, std::span<const WordId> sentence, std::size_t center,
                                         std::size_t window) {
  std::vector<float> buf(input.stride());
  context_vector(input, sentence, center, window, buf.data());
  buf.resize(input.dim());
  return buf;
}

// Probability-valued scores. `sign` = -1 gives the negative-sample branch,
// sigma(-x).

template <class Sigmoid = ExactSigmoid>
float score_sg(const Model& m, WordId center, WordId target, int sign, const Sigmoid& sigma = {}) {
  const float d = vec::dot(m.input.row_ptr(center), m.output.row_ptr(target), m.input.stride());
  return sigma(static_cast<float>(sign) * d);
}

// v_con holds at least dim() floats; it is copied into a padded row so every
// score dots over the same stride as the trainer.
template <class Sigmoid = ExactSigmoid>
float score_ef(std::span<const float> v_con, const Model& m, WordId center, WordId target, float gamma, int sign,
               const Sigmoid& sigma = {}) {
  const std::size_t n = m.input.stride();
  std::vector<float, AlignedAllocator<float, 64>> fused(n, 0.0f);
  const float* vc = m.input.row_ptr(center);
  for (std::size_t i = 0; i < m.dim(); ++i) fused[i] = gamma * v_con[i] + (1.0f - gamma) * vc[i];
  return sigma(static_cast<float>(sign) * vec::dot(fused.data(), m.output.row_ptr(target), n));
}

template <class Sigmoid = ExactSigmoid>
float score_lf(std::span<const float> v_con, const Model& m, WordId center, WordId target, float gamma, int sign,
               const Sigmoid& sigma = {}) {
  const std::size_t n = m.input.stride();
  std::vector<float, AlignedAllocator<float, 64>> con(n, 0.0f);
  std::copy_n(v_con.begin(), m.dim(), con.begin());
  const float* vo = m.output.row_ptr(target);
  const float s = static_cast<float>(sign);
  return gamma * sigma(s * vec::dot(con.data(), vo, n)) +
         (1.0f - gamma) * sigma(s * vec::dot(m.input.row_ptr(center), vo, n));
}

namespace detail {

inline bool all_distinct(WordId target, std::span<const WordId> negatives) {
  for (std::size_t i = 0; i < negatives.size(); ++i) {
    if (negatives[i] == target) return false;
    for (std::size_t j = 0; j < i; ++j) {
      if (negatives[i] == negatives[j]) return false;
    }
  }
  return true;
}

// One positive and k negative updates against output rows; `score(vo)`
// returns the probability-valued prediction for output row `vo`. `input` is
// the vector that moves the output rows. The gradient summed over samples is
// added to `apply` when given, else left in ws.grad.
//
// With distinct sample rows no update feeds a later score, so all scores are
// taken first and the row updates run in one pass; every element still sees
// the same operations in the same order as the sample-by-sample loop.
template <class Score>
void negative_sampling_step(Model& m, const float* input, WordId target, std::span<const WordId> negatives,
                            float lr, Score&& score, KernelWorkspace& ws, float* apply) {
  const std::size_t n = m.input.stride();
  constexpr std::size_t kMaxBatch = 64;
  const std::size_t samples = negatives.size() + 1;
  if (samples > kMaxBatch || !all_distinct(target, negatives)) {
    float* grad = ws.grad.data();
    std::fill(grad, grad + n, 0.0f);
    auto sample = [&](WordId w, float label) {
      float* vo = m.output.row_ptr(static_cast<std::size_t>(w));
      const float g = (label - score(vo)) * lr;
      vec::grad_step(g, input, vo, grad, n);
    };
    sample(target, 1.0f);
    for (WordId w : negatives) sample(w, 0.0f);
    if (apply) vec::add(grad, apply, n);
    return;
  }

  float* rows[kMaxBatch];
  float g[kMaxBatch];
  rows[0] = m.output.row_ptr(static_cast<std::size_t>(target));
  for (std::size_t s = 1; s < samples; ++s) rows[s] = m.output.row_ptr(static_cast<std::size_t>(negatives[s - 1]));
  for (std::size_t s = 0; s < samples; ++s) g[s] = ((s == 0 ? 1.0f : 0.0f) - score(rows[s])) * lr;

  using v16 = float __attribute__((vector_size(64)));
  static_assert(Matrix::kLanes == 16);
  for (std::size_t i = 0; i < n; i += 16) {
    v16 x, gr{};
    std::memcpy(&x, input + i, sizeof x);
    for (std::size_t s = 0; s < samples; ++s) {
      v16 o;
      std::memcpy(&o, rows[s] + i, sizeof o);
      const v16 gs = g[s] - v16{};
      gr += gs * o;
      o = o + gs * x;
      std::memcpy(rows[s] + i, &o, sizeof o);
    }
    if (apply) {
      v16 y;
      std::memcpy(&y, apply + i, sizeof y);
      y += gr;
      std::memcpy(apply + i, &y, sizeof y);
    } else {
      std::memcpy(ws.grad.data() + i, &gr, sizeof gr);
    }
  }
}

}  // namespace detail

/// Skip-gram negative-sampling update for one (center, target) pair.
template <class Sigmoid>
void train_pair_sg(Model& m, WordId center, WordId target, std::span<const WordId> negatives, float lr,
                   const Sigmoid& sigma, KernelWorkspace& ws) {
  const std::size_t n = m.input.stride();
  float* vc = m.input.row_ptr(static_cast<std::size_t>(center));
  detail::negative_sampling_step(
      m, vc, target, negatives, lr, [&](const float* vo) { return sigma(vec::dot(vc, vo, n)); }, ws, vc);
}

/// Contextual skip-gram update for one (center, target) pair with the context
/// vector `v_con` (input.stride() floats) fixed for the window.
template <class Sigmoid>
void train_pair_csg(Model& m, WordId center, WordId target, const float* v_con, float gamma, Fusion fusion,
                    std::span<const WordId> negatives, float lr, const Sigmoid& sigma, KernelWorkspace& ws) {
  const std::size_t n = m.input.stride();
  float* vc = m.input.row_ptr(static_cast<std::size_t>(center));
  if (fusion == Fusion::Early) {
    float* fused = ws.fused.data();
    const float rest = 1.0f - gamma;
    for (std::size_t i = 0; i < n; ++i) fused[i] = gamma * v_con[i] + rest * vc[i];
    detail::negative_sampling_step(
        m, vc, target, negatives, lr, [&](const float* vo) { return sigma(vec::dot(fused, vo, n)); }, ws, vc);
  } else {
    const float rest = 1.0f - gamma;
    detail::negative_sampling_step(
        m, vc, target, negatives, lr,
        [&](const float* vo) { return gamma * sigma(vec::dot(v_con, vo, n)) + rest * sigma(vec::dot(vc, vo, n)); },
        ws, vc);
  }
}

/// CBOW negative-sampling update predicting `center` from the mean of the
/// context rows; every context row receives the full accumulated gradient.
template <class Sigmoid>
void train_pair_cbow(Model& m, WordId center, std::span<const WordId> context, std::span<const WordId> negatives,
                     float lr, const Sigmoid& sigma, KernelWorkspace& ws) {
  if (context.empty()) return;
  const std::size_t n = m.input.stride();
  float* h = ws.context.data();
  std::fill(h, h + n, 0.0f);
  for (WordId w : context) vec::add(m.input.row_ptr(static_cast<std::size_t>(w)), h, n);
  const float inv = 1.0f / static_cast<float>(context.size());
  for (std::size_t i = 0; i < n; ++i) h[i] *= inv;
  detail::negative_sampling_step(
      m, h, center, negatives, lr, [&](const float* vo) { return sigma(vec::dot(h, vo, n)); }, ws, nullptr);
  for (WordId w : context) vec::add(ws.grad.data(), m.input.row_ptr(static_cast<std::size_t>(w)), n);
}

/// Full gradient-ascent step on the early-fusion log-likelihood
///   log s_EF(v'_target) + sum_neg log sigma(-fused . v'_neg)
/// including the context words' input vectors. All gradients are taken at
/// the incoming parameters and applied together. Reference for gradient
/// checks; the trainer uses train_pair_csg.
template <class Sigmoid = ExactSigmoid>
void train_pair_csg_exact(Model& m, WordId center, WordId target, std::span<const WordId> context_words, float gamma,
                          std::span<const WordId> negatives, float lr, const Sigmoid& sigma = {}) {
  const std::size_t n = m.input.stride();
  std::vector<float> v_con(n, 0.0f), fused(n), grad(n, 0.0f);
  for (WordId w : context_words) vec::add(m.input.row_ptr(static_cast<std::size_t>(w)), v_con.data(), n);
  const float* vc = m.input.row_ptr(static_cast<std::size_t>(center));
  for (std::size_t i = 0; i < n; ++i) fused[i] = gamma * v_con[i] + (1.0f - gamma) * vc[i];

  std::vector<WordId> samples{target};
  samples.insert(samples.end(), negatives.begin(), negatives.end());
  std::vector<float> g(samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const float* vo = m.output.row_ptr(static_cast<std::size_t>(samples[s]));
    g[s] = (s == 0 ? 1.0f : 0.0f) - sigma(vec::dot(fused.data(), vo, n));
    vec::axpy(g[s], vo, grad.data(), n);
  }
  for (std::size_t s = 0; s < samples.size(); ++s) {
    vec::axpy(lr * g[s], fused.data(), m.output.row_ptr(static_cast<std::size_t>(samples[s])), n);
  }
  vec::axpy(lr * (1.0f - gamma), grad.data(), m.input.row_ptr(static_cast<std::size_t>(center)), n);
  for (WordId w : context_words) vec::axpy(lr * gamma, grad.data(), m.input.row_ptr(static_cast<std::size_t>(w)), n);
}

}  // namespace csg
