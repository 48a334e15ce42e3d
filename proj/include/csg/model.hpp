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
#include <cstdint>
#include <cstring>
#include <new>
#include <random>
#include <span>
#include <vector>

#include "csg/error.hpp"

namespace csg {

template <class T, std::size_t Align>
struct AlignedAllocator {
  using value_type = T;
  template <class U>
  struct rebind {
    using other = AlignedAllocator<U, Align>;
  };

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U, Align>&) {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{Align}));
  }
  void deallocate(T* p, std::size_t) { ::operator delete(p, std::align_val_t{Align}); }

  template <class U>
  bool operator==(const AlignedAllocator<U, Align>&) const {
    return true;
  }
};

/// Row-major single-precision matrix. Rows are padded with zeros to a multiple
/// of kLanes floats and start on a 64-byte boundary; the padding never leaves
/// zero because every update it sees is a multiple of another padded row.
class Matrix {
 public:
  static constexpr std::size_t kLanes = 16;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t dim)
      : rows_(rows), dim_(dim), stride_((dim + kLanes - 1) / kLanes * kLanes), data_(rows * stride_, 0.0f) {}

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }
  std::size_t stride() const { return stride_; }

  float* row_ptr(std::size_t r) { return data_.data() + r * stride_; }
  const float* row_ptr(std::size_t r) const { return data_.data() + r * stride_; }
  std::span<float> row(std::size_t r) { return {row_ptr(r), dim_}; }
  std::span<const float> row(std::size_t r) const { return {row_ptr(r), dim_}; }

  float& operator()(std::size_t r, std::size_t c) { return data_[r * stride_ + c]; }
  float operator()(std::size_t r, std::size_t c) const { return data_[r * stride_ + c]; }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); });
  }

  /// Bitwise equality of shape and contents.
  bool identical(const Matrix& o) const {
    return rows_ == o.rows_ && dim_ == o.dim_ &&
           std::memcmp(data_.data(), o.data_.data(), data_.size() * sizeof(float)) == 0;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::size_t stride_ = 0;
  std::vector<float, AlignedAllocator<float, 64>> data_;
};

namespace vec {

// Fixed accumulation order: 16-lane blocks are dealt round-robin to four
// chains that are combined by a fixed tree, so equal inputs always give
// bitwise-equal dot products regardless of the call site.
inline float dot(const float* a, const float* b, std::size_t n) {
  static_assert(Matrix::kLanes == 16);
  using v16 = float __attribute__((vector_size(64)));
  auto load = [](const float* p) {
    v16 v;
    std::memcpy(&v, p, sizeof v);
    return v;
  };
  v16 s0{}, s1{}, s2{}, s3{};
  const std::size_t blocks = n / 16;
  std::size_t blk = 0;
  for (; blk + 4 <= blocks; blk += 4) {
    const float* x = a + blk * 16;
    const float* y = b + blk * 16;
    s0 += load(x) * load(y);
    s1 += load(x + 16) * load(y + 16);
    s2 += load(x + 32) * load(y + 32);
    s3 += load(x + 48) * load(y + 48);
  }
  const float* x = a + blk * 16;
  const float* y = b + blk * 16;
  switch (blocks - blk) {
    case 3:
      s2 += load(x + 32) * load(y + 32);
      [[fallthrough]];
    case 2:
      s1 += load(x + 16) * load(y + 16);
      [[fallthrough]];
    case 1:
      s0 += load(x) * load(y);
      break;
    default:
      break;
  }
  // Lanes are folded in halves: i + 8, then i + 4, i + 2, i + 1.
  using v8 = float __attribute__((vector_size(32)));
  using v4 = float __attribute__((vector_size(16)));
  const v16 t = (s0 + s1) + (s2 + s3);
  v8 t_lo, t_hi;
  std::memcpy(&t_lo, &t, sizeof t_lo);
  std::memcpy(&t_hi, reinterpret_cast<const char*>(&t) + sizeof t_lo, sizeof t_hi);
  const v8 h = t_lo + t_hi;
  v4 h_lo, h_hi;
  std::memcpy(&h_lo, &h, sizeof h_lo);
  std::memcpy(&h_hi, reinterpret_cast<const char*>(&h) + sizeof h_lo, sizeof h_hi);
  const v4 q = h_lo + h_hi;
  float s = (q[0] + q[2]) + (q[1] + q[3]);
  for (std::size_t i = blocks * 16; i < n; ++i) s += a[i] * b[i];
  return s;
}

/// y += a * x; x and y must not overlap.
inline void axpy(float a, const float* __restrict x, float* __restrict y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

/// grad += g * out; out += g * in, reading `out` before it changes.
inline void grad_step(float g, const float* __restrict in, float* __restrict out, float* __restrict grad,
                      std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const float o = out[i];
    grad[i] += g * o;
    out[i] = o + g * in[i];
  }
}

inline void add(const float* x, float* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += x[i];
}

}  // namespace vec

/// Numerically stable logistic function.
inline double exact_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct ExactSigmoid {
  float operator()(float x) const { return static_cast<float>(exact_sigmoid(x)); }
};

/// Logistic function sampled at resolution+1 evenly spaced points over
/// [-clamp, clamp] with linear interpolation in between; constant beyond.
class SigmoidTable {
 public:
  static constexpr int kDefaultResolution = 1000;
  static constexpr float kDefaultClamp = 6.0f;

  explicit SigmoidTable(int resolution = kDefaultResolution, float clamp = kDefaultClamp)
      : resolution_(resolution), clamp_(clamp), scale_(static_cast<float>(resolution) / (2 * clamp)) {
    if (resolution < 1 || !(clamp > 0)) throw UsageError("invalid sigmoid table shape");
    values_.resize(static_cast<std::size_t>(resolution) + 1);
    for (int i = 0; i <= resolution; ++i) {
      const double x = -static_cast<double>(clamp) + 2.0 * clamp * i / resolution;
      values_[static_cast<std::size_t>(i)] = static_cast<float>(exact_sigmoid(x));
    }
  }

  float operator()(float x) const {
    if (!(x > -clamp_)) return values_.front();
    if (x >= clamp_) return values_.back();
    const float pos = (x + clamp_) * scale_;
    const int i = std::min(static_cast<int>(pos), resolution_ - 1);
    const float frac = pos - static_cast<float>(i);
    return values_[i] + frac * (values_[i + 1] - values_[i]);
  }

  int resolution() const { return resolution_; }
  float clamp() const { return clamp_; }

 private:
  int resolution_;
  float clamp_;
  float scale_;
  std::vector<float> values_;
};

/// Input vectors v and output vectors v' of a word2vec-family model.
struct Model {
  Matrix input;
  Matrix output;

  std::size_t dim() const { return input.dim(); }
  std::size_t vocab_size() const { return input.rows(); }

  bool all_finite() const { return input.all_finite() && output.all_finite(); }
  bool identical(const Model& o) const { return input.identical(o.input) && output.identical(o.output); }
};

/// Input entries i.i.d. uniform in [-0.5/dim, 0.5/dim), output entries zero.
inline Model init_model(std::size_t vocab_size, std::size_t dim, std::uint64_t seed) {
  if (vocab_size < 1 || dim < 1) throw UsageError("model needs at least one word and one dimension");
  Model m{Matrix(vocab_size, dim), Matrix(vocab_size, dim)};
  std::mt19937_64 rng(seed);
  const float inv_dim = 1.0f / static_cast<float>(dim);
  for (std::size_t r = 0; r < vocab_size; ++r) {
    float* row = m.input.row_ptr(r);
    for (std::size_t c = 0; c < dim; ++c) {
      const float u = static_cast<float>(rng() >> 40) * 0x1.0p-24f;
      row[c] = (u - 0.5f) * inv_dim;
    }
  }
  return m;
}

}  // namespace csg
