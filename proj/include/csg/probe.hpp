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
#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "csg/error.hpp"
#include "csg/utf8.hpp"
#include "csg/vocab.hpp"

namespace csg {

struct ProbeRecord {
  int epoch = 0;
  std::string context_word;
  std::optional<double> mean_score_x100;  // absent when never observed
  std::uint64_t observations = 0;

  bool operator==(const ProbeRecord&) const = default;
};

/// Tracks the positive-sample prediction score for a fixed center word and a
/// set of neighbor words during training. Workers record into private
/// buffers; end_epoch() merges them into one record per tracked word.
class PredictionProbe {
 public:
  PredictionProbe(const Vocabulary& vocab, const std::string& center, const std::vector<std::string>& tracked) {
    std::string lowered;
    utf8::lowercase(center, lowered);
    center_name_ = lowered;
    const auto id = vocab.find(lowered);
    if (!id) throw UsageError("probe center word '" + lowered + "' is not in the vocabulary");
    center_ = *id;
    for (const auto& t : tracked) {
      utf8::lowercase(t, lowered);
      names_.push_back(lowered);
      ids_.push_back(vocab.lookup(lowered));
    }
  }

  WordId center() const { return center_; }
  const std::string& center_word() const { return center_name_; }

  /// Index of `target` among the tracked words, or -1.
  int slot(WordId target) const {
    const auto it = std::find(ids_.begin(), ids_.end(), target);
    return it == ids_.end() ? -1 : static_cast<int>(it - ids_.begin());
  }

  void begin_epoch(int epoch, std::size_t workers) {
    epoch_ = epoch;
    buffers_.assign(workers, std::vector<Accum>(ids_.size()));
  }

  void record(std::size_t worker, int slot, double score) {
    auto& a = buffers_[worker][static_cast<std::size_t>(slot)];
    a.sum += score;
    ++a.count;
  }

  void end_epoch() {
    for (std::size_t s = 0; s < ids_.size(); ++s) {
      double sum = 0;
      std::uint64_t count = 0;
      for (const auto& b : buffers_) {
        sum += b[s].sum;
        count += b[s].count;
      }
      ProbeRecord r{epoch_, names_[s], std::nullopt, count};
      if (count > 0) r.mean_score_x100 = 100.0 * sum / static_cast<double>(count);
      records_.push_back(std::move(r));
    }
    buffers_.clear();
  }

  std::span<const ProbeRecord> records() const { return records_; }

 private:
  struct Accum {
    double sum = 0;
    std::uint64_t count = 0;
  };

  WordId center_ = -1;
  std::string center_name_;
  std::vector<std::string> names_;
  std::vector<WordId> ids_;
  int epoch_ = 0;
  std::vector<std::vector<Accum>> buffers_;
  std::vector<ProbeRecord> records_;
};

inline constexpr const char* kProbeCsvHeader = "epoch,word,mean_x100,n";

inline void write_probe_csv(std::ostream& out, std::span<const ProbeRecord> records) {
  out << kProbeCsvHeader << '\n';
  char buf[32];
  for (const auto& r : records) {
    out << r.epoch << ',' << r.context_word << ',';
    if (r.mean_score_x100) {
      std::snprintf(buf, sizeof buf, "%.2f", *r.mean_score_x100);
      out << buf;
    }
    out << ',' << r.observations << '\n';
  }
}

inline std::vector<ProbeRecord> read_probe_csv(std::istream& in) {
  std::vector<ProbeRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == kProbeCsvHeader) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (line.back() == ',') fields.emplace_back();
    if (fields.size() != 4) throw DataError("probe csv line " + std::to_string(lineno) + ": expected 4 fields");
    try {
      ProbeRecord r;
      r.epoch = std::stoi(fields[0]);
      r.context_word = fields[1];
      if (!fields[2].empty()) r.mean_score_x100 = std::stod(fields[2]);
      r.observations = std::stoull(fields[3]);
      out.push_back(std::move(r));
    } catch (const std::exception&) {
      throw DataError("probe csv line " + std::to_string(lineno) + ": bad number");
    }
  }
  return out;
}

}  // namespace csg
