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


// Run manifests: flat "key=value" files written next to run outputs. Keys
// without a "run." prefix are the merged configuration and can be passed
// back through --config to replay the run.

#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "csg/error.hpp"

namespace csg {

/// 64-bit FNV-1a.
class Fnv1a {
 public:
  void update(std::string_view bytes) {
    for (unsigned char b : bytes) {
      hash_ ^= b;
      hash_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t digest() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t fnv1a(std::string_view bytes) {
  Fnv1a h;
  h.update(bytes);
  return h.digest();
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
  return s;
}

using KeyValues = std::vector<std::pair<std::string, std::string>>;

struct RunManifest {
  KeyValues config;  // replayable settings
  KeyValues run;     // facts about the run, written with a "run." prefix

  void set(std::string key, std::string value) { config.emplace_back(std::move(key), std::move(value)); }
  void note(std::string key, std::string value) { run.emplace_back(std::move(key), std::move(value)); }

  void write(std::ostream& out) const {
    for (const auto& [k, v] : config) out << k << '=' << v << '\n';
    for (const auto& [k, v] : run) out << "run." << k << '=' << v << '\n';
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    write(out);
  }
};

/// Reads "key=value" lines. Blank lines and lines starting with '#' or ';'
/// are ignored; keys and values are trimmed.
inline KeyValues read_key_values(std::istream& in, const std::string& source = "config") {
  KeyValues out;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return std::string_view{};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw DataError(source + " line " + std::to_string(lineno) + ": expected key=value");
    }
    out.emplace_back(std::string(trim(t.substr(0, eq))), std::string(trim(t.substr(eq + 1))));
  }
  return out;
}

}  // namespace csg
