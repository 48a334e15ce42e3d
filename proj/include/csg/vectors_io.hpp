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

// word2vec vector files.
//
//   text:   "<rows> <dim>\n" then "word x1 ... xd\n" per row
//   binary: "<rows> <dim>\n" then per row: word bytes, 0x20, dim little-endian
//           IEEE-754 floats, and a '\n' separator
//
// Text values are written in shortest round-trip form, so text files reload
// exactly as well. Readers accept binary files with or without the separator.

#pragma once

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "csg/corpus.hpp"
#include "csg/error.hpp"
#include "csg/model.hpp"

namespace csg {

enum class VectorFormat { Text, Binary };

class VectorFormatError : public DataError {
 public:
  enum class Kind { MalformedHeader, DimensionMismatch, Truncated, MalformedEntry };

  VectorFormatError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct WordVectors {
  std::vector<std::string> words;
  Matrix vectors;
};

/// ".bin" selects binary; anything else is text.
inline VectorFormat format_for_path(std::string_view path) {
  return path.ends_with(".bin") ? VectorFormat::Binary : VectorFormat::Text;
}

namespace detail {

inline std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xFF) << 24) | ((v & 0xFF00) << 8) | ((v >> 8) & 0xFF00) | (v >> 24);
  }
  return v;
}

inline void parse_header(const std::string& line, std::size_t& rows, std::size_t& dim) {
  std::istringstream hs(line);
  long long r = -1, d = -1;
  std::string extra;
  if (!(hs >> r >> d) || (hs >> extra) || r < 0 || d < 1) {
    throw VectorFormatError(VectorFormatError::Kind::MalformedHeader, "malformed vector file header: '" + line + "'");
  }
  rows = static_cast<std::size_t>(r);
  dim = static_cast<std::size_t>(d);
}

}  // namespace detail

inline void save_vectors(std::ostream& out, std::span<const std::string> words, const Matrix& m,
                         VectorFormat format) {
  if (words.size() != m.rows()) throw UsageError("word list and matrix disagree in size");
  out << m.rows() << ' ' << m.dim() << '\n';
  char buf[32];
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << words[r];
    const float* row = m.row_ptr(r);
    if (format == VectorFormat::Text) {
      for (std::size_t c = 0; c < m.dim(); ++c) {
        const auto res = std::to_chars(buf, buf + sizeof buf, row[c]);
        out.put(' ');
        out.write(buf, res.ptr - buf);
      }
    } else {
      out.put(' ');
      for (std::size_t c = 0; c < m.dim(); ++c) {
        const std::uint32_t bits = detail::to_little_endian(std::bit_cast<std::uint32_t>(row[c]));
        out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
      }
    }
    out.put('\n');
  }
  if (!out) throw DataError("failed writing vectors");
}

inline WordVectors load_vectors(std::istream& in, VectorFormat format) {
  using Kind = VectorFormatError::Kind;
  std::string header;
  if (!std::getline(in, header)) throw VectorFormatError(Kind::MalformedHeader, "empty vector file");
  std::size_t rows = 0, dim = 0;
  detail::parse_header(header, rows, dim);

  WordVectors wv{{}, Matrix(rows, dim)};
  wv.words.reserve(rows);
  if (format == VectorFormat::Text) {
    std::string line;
    for (std::size_t r = 0; r < rows; ++r) {
      if (!std::getline(in, line)) {
        throw VectorFormatError(Kind::Truncated, "expected " + std::to_string(rows) + " rows, found " +
                                                     std::to_string(r));
      }
      std::size_t col = 0;
      bool first = true;
      float* row = wv.vectors.row_ptr(r);
      for_each_token(line, [&](std::string_view tok) {
        if (first) {
          wv.words.emplace_back(tok);
          first = false;
          return;
        }
        if (col >= dim) {
          throw VectorFormatError(Kind::DimensionMismatch,
                                  "row " + std::to_string(r + 1) + " has more than " + std::to_string(dim) + " values");
        }
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), row[col]);
        if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
          throw VectorFormatError(Kind::MalformedEntry, "bad value '" + std::string(tok) + "' in row " +
                                                            std::to_string(r + 1));
        }
        ++col;
      });
      if (first || col < dim) {
        throw VectorFormatError(Kind::Truncated, "row " + std::to_string(r + 1) + " has " + std::to_string(col) +
                                                     " of " + std::to_string(dim) + " values");
      }
    }
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        throw VectorFormatError(Kind::DimensionMismatch, "more rows than the header declares");
      }
    }
  } else {
    std::vector<std::uint32_t> raw(dim);
    for (std::size_t r = 0; r < rows; ++r) {
      std::string word;
      int ch;
      while ((ch = in.get()) != EOF && (ch == '\n' || ch == '\r')) {
      }
      while (ch != EOF && ch != ' ') {
        word.push_back(static_cast<char>(ch));
        ch = in.get();
      }
      if (ch == EOF) {
        throw VectorFormatError(Kind::Truncated, "expected " + std::to_string(rows) + " rows, found " +
                                                     std::to_string(r));
      }
      in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(dim * sizeof(std::uint32_t)));
      if (static_cast<std::size_t>(in.gcount()) != dim * sizeof(std::uint32_t)) {
        throw VectorFormatError(Kind::Truncated, "row " + std::to_string(r + 1) + " is cut short");
      }
      float* row = wv.vectors.row_ptr(r);
      for (std::size_t c = 0; c < dim; ++c) row[c] = std::bit_cast<float>(detail::to_little_endian(raw[c]));
      wv.words.push_back(std::move(word));
    }
    int ch;
    while ((ch = in.get()) != EOF) {
      if (ch != '\n' && ch != '\r') throw VectorFormatError(Kind::DimensionMismatch, "trailing data after last row");
    }
  }
  return wv;
}

inline void save_vectors(const std::string& path, std::span<const std::string> words, const Matrix& m,
                         VectorFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  save_vectors(out, words, m, format);
}

inline WordVectors load_vectors(const std::string& path, VectorFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return load_vectors(in, format);
}

}  // namespace csg
