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

#include <stdexcept>
#include <string>

namespace csg {

/// Invalid flags, flag combinations or configuration values.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Missing, unreadable or malformed input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A non-finite value appeared in the model.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No word survived the frequency cutoff.
class EmptyVocabularyError : public DataError {
 public:
  using DataError::DataError;
};

/// Rank correlation is undefined (too few samples or a constant input).
class UndefinedCorrelationError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace csg
