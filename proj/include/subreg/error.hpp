// Copyright 2026 The subreg Authors.
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

#ifndef SUBREG_ERROR_HPP_
#define SUBREG_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace subreg {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input text is not valid UTF-8 or contains a reserved character.
class EncodingError : public Error {
 public:
  using Error::Error;
};

// Invalid trainer / sampler configuration or unusable corpus.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Model file has a bad magic line, an unknown kind or an unknown version.
class UnsupportedFormatError : public Error {
 public:
  using Error::Error;
};

// Model file is syntactically valid but violates a model invariant.
class CorruptModelError : public Error {
 public:
  using Error::Error;
};

// Piece id outside the vocabulary.
class IdOutOfRangeError : public Error {
 public:
  using Error::Error;
};

// Training diverged (non-finite likelihood).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace subreg

#endif  // SUBREG_ERROR_HPP_
