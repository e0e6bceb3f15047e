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

#ifndef SUBREG_UNIGRAM_MODEL_HPP_
#define SUBREG_UNIGRAM_MODEL_HPP_

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "subreg/error.hpp"
#include "subreg/lattice.hpp"
#include "subreg/normalizer.hpp"
#include "subreg/unicode.hpp"
#include "subreg/vocabulary.hpp"

namespace subreg {

// A trained unigram language model over subword pieces. Immutable; safe to
// share between threads.
class UnigramModel {
 public:
  UnigramModel() = default;
  explicit UnigramModel(Vocabulary vocab) : vocab_(std::move(vocab)) {}

  const Vocabulary& vocab() const { return vocab_; }

  Lattice BuildLattice(std::string_view raw) const {
    return Lattice::Build(Normalize(raw), vocab_);
  }

  // Most probable segmentation. Unknown characters map to id 0.
  SegPath Encode(std::string_view raw) const {
    return BuildLattice(raw).Viterbi();
  }

  std::vector<int> EncodeIds(std::string_view raw) const {
    return Encode(raw).piece_ids;
  }

  std::vector<std::string> EncodePieces(std::string_view raw) const {
    return IdsToPieces(EncodeIds(raw));
  }

  std::vector<std::string> IdsToPieces(std::span<const int> ids) const {
    std::vector<std::string> pieces;
    pieces.reserve(ids.size());
    for (int id : ids) {
      CheckId(id);
      pieces.push_back(vocab_.piece_utf8(id));
    }
    return pieces;
  }

  // <unk> decodes to "⁇"; <s> and </s> decode to nothing.
  std::string Decode(std::span<const int> ids) const {
    std::u32string marked;
    for (int id : ids) {
      CheckId(id);
      AppendSurface(id, &marked);
    }
    return Denormalize(marked);
  }

  std::string DecodePieces(std::span<const std::string> pieces) const {
    std::string marked;
    for (const auto& piece : pieces) {
      if (piece == "<unk>") {
        marked += unicode::kUnknownSurface;
      } else if (piece != "<s>" && piece != "</s>") {
        marked += piece;
      }
    }
    return Denormalize(std::string_view(marked));
  }

 private:
  void CheckId(int id) const {
    if (!vocab_.contains_id(id)) {
      throw IdOutOfRangeError("piece id " + std::to_string(id) +
                              " is out of range [0, " +
                              std::to_string(vocab_.size()) + ")");
    }
  }

  void AppendSurface(int id, std::u32string* out) const {
    if (id == Vocabulary::kUnkId) {
      const std::u32string unk =
          unicode::DecodeUtf8(unicode::kUnknownSurface);
      out->append(unk);
    } else if (!Vocabulary::IsReserved(id)) {
      out->append(vocab_.piece(id));
    }
  }

  Vocabulary vocab_;
};

}  // namespace subreg

#endif  // SUBREG_UNIGRAM_MODEL_HPP_
