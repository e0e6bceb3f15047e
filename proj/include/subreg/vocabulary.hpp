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

#ifndef SUBREG_VOCABULARY_HPP_
#define SUBREG_VOCABULARY_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "subreg/error.hpp"
#include "subreg/unicode.hpp"

namespace subreg {

// Piece set of a unigram model. Ids are positions; ids 0..2 are the reserved
// <unk>, <s>, </s> which carry no probability mass.
class Vocabulary {
 public:
  static constexpr int kUnkId = 0;
  static constexpr int kBosId = 1;
  static constexpr int kEosId = 2;
  static constexpr int kNumReserved = 3;

  // Unknown characters score this far below the least likely piece.
  static constexpr double kUnknownPenalty = 10.0;

  static const std::u32string& ReservedPiece(int id) {
    static const std::u32string kReserved[kNumReserved] = {U"<unk>", U"<s>",
                                                           U"</s>"};
    return kReserved[id];
  }

  static bool IsReservedString(std::u32string_view piece) {
    for (int id = 0; id < kNumReserved; ++id) {
      if (piece == ReservedPiece(id)) return true;
    }
    return false;
  }

  Vocabulary() : Vocabulary(std::vector<std::pair<std::u32string, double>>{}) {}

  // `pieces` are the non-reserved pieces in id order (ids start at 3).
  explicit Vocabulary(std::vector<std::pair<std::u32string, double>> pieces) {
    pieces_.reserve(pieces.size() + kNumReserved);
    for (int id = 0; id < kNumReserved; ++id) {
      pieces_.push_back({ReservedPiece(id),
                         std::numeric_limits<double>::quiet_NaN()});
    }
    double min_log_prob = std::numeric_limits<double>::infinity();
    for (auto& [piece, log_prob] : pieces) {
      if (piece.empty()) throw CorruptModelError("empty piece in vocabulary");
      if (IsReservedString(piece)) {
        throw CorruptModelError("duplicate piece: " +
                                unicode::EncodeUtf8(piece));
      }
      const int id = static_cast<int>(pieces_.size());
      if (!InsertIntoTrie(piece, id)) {
        throw CorruptModelError("duplicate piece: " +
                                unicode::EncodeUtf8(piece));
      }
      max_piece_length_ = std::max(max_piece_length_, piece.size());
      min_log_prob = std::min(min_log_prob, log_prob);
      pieces_.push_back({std::move(piece), log_prob});
    }
    unknown_log_prob_ =
        (pieces_.size() > kNumReserved ? min_log_prob : 0.0) - kUnknownPenalty;
  }

  int size() const { return static_cast<int>(pieces_.size()); }
  int num_normal_pieces() const { return size() - kNumReserved; }

  static bool IsReserved(int id) { return id >= 0 && id < kNumReserved; }
  bool contains_id(int id) const { return id >= 0 && id < size(); }

  const std::u32string& piece(int id) const { return pieces_.at(id).first; }
  std::string piece_utf8(int id) const {
    return unicode::EncodeUtf8(piece(id));
  }

  // NaN for reserved ids.
  double log_prob(int id) const { return pieces_.at(id).second; }

  double unknown_log_prob() const { return unknown_log_prob_; }

  std::size_t max_piece_length() const { return max_piece_length_; }

  std::optional<int> find(std::u32string_view piece) const {
    for (int id = 0; id < kNumReserved; ++id) {
      if (piece == ReservedPiece(id)) return id;
    }
    std::uint32_t node = 0;
    for (char32_t c : piece) {
      auto it = edges_.find(EdgeKey(node, c));
      if (it == edges_.end()) return std::nullopt;
      node = it->second;
    }
    const int id = terminal_[node];
    if (id < 0) return std::nullopt;
    return id;
  }

  // Calls fn(end, id) for every non-reserved piece equal to text[begin, end)
  // with end <= limit, in increasing `end`.
  template <typename Fn>
  void ForEachMatch(std::u32string_view text, std::size_t begin,
                    std::size_t limit, Fn&& fn) const {
    std::uint32_t node = 0;
    for (std::size_t pos = begin; pos < limit; ++pos) {
      auto it = edges_.find(EdgeKey(node, text[pos]));
      if (it == edges_.end()) return;
      node = it->second;
      if (terminal_[node] >= 0) fn(pos + 1, terminal_[node]);
    }
  }

  // Σ exp(log_prob) over non-reserved pieces.
  double TotalProbability() const {
    double sum = 0.0;
    for (int id = kNumReserved; id < size(); ++id) {
      sum += std::exp(log_prob(id));
    }
    return sum;
  }

  // Non-reserved (piece, log_prob) pairs in id order.
  std::vector<std::pair<std::u32string, double>> NormalPieces() const {
    return {pieces_.begin() + kNumReserved, pieces_.end()};
  }

 private:
  static std::uint64_t EdgeKey(std::uint32_t node, char32_t c) {
    return (static_cast<std::uint64_t>(node) << 21) | c;
  }

  bool InsertIntoTrie(const std::u32string& piece, int id) {
    if (terminal_.empty()) terminal_.push_back(-1);
    std::uint32_t node = 0;
    for (char32_t c : piece) {
      auto [it, inserted] = edges_.try_emplace(
          EdgeKey(node, c), static_cast<std::uint32_t>(terminal_.size()));
      if (inserted) terminal_.push_back(-1);
      node = it->second;
    }
    if (terminal_[node] >= 0) return false;
    terminal_[node] = id;
    return true;
  }

  std::vector<std::pair<std::u32string, double>> pieces_;
  std::unordered_map<std::uint64_t, std::uint32_t> edges_;
  std::vector<int> terminal_ = {-1};
  std::size_t max_piece_length_ = 0;
  double unknown_log_prob_ = -kUnknownPenalty;
};

}  // namespace subreg

#endif  // SUBREG_VOCABULARY_HPP_
