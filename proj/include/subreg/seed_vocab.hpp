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

#ifndef SUBREG_SEED_VOCAB_HPP_
#define SUBREG_SEED_VOCAB_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "subreg/error.hpp"
#include "subreg/normalizer.hpp"
#include "subreg/suffix_array.hpp"
#include "subreg/vocabulary.hpp"

namespace subreg {

struct SeedCandidate {
  std::u32string piece;
  std::uint64_t frequency = 0;

  // Occurrences times length: prefers pieces that cover more text.
  std::uint64_t score() const { return frequency * piece.size(); }

  friend bool operator==(const SeedCandidate&, const SeedCandidate&) = default;
};

// Every distinct within-word substring of at most `max_piece_length`
// characters with its number of occurrences, ordered by piece.
//
// The words of the corpus are concatenated with a separator symbol and
// indexed by a suffix array. Each lcp-interval [lb, rb] of the suffix array
// with lcp value l and parent value p stands for the substrings of lengths
// (p, l] shared by its rb - lb + 1 suffixes; the leaves stand for substrings
// that occur once.
inline std::vector<SeedCandidate> EnumerateSubstrings(
    std::span<const NormalizedText> corpus, std::size_t max_piece_length) {
  if (max_piece_length < 1) {
    throw ConfigError("max_piece_length must be at least 1");
  }

  // Alphabet: 0 separates words, characters map to 1..K by code point.
  std::vector<char32_t> alphabet;
  std::size_t total = 0;
  for (const auto& sentence : corpus) {
    alphabet.insert(alphabet.end(), sentence.text.begin(), sentence.text.end());
    total += sentence.text.size() + sentence.word_spans.size();
  }
  if (alphabet.empty()) throw ConfigError("corpus is empty");
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
  auto rank_of = [&](char32_t c) {
    return static_cast<int>(
               std::lower_bound(alphabet.begin(), alphabet.end(), c) -
               alphabet.begin()) +
           1;
  };

  std::vector<int> symbols;
  std::vector<char32_t> chars;  // parallel to symbols; 0 at separators
  symbols.reserve(total);
  chars.reserve(total);
  for (const auto& sentence : corpus) {
    for (std::size_t w = 0; w < sentence.word_spans.size(); ++w) {
      for (char32_t c : sentence.word(w)) {
        symbols.push_back(rank_of(c));
        chars.push_back(c);
      }
      symbols.push_back(0);
      chars.push_back(0);
    }
  }
  const int n = static_cast<int>(symbols.size());

  // Characters before the next separator.
  std::vector<int> room(n);
  for (int i = n - 1; i >= 0; --i) {
    room[i] = symbols[i] == 0 ? 0 : (i + 1 < n ? room[i + 1] : 0) + 1;
  }

  const std::vector<int> sa =
      suffix_array::Build(symbols, static_cast<int>(alphabet.size()));
  const std::vector<int> lcp = suffix_array::BuildLcp(symbols, sa);

  std::vector<SeedCandidate> out;
  const int max_len = static_cast<int>(max_piece_length);
  auto emit = [&](int start, int min_len_exclusive, int max_len_inclusive,
                  std::uint64_t count) {
    const int hi = std::min({max_len_inclusive, room[start], max_len});
    for (int len = min_len_exclusive + 1; len <= hi; ++len) {
      out.push_back(
          {std::u32string(chars.begin() + start, chars.begin() + start + len),
           count});
    }
  };

  // Leaves: substrings seen exactly once.
  for (int i = 0; i < n; ++i) {
    const int shared = std::max(lcp[i], i + 1 < n ? lcp[i + 1] : 0);
    emit(sa[i], shared, room[sa[i]], 1);
  }

  // Internal lcp-intervals, bottom-up.
  struct Open {
    int lcp;
    int lb;
  };
  std::vector<Open> stack = {{0, 0}};
  for (int i = 1; i <= n; ++i) {
    const int cur = i < n ? lcp[i] : 0;
    int lb = i - 1;
    while (cur < stack.back().lcp) {
      const Open top = stack.back();
      stack.pop_back();
      const int parent = std::max(cur, stack.back().lcp);
      emit(sa[top.lb], parent, top.lcp,
           static_cast<std::uint64_t>(i - top.lb));
      lb = top.lb;
    }
    if (cur > stack.back().lcp) stack.push_back({cur, lb});
  }

  std::sort(out.begin(), out.end(),
            [](const SeedCandidate& a, const SeedCandidate& b) {
              return a.piece < b.piece;
            });
  return out;
}

// All characters plus the best-scoring multi-character substrings, up to
// `seed_size` pieces (reserved pieces not counted). Initial probabilities
// are proportional to candidate scores.
inline Vocabulary MakeSeed(std::span<const NormalizedText> corpus,
                           std::size_t seed_size,
                           std::size_t max_piece_length) {
  std::vector<SeedCandidate> candidates =
      EnumerateSubstrings(corpus, max_piece_length);

  std::vector<const SeedCandidate*> chars;
  std::vector<const SeedCandidate*> multi;
  for (const auto& c : candidates) {
    if (c.piece.size() == 1) {
      chars.push_back(&c);
    } else if (!Vocabulary::IsReservedString(c.piece)) {
      multi.push_back(&c);
    }
  }
  if (seed_size < chars.size()) {
    throw ConfigError("seed size " + std::to_string(seed_size) +
                      " is smaller than the number of distinct characters; "
                      "need at least " +
                      std::to_string(chars.size()));
  }

  const std::size_t num_multi =
      std::min(multi.size(), seed_size - chars.size());
  std::partial_sort(multi.begin(), multi.begin() + num_multi, multi.end(),
                    [](const SeedCandidate* a, const SeedCandidate* b) {
                      if (a->score() != b->score()) {
                        return a->score() > b->score();
                      }
                      return a->piece < b->piece;
                    });
  multi.resize(num_multi);

  std::vector<const SeedCandidate*> chosen = chars;
  chosen.insert(chosen.end(), multi.begin(), multi.end());
  double total = 0.0;
  for (const auto* c : chosen) total += static_cast<double>(c->score());
  const double log_total = std::log(total);

  std::vector<std::pair<std::u32string, double>> pieces;
  pieces.reserve(chosen.size());
  for (const auto* c : chosen) {
    pieces.emplace_back(c->piece,
                        std::log(static_cast<double>(c->score())) - log_total);
  }
  return Vocabulary(std::move(pieces));
}

}  // namespace subreg

#endif  // SUBREG_SEED_VOCAB_HPP_
