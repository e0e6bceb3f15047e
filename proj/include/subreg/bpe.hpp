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

#ifndef SUBREG_BPE_HPP_
#define SUBREG_BPE_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "subreg/error.hpp"
#include "subreg/normalizer.hpp"
#include "subreg/unicode.hpp"

namespace subreg {

struct BpeMerge {
  std::u32string left;
  std::u32string right;

  friend bool operator==(const BpeMerge&, const BpeMerge&) = default;
};

// Byte-pair-encoding model: an ordered merge list. Its id space is
// 0 = <unk>, then the characters used by the merges in code point order,
// then merge results in merge order.
class BpeModel {
 public:
  static constexpr int kUnkId = 0;

  BpeModel() { BuildIndex(); }

  // Each operand must be a single character or the result of an earlier
  // merge.
  explicit BpeModel(std::vector<BpeMerge> merges) : merges_(std::move(merges)) {
    BuildIndex();
  }

  const std::vector<BpeMerge>& merges() const { return merges_; }
  int vocab_size() const { return static_cast<int>(symbols_.size()); }

  const std::u32string& symbol(int id) const {
    if (id < 0 || id >= vocab_size()) {
      throw IdOutOfRangeError("piece id " + std::to_string(id) +
                              " is out of range [0, " +
                              std::to_string(vocab_size()) + ")");
    }
    return symbols_[id];
  }

  // Starts from characters and applies the lowest-ranked applicable merge,
  // leftmost first, until none applies. Equivalent to replaying the merge
  // list in training order.
  std::vector<std::u32string> EncodeWord(std::u32string_view word) const {
    std::vector<std::u32string> parts;
    parts.reserve(word.size());
    for (char32_t c : word) parts.emplace_back(1, c);
    while (parts.size() > 1) {
      int best_rank = std::numeric_limits<int>::max();
      std::size_t best_pos = 0;
      for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        auto it = ranks_.find(PairKey(parts[i], parts[i + 1]));
        if (it != ranks_.end() && it->second < best_rank) {
          best_rank = it->second;
          best_pos = i;
        }
      }
      if (best_rank == std::numeric_limits<int>::max()) break;
      parts[best_pos] += parts[best_pos + 1];
      parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(best_pos) + 1);
    }
    return parts;
  }

  std::vector<std::string> Encode(std::string_view raw) const {
    const NormalizedText text = Normalize(raw);
    std::vector<std::string> out;
    for (std::size_t w = 0; w < text.word_spans.size(); ++w) {
      for (const auto& part : EncodeWord(text.word(w))) {
        out.push_back(unicode::EncodeUtf8(part));
      }
    }
    return out;
  }

  // Symbols outside the id space map to <unk>.
  std::vector<int> EncodeIds(std::string_view raw) const {
    std::vector<int> ids;
    for (const auto& piece : Encode(raw)) ids.push_back(PieceToId(piece));
    return ids;
  }

  int PieceToId(std::string_view piece) const {
    auto it = symbol_ids_.find(unicode::DecodeUtf8(piece));
    return it == symbol_ids_.end() ? kUnkId : it->second;
  }

  std::string Decode(std::span<const std::string> pieces) const {
    std::string marked;
    for (const auto& piece : pieces) {
      marked += piece == "<unk>" ? std::string(unicode::kUnknownSurface) : piece;
    }
    return Denormalize(std::string_view(marked));
  }

  std::string DecodeIds(std::span<const int> ids) const {
    std::u32string marked;
    for (int id : ids) {
      if (id == kUnkId) {
        marked += unicode::DecodeUtf8(unicode::kUnknownSurface);
      } else {
        marked += symbol(id);
      }
    }
    return Denormalize(marked);
  }

 private:
  struct KeyHash {
    std::size_t operator()(const std::pair<std::u32string, std::u32string>& k)
        const {
      const std::size_t h1 = std::hash<std::u32string>()(k.first);
      const std::size_t h2 = std::hash<std::u32string>()(k.second);
      return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
    }
  };

  static std::pair<std::u32string, std::u32string> PairKey(
      const std::u32string& a, const std::u32string& b) {
    return {a, b};
  }

  void BuildIndex() {
    symbols_ = {U"<unk>"};
    symbol_ids_.clear();
    ranks_.clear();
    std::vector<std::u32string> chars;
    std::unordered_map<std::u32string, bool> produced;
    for (std::size_t r = 0; r < merges_.size(); ++r) {
      const BpeMerge& m = merges_[r];
      for (const auto* operand : {&m.left, &m.right}) {
        if (operand->empty()) {
          throw CorruptModelError("empty operand in merge " +
                                  std::to_string(r));
        }
        if (operand->size() == 1) {
          chars.push_back(*operand);
        } else if (!produced.contains(*operand)) {
          throw CorruptModelError("merge " + std::to_string(r) +
                                  " uses a symbol no earlier merge produced: " +
                                  unicode::EncodeUtf8(*operand));
        }
      }
      produced[m.left + m.right] = true;
      ranks_.try_emplace({m.left, m.right}, static_cast<int>(r));
    }
    std::sort(chars.begin(), chars.end());
    chars.erase(std::unique(chars.begin(), chars.end()), chars.end());
    for (auto& c : chars) AddSymbol(c);
    for (const auto& m : merges_) AddSymbol(m.left + m.right);
  }

  void AddSymbol(const std::u32string& s) {
    if (symbol_ids_.try_emplace(s, vocab_size()).second) symbols_.push_back(s);
  }

  std::vector<BpeMerge> merges_;
  std::unordered_map<std::pair<std::u32string, std::u32string>, int, KeyHash>
      ranks_;
  std::vector<std::u32string> symbols_;
  std::unordered_map<std::u32string, int> symbol_ids_;
};

// Greedy merge training. Words are deduplicated and pair counts weighted by
// word frequency; only the words containing the merged pair are rescanned
// after each merge. Stops when characters + merges reach
// `target_vocab_size`, or early (with a warning) once no pair occurs twice.
inline BpeModel TrainBpe(std::span<const std::string> lines,
                         std::size_t target_vocab_size,
                         std::ostream* warnings = nullptr) {
  std::unordered_map<std::u32string, std::int64_t> word_freq;
  for (const auto& line : lines) {
    const NormalizedText text = Normalize(line);
    for (std::size_t w = 0; w < text.word_spans.size(); ++w) {
      ++word_freq[std::u32string(text.word(w))];
    }
  }
  std::vector<std::pair<std::u32string, std::int64_t>> sorted_words(
      word_freq.begin(), word_freq.end());
  std::sort(sorted_words.begin(), sorted_words.end());

  std::vector<std::u32string> symbols;
  std::unordered_map<std::u32string, int> symbol_ids;
  auto intern = [&](const std::u32string& s) {
    auto [it, inserted] =
        symbol_ids.try_emplace(s, static_cast<int>(symbols.size()));
    if (inserted) symbols.push_back(s);
    return it->second;
  };

  std::vector<std::vector<int>> words;
  std::vector<std::int64_t> freq;
  std::vector<char32_t> chars;
  for (const auto& [word, count] : sorted_words) {
    std::vector<int> ids;
    for (char32_t c : word) {
      ids.push_back(intern(std::u32string(1, c)));
      chars.push_back(c);
    }
    words.push_back(std::move(ids));
    freq.push_back(count);
  }
  std::sort(chars.begin(), chars.end());
  chars.erase(std::unique(chars.begin(), chars.end()), chars.end());
  if (target_vocab_size < chars.size()) {
    throw ConfigError("target vocabulary size " +
                      std::to_string(target_vocab_size) +
                      " is below the number of distinct characters (" +
                      std::to_string(chars.size()) + ")");
  }

  auto key_of = [](int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  };
  std::unordered_map<std::uint64_t, std::int64_t> pair_count;
  std::unordered_map<std::uint64_t, std::vector<int>> pair_words;
  std::vector<std::uint64_t> changed;

  auto add_pairs = [&](int w, std::int64_t sign) {
    const auto& ids = words[w];
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
      const std::uint64_t key = key_of(ids[i], ids[i + 1]);
      pair_count[key] += sign * freq[w];
      changed.push_back(key);
      if (sign > 0) pair_words[key].push_back(w);
    }
  };

  struct Entry {
    std::int64_t count;
    int left;
    int right;
  };
  // Highest count first; ties by (left, right) piece strings.
  auto lower_priority = [&symbols](const Entry& x, const Entry& y) {
    if (x.count != y.count) return x.count < y.count;
    if (symbols[x.left] != symbols[y.left]) {
      return symbols[x.left] > symbols[y.left];
    }
    return symbols[x.right] > symbols[y.right];
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(lower_priority)>
      agenda(lower_priority);
  auto push_changed = [&]() {
    std::sort(changed.begin(), changed.end());
    changed.erase(std::unique(changed.begin(), changed.end()), changed.end());
    for (std::uint64_t key : changed) {
      const std::int64_t count = pair_count[key];
      if (count > 0) {
        agenda.push({count, static_cast<int>(key >> 32),
                     static_cast<int>(key & 0xffffffffu)});
      }
    }
    changed.clear();
  };

  for (int w = 0; w < static_cast<int>(words.size()); ++w) add_pairs(w, 1);
  push_changed();

  std::vector<BpeMerge> merges;
  while (chars.size() + merges.size() < target_vocab_size) {
    Entry best{0, 0, 0};
    bool found = false;
    while (!agenda.empty()) {
      const Entry top = agenda.top();
      agenda.pop();
      if (pair_count[key_of(top.left, top.right)] == top.count) {
        best = top;
        found = true;
        break;
      }
    }
    if (!found || best.count < 2) {
      if (warnings != nullptr) {
        *warnings << "warning: no pair occurs at least twice; stopping after "
                  << merges.size() << " merges\n";
      }
      break;
    }
    const std::uint64_t key = key_of(best.left, best.right);
    const int merged = intern(symbols[best.left] + symbols[best.right]);
    merges.push_back({symbols[best.left], symbols[best.right]});

    std::vector<int> affected = std::move(pair_words[key]);
    pair_words.erase(key);
    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()),
                   affected.end());
    for (int w : affected) {
      auto& ids = words[w];
      bool present = false;
      for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
        if (ids[i] == best.left && ids[i + 1] == best.right) present = true;
      }
      if (!present) continue;
      add_pairs(w, -1);
      std::vector<int> next;
      next.reserve(ids.size());
      for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i + 1 < ids.size() && ids[i] == best.left &&
            ids[i + 1] == best.right) {
          next.push_back(merged);
          ++i;
        } else {
          next.push_back(ids[i]);
        }
      }
      ids = std::move(next);
      add_pairs(w, 1);
    }
    push_changed();
  }
  return BpeModel(std::move(merges));
}

}  // namespace subreg

#endif  // SUBREG_BPE_HPP_
