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

#ifndef SUBREG_NORMALIZER_HPP_
#define SUBREG_NORMALIZER_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "subreg/error.hpp"
#include "subreg/unicode.hpp"

namespace subreg {

// Half-open range of character offsets.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const Span&, const Span&) = default;
};

// A sentence in marked form: every word is prefixed with the word marker and
// whitespace is gone. word_spans partition `text`; segmentations never cross
// a span boundary.
struct NormalizedText {
  std::u32string text;
  std::vector<Span> word_spans;

  std::u32string_view word(std::size_t i) const {
    const Span& s = word_spans[i];
    return std::u32string_view(text).substr(s.begin, s.size());
  }

  // Rebuilds word spans from marker positions of already-marked text. Text
  // before the first marker, if any, forms its own span.
  static NormalizedText FromMarked(std::u32string marked) {
    NormalizedText out;
    out.text = std::move(marked);
    std::size_t start = 0;
    for (std::size_t i = 1; i <= out.text.size(); ++i) {
      if (i == out.text.size() || out.text[i] == unicode::kWordMarker) {
        out.word_spans.push_back({start, i});
        start = i;
      }
    }
    if (out.text.empty()) out.word_spans.clear();
    return out;
  }

  friend bool operator==(const NormalizedText&,
                         const NormalizedText&) = default;
};

// Splits on whitespace runs and prefixes every token with the word marker.
// Input containing the marker character itself is rejected.
inline NormalizedText Normalize(std::u32string_view raw) {
  NormalizedText out;
  out.text.reserve(raw.size() + 1);
  bool in_word = false;
  for (char32_t c : raw) {
    if (c == unicode::kWordMarker) {
      throw EncodingError("input contains the reserved word marker U+2581");
    }
    if (unicode::IsWhitespace(c)) {
      if (in_word) out.word_spans.back().end = out.text.size();
      in_word = false;
      continue;
    }
    if (!in_word) {
      out.word_spans.push_back({out.text.size(), 0});
      out.text.push_back(unicode::kWordMarker);
      in_word = true;
    }
    out.text.push_back(c);
  }
  if (in_word) out.word_spans.back().end = out.text.size();
  return out;
}

inline NormalizedText Normalize(std::string_view raw_utf8) {
  return Normalize(unicode::DecodeUtf8(raw_utf8));
}

// Markers become single spaces; the leading one is dropped.
inline std::string Denormalize(std::u32string_view marked) {
  std::string out;
  out.reserve(marked.size());
  for (char32_t c : marked) {
    if (c == unicode::kWordMarker) {
      out.push_back(' ');
    } else {
      unicode::AppendUtf8(c, &out);
    }
  }
  if (!out.empty() && out.front() == ' ') out.erase(out.begin());
  return out;
}

inline std::string Denormalize(std::string_view marked_utf8) {
  std::string out;
  out.reserve(marked_utf8.size());
  constexpr std::string_view kMarkerUtf8 = "\xE2\x96\x81";
  std::size_t i = 0;
  while (i < marked_utf8.size()) {
    if (marked_utf8.substr(i, 3) == kMarkerUtf8) {
      out.push_back(' ');
      i += 3;
    } else {
      out.push_back(marked_utf8[i++]);
    }
  }
  if (!out.empty() && out.front() == ' ') out.erase(out.begin());
  return out;
}

// Trims and collapses whitespace runs to one ASCII space.
inline std::string CollapseWhitespace(std::string_view raw_utf8) {
  const std::u32string chars = unicode::DecodeUtf8(raw_utf8);
  std::string out;
  bool pending_space = false;
  for (char32_t c : chars) {
    if (unicode::IsWhitespace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    unicode::AppendUtf8(c, &out);
  }
  return out;
}

}  // namespace subreg

#endif  // SUBREG_NORMALIZER_HPP_
