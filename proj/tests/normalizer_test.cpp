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

#include "subreg/normalizer.hpp"

#include <random>
#include <string>

#include "gtest/gtest.h"
#include "subreg/unicode.hpp"

namespace subreg {
namespace {

TEST(NormalizerTest, MarksEachWord) {
  const NormalizedText t = Normalize("Hello world");
  EXPECT_EQ(U"▁Hello▁world", t.text);
  ASSERT_EQ(2u, t.word_spans.size());
  EXPECT_EQ((Span{0, 6}), t.word_spans[0]);
  EXPECT_EQ((Span{6, 12}), t.word_spans[1]);
  EXPECT_EQ(U"▁world", t.word(1));
}

TEST(NormalizerTest, Empty) {
  const NormalizedText t = Normalize("");
  EXPECT_TRUE(t.text.empty());
  EXPECT_TRUE(t.word_spans.empty());
  EXPECT_TRUE(Normalize(" \t \n").word_spans.empty());
}

TEST(NormalizerTest, CollapsesWhitespace) {
  const NormalizedText t = Normalize("a  b");
  EXPECT_EQ(U"▁a▁b", t.text);
  EXPECT_EQ((std::vector<Span>{{0, 2}, {2, 4}}), t.word_spans);
  EXPECT_EQ(U"▁x▁y", Normalize("\t x　  y  ").text);
}

TEST(NormalizerTest, CharactersAreScalarValues) {
  const NormalizedText t = Normalize("日本語 ü");
  EXPECT_EQ(U"▁日本語▁ü", t.text);
  EXPECT_EQ((Span{0, 4}), t.word_spans[0]);
}

TEST(NormalizerTest, Errors) {
  EXPECT_THROW(Normalize(std::string("a\xff")), EncodingError);
  EXPECT_THROW(Normalize(std::string("\xc0\x80")), EncodingError);  // overlong
  EXPECT_THROW(Normalize(std::string("\xed\xa0\x80")), EncodingError);
  EXPECT_THROW(Normalize(std::string("\xe3\x81")), EncodingError);
  EXPECT_THROW(Normalize("a▁b"), EncodingError);
}

TEST(NormalizerTest, Denormalize) {
  EXPECT_EQ("Hello world", Denormalize(std::u32string_view(U"▁Hello▁world")));
  EXPECT_EQ("a b", Denormalize("▁a▁b"));
  EXPECT_EQ("", Denormalize(""));
  EXPECT_EQ("", Denormalize(std::u32string_view(U"")));
}

TEST(NormalizerTest, FromMarked) {
  const auto t = NormalizedText::FromMarked(U"ab▁c▁de");
  EXPECT_EQ((std::vector<Span>{{0, 2}, {2, 4}, {4, 7}}), t.word_spans);
  EXPECT_TRUE(NormalizedText::FromMarked(U"").word_spans.empty());
}

std::string RandomText(std::mt19937_64& rng) {
  static const std::vector<std::string> kAtoms = {
      "a", "b", "Z", " ", "  ", "\t", "\n", "é", "日", "　", " ", ".",
      "\x01"};
  std::uniform_int_distribution<std::size_t> len(0, 20);
  std::uniform_int_distribution<std::size_t> pick(0, kAtoms.size() - 1);
  std::string s;
  for (std::size_t i = len(rng); i > 0; --i) s += kAtoms[pick(rng)];
  return s;
}

TEST(NormalizerTest, PropertyRoundTripAndSpans) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::string raw = RandomText(rng);
    const NormalizedText t = Normalize(raw);

    // Spans are sorted, contiguous, cover the text and start with a marker.
    std::size_t expect_begin = 0;
    for (const Span& s : t.word_spans) {
      ASSERT_EQ(expect_begin, s.begin);
      ASSERT_LT(s.begin, s.end);
      ASSERT_EQ(unicode::kWordMarker, t.text[s.begin]);
      expect_begin = s.end;
    }
    ASSERT_EQ(t.text.size(), expect_begin);
    for (char32_t c : t.text) ASSERT_FALSE(unicode::IsWhitespace(c));

    const std::string back = Denormalize(std::u32string_view(t.text));
    ASSERT_EQ(CollapseWhitespace(raw), back) << raw;
    ASSERT_EQ(t, Normalize(back));
  }
}

}  // namespace
}  // namespace subreg
