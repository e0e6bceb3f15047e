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

#include "subreg/unigram_model.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "gtest/gtest.h"

namespace subreg {
namespace {

// Table-1-like vocabulary for "Hello world".
UnigramModel HelloModel() {
  return UnigramModel(Vocabulary({{U"▁world", std::log(0.2)},
                                  {U"▁Hell", std::log(0.05)},
                                  {U"o", std::log(0.1)},
                                  {U"▁H", std::log(0.05)},
                                  {U"ello", std::log(0.04)},
                                  {U"▁He", std::log(0.04)},
                                  {U"llo", std::log(0.04)},
                                  {U"▁", std::log(0.1)},
                                  {U"He", std::log(0.02)},
                                  {U"l", std::log(0.1)},
                                  {U"el", std::log(0.02)},
                                  {U"world", std::log(0.02)},
                                  {U"e", std::log(0.1)},
                                  {U"H", std::log(0.02)},
                                  {U"w", std::log(0.02)},
                                  {U"r", std::log(0.02)},
                                  {U"d", std::log(0.02)},
                                  {U"a", std::log(0.04)},
                                  {U"b", std::log(0.01)},
                                  {U"c", std::log(0.01)}}));
}

TEST(UnigramModelTest, EncodeIsViterbi) {
  const UnigramModel m = HelloModel();
  const auto pieces = m.EncodePieces("Hello world");
  EXPECT_EQ((std::vector<std::string>{"▁Hell", "o", "▁world"}), pieces);
  EXPECT_EQ(pieces, m.EncodePieces("Hello world"));
  EXPECT_EQ((std::vector<int>{4, 5, 3}), m.EncodeIds("  Hello   world "));
}

TEST(UnigramModelTest, EncodeEmpty) {
  const UnigramModel m = HelloModel();
  EXPECT_TRUE(m.EncodeIds("").empty());
  EXPECT_TRUE(m.Encode("   ").piece_ids.empty());
}

TEST(UnigramModelTest, UnknownCharactersMapToUnk) {
  const UnigramModel m = HelloModel();
  const auto ids = m.EncodeIds("Hellq");
  EXPECT_EQ(Vocabulary::kUnkId, ids.back());
  EXPECT_EQ("Hell⁇", m.Decode(ids));
  EXPECT_EQ("<unk>", m.IdsToPieces(ids).back());
}

TEST(UnigramModelTest, Decode) {
  const UnigramModel m = HelloModel();
  EXPECT_EQ("Hello world", m.Decode(std::vector<int>{4, 5, 3}));
  EXPECT_EQ("", m.Decode(std::vector<int>{}));
  EXPECT_EQ("Hello world",
            m.DecodePieces(std::vector<std::string>{"▁Hell", "o", "▁world"}));
  EXPECT_EQ("Hello", m.Decode(std::vector<int>{Vocabulary::kBosId, 4, 5,
                                               Vocabulary::kEosId}));
}

TEST(UnigramModelTest, DecodeRejectsBadIds) {
  const UnigramModel m = HelloModel();
  try {
    m.Decode(std::vector<int>{3, 999});
    FAIL();
  } catch (const IdOutOfRangeError& e) {
    EXPECT_NE(std::string(e.what()).find("999"), std::string::npos);
  }
  EXPECT_THROW(m.Decode(std::vector<int>{-1}), IdOutOfRangeError);
}

TEST(UnigramModelTest, RoundTrip) {
  const UnigramModel m = HelloModel();
  for (const char* s : {"a b c", "Hello world", "  world  Hello ", "ll ee o"}) {
    const auto ids = m.EncodeIds(s);
    EXPECT_EQ(CollapseWhitespace(s), m.Decode(ids));
    EXPECT_EQ(ids, m.EncodeIds(m.Decode(ids)));
  }
}

}  // namespace
}  // namespace subreg
