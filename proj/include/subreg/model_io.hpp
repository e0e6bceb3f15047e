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

#ifndef SUBREG_MODEL_IO_HPP_
#define SUBREG_MODEL_IO_HPP_

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "subreg/bpe.hpp"
#include "subreg/error.hpp"
#include "subreg/unicode.hpp"
#include "subreg/unigram_model.hpp"
#include "subreg/vocabulary.hpp"

// Model files are UTF-8 text.
//
//   #subreg unigram 1
//   <unk>\tnan
//   <s>\tnan
//   </s>\tnan
//   <piece>\t<log_prob, 17 significant digits>      one per piece, id order
//
//   #subreg bpe 1
//   <left>\t<right>                                 one per merge, in order
//
// Backslash, tab, newline and carriage return inside pieces are written as
// \\, \t, \n and \r.
namespace subreg::model_io {

inline constexpr std::string_view kUnigramMagic = "#subreg unigram 1";
inline constexpr std::string_view kBpeMagic = "#subreg bpe 1";

inline std::string Escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string Unescape(std::string_view s, std::size_t line_no) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out.push_back(s[i]);
      continue;
    }
    if (++i == s.size()) {
      throw CorruptModelError("dangling escape on line " +
                              std::to_string(line_no));
    }
    switch (s[i]) {
      case '\\': out.push_back('\\'); break;
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      default:
        throw CorruptModelError("unknown escape on line " +
                                std::to_string(line_no));
    }
  }
  return out;
}

inline std::string FormatLogProb(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string Serialize(const UnigramModel& model) {
  const Vocabulary& vocab = model.vocab();
  std::string out(kUnigramMagic);
  out.push_back('\n');
  for (int id = 0; id < vocab.size(); ++id) {
    out += Escape(vocab.piece_utf8(id));
    out.push_back('\t');
    out += FormatLogProb(vocab.log_prob(id));
    out.push_back('\n');
  }
  return out;
}

inline std::string Serialize(const BpeModel& model) {
  std::string out(kBpeMagic);
  out.push_back('\n');
  for (const auto& merge : model.merges()) {
    out += Escape(unicode::EncodeUtf8(merge.left));
    out.push_back('\t');
    out += Escape(unicode::EncodeUtf8(merge.right));
    out.push_back('\n');
  }
  return out;
}

namespace detail {

inline std::vector<std::string_view> SplitLines(std::string_view data) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < data.size()) {
    std::size_t nl = data.find('\n', start);
    if (nl == std::string_view::npos) nl = data.size();
    lines.push_back(data.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

inline std::pair<std::string_view, std::string_view> SplitRecord(
    std::string_view line, std::size_t line_no) {
  const std::size_t tab = line.find('\t');
  if (tab == std::string_view::npos ||
      line.find('\t', tab + 1) != std::string_view::npos) {
    throw CorruptModelError("line " + std::to_string(line_no) +
                            " must hold exactly two tab-separated fields");
  }
  return {line.substr(0, tab), line.substr(tab + 1)};
}

inline std::string_view Magic(std::string_view data) {
  return data.substr(0, data.find('\n'));
}

}  // namespace detail

inline UnigramModel ParseUnigram(std::string_view data) {
  const auto lines = detail::SplitLines(data);
  if (lines.empty() || lines[0] != kUnigramMagic) {
    throw UnsupportedFormatError("not a unigram model (expected header '" +
                                 std::string(kUnigramMagic) + "')");
  }
  if (lines.size() < 1 + Vocabulary::kNumReserved) {
    throw CorruptModelError("missing reserved pieces");
  }
  std::vector<std::pair<std::u32string, double>> pieces;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto [piece_field, value_field] =
        detail::SplitRecord(lines[i], line_no);
    const std::string piece = Unescape(piece_field, line_no);
    const std::string value(value_field);
    const int id = static_cast<int>(i - 1);
    if (id < Vocabulary::kNumReserved) {
      if (unicode::DecodeUtf8(piece) != Vocabulary::ReservedPiece(id) ||
          value != "nan") {
        throw CorruptModelError("line " + std::to_string(line_no) +
                                " must be reserved piece " +
                                unicode::EncodeUtf8(
                                    Vocabulary::ReservedPiece(id)) +
                                " with value nan");
      }
      continue;
    }
    char* end = nullptr;
    errno = 0;
    const double log_prob = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size() ||
        !std::isfinite(log_prob)) {
      throw CorruptModelError("line " + std::to_string(line_no) +
                              ": log-probability must be finite, got '" +
                              value + "'");
    }
    std::u32string chars;
    try {
      chars = unicode::DecodeUtf8(piece);
    } catch (const EncodingError& e) {
      throw CorruptModelError("line " + std::to_string(line_no) + ": " +
                              e.what());
    }
    pieces.emplace_back(std::move(chars), log_prob);
  }
  return UnigramModel(Vocabulary(std::move(pieces)));
}

inline BpeModel ParseBpe(std::string_view data) {
  const auto lines = detail::SplitLines(data);
  if (lines.empty() || lines[0] != kBpeMagic) {
    throw UnsupportedFormatError("not a BPE model (expected header '" +
                                 std::string(kBpeMagic) + "')");
  }
  std::vector<BpeMerge> merges;
  std::unordered_set<std::u32string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto [left, right] = detail::SplitRecord(lines[i], line_no);
    BpeMerge merge;
    try {
      merge.left = unicode::DecodeUtf8(Unescape(left, line_no));
      merge.right = unicode::DecodeUtf8(Unescape(right, line_no));
    } catch (const EncodingError& e) {
      throw CorruptModelError("line " + std::to_string(line_no) + ": " +
                              e.what());
    }
    if (!seen.insert(merge.left + U'\t' + merge.right).second) {
      throw CorruptModelError("duplicate merge on line " +
                              std::to_string(line_no));
    }
    merges.push_back(std::move(merge));
  }
  return BpeModel(std::move(merges));
}

using AnyModel = std::variant<UnigramModel, BpeModel>;

inline AnyModel Parse(std::string_view data) {
  const std::string_view magic = detail::Magic(data);
  if (magic == kUnigramMagic) return ParseUnigram(data);
  if (magic == kBpeMagic) return ParseBpe(data);
  throw UnsupportedFormatError("unrecognized model header '" +
                               std::string(magic) + "'");
}

inline std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void WriteFile(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error("write failed: " + path);
}

inline void Save(const UnigramModel& model, const std::string& path) {
  WriteFile(path, Serialize(model));
}
inline void Save(const BpeModel& model, const std::string& path) {
  WriteFile(path, Serialize(model));
}

inline AnyModel Load(const std::string& path) { return Parse(ReadFile(path)); }
inline UnigramModel LoadUnigram(const std::string& path) {
  return ParseUnigram(ReadFile(path));
}
inline BpeModel LoadBpe(const std::string& path) {
  return ParseBpe(ReadFile(path));
}

}  // namespace subreg::model_io

#endif  // SUBREG_MODEL_IO_HPP_
