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

#ifndef SUBREG_TOOLS_CLI_HPP_
#define SUBREG_TOOLS_CLI_HPP_

#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "subreg/subreg.hpp"

namespace subreg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

inline std::string Join(const std::vector<std::string>& pieces) {
  std::string out;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (i) out.push_back(' ');
    out += pieces[i];
  }
  return out;
}

inline std::vector<std::string> SplitSpaces(const std::string& line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::vector<int> ParseIds(const std::string& line) {
  std::vector<int> ids;
  for (const auto& tok : SplitSpaces(line)) {
    std::size_t used = 0;
    int id = 0;
    try {
      id = std::stoi(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw Error("not an id: '" + tok + "'");
    ids.push_back(id);
  }
  return ids;
}

inline std::string JoinIds(const std::vector<int>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out.push_back(' ');
    out += std::to_string(ids[i]);
  }
  return out;
}

// Reads `in` in batches and maps every line through `fn(line, index)`,
// writing results in input order. Memory stays bounded by the batch.
inline void StreamLines(std::istream& in, std::ostream& out, int threads,
                        const std::function<std::string(const std::string&,
                                                        std::uint64_t)>& fn) {
  const std::size_t batch_size = threads > 1 ? 256 * threads : 1;
  std::vector<std::string> lines;
  std::vector<std::string> results;
  std::uint64_t next_index = 0;
  std::string line;
  bool eof = false;
  while (!eof) {
    lines.clear();
    while (lines.size() < batch_size) {
      if (!std::getline(in, line)) {
        eof = true;
        break;
      }
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
    if (lines.empty()) break;
    results.assign(lines.size(), {});
    if (threads > 1 && lines.size() > 1) {
      std::vector<std::exception_ptr> errors(threads);
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
          try {
            for (std::size_t i = t; i < lines.size(); i += threads) {
              results[i] = fn(lines[i], next_index + i);
            }
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    } else {
      for (std::size_t i = 0; i < lines.size(); ++i) {
        results[i] = fn(lines[i], next_index + i);
      }
    }
    for (const auto& r : results) out << r << '\n';
    out.flush();
    next_index += lines.size();
  }
}

// Independent stream per input line so output does not depend on threading.
inline Rng LineRng(std::uint64_t seed, std::uint64_t line_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(line_index),
                    static_cast<std::uint32_t>(line_index >> 32)};
  return Rng(seq);
}

inline std::vector<std::string> ReadLines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace detail

// Runs one invocation. argv[0] is the program name.
inline int Run(const std::vector<std::string>& argv, std::istream& in,
               std::ostream& out, std::ostream& err) {
  CLI::App app{"Subword segmentation with unigram language models and BPE",
               "subreg"};
  app.require_subcommand(1, 1);

  // train
  auto* train = app.add_subcommand("train", "train a model from text files");
  std::string model_type = "unigram";
  std::vector<std::string> inputs;
  std::string model_out;
  std::size_t vocab_size = 0;
  std::size_t seed_size = 0;
  double eta = 0.8;
  std::size_t max_piece_len = 16;
  int em_iters = 2;
  train->add_option("--model-type", model_type, "unigram or bpe")
      ->check(CLI::IsMember({"unigram", "bpe"}));
  train->add_option("--input", inputs, "training text, one sentence per line")
      ->required();
  train->add_option("--model-out", model_out, "where to write the model")
      ->required();
  train->add_option("--vocab-size", vocab_size, "target vocabulary size")
      ->required()
      ->check(CLI::PositiveNumber);
  train->add_option("--seed-size", seed_size,
                    "seed vocabulary size (default min(1e6, 25 x vocab))");
  train->add_option("--eta", eta, "fraction of pieces kept per pruning round");
  train->add_option("--max-piece-len", max_piece_len,
                    "maximum piece length in characters")
      ->check(CLI::PositiveNumber);
  train->add_option("--em-iters", em_iters, "EM iterations per pruning round")
      ->check(CLI::PositiveNumber);

  // encode
  auto* encode = app.add_subcommand("encode", "segment stdin line by line");
  std::string model_path;
  std::string output_format = "pieces";
  int threads = 1;
  encode->add_option("--model", model_path)->required();
  encode->add_option("--output-format", output_format)
      ->check(CLI::IsMember({"pieces", "ids"}));
  encode->add_option("--threads", threads)->check(CLI::PositiveNumber);

  // decode
  auto* decode = app.add_subcommand("decode", "join segmented lines");
  std::string input_format = "pieces";
  decode->add_option("--model", model_path)->required();
  decode->add_option("--input-format", input_format)
      ->required()
      ->check(CLI::IsMember({"pieces", "ids"}));

  // sample
  auto* sample = app.add_subcommand("sample", "sample segmentations");
  std::string l_text;
  double alpha = 1.0;
  std::uint64_t seed = 0;
  std::size_t k = 1;
  bool mark_k = false;
  sample->add_option("--model", model_path)->required();
  sample->add_option("--l", l_text, "number of candidates, or inf")->required();
  sample->add_option("--alpha", alpha, "smoothing exponent")->required();
  auto* seed_opt = sample->add_option("--seed", seed, "random seed");
  sample->add_option("--k", k, "samples per line")->check(CLI::PositiveNumber);
  sample->add_flag("--mark-k", mark_k, "suffix each sample with #k=i");
  sample->add_option("--threads", threads)->check(CLI::PositiveNumber);

  // nbest
  auto* nbest = app.add_subcommand("nbest", "n best segmentations per line");
  std::size_t n = 1;
  bool with_posteriors = false;
  nbest->add_option("--model", model_path)->required();
  nbest->add_option("--n", n)->required()->check(CLI::PositiveNumber);
  nbest->add_flag("--with-posteriors", with_posteriors);
  nbest->add_option("--threads", threads)->check(CLI::PositiveNumber);

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  if (!args.empty()) args.pop_back();
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "subreg: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (train->parsed()) {
      std::vector<std::string> lines;
      for (const auto& path : inputs) {
        auto more = detail::ReadLines(path);
        lines.insert(lines.end(), std::make_move_iterator(more.begin()),
                     std::make_move_iterator(more.end()));
      }
      if (model_type == "bpe") {
        model_io::Save(TrainBpe(lines, vocab_size, &err), model_out);
      } else {
        TrainerConfig config;
        config.target_vocab_size = vocab_size;
        config.seed_size = seed_size;
        config.shrink_keep_ratio = eta;
        config.max_piece_length = max_piece_len;
        config.em_subiterations = em_iters;
        model_io::Save(Train(lines, config, &err), model_out);
      }
      return kExitOk;
    }

    const model_io::AnyModel model = model_io::Load(model_path);
    const auto* unigram = std::get_if<UnigramModel>(&model);
    const auto* bpe = std::get_if<BpeModel>(&model);

    if (encode->parsed()) {
      const bool ids = output_format == "ids";
      detail::StreamLines(in, out, threads, [&](const std::string& line,
                                                std::uint64_t) {
        if (unigram != nullptr) {
          const auto path = unigram->EncodeIds(line);
          return ids ? detail::JoinIds(path)
                     : detail::Join(unigram->IdsToPieces(path));
        }
        return ids ? detail::JoinIds(bpe->EncodeIds(line))
                   : detail::Join(bpe->Encode(line));
      });
      return kExitOk;
    }

    if (decode->parsed()) {
      const bool ids = input_format == "ids";
      detail::StreamLines(in, out, 1, [&](const std::string& line,
                                          std::uint64_t) {
        if (ids) {
          const auto id_list = detail::ParseIds(line);
          return unigram != nullptr ? unigram->Decode(id_list)
                                    : bpe->DecodeIds(id_list);
        }
        const auto pieces = detail::SplitSpaces(line);
        return unigram != nullptr ? unigram->DecodePieces(pieces)
                                  : bpe->Decode(pieces);
      });
      return kExitOk;
    }

    if (unigram == nullptr) {
      throw Error("'" + std::string(sample->parsed() ? "sample" : "nbest") +
                  "' needs a unigram model");
    }

    if (sample->parsed()) {
      SamplingConfig config;
      config.alpha = alpha;
      config.k = k;
      if (l_text == "inf") {
        config.l = SamplingConfig::kInfinite;
      } else {
        std::size_t used = 0;
        unsigned long long l = 0;
        try {
          l = std::stoull(l_text, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != l_text.size() || l == 0) {
          err << "subreg: --l must be a positive integer or 'inf'\n";
          return kExitUsage;
        }
        config.l = static_cast<std::size_t>(l);
      }
      try {
        config.Validate();
      } catch (const ConfigError& e) {
        err << "subreg: " << e.what() << '\n';
        return kExitUsage;
      }
      if (seed_opt->count() == 0) {
        std::random_device rd;
        seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
      }
      err << "seed=" << seed << '\n';
      detail::StreamLines(in, out, threads, [&](const std::string& line,
                                                std::uint64_t index) {
        Rng rng = detail::LineRng(seed, index);
        const auto samples = SampleK(*unigram, line, config, rng);
        std::string text;
        for (std::size_t i = 0; i < samples.size(); ++i) {
          if (i) text.push_back('\n');
          text += detail::Join(unigram->IdsToPieces(samples[i].piece_ids));
          if (mark_k) text += " #k=" + std::to_string(i);
        }
        return text;
      });
      return kExitOk;
    }

    if (nbest->parsed()) {
      detail::StreamLines(in, out, threads, [&](const std::string& line,
                                                std::uint64_t) {
        std::string text;
        for (const auto& scored : NBestEncode(*unigram, line, n)) {
          text += detail::Join(unigram->IdsToPieces(scored.path.piece_ids));
          if (with_posteriors) {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "\t%.17g", scored.posterior);
            text += buf;
          }
          text.push_back('\n');
        }
        return text;  // blank line closes each block
      });
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "subreg: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace subreg::cli

#endif  // SUBREG_TOOLS_CLI_HPP_
