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

#ifndef SUBREG_UNIGRAM_TRAINER_HPP_
#define SUBREG_UNIGRAM_TRAINER_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "subreg/error.hpp"
#include "subreg/lattice.hpp"
#include "subreg/log_math.hpp"
#include "subreg/normalizer.hpp"
#include "subreg/seed_vocab.hpp"
#include "subreg/unigram_model.hpp"
#include "subreg/vocabulary.hpp"

namespace subreg {

struct TrainerConfig {
  // Final number of pieces, reserved pieces included.
  std::size_t target_vocab_size = 8000;
  // Non-reserved seed pieces; 0 picks min(1,000,000, 25 × target).
  std::size_t seed_size = 0;
  // Fraction of multi-character pieces kept by each pruning round.
  double shrink_keep_ratio = 0.8;
  int em_subiterations = 2;
  std::size_t max_piece_length = 16;

  std::size_t EffectiveSeedSize() const {
    if (seed_size != 0) return seed_size;
    return std::min<std::size_t>(1'000'000, 25 * target_vocab_size);
  }

  void Validate() const {
    if (!(shrink_keep_ratio > 0.0 && shrink_keep_ratio < 1.0)) {
      throw ConfigError("shrink keep ratio must lie in (0, 1)");
    }
    if (em_subiterations < 1) {
      throw ConfigError("em_subiterations must be at least 1");
    }
    if (max_piece_length < 1) {
      throw ConfigError("max_piece_length must be at least 1");
    }
    if (target_vocab_size <= Vocabulary::kNumReserved) {
      throw ConfigError("target vocabulary size must exceed the " +
                        std::to_string(Vocabulary::kNumReserved) +
                        " reserved pieces");
    }
  }
};

// Lattices never cross word boundaries, so a sentence's likelihood is the
// product of its words' likelihoods and the corpus reduces to distinct
// words with frequencies.
struct WordCounts {
  std::vector<std::u32string> words;  // sorted
  std::vector<double> frequency;
  std::size_t num_sentences = 0;
};

inline WordCounts CountWords(std::span<const NormalizedText> corpus) {
  std::unordered_map<std::u32string, std::size_t> counts;
  for (const auto& sentence : corpus) {
    for (std::size_t w = 0; w < sentence.word_spans.size(); ++w) {
      ++counts[std::u32string(sentence.word(w))];
    }
  }
  std::vector<std::pair<std::u32string, std::size_t>> sorted(counts.begin(),
                                                              counts.end());
  std::sort(sorted.begin(), sorted.end());
  WordCounts out;
  out.num_sentences = corpus.size();
  for (auto& [word, count] : sorted) {
    out.words.push_back(std::move(word));
    out.frequency.push_back(static_cast<double>(count));
  }
  return out;
}

struct EmResult {
  Vocabulary vocab;
  // Corpus marginal log-likelihood under the input probabilities.
  double log_likelihood = 0.0;
};

// Probability floor for single characters that received no expected count.
inline constexpr double kCharProbabilityFloor = 1e-20;

// One EM iteration. E: expected piece counts by forward-backward on every
// word lattice. M: p(piece) = count / Σ counts. Multi-character pieces
// with zero count are dropped; single characters are floored.
inline EmResult EmStep(const WordCounts& words, const Vocabulary& vocab) {
  std::vector<double> counts(vocab.size(), 0.0);
  double log_likelihood = 0.0;
  for (std::size_t w = 0; w < words.words.size(); ++w) {
    const Lattice lattice = Lattice::BuildWord(words.words[w], vocab);
    log_likelihood +=
        words.frequency[w] *
        lattice.AccumulateExpectedCounts(words.frequency[w], counts);
  }

  double total = 0.0;
  for (int id = Vocabulary::kNumReserved; id < vocab.size(); ++id) {
    total += counts[id];
  }
  const double log_total = std::log(total);
  std::vector<std::pair<std::u32string, double>> pieces;
  pieces.reserve(vocab.num_normal_pieces());
  for (int id = Vocabulary::kNumReserved; id < vocab.size(); ++id) {
    const std::u32string& piece = vocab.piece(id);
    if (counts[id] > 0.0) {
      pieces.emplace_back(piece, std::log(counts[id]) - log_total);
    } else if (piece.size() == 1) {
      pieces.emplace_back(piece, std::log(kCharProbabilityFloor));
    }
  }
  return {Vocabulary(std::move(pieces)), log_likelihood};
}

inline EmResult EmStep(std::span<const NormalizedText> corpus,
                       const Vocabulary& vocab) {
  return EmStep(CountWords(corpus), vocab);
}

// loss[id] = ℒ(vocab) − ℒ(vocab without id), probabilities held fixed and
// not renormalized. Only words whose lattice contains the piece change.
// Zero for single characters and reserved ids.
inline std::vector<double> PruneLosses(const WordCounts& words,
                                       const Vocabulary& vocab) {
  std::vector<double> loss(vocab.size(), 0.0);
  std::vector<int> ids;
  for (std::size_t w = 0; w < words.words.size(); ++w) {
    const Lattice lattice = Lattice::BuildWord(words.words[w], vocab);
    ids.clear();
    for (const auto& node : lattice.nodes()) {
      if (node.end - node.begin > 1) ids.push_back(node.piece_id);
    }
    if (ids.empty()) continue;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    const double log_z = lattice.LogPartition();
    for (int id : ids) {
      loss[id] += words.frequency[w] *
                  (log_z - lattice.LogPartitionWithout(id));
    }
  }
  return loss;
}

// Number of multi-character pieces a pruning round keeps.
inline std::size_t PruneKeepCount(std::size_t removable, std::size_t fixed,
                                  const TrainerConfig& config) {
  const auto by_ratio = static_cast<std::size_t>(std::ceil(
      config.shrink_keep_ratio * static_cast<double>(removable) - 1e-9));
  const std::size_t floor =
      config.target_vocab_size > fixed ? config.target_vocab_size - fixed : 0;
  std::size_t keep = std::min(removable, std::max(by_ratio, floor));
  // Always make progress while above target.
  if (keep == removable && removable > 0 && removable + fixed >
      config.target_vocab_size) {
    keep = removable - 1;
  }
  return keep;
}

// Keeps every single character plus the multi-character pieces with the
// largest loss (ties: smaller piece first). Surviving probabilities are
// renormalized; id order is preserved.
inline Vocabulary Prune(const WordCounts& words, const Vocabulary& vocab,
                        const TrainerConfig& config) {
  if (static_cast<std::size_t>(vocab.size()) <= config.target_vocab_size) {
    return vocab;
  }
  const std::vector<double> loss = PruneLosses(words, vocab);

  std::vector<int> removable;
  for (int id = Vocabulary::kNumReserved; id < vocab.size(); ++id) {
    if (vocab.piece(id).size() > 1) removable.push_back(id);
  }
  const std::size_t fixed = vocab.size() - removable.size();
  const std::size_t keep = PruneKeepCount(removable.size(), fixed, config);
  std::sort(removable.begin(), removable.end(), [&](int a, int b) {
    if (loss[a] != loss[b]) return loss[a] > loss[b];
    return vocab.piece(a) < vocab.piece(b);
  });
  std::vector<bool> kept(vocab.size(), true);
  for (std::size_t i = keep; i < removable.size(); ++i) {
    kept[removable[i]] = false;
  }

  double log_mass = kLogZero;
  for (int id = Vocabulary::kNumReserved; id < vocab.size(); ++id) {
    if (kept[id]) log_mass = LogAdd(log_mass, vocab.log_prob(id));
  }
  std::vector<std::pair<std::u32string, double>> pieces;
  for (int id = Vocabulary::kNumReserved; id < vocab.size(); ++id) {
    if (kept[id]) pieces.emplace_back(vocab.piece(id), vocab.log_prob(id) - log_mass);
  }
  return Vocabulary(std::move(pieces));
}

inline Vocabulary Prune(std::span<const NormalizedText> corpus,
                        const Vocabulary& vocab, const TrainerConfig& config) {
  return Prune(CountWords(corpus), vocab, config);
}

// Pieces by descending probability, ties by piece.
inline Vocabulary SortByProbability(const Vocabulary& vocab) {
  auto pieces = vocab.NormalPieces();
  std::stable_sort(pieces.begin(), pieces.end(),
                   [](const auto& a, const auto& b) {
                     if (a.second != b.second) return a.second > b.second;
                     return a.first < b.first;
                   });
  return Vocabulary(std::move(pieces));
}

namespace detail {

inline void CheckFinite(double log_likelihood, int iteration) {
  if (!std::isfinite(log_likelihood)) {
    throw NumericError("non-finite log-likelihood at iteration " +
                       std::to_string(iteration));
  }
}

inline void LogProgress(std::ostream* progress, int iteration,
                        const Vocabulary& vocab, double log_likelihood,
                        std::size_t num_sentences) {
  if (progress == nullptr) return;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "iter=%d vocab=%d loglik_per_sentence=%.9g",
                iteration, vocab.size(),
                log_likelihood /
                    static_cast<double>(std::max<std::size_t>(num_sentences, 1)));
  *progress << buf << '\n';
}

}  // namespace detail

// Seed, then alternate EM and pruning until the vocabulary fits the target;
// one last EM step fits the final probabilities.
inline UnigramModel TrainOnCorpus(std::span<const NormalizedText> corpus,
                                  const TrainerConfig& config,
                                  std::ostream* progress = nullptr) {
  config.Validate();
  const WordCounts words = CountWords(corpus);
  if (words.words.empty()) throw ConfigError("corpus is empty");

  std::vector<char32_t> chars;
  for (const auto& word : words.words) {
    chars.insert(chars.end(), word.begin(), word.end());
  }
  std::sort(chars.begin(), chars.end());
  chars.erase(std::unique(chars.begin(), chars.end()), chars.end());
  const std::size_t required = chars.size() + Vocabulary::kNumReserved;
  if (config.target_vocab_size < required) {
    throw ConfigError("target vocabulary size " +
                      std::to_string(config.target_vocab_size) +
                      " is below the " + std::to_string(required) +
                      " pieces needed for every character plus reserved ids");
  }
  const std::size_t seed_size =
      config.seed_size == 0
          ? std::max(config.EffectiveSeedSize(), chars.size())
          : config.seed_size;

  Vocabulary vocab = MakeSeed(corpus, seed_size, config.max_piece_length);
  for (int iteration = 0;; ++iteration) {
    double log_likelihood = 0.0;
    for (int sub = 0; sub < config.em_subiterations; ++sub) {
      EmResult em = EmStep(words, vocab);
      detail::CheckFinite(em.log_likelihood, iteration);
      vocab = std::move(em.vocab);
      log_likelihood = em.log_likelihood;
    }
    detail::LogProgress(progress, iteration, vocab, log_likelihood,
                        words.num_sentences);
    if (static_cast<std::size_t>(vocab.size()) <= config.target_vocab_size) {
      break;
    }
    vocab = Prune(words, vocab, config);
    if (static_cast<std::size_t>(vocab.size()) <= config.target_vocab_size) {
      break;
    }
  }
  EmResult final_em = EmStep(words, vocab);
  detail::CheckFinite(final_em.log_likelihood, -1);
  return UnigramModel(SortByProbability(final_em.vocab));
}

inline UnigramModel Train(std::span<const std::string> lines,
                          const TrainerConfig& config,
                          std::ostream* progress = nullptr) {
  std::vector<NormalizedText> corpus;
  corpus.reserve(lines.size());
  for (const auto& line : lines) corpus.push_back(Normalize(line));
  return TrainOnCorpus(corpus, config, progress);
}

}  // namespace subreg

#endif  // SUBREG_UNIGRAM_TRAINER_HPP_
