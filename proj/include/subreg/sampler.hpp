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

#ifndef SUBREG_SAMPLER_HPP_
#define SUBREG_SAMPLER_HPP_

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "subreg/error.hpp"
#include "subreg/lattice.hpp"
#include "subreg/unigram_model.hpp"

namespace subreg {

// Subword-regularization sampling parameters.
//
//  l      number of best segmentations to sample from, or kInfinite to
//         sample from all segmentations;
//  alpha  smoothing exponent: candidates are drawn ∝ P(x)^alpha;
//  k      samples drawn per call.
struct SamplingConfig {
  static constexpr std::size_t kInfinite =
      std::numeric_limits<std::size_t>::max();

  std::size_t l = kInfinite;
  double alpha = 1.0;
  std::size_t k = 1;

  bool infinite() const { return l == kInfinite; }

  void Validate() const {
    if (l == 0) throw ConfigError("l must be at least 1");
    if (!(alpha >= 0.0) || std::isinf(alpha)) {
      throw ConfigError("alpha must be a finite non-negative number");
    }
    if (infinite() && alpha == 0.0) {
      throw ConfigError("alpha = 0 with l = inf is not supported");
    }
    if (k == 0) throw ConfigError("k must be at least 1");
  }
};

// Selection probabilities P(x_i)^alpha / Σ_j P(x_j)^alpha over candidates.
// alpha = 0 gives exactly 1/size.
inline std::vector<double> SmoothedWeights(std::span<const SegPath> candidates,
                                           double alpha) {
  std::vector<double> weights(candidates.size());
  if (candidates.empty()) return weights;
  if (alpha == 0.0) {
    std::fill(weights.begin(), weights.end(),
              1.0 / static_cast<double>(candidates.size()));
    return weights;
  }
  double top = kLogZero;
  for (const auto& c : candidates) top = std::max(top, alpha * c.log_prob);
  double total = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    weights[i] = std::exp(alpha * candidates[i].log_prob - top);
    total += weights[i];
  }
  for (double& w : weights) w /= total;
  return weights;
}

template <typename Urbg>
std::size_t DrawIndex(std::span<const double> weights, Urbg& rng) {
  double u = UniformUnit(rng);
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return weights.size() - 1;
}

// One draw from a lattice. Finite l: multinomial over the l best paths.
// Infinite l: node scores are multiplied by alpha and FFBS draws from
// P(x)^alpha / Σ P(x')^alpha over every path. No state survives the call.
template <typename Urbg>
SegPath SampleLattice(const Lattice& lattice, const SamplingConfig& config,
                      Urbg& rng) {
  config.Validate();
  if (config.infinite()) return lattice.SampleFfbs(rng, config.alpha);
  const std::vector<SegPath> candidates = lattice.NBest(config.l);
  const std::vector<double> weights = SmoothedWeights(candidates, config.alpha);
  return candidates[DrawIndex<Urbg>(weights, rng)];
}

template <typename Urbg>
SegPath Sample(const UnigramModel& model, std::string_view raw,
               const SamplingConfig& config, Urbg& rng) {
  return SampleLattice(model.BuildLattice(raw), config, rng);
}

// config.k independent draws sharing one lattice.
template <typename Urbg>
std::vector<SegPath> SampleK(const UnigramModel& model, std::string_view raw,
                             const SamplingConfig& config, Urbg& rng) {
  config.Validate();
  const Lattice lattice = model.BuildLattice(raw);
  std::vector<SegPath> out;
  out.reserve(config.k);
  if (config.infinite()) {
    for (std::size_t i = 0; i < config.k; ++i) {
      out.push_back(lattice.SampleFfbs(rng, config.alpha));
    }
    return out;
  }
  const std::vector<SegPath> candidates = lattice.NBest(config.l);
  const std::vector<double> weights = SmoothedWeights(candidates, config.alpha);
  for (std::size_t i = 0; i < config.k; ++i) {
    out.push_back(candidates[DrawIndex<Urbg>(weights, rng)]);
  }
  return out;
}

// Per-side sampling for a parallel sentence pair. A side without a config
// is segmented by Viterbi, which gives source-only or target-only
// regularization.
struct PairSamplingConfig {
  std::optional<SamplingConfig> source;
  std::optional<SamplingConfig> target;
  std::size_t k = 1;
};

// k independent (source, target) segmentation pairs; the hook a training
// loop calls once per parameter update.
template <typename Urbg>
std::vector<std::pair<SegPath, SegPath>> SamplePair(
    const UnigramModel& source_model, const UnigramModel& target_model,
    std::string_view source, std::string_view target,
    const PairSamplingConfig& config, Urbg& rng) {
  if (config.k == 0) throw ConfigError("k must be at least 1");
  if (config.source) config.source->Validate();
  if (config.target) config.target->Validate();
  const Lattice src = source_model.BuildLattice(source);
  const Lattice tgt = target_model.BuildLattice(target);
  auto draw = [&](const Lattice& lattice,
                  const std::optional<SamplingConfig>& side) {
    return side ? SampleLattice(lattice, *side, rng) : lattice.Viterbi();
  };
  std::vector<std::pair<SegPath, SegPath>> out;
  out.reserve(config.k);
  for (std::size_t i = 0; i < config.k; ++i) {
    SegPath x = draw(src, config.source);
    SegPath y = draw(tgt, config.target);
    out.emplace_back(std::move(x), std::move(y));
  }
  return out;
}

struct ScoreConfig {
  double lambda = 0.0;  // length penalty exponent
};

// log P(y|x) / |y|^lambda for ranking n-best decoder outputs.
inline double LengthPenalizedScore(double log_prob, std::size_t num_pieces,
                                   const ScoreConfig& config) {
  if (num_pieces == 0) {
    throw ConfigError("length-penalized score needs at least one piece");
  }
  if (!(config.lambda >= 0.0)) {
    throw ConfigError("lambda must be non-negative");
  }
  return log_prob /
         std::pow(static_cast<double>(num_pieces), config.lambda);
}

struct ScoredPath {
  SegPath path;
  double posterior = 0.0;  // P(x) / Σ_x' P(x')
};

inline std::vector<ScoredPath> NBestEncode(const UnigramModel& model,
                                           std::string_view raw,
                                           std::size_t n) {
  if (n == 0) throw ConfigError("n must be at least 1");
  const Lattice lattice = model.BuildLattice(raw);
  const double log_z = lattice.LogPartition();
  std::vector<ScoredPath> out;
  for (SegPath& path : lattice.NBest(n)) {
    const double posterior = std::exp(path.log_prob - log_z);
    out.push_back({std::move(path), posterior});
  }
  return out;
}

}  // namespace subreg

#endif  // SUBREG_SAMPLER_HPP_
