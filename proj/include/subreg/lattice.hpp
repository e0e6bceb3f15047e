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

#ifndef SUBREG_LATTICE_HPP_
#define SUBREG_LATTICE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "subreg/log_math.hpp"
#include "subreg/normalizer.hpp"
#include "subreg/vocabulary.hpp"

namespace subreg {

// Random source used by all samplers. Callers own and seed it.
using Rng = std::mt19937_64;

// Uniform double in [0, 1) from 53 random bits; identical on every platform.
template <typename Urbg>
double UniformUnit(Urbg& rng) {
  static_assert(Urbg::min() == 0 &&
                    Urbg::max() == std::numeric_limits<std::uint64_t>::max(),
                "expects a full-range 64-bit generator");
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// One segmentation of a sentence.
struct SegPath {
  std::vector<int> piece_ids;
  double log_prob = 0.0;

  std::size_t size() const { return piece_ids.size(); }
  friend bool operator==(const SegPath&, const SegPath&) = default;
};

// Scores closer than this (relative) are treated as equal and resolved by
// the tie-breaking rules.
inline bool ScoresTie(double a, double b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= 1e-12 * scale;
}

// Total order used for every ranking of segmentations: higher probability,
// then fewer pieces, then the lexicographically smaller id sequence.
inline bool BetterPath(const SegPath& a, const SegPath& b) {
  if (!ScoresTie(a.log_prob, b.log_prob)) return a.log_prob > b.log_prob;
  if (a.size() != b.size()) return a.size() < b.size();
  return a.piece_ids < b.piece_ids;
}

struct LatticeNode {
  std::size_t begin = 0;
  std::size_t end = 0;
  int piece_id = 0;
  double log_prob = 0.0;
};

// Posterior summary of a lattice.
struct Marginals {
  double log_z = kLogZero;
  std::map<int, double> expected_counts;
};

// All segmentation candidates of one sentence as a DAG over character
// positions 0..length(). BOS is position 0 and EOS is position length().
class Lattice {
 public:
  // One node per (position, matching piece) within each word span. Characters
  // covered by no single-character piece get an <unk> node.
  static Lattice Build(const NormalizedText& sentence, const Vocabulary& vocab) {
    Lattice lattice(sentence.text.size());
    for (const Span& span : sentence.word_spans) {
      lattice.AddWord(sentence.text, span, vocab);
    }
    lattice.Index();
    return lattice;
  }

  // Lattice of a single word (a text with one span).
  static Lattice BuildWord(std::u32string_view word, const Vocabulary& vocab) {
    Lattice lattice(word.size());
    lattice.AddWord(word, {0, word.size()}, vocab);
    lattice.Index();
    return lattice;
  }

  std::size_t length() const { return length_; }
  const std::vector<LatticeNode>& nodes() const { return nodes_; }

  std::span<const int> begins_at(std::size_t pos) const {
    return Slice(begin_offsets_, begin_index_, pos);
  }
  std::span<const int> ends_at(std::size_t pos) const {
    return Slice(end_offsets_, end_index_, pos);
  }

  SegPath Viterbi() const {
    struct Best {
      double score = kLogZero;
      std::size_t count = 0;
      int node = -1;
    };
    std::vector<Best> best(length_ + 1);
    best[0].score = 0.0;
    auto prefix_ids = [&](int node) {
      std::vector<int> ids;
      for (int k = node; k >= 0; k = best[nodes_[k].begin].node) {
        ids.push_back(nodes_[k].piece_id);
      }
      std::reverse(ids.begin(), ids.end());
      return ids;
    };
    for (std::size_t pos = 1; pos <= length_; ++pos) {
      Best& cur = best[pos];
      for (int k : ends_at(pos)) {
        const LatticeNode& node = nodes_[k];
        const Best& prev = best[node.begin];
        if (prev.score == kLogZero && node.begin != 0) continue;
        const double score = prev.score + node.log_prob;
        const std::size_t count = prev.count + 1;
        bool take = cur.node < 0;
        if (!take) {
          if (!ScoresTie(score, cur.score)) {
            take = score > cur.score;
          } else if (count != cur.count) {
            take = count < cur.count;
          } else {
            take = prefix_ids(k) < prefix_ids(cur.node);
          }
        }
        if (take) cur = {score, count, k};
      }
    }
    SegPath path;
    if (length_ == 0) return path;
    path.piece_ids = prefix_ids(best[length_].node);
    path.log_prob = best[length_].score;
    return path;
  }

  // Exact top-n segmentations, best first. A forward Viterbi pass gives, for
  // every position, the best score of any prefix ending there; a backward A*
  // search from EOS then uses it as an exact completion estimate, so complete
  // paths leave the agenda in non-increasing score order.
  std::vector<SegPath> NBest(std::size_t n) const {
    std::vector<SegPath> out;
    if (n == 0) return out;
    if (length_ == 0) {
      out.push_back({});
      return out;
    }
    const std::vector<double> prefix_best = ForwardMax();

    struct Hyp {
      std::size_t pos;  // start of the suffix covered so far
      double suffix;    // log-prob of that suffix
      int node;         // first node of the suffix, -1 for the EOS seed
      int next;         // hypothesis for the rest of the suffix
    };
    std::vector<Hyp> hyps;
    struct Entry {
      double priority;
      int hyp;
      bool operator<(const Entry& o) const {
        if (priority != o.priority) return priority < o.priority;
        return hyp > o.hyp;
      }
    };
    std::priority_queue<Entry> agenda;
    hyps.push_back({length_, 0.0, -1, -1});
    agenda.push({prefix_best[length_], 0});

    constexpr std::size_t kMaxTieOverflow = 1 << 16;
    std::size_t pops = 0;
    while (!agenda.empty()) {
      const Entry top = agenda.top();
      if (out.size() >= n && !ScoresTie(top.priority, out[n - 1].log_prob) &&
          top.priority < out[n - 1].log_prob) {
        break;
      }
      if (out.size() >= n + kMaxTieOverflow) break;
      agenda.pop();
      ++pops;
      const Hyp hyp = hyps[top.hyp];
      if (hyp.pos == 0) {
        SegPath path;
        path.log_prob = hyp.suffix;
        for (int h = top.hyp; hyps[h].node >= 0; h = hyps[h].next) {
          path.piece_ids.push_back(nodes_[hyps[h].node].piece_id);
        }
        out.push_back(std::move(path));
        continue;
      }
      for (int k : ends_at(hyp.pos)) {
        const LatticeNode& node = nodes_[k];
        if (prefix_best[node.begin] == kLogZero) continue;
        const double suffix = hyp.suffix + node.log_prob;
        hyps.push_back({node.begin, suffix, k, top.hyp});
        agenda.push({suffix + prefix_best[node.begin],
                     static_cast<int>(hyps.size() - 1)});
      }
    }
    std::stable_sort(out.begin(), out.end(), BetterPath);
    if (out.size() > n) out.resize(n);
    return out;
  }

  // log of Σ over paths of exp(scale · path log-prob).
  double LogPartition(double scale = 1.0) const {
    return Forward(scale).back();
  }

  // Forward-backward: log Z and posterior expected occurrences per piece.
  Marginals Marginal() const {
    Marginals m;
    std::vector<double> node_posterior;
    m.log_z = NodePosteriors(&node_posterior);
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      if (node_posterior[k] > 0.0) {
        m.expected_counts[nodes_[k].piece_id] += node_posterior[k];
      }
    }
    return m;
  }

  // Adds weight · expected count of every piece into counts[piece_id];
  // returns log Z.
  double AccumulateExpectedCounts(double weight,
                                  std::span<double> counts) const {
    std::vector<double> node_posterior;
    const double log_z = NodePosteriors(&node_posterior);
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      counts[nodes_[k].piece_id] += weight * node_posterior[k];
    }
    return log_z;
  }

  // log Z with every node of `piece_id` removed.
  double LogPartitionWithout(int piece_id) const {
    std::vector<double> alpha(length_ + 1, kLogZero);
    alpha[0] = 0.0;
    for (std::size_t pos = 1; pos <= length_; ++pos) {
      double acc = kLogZero;
      for (int k : ends_at(pos)) {
        const LatticeNode& node = nodes_[k];
        if (node.piece_id == piece_id) continue;
        acc = LogAdd(acc, alpha[node.begin] + node.log_prob);
      }
      alpha[pos] = acc;
    }
    return alpha[length_];
  }

  // Forward-filtering backward-sampling: draws a path with probability
  // exp(scale · log P(path)) / Σ_paths exp(scale · log P(path)). The forward
  // pass accumulates, for every position, the mass of all prefixes ending
  // there; walking back from EOS, each step picks a node ending at the
  // current position in proportion to prefix mass times node weight.
  template <typename Urbg>
  SegPath SampleFfbs(Urbg& rng, double scale = 1.0) const {
    SegPath path;
    if (length_ == 0) return path;
    const std::vector<double> alpha = Forward(scale);
    std::vector<double> weights;
    std::size_t pos = length_;
    while (pos > 0) {
      const auto candidates = ends_at(pos);
      weights.clear();
      double total = 0.0;
      for (int k : candidates) {
        const LatticeNode& node = nodes_[k];
        const double w =
            std::exp(alpha[node.begin] + scale * node.log_prob - alpha[pos]);
        weights.push_back(w);
        total += w;
      }
      double u = UniformUnit(rng) * total;
      std::size_t pick = 0;
      for (; pick + 1 < weights.size(); ++pick) {
        if (u < weights[pick]) break;
        u -= weights[pick];
      }
      // Skip zero-mass tail entries the subtraction may land on.
      while (weights[pick] == 0.0 && pick > 0) --pick;
      const LatticeNode& node = nodes_[candidates[pick]];
      path.piece_ids.push_back(node.piece_id);
      path.log_prob += node.log_prob;
      pos = node.begin;
    }
    std::reverse(path.piece_ids.begin(), path.piece_ids.end());
    return path;
  }

  // Sum of node log-probs of a path.
  double PathLogProb(std::span<const int> piece_ids) const {
    double lp = 0.0;
    std::size_t pos = 0;
    for (int id : piece_ids) {
      bool found = false;
      for (int k : begins_at(pos)) {
        if (nodes_[k].piece_id == id) {
          lp += nodes_[k].log_prob;
          pos = nodes_[k].end;
          found = true;
          break;
        }
      }
      if (!found) return kLogZero;
    }
    return pos == length_ ? lp : kLogZero;
  }

 private:
  explicit Lattice(std::size_t length) : length_(length) {}

  void AddWord(std::u32string_view text, Span span, const Vocabulary& vocab) {
    for (std::size_t pos = span.begin; pos < span.end; ++pos) {
      bool has_single = false;
      vocab.ForEachMatch(text, pos, span.end, [&](std::size_t end, int id) {
        nodes_.push_back({pos, end, id, vocab.log_prob(id)});
        if (end == pos + 1) has_single = true;
      });
      if (!has_single) {
        nodes_.push_back(
            {pos, pos + 1, Vocabulary::kUnkId, vocab.unknown_log_prob()});
      }
    }
  }

  void Index() {
    auto bucket = [&](auto key, std::vector<int>& offsets,
                      std::vector<int>& index) {
      offsets.assign(length_ + 2, 0);
      for (const auto& node : nodes_) ++offsets[key(node) + 1];
      for (std::size_t i = 1; i < offsets.size(); ++i) {
        offsets[i] += offsets[i - 1];
      }
      index.resize(nodes_.size());
      std::vector<int> fill(offsets.begin(), offsets.end() - 1);
      for (std::size_t k = 0; k < nodes_.size(); ++k) {
        index[fill[key(nodes_[k])]++] = static_cast<int>(k);
      }
    };
    bucket([](const LatticeNode& n) { return n.begin; }, begin_offsets_,
           begin_index_);
    bucket([](const LatticeNode& n) { return n.end; }, end_offsets_,
           end_index_);
  }

  static std::span<const int> Slice(const std::vector<int>& offsets,
                                    const std::vector<int>& index,
                                    std::size_t pos) {
    return std::span<const int>(index).subspan(
        offsets[pos], offsets[pos + 1] - offsets[pos]);
  }

  std::vector<double> Forward(double scale) const {
    std::vector<double> alpha(length_ + 1, kLogZero);
    alpha[0] = 0.0;
    for (std::size_t pos = 1; pos <= length_; ++pos) {
      double acc = kLogZero;
      for (int k : ends_at(pos)) {
        const LatticeNode& node = nodes_[k];
        acc = LogAdd(acc, alpha[node.begin] + scale * node.log_prob);
      }
      alpha[pos] = acc;
    }
    return alpha;
  }

  std::vector<double> Backward() const {
    std::vector<double> beta(length_ + 1, kLogZero);
    beta[length_] = 0.0;
    for (std::size_t pos = length_; pos-- > 0;) {
      double acc = kLogZero;
      for (int k : begins_at(pos)) {
        const LatticeNode& node = nodes_[k];
        acc = LogAdd(acc, node.log_prob + beta[node.end]);
      }
      beta[pos] = acc;
    }
    return beta;
  }

  std::vector<double> ForwardMax() const {
    std::vector<double> best(length_ + 1, kLogZero);
    best[0] = 0.0;
    for (std::size_t pos = 1; pos <= length_; ++pos) {
      for (int k : ends_at(pos)) {
        const LatticeNode& node = nodes_[k];
        best[pos] = std::max(best[pos], best[node.begin] + node.log_prob);
      }
    }
    return best;
  }

  double NodePosteriors(std::vector<double>* posterior) const {
    const std::vector<double> alpha = Forward(1.0);
    const std::vector<double> beta = Backward();
    const double log_z = alpha[length_];
    posterior->assign(nodes_.size(), 0.0);
    if (log_z == kLogZero) return log_z;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      const LatticeNode& node = nodes_[k];
      (*posterior)[k] =
          std::exp(alpha[node.begin] + node.log_prob + beta[node.end] - log_z);
    }
    return log_z;
  }

  std::size_t length_ = 0;
  std::vector<LatticeNode> nodes_;
  std::vector<int> begin_offsets_, begin_index_;
  std::vector<int> end_offsets_, end_index_;
};

}  // namespace subreg

#endif  // SUBREG_LATTICE_HPP_
