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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "subreg/subreg.hpp"

namespace subreg {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void Report(bool ok, const char* name, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

std::vector<std::string> CorpusLines() {
  std::ifstream in(SUBREG_DATA_DIR "/sotu_1mb.txt", std::ios::binary);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

double MaxAbsDiff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
  }
  return d;
}

// Empirical path frequencies, indexed like `paths`.
template <typename Draw>
std::vector<double> Frequencies(const std::vector<oracle::Path>& paths,
                                int draws, Draw draw) {
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t i = 0; i < paths.size(); ++i) index[paths[i].ids] = i;
  std::vector<double> freq(paths.size(), 0.0);
  for (int d = 0; d < draws; ++d) {
    const auto it = index.find(draw());
    if (it == index.end()) return {};
    freq[it->second] += 1.0;
  }
  for (double& f : freq) f /= draws;
  return freq;
}

void CheckOracleEquivalence() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20260101);
  int mismatches = 0;
  double worst = 0.0;
  const int kInstances = 1000;
  for (int trial = 0; trial < kInstances; ++trial) {
    const oracle::Instance inst = oracle::RandomInstance(rng, 12);
    auto paths = oracle::EnumeratePaths(inst.sentence, inst.vocab);
    oracle::SortPaths(&paths);
    const Lattice lattice = Lattice::Build(inst.sentence, inst.vocab);
    bool ok = true;

    const SegPath best = lattice.Viterbi();
    ok &= best.piece_ids == paths[0].ids;
    worst = std::max(worst, std::abs(best.log_prob - paths[0].log_prob));

    const std::size_t n = 1 + trial % 8;
    const auto nbest = lattice.NBest(n);
    ok &= nbest.size() == std::min(n, paths.size());
    for (std::size_t i = 0; ok && i < nbest.size(); ++i) {
      ok &= nbest[i].piece_ids == paths[i].ids;
      worst = std::max(worst, std::abs(nbest[i].log_prob - paths[i].log_prob));
    }

    const Marginals m = lattice.Marginal();
    worst = std::max(worst, std::abs(m.log_z - oracle::LogZ(paths)));
    const auto counts = oracle::ExpectedCounts(paths);
    for (const auto& [id, c] : counts) {
      const auto it = m.expected_counts.find(id);
      worst = std::max(
          worst, std::abs(c - (it == m.expected_counts.end() ? 0 : it->second)));
    }
    for (const auto& [id, c] : m.expected_counts) {
      if (!counts.count(id)) worst = std::max(worst, std::abs(c));
    }
    if (!ok) ++mismatches;
  }
  const double seconds = Seconds(start);
  Report(mismatches == 0 && worst <= 1e-9 && seconds < 30.0,
         "oracle_equivalence",
         Format("%d instances, %d path mismatches, max error %.3g, %.2f s",
                kInstances, mismatches, worst, seconds));
}

void CheckFfbs() {
  const auto start = Clock::now();
  std::mt19937_64 make(77);
  Rng rng(78);
  const int kLattices = 50;
  const int kDraws = 100000;
  double worst = 0.0;
  bool unknown_path = false;
  for (int i = 0; i < kLattices; ++i) {
    const oracle::Instance inst = oracle::RandomInstance(make, 8);
    const auto paths = oracle::EnumeratePaths(inst.sentence, inst.vocab);
    const Lattice lattice = Lattice::Build(inst.sentence, inst.vocab);
    const auto freq = Frequencies(
        paths, kDraws, [&] { return lattice.SampleFfbs(rng).piece_ids; });
    if (freq.empty()) {
      unknown_path = true;
      continue;
    }
    worst = std::max(worst, MaxAbsDiff(freq, oracle::Posteriors(paths)));
  }
  const double seconds = Seconds(start);
  Report(!unknown_path && worst <= 0.01 && seconds < 60.0, "ffbs_exactness",
         Format("%d lattices x %d draws, max |freq - posterior| %.4f, %.2f s",
                kLattices, kDraws, worst, seconds));
}

void CheckSamplerLaw() {
  const Vocabulary vocab({{U"▁", std::log(0.10)},   {U"a", std::log(0.12)},
                          {U"b", std::log(0.09)},   {U"c", std::log(0.07)},
                          {U"ab", std::log(0.15)},  {U"▁a", std::log(0.11)},
                          {U"bc", std::log(0.06)},  {U"▁ab", std::log(0.05)},
                          {U"abc", std::log(0.04)}, {U"ca", std::log(0.08)},
                          {U"cab", std::log(0.13)}});
  const auto sentence = NormalizedText::FromMarked(U"▁abcab");
  const Lattice lattice = Lattice::Build(sentence, vocab);
  auto all = oracle::EnumeratePaths(sentence, vocab);
  oracle::SortPaths(&all);
  const std::size_t kL = 8;
  const std::vector<oracle::Path> top(all.begin(), all.begin() + kL);
  const int kDraws = 100000;
  Rng rng(4242);

  bool ok = all.size() > kL;
  std::string detail = Format("l=%zu of %zu paths;", kL, all.size());
  for (double alpha : {0.0, 0.1, 0.5, 1.0, 5.0}) {
    const SamplingConfig config{kL, alpha, 1};
    const auto freq = Frequencies(top, kDraws, [&] {
      return SampleLattice(lattice, config, rng).piece_ids;
    });
    double diff = 1.0;
    if (!freq.empty()) diff = MaxAbsDiff(freq, oracle::Posteriors(top, alpha));
    ok &= diff <= 0.01;
    detail += Format(" a=%g:%.4f", alpha, diff);
  }

  // alpha = 0 weights must be exactly 1/l.
  const auto candidates = lattice.NBest(kL);
  const auto uniform = SmoothedWeights(candidates, 0.0);
  bool exact = uniform.size() == kL;
  for (double w : uniform) exact &= w == 1.0 / static_cast<double>(kL);
  ok &= exact;
  detail += exact ? "; a=0 exactly uniform" : "; a=0 NOT uniform";

  const SegPath viterbi = lattice.Viterbi();
  const SamplingConfig sharp{kL, 100.0, 1};
  int hits = 0;
  for (int d = 0; d < kDraws; ++d) {
    hits += SampleLattice(lattice, sharp, rng) == viterbi;
  }
  const double viterbi_freq = static_cast<double>(hits) / kDraws;
  ok &= viterbi_freq >= 0.999;
  detail += Format("; a=100 viterbi freq %.5f", viterbi_freq);
  Report(ok, "sampler_law", detail);
}

void CheckEm() {
  // Micro example: corpus "ab", uniform {a, b, ab}.
  const Vocabulary uniform({{U"a", std::log(1.0 / 3)},
                            {U"b", std::log(1.0 / 3)},
                            {U"ab", std::log(1.0 / 3)}});
  const std::vector<NormalizedText> micro = {NormalizedText::FromMarked(U"ab")};
  const EmResult step = EmStep(micro, uniform);
  auto prob = [&](const std::u32string& p) {
    return std::exp(step.vocab.log_prob(*step.vocab.find(p)));
  };
  const double p_ab = prob(U"ab"), p_a = prob(U"a"), p_b = prob(U"b");
  auto same = [](double a, double b) {
    return std::abs(a - b) <= 4 * std::numeric_limits<double>::epsilon() * b;
  };
  const bool micro_ok = same(p_ab, 0.6) && same(p_a, 0.2) && same(p_b, 0.2);

  // Monotonicity on 64 kB of natural text through a short training run.
  std::vector<NormalizedText> corpus;
  std::size_t bytes = 0;
  for (const auto& line : CorpusLines()) {
    if (bytes + line.size() + 1 > 65536) break;
    bytes += line.size() + 1;
    corpus.push_back(Normalize(line));
  }
  const WordCounts words = CountWords(corpus);
  TrainerConfig config;
  config.target_vocab_size = 1000;
  Vocabulary vocab = MakeSeed(corpus, config.EffectiveSeedSize(),
                              config.max_piece_length);
  const double sentences = static_cast<double>(corpus.size());
  double worst_drop = 0.0;
  int steps = 0;
  for (int round = 0; round < 4; ++round) {
    double previous = -INFINITY;
    for (int sub = 0; sub < 4; ++sub) {
      EmResult em = EmStep(words, vocab);
      const double per_sentence = em.log_likelihood / sentences;
      worst_drop = std::max(worst_drop, previous - per_sentence);
      previous = per_sentence;
      vocab = std::move(em.vocab);
      ++steps;
    }
    vocab = Prune(words, vocab, config);
  }
  Report(micro_ok && worst_drop <= 1e-9, "em_behavior",
         Format("micro p(ab)=%.17g p(a)=%.17g p(b)=%.17g; %zu bytes, %d EM "
                "steps, largest per-sentence drop %.3g",
                p_ab, p_a, p_b, bytes, steps, worst_drop));
}

struct Trained {
  UnigramModel unigram;
  BpeModel bpe;
};

Trained CheckTrainingPipeline(const std::vector<std::string>& lines) {
  TrainerConfig config;
  config.target_vocab_size = 4000;
  const auto start = Clock::now();
  UnigramModel model = Train(lines, config);
  const double seconds = Seconds(start);
  const std::string first = model_io::Serialize(model);
  const std::string second = model_io::Serialize(Train(lines, config));

  const Vocabulary& vocab = model.vocab();
  std::set<char32_t> chars;
  for (const auto& line : lines) {
    for (char32_t c : Normalize(line).text) chars.insert(c);
  }
  std::size_t missing = 0;
  for (char32_t c : chars) missing += !vocab.find(std::u32string(1, c));
  const double total = vocab.TotalProbability();
  Report(seconds < 300.0 && vocab.size() == 4000 && missing == 0 &&
             std::abs(total - 1.0) <= 1e-6 && first == second,
         "training_pipeline",
         Format("%.1f s, %d pieces, %zu/%zu corpus characters present, "
                "sum p = %.12f, rerun %s",
                seconds, vocab.size(), chars.size() - missing, chars.size(),
                total, first == second ? "byte-identical" : "DIFFERS"));

  // Same number of non-reserved symbols as the unigram model.
  BpeModel bpe = TrainBpe(lines, 4000 - Vocabulary::kNumReserved);
  return {std::move(model), std::move(bpe)};
}

void CheckCompressionParity(const Trained& models,
                            const std::vector<std::string>& lines) {
  std::size_t chars = 0;
  for (int id = Vocabulary::kNumReserved; id < models.unigram.vocab().size();
       ++id) {
    chars += models.unigram.vocab().piece(id).size() == 1;
  }
  double unigram_pieces = 0.0, bpe_pieces = 0.0;
  for (const auto& line : lines) {
    unigram_pieces += models.unigram.Encode(line).size();
    bpe_pieces += models.bpe.Encode(line).size();
  }
  const double n = static_cast<double>(lines.size());
  const double ratio = unigram_pieces / bpe_pieces;
  Report(std::abs(ratio - 1.0) <= 0.10, "compression_parity",
         Format("pieces/sentence unigram %.3f, bpe %.3f (%zu symbols), "
                "ratio %.4f",
                unigram_pieces / n, bpe_pieces / n,
                chars + models.bpe.merges().size(), ratio));
}

void CheckSegmentationDiversity(const UnigramModel& model) {
  const std::string sentence = "Hello world";
  const SamplingConfig config{SamplingConfig::kInfinite, 0.2, 1};
  Rng rng(2018);
  std::set<std::vector<int>> distinct;
  int bad_decodes = 0;
  for (int i = 0; i < 100; ++i) {
    const SegPath path = Sample(model, sentence, config, rng);
    distinct.insert(path.piece_ids);
    bad_decodes += model.Decode(path.piece_ids) != sentence;
  }
  Report(distinct.size() >= 3 && bad_decodes == 0, "segmentation_diversity",
         Format("'%s': %zu distinct segmentations in 100 samples, "
                "%d failed decodes",
                sentence.c_str(), distinct.size(), bad_decodes));
}

// 10,000 whitespace-normalized lines: corpus lines, shuffled word orders,
// and lines carrying characters the models never saw.
std::vector<std::string> RoundTripLines(const std::vector<std::string>& corpus) {
  const std::vector<std::string> unseen = {"Ω", "é", "日本", "ß", "€", "😀"};
  std::mt19937_64 rng(10000);
  std::vector<std::string> out;
  for (std::size_t i = 0; out.size() < 10000; ++i) {
    std::string line = corpus[i % corpus.size()];
    if (i >= corpus.size()) {
      std::istringstream in(line);
      std::vector<std::string> words;
      for (std::string w; in >> w;) words.push_back(w);
      std::shuffle(words.begin(), words.end(), rng);
      line.clear();
      for (const auto& w : words) line += w + " ";
    }
    if (i % 10 == 3) line += " " + unseen[i % unseen.size()] + "x";
    out.push_back(CollapseWhitespace(line));
  }
  return out;
}

void CheckRoundTrip(const Trained& models,
                    const std::vector<std::string>& corpus) {
  const auto lines = RoundTripLines(corpus);
  const std::u32string unk = unicode::DecodeUtf8(unicode::kUnknownSurface);

  std::size_t uni_checked = 0, uni_lossy = 0, uni_fail = 0;
  for (const auto& line : lines) {
    const auto ids = models.unigram.EncodeIds(line);
    const std::string back = models.unigram.Decode(ids);
    if (std::find(ids.begin(), ids.end(), Vocabulary::kUnkId) == ids.end()) {
      ++uni_checked;
      uni_fail += back != line;
      continue;
    }
    // Lossy: each unknown character becomes one placeholder.
    ++uni_lossy;
    std::u32string expected;
    for (char32_t c : unicode::DecodeUtf8(line)) {
      const bool known =
          c == U' ' || models.unigram.vocab().find(std::u32string(1, c));
      if (known) {
        expected.push_back(c);
      } else {
        expected += unk;
      }
    }
    uni_fail += unicode::DecodeUtf8(back) != expected;
  }

  std::size_t bpe_checked = 0, bpe_lossy = 0, bpe_fail = 0;
  for (const auto& line : lines) {
    // Piece strings carry unseen characters verbatim.
    bpe_fail += models.bpe.Decode(models.bpe.Encode(line)) != line;
    const auto ids = models.bpe.EncodeIds(line);
    if (std::find(ids.begin(), ids.end(), 0) != ids.end()) {
      ++bpe_lossy;
      continue;
    }
    ++bpe_checked;
    bpe_fail += models.bpe.DecodeIds(ids) != line;
  }
  Report(uni_fail == 0 && bpe_fail == 0 && uni_lossy > 0 && bpe_lossy > 0,
         "round_trip",
         Format("%zu lines; unigram %zu exact + %zu lossy, bpe pieces %zu "
                "exact, bpe ids %zu exact + %zu lossy; %zu failures",
                lines.size(), uni_checked, uni_lossy, lines.size(),
                bpe_checked, bpe_lossy, uni_fail + bpe_fail));
}

}  // namespace
}  // namespace subreg

int main() {
  using namespace subreg;
  CheckOracleEquivalence();
  CheckFfbs();
  CheckSamplerLaw();
  CheckEm();
  const auto lines = CorpusLines();
  const Trained models = CheckTrainingPipeline(lines);
  CheckCompressionParity(models, lines);
  CheckSegmentationDiversity(models.unigram);
  CheckRoundTrip(models, lines);
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
