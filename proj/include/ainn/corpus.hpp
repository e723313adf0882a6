// include/ainn/corpus.hpp

// Copyright 2026  The ainn-evc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef AINN_CORPUS_HPP_
#define AINN_CORPUS_HPP_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ainn/common.hpp"
#include "ainn/mel.hpp"

namespace ainn {

enum class Emotion : int { kNeutral = 0, kHappy, kSad, kAngry, kSurprise };
inline constexpr int kNumEmotions = 5;
inline constexpr std::array<Emotion, kNumEmotions> kAllEmotions = {
    Emotion::kNeutral, Emotion::kHappy, Emotion::kSad, Emotion::kAngry,
    Emotion::kSurprise};

std::string_view EmotionName(Emotion e);
// Case-insensitive ("Happy" and "happy" both parse, as in ESD folder names).
std::optional<Emotion> ParseEmotion(std::string_view name);
inline int EmotionIndex(Emotion e) { return static_cast<int>(e); }

enum class Split : int { kTrain = 0, kVal, kTest };
std::string_view SplitName(Split s);
std::optional<Split> ParseSplit(std::string_view name);

struct Utterance {
  std::string id;
  std::string speaker;
  Emotion emotion = Emotion::kNeutral;
  Split split = Split::kTrain;
  std::filesystem::path audio_path;
  bool operator==(const Utterance&) const = default;
};

// Layout: root/<speaker>/<emotion>/<split>/<id>.wav. Utterances are sorted
// by (speaker, emotion, id); every (speaker, emotion, split) cell is non-empty.
struct CorpusIndex {
  std::vector<Utterance> utterances;
  std::vector<std::string> speakers;
  std::uint64_t seed = 0;

  // Indices into utterances for one cell, in index order.
  std::vector<size_t> Cell(const std::string& speaker, Emotion e, Split s) const;
  std::vector<size_t> InSplit(Split s) const;
  std::optional<size_t> Find(const std::string& id) const;
};

CorpusIndex IndexCorpus(const std::filesystem::path& root);

struct PairSample {
  Utterance source;
  Utterance reference;
  std::pair<Emotion, Emotion> conversion_type() const {
    return {source.emotion, reference.emotion};
  }
};

struct PairCounts {
  int train = 0, val = 0, test = 0;
};

struct PairSets {
  std::vector<PairSample> train, val, test;
  const std::vector<PairSample>& Get(Split s) const;
};

// For each of the 20 ordered pairs of distinct emotions, draws exactly the
// requested number of (source, reference) pairs per split. Both sides come
// from the same speaker and the matching split; draws are with replacement.
PairSets MakeConversionPairs(const CorpusIndex& index, PairCounts per_type,
                             std::uint64_t seed);

struct TripletSample {
  Utterance anchor;    // emotional
  Utterance positive;  // same emotion as anchor, different id
  Utterance negative;  // neutral, same speaker
};

// Anchor emotion is uniform over the non-neutral emotions that can form a
// triplet in the requested split; speaker is then uniform over feasible ones.
TripletSample SampleTriplet(const CorpusIndex& index, Rng& rng,
                            Split split = Split::kTrain);

// Uniform random contiguous crop of t_fixed frames, or cyclic repeat-padding
// when the input is shorter.
Matrix FixedCrop(const Matrix& frames, int t_fixed, Rng& rng);
MelSpectrogram FixedCrop(const MelSpectrogram& mel, int t_fixed, Rng& rng);

// Tab-separated manifests: split, type, source_id, reference_id. Triplets use
// type "triplet-<emotion>" and three id columns.
void WritePairManifest(const std::filesystem::path& path, const PairSets& pairs);
void WriteTripletManifest(const std::filesystem::path& path,
                          const std::vector<TripletSample>& triplets, Split split);

// The index plus every utterance's mel, computed once.
struct MelCorpus {
  CorpusIndex index;
  std::vector<MelSpectrogram> mels;  // parallel to index.utterances
  std::unordered_map<std::string, size_t> by_id;
  const Matrix& MelOf(const Utterance& u) const;
};

MelCorpus LoadMelCorpus(const std::filesystem::path& root, const MelConfig& cfg = {});

// Utterance of the same speaker/split with the given emotion at the same
// ordinal position in its cell; the toy corpus (and ESD) are parallel in
// content at equal ordinals.
std::optional<size_t> ParallelUtterance(const CorpusIndex& index,
                                        const Utterance& u, Emotion target);

}  // namespace ainn

#endif  // AINN_CORPUS_HPP_
