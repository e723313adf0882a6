// src/corpus.cpp

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

#include "ainn/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "ainn/wav.hpp"

namespace ainn {
namespace fs = std::filesystem;

namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

constexpr std::array<Split, 3> kSplits = {Split::kTrain, Split::kVal, Split::kTest};

}  // namespace

std::string_view EmotionName(Emotion e) {
  switch (e) {
    case Emotion::kNeutral: return "neutral";
    case Emotion::kHappy: return "happy";
    case Emotion::kSad: return "sad";
    case Emotion::kAngry: return "angry";
    case Emotion::kSurprise: return "surprise";
  }
  return "?";
}

std::optional<Emotion> ParseEmotion(std::string_view name) {
  const std::string n = Lower(name);
  for (Emotion e : kAllEmotions)
    if (n == EmotionName(e)) return e;
  return std::nullopt;
}

std::string_view SplitName(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

std::optional<Split> ParseSplit(std::string_view name) {
  const std::string n = Lower(name);
  if (n == "train") return Split::kTrain;
  if (n == "val" || n == "validation" || n == "evaluation") return Split::kVal;
  if (n == "test") return Split::kTest;
  return std::nullopt;
}

std::vector<size_t> CorpusIndex::Cell(const std::string& speaker, Emotion e,
                                      Split s) const {
  std::vector<size_t> out;
  for (size_t i = 0; i < utterances.size(); ++i) {
    const Utterance& u = utterances[i];
    if (u.speaker == speaker && u.emotion == e && u.split == s) out.push_back(i);
  }
  return out;
}

std::vector<size_t> CorpusIndex::InSplit(Split s) const {
  std::vector<size_t> out;
  for (size_t i = 0; i < utterances.size(); ++i)
    if (utterances[i].split == s) out.push_back(i);
  return out;
}

std::optional<size_t> CorpusIndex::Find(const std::string& id) const {
  for (size_t i = 0; i < utterances.size(); ++i)
    if (utterances[i].id == id) return i;
  return std::nullopt;
}

CorpusIndex IndexCorpus(const fs::path& root) {
  Require(fs::is_directory(root), ErrorKind::kIo,
          "corpus root is not a directory: " + root.string());
  CorpusIndex index;
  std::vector<fs::path> speaker_dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) speaker_dirs.push_back(entry.path());
  std::sort(speaker_dirs.begin(), speaker_dirs.end());
  Require(!speaker_dirs.empty(), ErrorKind::kInfeasible,
          "corpus has no speaker directories: " + root.string());

  std::set<std::string> ids;
  for (const fs::path& spk_dir : speaker_dirs) {
    const std::string speaker = spk_dir.filename().string();
    std::map<Emotion, fs::path> emotion_dirs;
    for (const auto& entry : fs::directory_iterator(spk_dir)) {
      if (!entry.is_directory()) continue;
      if (auto e = ParseEmotion(entry.path().filename().string()))
        emotion_dirs[*e] = entry.path();
    }
    for (Emotion e : kAllEmotions) {
      for (Split s : kSplits) {
        std::vector<fs::path> wavs;
        auto it = emotion_dirs.find(e);
        if (it != emotion_dirs.end()) {
          for (const auto& entry : fs::directory_iterator(it->second)) {
            if (!entry.is_directory()) continue;
            auto split = ParseSplit(entry.path().filename().string());
            if (!split || *split != s) continue;
            for (const auto& f : fs::directory_iterator(entry.path()))
              if (f.is_regular_file() && Lower(f.path().extension().string()) == ".wav")
                wavs.push_back(f.path());
          }
        }
        Require(!wavs.empty(), ErrorKind::kInfeasible,
                "empty corpus cell: " + speaker + "/" + std::string(EmotionName(e)) +
                    "/" + std::string(SplitName(s)));
        for (const fs::path& p : wavs) {
          std::ifstream probe(p, std::ios::binary);
          Require(probe.good(), ErrorKind::kIo, "unreadable file: " + p.string());
          Utterance u;
          u.id = p.stem().string();
          u.speaker = speaker;
          u.emotion = e;
          u.split = s;
          u.audio_path = p;
          Require(ids.insert(u.id).second, ErrorKind::kInfeasible,
                  "duplicate utterance id: " + u.id);
          index.utterances.push_back(std::move(u));
        }
      }
    }
    index.speakers.push_back(speaker);
  }
  std::sort(index.utterances.begin(), index.utterances.end(),
            [](const Utterance& a, const Utterance& b) {
              if (a.speaker != b.speaker) return a.speaker < b.speaker;
              if (a.emotion != b.emotion) return a.emotion < b.emotion;
              return a.id < b.id;
            });
  return index;
}

const std::vector<PairSample>& PairSets::Get(Split s) const {
  switch (s) {
    case Split::kTrain: return train;
    case Split::kVal: return val;
    default: return test;
  }
}

PairSets MakeConversionPairs(const CorpusIndex& index, PairCounts per_type,
                             std::uint64_t seed) {
  Require(per_type.train >= 0 && per_type.val >= 0 && per_type.test >= 0,
          ErrorKind::kInvalidArgument, "pair counts must be non-negative");
  Rng rng(seed);
  PairSets out;
  for (Split split : kSplits) {
    const int count = split == Split::kTrain ? per_type.train
                      : split == Split::kVal ? per_type.val
                                             : per_type.test;
    std::vector<PairSample>& dst = split == Split::kTrain ? out.train
                                   : split == Split::kVal ? out.val
                                                          : out.test;
    if (count == 0) continue;
    Require(!index.speakers.empty(), ErrorKind::kInfeasible, "corpus has no speakers");
    // Cells per (speaker, emotion) for this split.
    std::vector<std::array<std::vector<size_t>, kNumEmotions>> cells(index.speakers.size());
    for (size_t s = 0; s < index.speakers.size(); ++s)
      for (Emotion e : kAllEmotions) {
        cells[s][EmotionIndex(e)] = index.Cell(index.speakers[s], e, split);
        Require(!cells[s][EmotionIndex(e)].empty(), ErrorKind::kInfeasible,
                "cannot sample pairs: empty cell " + index.speakers[s] + "/" +
                    std::string(EmotionName(e)) + "/" + std::string(SplitName(split)));
      }
    dst.reserve(static_cast<size_t>(count) * 20);
    for (Emotion src : kAllEmotions) {
      for (Emotion ref : kAllEmotions) {
        if (src == ref) continue;
        for (int i = 0; i < count; ++i) {
          std::uniform_int_distribution<size_t> pick_spk(0, index.speakers.size() - 1);
          size_t s = pick_spk(rng);
          const auto& a = cells[s][EmotionIndex(src)];
          const auto& b = cells[s][EmotionIndex(ref)];
          std::uniform_int_distribution<size_t> pa(0, a.size() - 1), pb(0, b.size() - 1);
          size_t ia = a[pa(rng)];
          size_t ib = b[pb(rng)];
          dst.push_back({index.utterances[ia], index.utterances[ib]});
        }
      }
    }
  }
  return out;
}

TripletSample SampleTriplet(const CorpusIndex& index, Rng& rng, Split split) {
  struct Option {
    std::vector<size_t> emotional, neutral;
  };
  // feasible[e] lists per-speaker options for anchor emotion e.
  std::array<std::vector<Option>, kNumEmotions> feasible;
  for (const std::string& spk : index.speakers) {
    auto neutral = index.Cell(spk, Emotion::kNeutral, split);
    if (neutral.empty()) continue;
    for (Emotion e : kAllEmotions) {
      if (e == Emotion::kNeutral) continue;
      auto cell = index.Cell(spk, e, split);
      if (cell.size() >= 2) feasible[EmotionIndex(e)].push_back({cell, neutral});
    }
  }
  std::vector<int> emotions;
  for (int e = 1; e < kNumEmotions; ++e)
    if (!feasible[e].empty()) emotions.push_back(e);
  Require(!emotions.empty(), ErrorKind::kInfeasible,
          "no speaker has two utterances of an emotion plus a neutral one in split " +
              std::string(SplitName(split)));

  std::uniform_int_distribution<size_t> pick_e(0, emotions.size() - 1);
  const auto& options = feasible[emotions[pick_e(rng)]];
  std::uniform_int_distribution<size_t> pick_s(0, options.size() - 1);
  const Option& opt = options[pick_s(rng)];
  std::uniform_int_distribution<size_t> pick_a(0, opt.emotional.size() - 1);
  size_t a = pick_a(rng);
  std::uniform_int_distribution<size_t> pick_p(0, opt.emotional.size() - 2);
  size_t p = pick_p(rng);
  if (p >= a) ++p;
  std::uniform_int_distribution<size_t> pick_n(0, opt.neutral.size() - 1);
  size_t n = pick_n(rng);
  return {index.utterances[opt.emotional[a]], index.utterances[opt.emotional[p]],
          index.utterances[opt.neutral[n]]};
}

Matrix FixedCrop(const Matrix& frames, int t_fixed, Rng& rng) {
  Require(t_fixed >= 1 && frames.rows() >= 1, ErrorKind::kInvalidArgument,
          "crop needs a non-empty input and t_fixed >= 1");
  const int t = static_cast<int>(frames.rows());
  if (t >= t_fixed) {
    std::uniform_int_distribution<int> pick(0, t - t_fixed);
    return frames.middleRows(pick(rng), t_fixed);
  }
  Matrix out(t_fixed, frames.cols());
  for (int i = 0; i < t_fixed; ++i) out.row(i) = frames.row(i % t);
  return out;
}

MelSpectrogram FixedCrop(const MelSpectrogram& mel, int t_fixed, Rng& rng) {
  return {FixedCrop(mel.frames, t_fixed, rng), mel.config};
}

void WritePairManifest(const fs::path& path, const PairSets& pairs) {
  std::ofstream f(path, std::ios::trunc);
  Require(f.good(), ErrorKind::kIo, "cannot write manifest: " + path.string());
  for (Split s : kSplits)
    for (const PairSample& p : pairs.Get(s))
      f << SplitName(s) << '\t' << EmotionName(p.source.emotion) << '-'
        << EmotionName(p.reference.emotion) << '\t' << p.source.id << '\t'
        << p.reference.id << '\n';
}

void WriteTripletManifest(const fs::path& path, const std::vector<TripletSample>& triplets,
                          Split split) {
  std::ofstream f(path, std::ios::trunc);
  Require(f.good(), ErrorKind::kIo, "cannot write manifest: " + path.string());
  for (const TripletSample& t : triplets)
    f << SplitName(split) << "\ttriplet-" << EmotionName(t.anchor.emotion) << '\t'
      << t.anchor.id << '\t' << t.positive.id << '\t' << t.negative.id << '\n';
}

const Matrix& MelCorpus::MelOf(const Utterance& u) const {
  auto it = by_id.find(u.id);
  Require(it != by_id.end(), ErrorKind::kInvalidArgument, "unknown utterance: " + u.id);
  return mels[it->second].frames;
}

MelCorpus LoadMelCorpus(const fs::path& root, const MelConfig& cfg) {
  MelCorpus corpus;
  corpus.index = IndexCorpus(root);
  corpus.mels.reserve(corpus.index.utterances.size());
  for (size_t i = 0; i < corpus.index.utterances.size(); ++i)
    corpus.by_id[corpus.index.utterances[i].id] = i;
  for (const Utterance& u : corpus.index.utterances)
    corpus.mels.push_back(ComputeMelSpectrogram(LoadWav(u.audio_path, cfg.sample_rate_hz), cfg));
  return corpus;
}

std::optional<size_t> ParallelUtterance(const CorpusIndex& index, const Utterance& u,
                                        Emotion target) {
  auto own = index.Cell(u.speaker, u.emotion, u.split);
  auto pos = std::find_if(own.begin(), own.end(),
                          [&](size_t i) { return index.utterances[i].id == u.id; });
  if (pos == own.end()) return std::nullopt;
  auto other = index.Cell(u.speaker, target, u.split);
  size_t ordinal = static_cast<size_t>(pos - own.begin());
  if (ordinal >= other.size()) return std::nullopt;
  return other[ordinal];
}

}  // namespace ainn
