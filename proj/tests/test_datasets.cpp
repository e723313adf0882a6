// tests/test_datasets.cpp

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

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ainn/corpus.hpp"
#include "ainn/mel.hpp"
#include "ainn/pitch.hpp"
#include "ainn/toy_corpus.hpp"
#include "test_helpers.hpp"

using namespace ainn;
using namespace ainn::testing;

namespace {

const std::filesystem::path& SmallToy() { return SharedToyCorpus(); }

// ESD-shaped index built in memory: 10 speakers x 5 emotions, 300/20/30.
CorpusIndex EsdShaped() {
  CorpusIndex idx;
  for (int s = 0; s < 10; ++s) {
    std::string spk = ToySpeakerName(s);
    idx.speakers.push_back(spk);
    for (Emotion e : kAllEmotions) {
      int n = 0;
      for (auto [split, count] : {std::pair{Split::kTrain, 300}, {Split::kVal, 20}, {Split::kTest, 30}})
        for (int i = 0; i < count; ++i, ++n) {
          char id[64];
          std::snprintf(id, sizeof(id), "%s_%s_%06d", spk.c_str(), std::string(EmotionName(e)).c_str(), n);
          idx.utterances.push_back({id, spk, e, split, {}});
        }
    }
  }
  return idx;
}

}  // namespace

TEST_CASE("emotion and split names", "[datasets]") {
  CHECK(ParseEmotion("Happy") == Emotion::kHappy);
  CHECK(ParseEmotion("SURPRISE") == Emotion::kSurprise);
  CHECK_FALSE(ParseEmotion("bored").has_value());
  for (Emotion e : kAllEmotions) CHECK(ParseEmotion(EmotionName(e)) == e);
  CHECK(ParseSplit("evaluation") == Split::kVal);
  CHECK(ParseSplit("test") == Split::kTest);
  CHECK(EmotionIndex(Emotion::kNeutral) == 0);
  CHECK(kNumEmotions == 5);
}

TEST_CASE("toy corpus indexes to the expected counts", "[datasets]") {
  CorpusIndex idx = IndexCorpus(SmallToy());
  CHECK(idx.utterances.size() == 100);
  CHECK(idx.speakers.size() == 2);
  for (const auto& spk : idx.speakers)
    for (Emotion e : kAllEmotions) {
      CHECK(idx.Cell(spk, e, Split::kTrain).size() == 6);
      CHECK(idx.Cell(spk, e, Split::kVal).size() == 2);
      CHECK(idx.Cell(spk, e, Split::kTest).size() == 2);
    }
  // Sorted by (speaker, emotion, id) and deterministic.
  for (size_t i = 1; i < idx.utterances.size(); ++i) {
    const auto& a = idx.utterances[i - 1];
    const auto& b = idx.utterances[i];
    auto key = [](const Utterance& u) { return std::tuple(u.speaker, EmotionIndex(u.emotion), u.id); };
    CHECK(key(a) < key(b));
  }
  CHECK(IndexCorpus(SmallToy()).utterances == idx.utterances);
  std::set<std::string> ids;
  for (const auto& u : idx.utterances) ids.insert(u.id);
  CHECK(ids.size() == idx.utterances.size());
}

TEST_CASE("index rejects empty cells and duplicate ids", "[datasets]") {
  TempDir dir("bad");
  Waveform w = Sine(200, 0.2);
  for (Emotion e : kAllEmotions)
    for (const char* split : {"train", "val", "test"}) {
      auto d = dir / "c" / "spk01" / std::string(EmotionName(e)) / split;
      std::filesystem::create_directories(d);
      if (!(e == Emotion::kSad && std::string(split) == "val"))
        SaveWav(d / (std::string(EmotionName(e)) + split + ".wav"), w);
    }
  try {
    IndexCorpus(dir / "c");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInfeasible);
    CHECK(std::string(e.what()).find("spk01/sad/val") != std::string::npos);
  }
  SaveWav(dir / "c" / "spk01" / "sad" / "val" / "sadval.wav", w);
  CHECK(IndexCorpus(dir / "c").utterances.size() == 15);
  SaveWav(dir / "c" / "spk01" / "happy" / "test" / "sadval.wav", w);
  CHECK_THROWS_AS(IndexCorpus(dir / "c"), Error);
  CHECK_THROWS_AS(IndexCorpus(dir / "missing"), Error);
}

TEST_CASE("toy intensity table and parallel content", "[datasets]") {
  CorpusIndex idx = IndexCorpus(SmallToy());
  auto table = ReadIntensityTable(SmallToy());
  CHECK(table.size() == idx.utterances.size());
  for (const auto& spk : idx.speakers)
    for (Emotion e : kAllEmotions) {
      auto cell = idx.Cell(spk, e, Split::kTrain);
      for (size_t k = 0; k < cell.size(); ++k) {
        const double v = table.at(idx.utterances[cell[k]].id);
        if (e == Emotion::kNeutral) CHECK(v == 0.0);
        else CHECK(v == (k % 2 == 0 ? 1.0 : 0.4));
      }
    }
  // Same ordinal in another emotion cell shares syllable timing, so the
  // neutral and sad renderings have the same length.
  const Utterance& u = idx.utterances[idx.Cell("spk01", Emotion::kNeutral, Split::kTest)[1]];
  auto par = ParallelUtterance(idx, u, Emotion::kSad);
  REQUIRE(par.has_value());
  const Utterance& v = idx.utterances[*par];
  CHECK(v.emotion == Emotion::kSad);
  CHECK(v.speaker == u.speaker);
  CHECK(v.split == u.split);
  CHECK(LoadWav(v.audio_path).samples.size() == LoadWav(u.audio_path).samples.size());
}

TEST_CASE("toy styles scale with intensity", "[datasets]") {
  for (Emotion e : {Emotion::kHappy, Emotion::kSad, Emotion::kAngry, Emotion::kSurprise}) {
    ToyEmotionStyle lo = ToyStyle(e, 0.4), hi = ToyStyle(e, 1.0), n = ToyStyle(Emotion::kNeutral, 1.0);
    CHECK(hi.vibrato_depth > lo.vibrato_depth);
    CHECK(lo.vibrato_depth > 0.0);
    CHECK(std::abs(hi.glide) >= std::abs(lo.glide));
    CHECK(hi.vibrato_rate_hz == lo.vibrato_rate_hz);
    CHECK(n.vibrato_depth == 0.0);
    CHECK(n.glide == 0.0);
  }
  Waveform a = SynthToyUtterance(0, 3, Emotion::kHappy, 1.0, 9);
  Waveform b = SynthToyUtterance(0, 3, Emotion::kHappy, 1.0, 9);
  CHECK(a.samples == b.samples);
  for (float s : a.samples) REQUIRE(std::abs(s) <= 1.0f);
}

TEST_CASE("conversion pair counts and invariants", "[datasets]") {
  CorpusIndex idx = IndexCorpus(SmallToy());
  PairSets one = MakeConversionPairs(idx, {1, 0, 0}, 3);
  CHECK(one.train.size() == 20);
  CHECK(one.val.empty());
  std::set<std::pair<Emotion, Emotion>> types;
  for (const auto& p : one.train) types.insert(p.conversion_type());
  CHECK(types.size() == 20);

  CorpusIndex esd = EsdShaped();
  PairSets full = MakeConversionPairs(esd, {750, 50, 15}, 1);
  CHECK(full.train.size() == 15000);
  CHECK(full.val.size() == 1000);
  CHECK(full.test.size() == 300);
  for (Split s : {Split::kTrain, Split::kVal, Split::kTest}) {
    std::map<std::pair<Emotion, Emotion>, int> per_type;
    for (const auto& p : full.Get(s)) {
      CHECK(p.source.emotion != p.reference.emotion);
      CHECK(p.source.speaker == p.reference.speaker);
      CHECK(p.source.split == s);
      CHECK(p.reference.split == s);
      ++per_type[p.conversion_type()];
    }
    for (const auto& [t, n] : per_type) CHECK(n == (s == Split::kTrain ? 750 : s == Split::kVal ? 50 : 15));
  }
  PairSets again = MakeConversionPairs(esd, {750, 50, 15}, 1);
  CHECK(again.test.front().source == full.test.front().source);
  CHECK(again.train.back().reference == full.train.back().reference);
}

TEST_CASE("triplet invariants", "[datasets][property]") {
  CorpusIndex idx = IndexCorpus(SmallToy());
  Rng rng(8);
  std::set<Emotion> anchors;
  for (int i = 0; i < 1000; ++i) {
    TripletSample t = SampleTriplet(idx, rng);
    CHECK(t.anchor.emotion != Emotion::kNeutral);
    CHECK(t.positive.emotion == t.anchor.emotion);
    CHECK(t.positive.id != t.anchor.id);
    CHECK(t.negative.emotion == Emotion::kNeutral);
    CHECK(t.negative.speaker == t.anchor.speaker);
    CHECK(t.positive.speaker == t.anchor.speaker);
    CHECK(t.anchor.split == Split::kTrain);
    anchors.insert(t.anchor.emotion);
  }
  CHECK(anchors.size() == 4);
}

TEST_CASE("fixed crops", "[datasets]") {
  Rng rng(9);
  Matrix m(10, 3);
  for (int t = 0; t < 10; ++t) m.row(t).setConstant(static_cast<float>(t));
  for (int i = 0; i < 50; ++i) {
    Matrix c = FixedCrop(m, 4, rng);
    REQUIRE(c.rows() == 4);
    const float start = c(0, 0);
    for (int t = 0; t < 4; ++t) CHECK(c(t, 1) == start + t);
  }
  Matrix pad = FixedCrop(m, 25, rng);
  REQUIRE(pad.rows() == 25);
  for (int t = 0; t < 25; ++t) CHECK(pad(t, 2) == static_cast<float>(t % 10));
  CHECK(FixedCrop(m, 10, rng) == m);
}

TEST_CASE("manifests", "[datasets]") {
  CorpusIndex idx = IndexCorpus(SmallToy());
  TempDir dir("manifest");
  PairSets pairs = MakeConversionPairs(idx, {2, 1, 1}, 4);
  WritePairManifest(dir / "pairs.tsv", pairs);
  std::ifstream f(dir / "pairs.tsv");
  std::string line;
  int n = 0;
  while (std::getline(f, line)) {
    std::istringstream in(line);
    std::string split, type, src, ref;
    std::getline(in, split, '\t');
    std::getline(in, type, '\t');
    std::getline(in, src, '\t');
    std::getline(in, ref, '\t');
    CHECK(ParseSplit(split).has_value());
    CHECK(type.find('-') != std::string::npos);
    CHECK(idx.Find(src).has_value());
    CHECK(idx.Find(ref).has_value());
    ++n;
  }
  CHECK(n == 80);

  Rng rng(1);
  std::vector<TripletSample> ts{SampleTriplet(idx, rng), SampleTriplet(idx, rng)};
  WriteTripletManifest(dir / "trip.tsv", ts, Split::kTrain);
  std::ifstream g(dir / "trip.tsv");
  std::getline(g, line);
  CHECK(line.rfind("train\ttriplet-", 0) == 0);
}

TEST_CASE("mel corpus lookup", "[datasets]") {
  MelCorpus mc = LoadMelCorpus(SmallToy());
  REQUIRE(mc.mels.size() == mc.index.utterances.size());
  const Utterance& u = mc.index.utterances[17];
  CHECK(mc.MelOf(u).rows() == ComputeMelSpectrogram(LoadWav(u.audio_path)).num_frames());
  Utterance ghost = u;
  ghost.id = "nope";
  CHECK_THROWS_AS(mc.MelOf(ghost), Error);
}

namespace {

// Spread of log f0 over voiced frames: median absolute deviation, so the odd
// tracking error at a syllable boundary does not dominate.
double LogPitchSpread(const Waveform& w) {
  std::vector<double> v;
  for (const PitchFrame& f : PitchContour(w))
    if (f.f0_hz) v.push_back(std::log(*f.f0_hz));
  REQUIRE(v.size() > 10);
  auto median = [](std::vector<double> x) {
    std::nth_element(x.begin(), x.begin() + x.size() / 2, x.end());
    return x[x.size() / 2];
  };
  const double m = median(v);
  for (double& x : v) x = std::abs(x - m);
  return median(v);
}

}  // namespace

TEST_CASE("toy pitch modulation follows emotion and intensity", "[datasets]") {
  for (int speaker : {0, 1}) {
    for (int content = 0; content < 3; ++content) {
      const double flat = LogPitchSpread(SynthToyUtterance(speaker, content, Emotion::kNeutral, 0.0, 4));
      for (Emotion e : {Emotion::kHappy, Emotion::kSad, Emotion::kAngry, Emotion::kSurprise}) {
        const double lo = LogPitchSpread(SynthToyUtterance(speaker, content, e, 0.4, 4));
        const double hi = LogPitchSpread(SynthToyUtterance(speaker, content, e, 1.0, 4));
        CHECK(flat < lo);
        CHECK(lo < hi);
      }
    }
  }
}
