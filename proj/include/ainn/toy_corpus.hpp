// include/ainn/toy_corpus.hpp

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

#ifndef AINN_TOY_CORPUS_HPP_
#define AINN_TOY_CORPUS_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "ainn/corpus.hpp"
#include "ainn/wav.hpp"

namespace ainn {

// Synthetic stand-in for an emotional speech corpus. Each utterance is a
// sequence of harmonic "syllables" separated by silent gaps. The syllable
// sequence (vowel formants, durations) depends only on the ordinal within a
// cell, so equal ordinals are parallel across emotions. Emotion sets the
// vibrato rate and depth and a pitch glide; neutral is flat. Intensity scales
// depth and glide, giving a known strength ordering.
struct ToyCorpusConfig {
  int speakers = 2;
  int train = 6;
  int val = 2;
  int test = 2;
  double high_intensity = 1.0;  // even ordinals
  double low_intensity = 0.4;   // odd ordinals
};

struct ToyEmotionStyle {
  double vibrato_depth = 0.0;  // relative f0 excursion
  double vibrato_rate_hz = 0.0;
  double glide = 0.0;          // relative f0 change across a syllable
};

// Style at a given intensity in [0, 1]; intensity 0 (or neutral) is the
// neutral style.
ToyEmotionStyle ToyStyle(Emotion e, double intensity);

double ToySpeakerF0(int speaker);
std::string ToySpeakerName(int speaker);

// content_index selects the syllable sequence; variation_seed perturbs base
// pitch and syllable timing slightly.
Waveform SynthToyUtterance(int speaker, int content_index, Emotion e,
                           double intensity, std::uint64_t corpus_seed);

// Writes root/<speaker>/<emotion>/<split>/<id>.wav plus root/intensity.tsv.
void SynthToyCorpus(const std::filesystem::path& out_root, const ToyCorpusConfig& cfg,
                    std::uint64_t seed);

// id -> intensity, read from root/intensity.tsv.
std::map<std::string, double> ReadIntensityTable(const std::filesystem::path& root);

}  // namespace ainn

#endif  // AINN_TOY_CORPUS_HPP_
