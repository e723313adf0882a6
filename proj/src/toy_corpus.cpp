// src/toy_corpus.cpp

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

#include "ainn/toy_corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

#include "ainn/common.hpp"

namespace ainn {
namespace fs = std::filesystem;

namespace {

struct Vowel {
  double f1, f2;
};
constexpr Vowel kVowels[] = {
    {730, 1090}, {270, 2290}, {530, 1840}, {570, 840}, {300, 870}};

constexpr double kTiltDbPerKhz = -6.0;
constexpr double kGain = 0.5;

ToyEmotionStyle FullStyle(Emotion e) {
  switch (e) {
    case Emotion::kHappy: return {0.050, 6.0, 0.15};
    case Emotion::kSad: return {0.050, 3.0, -0.15};
    case Emotion::kAngry: return {0.050, 10.0, 0.0};
    case Emotion::kSurprise: return {0.030, 4.0, 0.40};
    case Emotion::kNeutral: break;
  }
  return {};
}

std::uint64_t Mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  return h;
}

struct Syllable {
  Vowel vowel;
  double duration, gap;
};

}  // namespace

ToyEmotionStyle ToyStyle(Emotion e, double intensity) {
  if (e == Emotion::kNeutral || intensity <= 0.0) return {};
  const ToyEmotionStyle f = FullStyle(e);
  return {intensity * f.vibrato_depth, f.vibrato_rate_hz, intensity * f.glide};
}

double ToySpeakerF0(int speaker) { return 115.0 * std::pow(1.42, speaker); }

std::string ToySpeakerName(int speaker) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "spk%02d", speaker + 1);
  return buf;
}

Waveform SynthToyUtterance(int speaker, int content_index, Emotion e, double intensity,
                           std::uint64_t corpus_seed) {
  constexpr int sr = kCorpusSampleRate;
  // Content: shared by every speaker and emotion at this content index.
  Rng content_rng(Mix(corpus_seed, 1000 + static_cast<std::uint64_t>(content_index)));
  std::uniform_int_distribution<int> n_syl(3, 5), vowel(0, 4);
  std::uniform_real_distribution<double> dur(0.18, 0.30), gap(0.06, 0.12);
  std::vector<Syllable> syllables(n_syl(content_rng));
  for (Syllable& s : syllables) s = {kVowels[vowel(content_rng)], dur(content_rng), gap(content_rng)};

  // Small per-recording variation.
  Rng var_rng(Mix(Mix(corpus_seed, static_cast<std::uint64_t>(speaker) * 131 + EmotionIndex(e)),
                  static_cast<std::uint64_t>(content_index)));
  std::uniform_real_distribution<double> jitter(-0.03, 0.03), phase(0.0, 2 * std::numbers::pi);
  std::normal_distribution<double> noise(0.0, 3e-4);

  const ToyEmotionStyle style = ToyStyle(e, intensity);
  const double base_f0 = ToySpeakerF0(speaker) * (1.0 + jitter(var_rng));
  const double lead = 0.08;

  double total = 2 * lead;
  for (const Syllable& s : syllables) total += s.duration + s.gap;
  std::vector<double> signal(static_cast<size_t>(total * sr), 0.0);

  double t0 = lead;
  for (const Syllable& syl : syllables) {
    const double vib_phase = phase(var_rng);
    const double dur_scale = 1.0 + jitter(var_rng);
    const double d = syl.duration * dur_scale;
    const int start = static_cast<int>(t0 * sr);
    const int len = static_cast<int>(d * sr);
    double ph = 0.0;
    for (int i = 0; i < len && start + i < static_cast<int>(signal.size()); ++i) {
      const double tau = static_cast<double>(i) / sr;
      const double f0 = base_f0 *
                        (1.0 + style.vibrato_depth *
                                   std::sin(2 * std::numbers::pi * style.vibrato_rate_hz * tau + vib_phase)) *
                        (1.0 + style.glide * tau / d);
      ph += 2 * std::numbers::pi * f0 / sr;
      // 20 ms raised-cosine attack and release.
      const double ramp = 0.02;
      double env = 1.0;
      if (tau < ramp) env = 0.5 - 0.5 * std::cos(std::numbers::pi * tau / ramp);
      if (d - tau < ramp) env = std::min(env, 0.5 - 0.5 * std::cos(std::numbers::pi * (d - tau) / ramp));
      double v = 0.0, norm = 0.0;
      for (int h = 1; h * f0 < 7000.0; ++h) {
        const double f = h * f0;
        const double r1 = (f - syl.vowel.f1) / 120.0, r2 = (f - syl.vowel.f2) / 180.0;
        double amp = std::exp(-0.5 * r1 * r1) + 0.7 * std::exp(-0.5 * r2 * r2) + 0.05;
        amp *= std::pow(10.0, kTiltDbPerKhz * f / 1000.0 / 20.0);
        v += amp * std::sin(h * ph);
        norm += amp;
      }
      signal[start + i] += kGain * env * v / std::max(norm, 1e-9);
    }
    t0 += d + syl.gap;
  }

  Waveform w;
  w.sample_rate_hz = sr;
  w.samples.resize(signal.size());
  for (size_t i = 0; i < signal.size(); ++i)
    w.samples[i] = static_cast<float>(std::clamp(signal[i] + noise(var_rng), -1.0, 1.0));
  return w;
}

void SynthToyCorpus(const fs::path& out_root, const ToyCorpusConfig& cfg, std::uint64_t seed) {
  Require(cfg.speakers >= 1 && cfg.train >= 1 && cfg.val >= 1 && cfg.test >= 1,
          ErrorKind::kInvalidArgument, "toy corpus needs at least one file per cell");
  std::error_code ec;
  fs::create_directories(out_root, ec);
  Require(!ec && fs::is_directory(out_root), ErrorKind::kIo,
          "cannot create corpus directory: " + out_root.string());

  std::ofstream table(out_root / "intensity.tsv", std::ios::trunc);
  Require(table.good(), ErrorKind::kIo, "cannot write intensity table");
  const std::pair<Split, int> splits[] = {
      {Split::kTrain, cfg.train}, {Split::kVal, cfg.val}, {Split::kTest, cfg.test}};
  for (int spk = 0; spk < cfg.speakers; ++spk) {
    const std::string speaker = ToySpeakerName(spk);
    for (Emotion e : kAllEmotions) {
      int content_offset = 0;
      for (auto [split, count] : splits) {
        fs::path dir = out_root / speaker / std::string(EmotionName(e)) / std::string(SplitName(split));
        fs::create_directories(dir, ec);
        Require(!ec, ErrorKind::kIo, "cannot create " + dir.string());
        for (int k = 0; k < count; ++k) {
          const double intensity = e == Emotion::kNeutral ? 0.0
                                   : k % 2 == 0          ? cfg.high_intensity
                                                         : cfg.low_intensity;
          char name[96];
          std::snprintf(name, sizeof(name), "%s_%s_%s_%03d", speaker.c_str(),
                        std::string(EmotionName(e)).c_str(),
                        std::string(SplitName(split)).c_str(), k);
          SaveWav(dir / (std::string(name) + ".wav"),
                  SynthToyUtterance(spk, content_offset + k, e, intensity, seed));
          table << name << '\t' << intensity << '\n';
        }
        content_offset += count;
      }
    }
  }
  Require(table.good(), ErrorKind::kIo, "failed writing intensity table");
}

std::map<std::string, double> ReadIntensityTable(const fs::path& root) {
  std::ifstream f(root / "intensity.tsv");
  Require(f.good(), ErrorKind::kIo, "missing intensity table in " + root.string());
  std::map<std::string, double> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string id;
    double v;
    Require(static_cast<bool>(ss >> id >> v), ErrorKind::kIo, "bad intensity line: " + line);
    out[id] = v;
  }
  return out;
}

}  // namespace ainn
