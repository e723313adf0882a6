// tests/test_helpers.hpp

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

#ifndef AINN_TESTS_TEST_HELPERS_HPP_
#define AINN_TESTS_TEST_HELPERS_HPP_

#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ainn/common.hpp"
#include "ainn/corpus.hpp"
#include "ainn/model.hpp"
#include "ainn/toy_corpus.hpp"
#include "ainn/wav.hpp"

namespace ainn::testing {

inline Waveform Sine(double hz, double seconds, double amp = 0.5, int rate = 16000) {
  Waveform w;
  w.sample_rate_hz = rate;
  const int n = static_cast<int>(seconds * rate);
  w.samples.resize(n);
  for (int i = 0; i < n; ++i)
    w.samples[i] = static_cast<float>(amp * std::sin(2 * std::numbers::pi * hz * i / rate));
  return w;
}

// Sawtooth-like harmonic tone (first 10 harmonics, 1/k amplitudes).
inline Waveform Harmonic(double f0, double seconds, double amp = 0.3) {
  Waveform w;
  const int n = static_cast<int>(seconds * w.sample_rate_hz);
  w.samples.assign(n, 0.0f);
  for (int k = 1; k <= 10; ++k)
    for (int i = 0; i < n; ++i)
      w.samples[i] += static_cast<float>(amp / k *
                                         std::sin(2 * std::numbers::pi * k * f0 * i / w.sample_rate_hz));
  return w;
}

inline Waveform Noise(double seconds, double std_dev, std::uint64_t seed) {
  Waveform w;
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> n(0.0f, static_cast<float>(std_dev));
  w.samples.resize(static_cast<size_t>(seconds * w.sample_rate_hz));
  for (auto& s : w.samples) s = n(rng);
  return w;
}

struct ExhaustivePath {
  double cost = std::numeric_limits<double>::infinity();
  int length = 0;
};

// Minimum summed Euclidean cost over every monotone, continuous path with
// steps (1,0), (0,1), (1,1), by exhaustive recursion.
inline ExhaustivePath ExhaustiveDtwPath(const MatrixD& a, const MatrixD& b) {
  const int na = static_cast<int>(a.rows()), nb = static_cast<int>(b.rows());
  ExhaustivePath best;
  std::function<void(int, int, double, int)> walk = [&](int i, int j, double acc, int len) {
    acc += (a.row(i) - b.row(j)).norm();
    ++len;
    if (i == na - 1 && j == nb - 1) {
      if (acc < best.cost) best = {acc, len};
      return;
    }
    if (i + 1 < na) walk(i + 1, j, acc, len);
    if (j + 1 < nb) walk(i, j + 1, acc, len);
    if (i + 1 < na && j + 1 < nb) walk(i + 1, j + 1, acc, len);
  };
  walk(0, 0, 0.0, 0);
  return best;
}

inline double ExhaustiveDtw(const MatrixD& a, const MatrixD& b) {
  return ExhaustiveDtwPath(a, b).cost;
}

// Scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("ainn_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

// Toy corpus (2 speakers, 6/2/2 per cell) synthesized once per process.
inline const std::filesystem::path& SharedToyCorpus() {
  static TempDir dir("toy");
  static const std::filesystem::path root = [] {
    SynthToyCorpus(dir / "c", ToyCorpusConfig{}, 5);
    return dir / "c";
  }();
  return root;
}

inline const MelCorpus& SharedMelCorpus() {
  static const MelCorpus corpus = LoadMelCorpus(SharedToyCorpus());
  return corpus;
}

// Narrow networks for fast tests.
inline ModelConfig TinyModel() {
  ModelConfig c;
  c.d_content = 16;
  c.d_emotion = 16;
  c.content_channels = 24;
  c.content_layers = 2;
  c.emotion_channels = 16;
  c.emotion_layers = 6;
  c.generator_channels = 24;
  c.generator_layers = 2;
  c.generator_lstm = 24;
  return c;
}

}  // namespace ainn::testing

#endif  // AINN_TESTS_TEST_HELPERS_HPP_
