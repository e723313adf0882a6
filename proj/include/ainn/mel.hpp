// include/ainn/mel.hpp

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

#ifndef AINN_MEL_HPP_
#define AINN_MEL_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "ainn/common.hpp"
#include "ainn/wav.hpp"

namespace ainn {

// Analysis settings shared by every mel computed in the project. The defaults
// match common 16 kHz neural-vocoder front ends so that an external vocoder
// can consume the mel dumps directly.
struct MelConfig {
  int n_mels = 80;
  int fft_size = 1024;
  int hop_size = 256;
  std::string window = "hann";
  double fmin_hz = 0.0;
  double fmax_hz = 8000.0;
  double log_floor = 1e-5;
  int sample_rate_hz = kCorpusSampleRate;

  void Validate() const;
  int num_bins() const { return fft_size / 2 + 1; }
  bool operator==(const MelConfig&) const = default;
};

inline constexpr int kNumMels = 80;

// Natural-log mel energies, frames x n_mels.
struct MelSpectrogram {
  Matrix frames;
  MelConfig config;

  int num_frames() const { return static_cast<int>(frames.rows()); }
};

// Slaney-style mel scale (linear below 1 kHz, logarithmic above).
double HzToMel(double hz);
double MelToHz(double mel);

// n_mels x num_bins triangular filters with area (Slaney) normalization.
MatrixD MelFilterbank(const MelConfig& cfg);

// Frame count for a signal of num_samples: 1 + floor((n - fft) / hop).
int NumFrames(int num_samples, const MelConfig& cfg);

// Periodic analysis window of cfg.fft_size samples.
std::vector<double> AnalysisWindow(const MelConfig& cfg);

// Power spectrogram |STFT|^2, frames x num_bins. No centering/padding.
MatrixD PowerSpectrogram(const Waveform& w, const MelConfig& cfg);

MelSpectrogram ComputeMelSpectrogram(const Waveform& w, const MelConfig& cfg = {});

// Iterative phase reconstruction from the pseudo-inverse mel projection.
// iterations == 0 yields the zero-phase reconstruction. Energy at the log
// floor maps to exact silence.
Waveform InvertMel(const MelSpectrogram& mel, int iterations);

// Mel cache: "AINNMEL1", u32 T, u32 n_mels (little endian), then row-major
// little-endian float32 values.
void WriteMelCache(const std::filesystem::path& path, const MelSpectrogram& mel);
MelSpectrogram ReadMelCache(const std::filesystem::path& path,
                            const MelConfig& cfg = {});

}  // namespace ainn

#endif  // AINN_MEL_HPP_
