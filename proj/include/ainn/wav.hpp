// include/ainn/wav.hpp

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

#ifndef AINN_WAV_HPP_
#define AINN_WAV_HPP_

#include <filesystem>
#include <vector>

namespace ainn {

inline constexpr int kCorpusSampleRate = 16000;

struct Waveform {
  std::vector<float> samples;  // in [-1, 1]
  int sample_rate_hz = kCorpusSampleRate;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

// Reads a RIFF/PCM 16-bit mono file. A rate different from expected_rate is
// an error (no resampling); pass expected_rate <= 0 to accept any rate.
Waveform LoadWav(const std::filesystem::path& path,
                 int expected_rate = kCorpusSampleRate);

// Writes 16-bit PCM mono; samples are clipped to [-1, 1].
void SaveWav(const std::filesystem::path& path, const Waveform& wave);

}  // namespace ainn

#endif  // AINN_WAV_HPP_
