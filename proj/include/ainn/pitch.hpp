// include/ainn/pitch.hpp

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

#ifndef AINN_PITCH_HPP_
#define AINN_PITCH_HPP_

#include <optional>
#include <vector>

#include "ainn/wav.hpp"

namespace ainn {

struct PitchConfig {
  int window_size = 512;     // correlation window, samples
  int hop_size = 256;        // matches the mel hop
  double f0_min_hz = 60.0;
  double f0_max_hz = 500.0;
  double voicing_threshold = 0.6;  // minimum normalized correlation
  double energy_floor = 1e-4;      // RMS below this is unvoiced
};

struct PitchFrame {
  int frame_index = 0;
  std::optional<double> f0_hz;  // empty when unvoiced
  double confidence = 0.0;      // normalized cross-correlation at the pick
};

// Normalized cross-correlation pitch tracker. Frame t analyses samples
// starting at t * hop_size; the smallest-lag local maximum within 90% of the
// best correlation is chosen and refined by parabolic interpolation.
std::vector<PitchFrame> PitchContour(const Waveform& w, const PitchConfig& cfg = {});

}  // namespace ainn

#endif  // AINN_PITCH_HPP_
