// include/ainn/plot.hpp

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

#ifndef AINN_PLOT_HPP_
#define AINN_PLOT_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "ainn/common.hpp"
#include "ainn/pitch.hpp"

namespace ainn {

// Mel-spectrogram heat map with the cue drawn on top as a curve in [0, 1];
// the maximum is marked and labeled. Written as SVG.
void PlotCue(const Matrix& mel, const Vector& cue, double frame_seconds,
             const std::filesystem::path& out);

struct PitchSeries {
  std::string label;
  std::vector<PitchFrame> frames;
};

// Overlaid F0 contours (unvoiced frames break the line) with a legend.
void PlotPitch(const std::vector<PitchSeries>& series, double frame_seconds,
               const std::filesystem::path& out);

}  // namespace ainn

#endif  // AINN_PLOT_HPP_
