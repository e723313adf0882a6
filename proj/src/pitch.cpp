// src/pitch.cpp

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

#include "ainn/pitch.hpp"

#include <algorithm>
#include <cmath>

#include "ainn/common.hpp"

namespace ainn {

std::vector<PitchFrame> PitchContour(const Waveform& w, const PitchConfig& cfg) {
  Require(w.sample_rate_hz > 0 && !w.samples.empty(), ErrorKind::kInvalidArgument,
          "invalid waveform");
  Require(cfg.f0_min_hz > 0 && cfg.f0_min_hz < cfg.f0_max_hz, ErrorKind::kConfig,
          "pitch range must satisfy 0 < f0_min < f0_max");
  const int sr = w.sample_rate_hz;
  const int min_lag = std::max(2, static_cast<int>(std::floor(sr / cfg.f0_max_hz)));
  const int max_lag = static_cast<int>(std::ceil(sr / cfg.f0_min_hz));
  const int win = cfg.window_size;
  const int span = win + max_lag + 1;
  const int n = static_cast<int>(w.samples.size());

  std::vector<PitchFrame> out;
  if (n < span) return out;
  const int frames = 1 + (n - span) / cfg.hop_size;
  out.reserve(frames);

  std::vector<double> nccf(max_lag + 2, 0.0);
  for (int t = 0; t < frames; ++t) {
    const float* x = w.samples.data() + static_cast<size_t>(t) * cfg.hop_size;
    PitchFrame pf;
    pf.frame_index = t;

    double e0 = 0.0;
    for (int i = 0; i < win; ++i) e0 += double(x[i]) * x[i];
    if (std::sqrt(e0 / win) < cfg.energy_floor) {
      out.push_back(pf);
      continue;
    }
    // Sliding energy of the lagged window.
    double el = 0.0;
    for (int i = 0; i < win; ++i) el += double(x[i + min_lag - 1]) * x[i + min_lag - 1];
    double best = 0.0;
    for (int lag = min_lag - 1; lag <= max_lag + 1; ++lag) {
      if (lag > min_lag - 1) {
        el += double(x[lag + win - 1]) * x[lag + win - 1] -
              double(x[lag - 1]) * x[lag - 1];
      }
      double num = 0.0;
      for (int i = 0; i < win; ++i) num += double(x[i]) * x[i + lag];
      double den = std::sqrt(e0 * std::max(el, 0.0));
      nccf[lag] = den > 0.0 ? num / den : 0.0;
      if (lag >= min_lag && lag <= max_lag) best = std::max(best, nccf[lag]);
    }

    int pick = -1;
    for (int lag = min_lag; lag <= max_lag; ++lag) {
      if (nccf[lag] >= 0.9 * best && nccf[lag] >= nccf[lag - 1] &&
          nccf[lag] >= nccf[lag + 1]) {
        pick = lag;
        break;
      }
    }
    if (pick < 0 || best <= 0.0) {
      out.push_back(pf);
      continue;
    }
    pf.confidence = nccf[pick];
    double a = nccf[pick - 1], b = nccf[pick], c = nccf[pick + 1];
    double denom = a - 2 * b + c;
    double offset = std::abs(denom) > 1e-12 ? 0.5 * (a - c) / denom : 0.0;
    offset = std::clamp(offset, -0.5, 0.5);
    if (pf.confidence >= cfg.voicing_threshold) pf.f0_hz = sr / (pick + offset);
    out.push_back(pf);
  }
  return out;
}

}  // namespace ainn
