// include/ainn/cepstrum.hpp

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

#ifndef AINN_CEPSTRUM_HPP_
#define AINN_CEPSTRUM_HPP_

#include <utility>
#include <vector>

#include "ainn/common.hpp"
#include "ainn/mel.hpp"

namespace ainn {

// frames x order mel-cepstral coefficients c1..c_order (c0 dropped).
struct McepSequence {
  MatrixD frames;
  int num_frames() const { return static_cast<int>(frames.rows()); }
  int order() const { return static_cast<int>(frames.cols()); }
};

// Orthonormal DCT-II of each log-mel frame, keeping coefficients 1..order.
McepSequence MelCepstrum(const MelSpectrogram& mel, int order = 13);

struct DtwAlignment {
  std::vector<std::pair<int, int>> path;  // (index in a, index in b)
  double cost = 0.0;                      // summed Euclidean frame distance
};

// Monotone, continuous alignment with steps (1,0), (0,1), (1,1). Ties are
// broken toward the diagonal step, then toward advancing a.
DtwAlignment DtwAlign(const MatrixD& a, const MatrixD& b);

inline DtwAlignment DtwAlign(const McepSequence& a, const McepSequence& b) {
  return DtwAlign(a.frames, b.frames);
}

}  // namespace ainn

#endif  // AINN_CEPSTRUM_HPP_
