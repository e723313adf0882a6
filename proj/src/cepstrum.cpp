// src/cepstrum.cpp

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

#include "ainn/cepstrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ainn {

McepSequence MelCepstrum(const MelSpectrogram& mel, int order) {
  const int n = static_cast<int>(mel.frames.cols());
  Require(order >= 1 && order < n, ErrorKind::kInvalidArgument,
          "cepstral order must lie in [1, " + std::to_string(n) + ")");
  Require(mel.num_frames() >= 1, ErrorKind::kInvalidArgument, "empty mel spectrogram");

  // basis(k, j) = sqrt(2/n) cos(pi k (j + 1/2) / n) for k >= 1.
  MatrixD basis(order, n);
  const double scale = std::sqrt(2.0 / n);
  for (int k = 1; k <= order; ++k)
    for (int j = 0; j < n; ++j)
      basis(k - 1, j) = scale * std::cos(std::numbers::pi * k * (j + 0.5) / n);

  McepSequence out;
  out.frames = mel.frames.cast<double>() * basis.transpose();
  return out;
}

DtwAlignment DtwAlign(const MatrixD& a, const MatrixD& b) {
  const int na = static_cast<int>(a.rows()), nb = static_cast<int>(b.rows());
  Require(na > 0 && nb > 0, ErrorKind::kInvalidArgument, "DTW input is empty");
  Require(a.cols() == b.cols(), ErrorKind::kInvalidArgument,
          "DTW inputs have different dimensionality");

  const double inf = std::numeric_limits<double>::infinity();
  MatrixD acc = MatrixD::Constant(na, nb, inf);
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) {
      double d = (a.row(i) - b.row(j)).norm();
      if (i == 0 && j == 0) {
        acc(i, j) = d;
        continue;
      }
      double best = inf;
      if (i > 0 && j > 0) best = acc(i - 1, j - 1);
      if (i > 0) best = std::min(best, acc(i - 1, j));
      if (j > 0) best = std::min(best, acc(i, j - 1));
      acc(i, j) = best + d;
    }
  }

  DtwAlignment out;
  out.cost = acc(na - 1, nb - 1);
  int i = na - 1, j = nb - 1;
  out.path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      double diag = acc(i - 1, j - 1), up = acc(i - 1, j), left = acc(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    } else if (i > 0) {
      --i;
    } else {
      --j;
    }
    out.path.emplace_back(i, j);
  }
  std::reverse(out.path.begin(), out.path.end());
  return out;
}

}  // namespace ainn
