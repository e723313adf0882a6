// include/ainn/nn.hpp

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

#ifndef AINN_NN_HPP_
#define AINN_NN_HPP_

#include <map>
#include <string>
#include <vector>

#include "ainn/common.hpp"

namespace ainn::nn {

// A named trainable array. Frozen parameters still pass gradients to their
// inputs but never accumulate their own gradient or get updated.
struct Param {
  std::string name;
  Matrix value;
  Matrix grad;
  bool frozen = false;

  void Init(std::string n, int rows, int cols);
  void ZeroGrad() { grad.setZero(); }
  void Accumulate(const Matrix& g) {
    if (!frozen) grad += g;
  }
};

using ParamList = std::vector<Param*>;

// Frame-wise affine map: (T x in) -> (T x out).
class Linear {
 public:
  Linear() = default;
  Linear(const std::string& name, int in, int out, Rng& rng, float gain = 1.0f);

  Matrix Forward(const Matrix& x) const;
  // Accumulates parameter gradients, returns d/dx.
  Matrix Backward(const Matrix& x, const Matrix& dy);
  void Collect(ParamList& out) { out.push_back(&weight_); out.push_back(&bias_); }

  const Param& weight() const { return weight_; }  // in x out
  const Param& bias() const { return bias_; }
  Param& weight() { return weight_; }
  Param& bias() { return bias_; }

 private:
  Param weight_, bias_;
};

// 1-D convolution over time with zero "same" padding and stride 1,
// computed as an im2col product: (T x in) -> (T x out).
class Conv1d {
 public:
  Conv1d() = default;
  Conv1d(const std::string& name, int in, int out, int kernel, Rng& rng);

  Matrix Forward(const Matrix& x) const;
  Matrix Backward(const Matrix& x, const Matrix& dy);
  void Collect(ParamList& out) { out.push_back(&weight_); out.push_back(&bias_); }

 private:
  Matrix Im2Col(const Matrix& x) const;
  int in_ = 0, out_ = 0, kernel_ = 1;
  Param weight_, bias_;  // (kernel * in) x out, 1 x out
};

struct LstmCache {
  Matrix x;      // input in processing order
  Matrix gates;  // T x 4H after activation, order i f g o
  Matrix cell;   // T x H
  Matrix hidden; // T x H, in processing order
};

// Single-layer LSTM; a reversed instance processes the sequence backwards
// and returns outputs in the original frame order.
class Lstm {
 public:
  Lstm() = default;
  Lstm(const std::string& name, int in, int hidden, bool reverse, Rng& rng);

  Matrix Forward(const Matrix& x, LstmCache* cache) const;
  Matrix Backward(const LstmCache& cache, const Matrix& dy);
  void Collect(ParamList& out) {
    out.push_back(&w_input_);
    out.push_back(&w_hidden_);
    out.push_back(&bias_);
  }
  int hidden() const { return hidden_; }

 private:
  int hidden_ = 0;
  bool reverse_ = false;
  Param w_input_, w_hidden_, bias_;  // in x 4H, H x 4H, 1 x 4H
};

inline Matrix Relu(const Matrix& x) { return x.cwiseMax(0.0f); }
// Gradient of ReLU given its output.
inline Matrix ReluBackward(const Matrix& y, const Matrix& dy) {
  return dy.cwiseProduct((y.array() > 0.0f).cast<float>().matrix());
}

Matrix Reverse(const Matrix& x);

struct AdamOptions {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  explicit Adam(AdamOptions opt = {}) : opt_(opt) {}
  // Updates every non-frozen parameter from its grad.
  void Step(const ParamList& params);
  long steps() const { return step_; }
  const AdamOptions& options() const { return opt_; }

  // Moment state keyed by parameter name, for checkpointing.
  std::map<std::string, Matrix>& first_moments() { return m_; }
  std::map<std::string, Matrix>& second_moments() { return v_; }
  void set_steps(long s) { step_ = s; }

 private:
  AdamOptions opt_;
  long step_ = 0;
  std::map<std::string, Matrix> m_, v_;
};

void ZeroGrads(const ParamList& params);
double GlobalGradNorm(const ParamList& params);
// Scales gradients so their global L2 norm is at most max_norm; returns the
// norm before clipping.
double ClipGradNorm(const ParamList& params, double max_norm);

// FNV-1a over names and raw float bytes.
std::uint64_t Checksum(const ParamList& params);

}  // namespace ainn::nn

#endif  // AINN_NN_HPP_
