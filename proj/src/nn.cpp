// src/nn.cpp

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

#include "ainn/nn.hpp"

#include <cmath>
#include <cstring>

namespace ainn::nn {
namespace {

void UniformFill(Matrix& m, float bound, Rng& rng) {
  std::uniform_real_distribution<float> dist(-bound, bound);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
}

inline float Sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

}  // namespace

void Param::Init(std::string n, int rows, int cols) {
  name = std::move(n);
  value = Matrix::Zero(rows, cols);
  grad = Matrix::Zero(rows, cols);
}

Linear::Linear(const std::string& name, int in, int out, Rng& rng, float gain) {
  weight_.Init(name + ".weight", in, out);
  bias_.Init(name + ".bias", 1, out);
  UniformFill(weight_.value, gain * std::sqrt(6.0f / static_cast<float>(in + out)), rng);
}

Matrix Linear::Forward(const Matrix& x) const {
  Matrix y = x * weight_.value;
  y.rowwise() += bias_.value.row(0);
  return y;
}

Matrix Linear::Backward(const Matrix& x, const Matrix& dy) {
  if (!weight_.frozen) {
    weight_.grad.noalias() += x.transpose() * dy;
    bias_.grad += dy.colwise().sum();
  }
  return dy * weight_.value.transpose();
}

Conv1d::Conv1d(const std::string& name, int in, int out, int kernel, Rng& rng)
    : in_(in), out_(out), kernel_(kernel) {
  weight_.Init(name + ".weight", kernel * in, out);
  bias_.Init(name + ".bias", 1, out);
  UniformFill(weight_.value, std::sqrt(6.0f / static_cast<float>(kernel * in)), rng);
}

Matrix Conv1d::Im2Col(const Matrix& x) const {
  const int t = static_cast<int>(x.rows());
  Matrix cols = Matrix::Zero(t, kernel_ * in_);
  const int half = kernel_ / 2;
  for (int j = 0; j < kernel_; ++j) {
    const int off = j - half;
    const int dst0 = std::max(0, -off);
    const int src0 = std::max(0, off);
    const int len = t - std::abs(off);
    if (len <= 0) continue;
    cols.block(dst0, j * in_, len, in_) = x.middleRows(src0, len);
  }
  return cols;
}

Matrix Conv1d::Forward(const Matrix& x) const {
  Matrix y = Im2Col(x) * weight_.value;
  y.rowwise() += bias_.value.row(0);
  return y;
}

Matrix Conv1d::Backward(const Matrix& x, const Matrix& dy) {
  const int t = static_cast<int>(x.rows());
  if (!weight_.frozen) {
    weight_.grad.noalias() += Im2Col(x).transpose() * dy;
    bias_.grad += dy.colwise().sum();
  }
  Matrix dcols = dy * weight_.value.transpose();
  Matrix dx = Matrix::Zero(t, in_);
  const int half = kernel_ / 2;
  for (int j = 0; j < kernel_; ++j) {
    const int off = j - half;
    const int dst0 = std::max(0, -off);
    const int src0 = std::max(0, off);
    const int len = t - std::abs(off);
    if (len <= 0) continue;
    dx.middleRows(src0, len) += dcols.block(dst0, j * in_, len, in_);
  }
  return dx;
}

Matrix Reverse(const Matrix& x) { return x.colwise().reverse(); }

Lstm::Lstm(const std::string& name, int in, int hidden, bool reverse, Rng& rng)
    : hidden_(hidden), reverse_(reverse) {
  w_input_.Init(name + ".w_input", in, 4 * hidden);
  w_hidden_.Init(name + ".w_hidden", hidden, 4 * hidden);
  bias_.Init(name + ".bias", 1, 4 * hidden);
  const float bound = 1.0f / std::sqrt(static_cast<float>(hidden));
  UniformFill(w_input_.value, bound, rng);
  UniformFill(w_hidden_.value, bound, rng);
  bias_.value.block(0, hidden, 1, hidden).setOnes();  // forget gate
}

Matrix Lstm::Forward(const Matrix& x, LstmCache* cache) const {
  const int t_len = static_cast<int>(x.rows());
  const int h = hidden_;
  Matrix xp = reverse_ ? Reverse(x) : x;
  Matrix z_all = xp * w_input_.value;
  z_all.rowwise() += bias_.value.row(0);

  Matrix gates(t_len, 4 * h), cell(t_len, h), hidden(t_len, h);
  RowVector hp = RowVector::Zero(h), cp = RowVector::Zero(h);
  for (int t = 0; t < t_len; ++t) {
    RowVector z = z_all.row(t) + hp * w_hidden_.value;
    for (int k = 0; k < h; ++k) {
      const float i = Sigmoid(z(k));
      const float f = Sigmoid(z(h + k));
      const float g = std::tanh(z(2 * h + k));
      const float o = Sigmoid(z(3 * h + k));
      const float c = f * cp(k) + i * g;
      gates(t, k) = i;
      gates(t, h + k) = f;
      gates(t, 2 * h + k) = g;
      gates(t, 3 * h + k) = o;
      cell(t, k) = c;
      hidden(t, k) = o * std::tanh(c);
    }
    hp = hidden.row(t);
    cp = cell.row(t);
  }
  Matrix out = reverse_ ? Reverse(hidden) : hidden;
  if (cache) {
    cache->x = std::move(xp);
    cache->gates = std::move(gates);
    cache->cell = std::move(cell);
    cache->hidden = std::move(hidden);
  }
  return out;
}

Matrix Lstm::Backward(const LstmCache& cache, const Matrix& dy) {
  const int t_len = static_cast<int>(cache.x.rows());
  const int h = hidden_;
  Matrix dyp = reverse_ ? Reverse(dy) : dy;
  Matrix dz_all(t_len, 4 * h);
  RowVector dh_next = RowVector::Zero(h), dc_next = RowVector::Zero(h);
  RowVector dz(4 * h);
  for (int t = t_len - 1; t >= 0; --t) {
    for (int k = 0; k < h; ++k) {
      const float i = cache.gates(t, k), f = cache.gates(t, h + k);
      const float g = cache.gates(t, 2 * h + k), o = cache.gates(t, 3 * h + k);
      const float c = cache.cell(t, k);
      const float c_prev = t > 0 ? cache.cell(t - 1, k) : 0.0f;
      const float tc = std::tanh(c);
      const float dh = dyp(t, k) + dh_next(k);
      const float dc = dh * o * (1.0f - tc * tc) + dc_next(k);
      dz(k) = dc * g * i * (1.0f - i);
      dz(h + k) = dc * c_prev * f * (1.0f - f);
      dz(2 * h + k) = dc * i * (1.0f - g * g);
      dz(3 * h + k) = dh * tc * o * (1.0f - o);
      dc_next(k) = dc * f;
    }
    dz_all.row(t) = dz;
    dh_next = dz * w_hidden_.value.transpose();
  }
  if (!w_input_.frozen) {
    Matrix h_prev = Matrix::Zero(t_len, h);
    if (t_len > 1) h_prev.bottomRows(t_len - 1) = cache.hidden.topRows(t_len - 1);
    w_input_.grad.noalias() += cache.x.transpose() * dz_all;
    w_hidden_.grad.noalias() += h_prev.transpose() * dz_all;
    bias_.grad += dz_all.colwise().sum();
  }
  Matrix dx = dz_all * w_input_.value.transpose();
  return reverse_ ? Reverse(dx) : dx;
}

void Adam::Step(const ParamList& params) {
  ++step_;
  const double c1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(step_));
  const float b1 = static_cast<float>(opt_.beta1), b2 = static_cast<float>(opt_.beta2);
  const float step_size = static_cast<float>(opt_.lr / c1);
  const float inv_sqrt_c2 = static_cast<float>(1.0 / std::sqrt(c2));
  const float eps = static_cast<float>(opt_.eps);
  for (Param* p : params) {
    if (p->frozen) continue;
    Matrix& m = m_[p->name];
    Matrix& v = v_[p->name];
    if (m.size() == 0) {
      m = Matrix::Zero(p->value.rows(), p->value.cols());
      v = Matrix::Zero(p->value.rows(), p->value.cols());
    }
    m = b1 * m + (1.0f - b1) * p->grad;
    v = b2 * v + (1.0f - b2) * p->grad.cwiseAbs2();
    p->value.array() -=
        step_size * m.array() / (v.array().sqrt() * inv_sqrt_c2 + eps);
  }
}

void ZeroGrads(const ParamList& params) {
  for (Param* p : params) p->ZeroGrad();
}

double GlobalGradNorm(const ParamList& params) {
  double sq = 0.0;
  for (const Param* p : params)
    if (!p->frozen) sq += p->grad.cast<double>().squaredNorm();
  return std::sqrt(sq);
}

double ClipGradNorm(const ParamList& params, double max_norm) {
  const double norm = GlobalGradNorm(params);
  if (max_norm > 0.0 && norm > max_norm) {
    const float scale = static_cast<float>(max_norm / (norm + 1e-12));
    for (Param* p : params)
      if (!p->frozen) p->grad *= scale;
  }
  return norm;
}

std::uint64_t Checksum(const ParamList& params) {
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&h](const void* data, size_t n) {
    const auto* b = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  for (const Param* p : params) {
    feed(p->name.data(), p->name.size());
    feed(p->value.data(), sizeof(float) * static_cast<size_t>(p->value.size()));
  }
  return h;
}

}  // namespace ainn::nn
