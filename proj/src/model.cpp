// src/model.cpp

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

#include "ainn/model.hpp"

#include <algorithm>
#include <cmath>

namespace ainn {
namespace {

Matrix Normalize(const Matrix& mel, const ModelConfig& cfg) {
  return (mel.array() - cfg.mel_shift).matrix() / cfg.mel_scale;
}

std::string Idx(const std::string& prefix, int i) { return prefix + std::to_string(i); }

}  // namespace

void ModelConfig::Validate() const {
  Require(n_mels == 80, ErrorKind::kConfig, "model.n_mels must be 80");
  Require(num_emotions == kNumEmotions, ErrorKind::kConfig,
          "model.num_emotions must equal the number of emotion labels (5)");
  Require(d_content > 0 && d_emotion > 0 && d_content % 2 == 0, ErrorKind::kConfig,
          "feature widths must be positive and d_content even");
  Require(d_content == d_emotion, ErrorKind::kConfig,
          "frame similarity needs d_content == d_emotion");
  Require(content_downsample >= 1, ErrorKind::kConfig, "content_downsample must be >= 1");
  Require(kernel_size >= 1 && kernel_size % 2 == 1, ErrorKind::kConfig,
          "kernel_size must be odd");
  Require(content_layers >= 1 && emotion_layers >= 1 && generator_layers >= 1,
          ErrorKind::kConfig, "each network needs at least one conv layer");
  Require(content_channels > 0 && emotion_channels > 0 && generator_channels > 0 &&
              generator_lstm > 0,
          ErrorKind::kConfig, "layer widths must be positive");
  Require(mel_scale > 0.0f, ErrorKind::kConfig, "mel_scale must be positive");
}

EmotionalCue CueFromClassWeights(const Matrix& e, const RowVector& theta) {
  Require(e.cols() == theta.size(), ErrorKind::kInvalidArgument,
          "cue: classifier weight width differs from emotion feature width");
  EmotionalCue cue;
  cue.weights = (e * theta.transpose()).cwiseMax(0.0f);
  const float peak = cue.weights.size() ? cue.weights.maxCoeff() : 0.0f;
  if (peak > 0.0f) cue.weights /= peak;
  // Guard against rounding above 1.
  cue.weights = cue.weights.cwiseMin(1.0f);
  return cue;
}

CalibratedEmotion Calibrate(const EmotionFeature& e, const EmotionalCue& cue) {
  Require(cue.weights.size() == e.frames.rows(), ErrorKind::kInvalidArgument,
          "calibrate: cue length differs from frame count");
  Require(e.frames.rows() > 0, ErrorKind::kInvalidArgument, "calibrate: empty feature");
  CalibratedEmotion out;
  out.vector = (cue.weights.transpose() * e.frames) / static_cast<float>(e.frames.rows());
  return out;
}

int ArgMax(const Vector& v) {
  int best = 0;
  for (int k = 1; k < v.size(); ++k)
    if (v(k) > v(best)) best = k;
  return best;
}

Matrix UpsampleContent(const Matrix& c, int factor, int frames) {
  if (factor == 1 && c.rows() == frames) return c;
  Matrix out(frames, c.cols());
  for (int t = 0; t < frames; ++t)
    out.row(t) = c.row(std::min<int>(t / factor, static_cast<int>(c.rows()) - 1));
  return out;
}

Matrix UpsampleContentBackward(const Matrix& d_up, int factor, int content_frames) {
  if (factor == 1 && d_up.rows() == content_frames) return d_up;
  Matrix d = Matrix::Zero(content_frames, d_up.cols());
  for (int t = 0; t < d_up.rows(); ++t)
    d.row(std::min(t / factor, content_frames - 1)) += d_up.row(t);
  return d;
}

// ---------------------------------------------------------------------------

ContentEncoder::ContentEncoder(const ModelConfig& cfg, Rng& rng) : cfg_(cfg) {
  int in = cfg.n_mels;
  for (int i = 0; i < cfg.content_layers; ++i) {
    convs_.emplace_back(Idx("content.conv", i), in, cfg.content_channels, cfg.kernel_size, rng);
    in = cfg.content_channels;
  }
  fwd_ = nn::Lstm("content.lstm_fwd", in, cfg.d_content / 2, false, rng);
  bwd_ = nn::Lstm("content.lstm_bwd", in, cfg.d_content / 2, true, rng);
}

Matrix ContentEncoder::Forward(const Matrix& mel, Trace* trace) const {
  Require(mel.rows() >= cfg_.content_downsample, ErrorKind::kInvalidArgument,
          "content encoder: input shorter than the downsampling factor");
  Require(mel.cols() == cfg_.n_mels, ErrorKind::kMismatch,
          "content encoder: expected 80 mel bins");
  Matrix h = Normalize(mel, cfg_);
  if (trace) {
    trace->input = h;
    trace->conv_out.clear();
    trace->full_frames = static_cast<int>(mel.rows());
  }
  for (const auto& conv : convs_) {
    h = nn::Relu(conv.Forward(h));
    if (trace) trace->conv_out.push_back(h);
  }
  Matrix out(h.rows(), cfg_.d_content);
  out.leftCols(cfg_.d_content / 2) = fwd_.Forward(h, trace ? &trace->fwd : nullptr);
  out.rightCols(cfg_.d_content / 2) = bwd_.Forward(h, trace ? &trace->bwd : nullptr);
  if (cfg_.content_downsample == 1) return out;
  const int s = cfg_.content_downsample;
  const int tc = (static_cast<int>(out.rows()) + s - 1) / s;
  Matrix down(tc, out.cols());
  for (int t = 0; t < tc; ++t) down.row(t) = out.row(t * s);
  return down;
}

Matrix ContentEncoder::Backward(const Trace& trace, const Matrix& d_out) {
  const int half = cfg_.d_content / 2;
  Matrix d_full;
  if (cfg_.content_downsample == 1) {
    d_full = d_out;
  } else {
    d_full = Matrix::Zero(trace.full_frames, cfg_.d_content);
    for (int t = 0; t < d_out.rows(); ++t) d_full.row(t * cfg_.content_downsample) = d_out.row(t);
  }
  Matrix dh = fwd_.Backward(trace.fwd, d_full.leftCols(half));
  dh += bwd_.Backward(trace.bwd, d_full.rightCols(half));
  for (int i = static_cast<int>(convs_.size()) - 1; i >= 0; --i) {
    dh = nn::ReluBackward(trace.conv_out[i], dh);
    const Matrix& x = i == 0 ? trace.input : trace.conv_out[i - 1];
    dh = convs_[i].Backward(x, dh);
  }
  return dh / cfg_.mel_scale;
}

void ContentEncoder::Collect(nn::ParamList& out) {
  for (auto& c : convs_) c.Collect(out);
  fwd_.Collect(out);
  bwd_.Collect(out);
}

// ---------------------------------------------------------------------------

EmotionEncoder::EmotionEncoder(const std::string& prefix, const ModelConfig& cfg, Rng& rng)
    : cfg_(cfg) {
  int in = cfg.n_mels;
  for (int i = 0; i < cfg.emotion_layers; ++i) {
    convs_.emplace_back(Idx(prefix + ".conv", i), in, cfg.emotion_channels, cfg.kernel_size, rng);
    in = cfg.emotion_channels;
  }
  lstm_ = nn::Lstm(prefix + ".lstm", in, cfg.d_emotion, false, rng);
}

Matrix EmotionEncoder::Forward(const Matrix& mel, Trace* trace) const {
  Require(mel.rows() >= 1, ErrorKind::kInvalidArgument, "emotion encoder: empty input");
  Require(mel.cols() == cfg_.n_mels, ErrorKind::kMismatch,
          "emotion encoder: expected 80 mel bins");
  Matrix h = Normalize(mel, cfg_);
  if (trace) {
    trace->input = h;
    trace->conv_out.clear();
  }
  for (const auto& conv : convs_) {
    h = nn::Relu(conv.Forward(h));
    if (trace) trace->conv_out.push_back(h);
  }
  return lstm_.Forward(h, trace ? &trace->lstm : nullptr);
}

Matrix EmotionEncoder::Backward(const Trace& trace, const Matrix& d_out) {
  Matrix dh = lstm_.Backward(trace.lstm, d_out);
  for (int i = static_cast<int>(convs_.size()) - 1; i >= 0; --i) {
    dh = nn::ReluBackward(trace.conv_out[i], dh);
    const Matrix& x = i == 0 ? trace.input : trace.conv_out[i - 1];
    dh = convs_[i].Backward(x, dh);
  }
  return dh / cfg_.mel_scale;
}

void EmotionEncoder::Collect(nn::ParamList& out) {
  for (auto& c : convs_) c.Collect(out);
  lstm_.Collect(out);
}

// ---------------------------------------------------------------------------

RecognitionNet::RecognitionNet(const std::string& prefix, const ModelConfig& cfg, Rng& rng)
    : cls_(prefix + ".cls", cfg.d_emotion, cfg.num_emotions, rng),
      str_(prefix + ".strength", cfg.d_emotion, 1, rng) {}

RecognitionOutput RecognitionNet::Forward(const Matrix& e, Trace* trace) const {
  Require(e.rows() >= 1, ErrorKind::kInvalidArgument, "recognize: empty feature");
  // Frame logits are affine in e, so their temporal mean is the head applied
  // to the mean feature.
  Matrix pooled = e.colwise().mean();
  RowVector logits = cls_.Forward(pooled).row(0);
  const float s_logit = str_.Forward(pooled)(0, 0);

  RecognitionOutput out;
  const float mx = logits.maxCoeff();
  Vector ex = (logits.array() - mx).exp().matrix().transpose();
  out.class_probs = ex / ex.sum();
  out.strength = 1.0f / (1.0f + std::exp(-s_logit));
  out.classifier_weights = ClassifierWeights();
  if (trace) {
    trace->pooled = pooled.row(0);
    trace->frames = static_cast<int>(e.rows());
    trace->q = out.class_probs;
    trace->s = out.strength;
  }
  return out;
}

Matrix RecognitionNet::Backward(const Trace& trace, const Vector& d_q, float d_s) {
  const Vector& q = trace.q;
  Vector d_logit = q.cwiseProduct(d_q - Vector::Constant(q.size(), d_q.dot(q)));
  Matrix pooled = trace.pooled;
  Matrix d_pooled = cls_.Backward(pooled, d_logit.transpose());
  Matrix d_s_logit(1, 1);
  d_s_logit(0, 0) = d_s * trace.s * (1.0f - trace.s);
  d_pooled += str_.Backward(pooled, d_s_logit);
  Matrix d_e(trace.frames, pooled.cols());
  d_e.rowwise() = d_pooled.row(0) / static_cast<float>(trace.frames);
  return d_e;
}

Matrix RecognitionNet::ClassifierWeights() const { return cls_.weight().value.transpose(); }

void RecognitionNet::Collect(nn::ParamList& out) {
  cls_.Collect(out);
  str_.Collect(out);
}

// ---------------------------------------------------------------------------

Generator::Generator(const ModelConfig& cfg, Rng& rng) : cfg_(cfg) {
  int in = cfg.d_content + cfg.d_emotion;
  for (int i = 0; i < cfg.generator_layers; ++i) {
    convs_.emplace_back(Idx("generator.conv", i), in, cfg.generator_channels, cfg.kernel_size, rng);
    in = cfg.generator_channels;
  }
  lstm_ = nn::Lstm("generator.lstm", in, cfg.generator_lstm, false, rng);
  out_ = nn::Linear("generator.out", cfg.generator_lstm, cfg.n_mels, rng, 0.5f);
}

Matrix Generator::Forward(const Matrix& content, const RowVector& e_star, Trace* trace) const {
  Require(content.cols() == cfg_.d_content && e_star.size() == cfg_.d_emotion,
          ErrorKind::kMismatch, "generator: feature widths do not match the model config");
  Require(content.rows() >= 1, ErrorKind::kInvalidArgument, "generator: empty content");
  Matrix h(content.rows(), cfg_.d_content + cfg_.d_emotion);
  h.leftCols(cfg_.d_content) = content;
  h.rightCols(cfg_.d_emotion).rowwise() = e_star;
  if (trace) {
    trace->input = h;
    trace->conv_out.clear();
    trace->content_frames = static_cast<int>(content.rows());
  }
  for (const auto& conv : convs_) {
    h = nn::Relu(conv.Forward(h));
    if (trace) trace->conv_out.push_back(h);
  }
  Matrix l = lstm_.Forward(h, trace ? &trace->lstm : nullptr);
  Matrix y = out_.Forward(l);
  if (trace) trace->lstm_out = std::move(l);
  return (y * cfg_.mel_scale).array() + cfg_.mel_shift;
}

void Generator::Backward(const Trace& trace, const Matrix& d_mel, Matrix* d_content,
                         RowVector* d_e_star) {
  Matrix dh = out_.Backward(trace.lstm_out, d_mel * cfg_.mel_scale);
  dh = lstm_.Backward(trace.lstm, dh);
  for (int i = static_cast<int>(convs_.size()) - 1; i >= 0; --i) {
    dh = nn::ReluBackward(trace.conv_out[i], dh);
    const Matrix& x = i == 0 ? trace.input : trace.conv_out[i - 1];
    dh = convs_[i].Backward(x, dh);
  }
  if (d_content) *d_content = dh.leftCols(cfg_.d_content);
  if (d_e_star) *d_e_star = dh.rightCols(cfg_.d_emotion).colwise().sum();
}

void Generator::Collect(nn::ParamList& out) {
  for (auto& c : convs_) c.Collect(out);
  lstm_.Collect(out);
  out_.Collect(out);
}

// ---------------------------------------------------------------------------

AinnModel::AinnModel(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg.Validate();
  Rng rng(seed);
  content_ = ContentEncoder(cfg, rng);
  emotion_ = EmotionEncoder("emotion", cfg, rng);
  recognition_ = RecognitionNet("recognition", cfg, rng);
  generator_ = Generator(cfg, rng);
}

ContentFeature AinnModel::EncodeContent(const Matrix& mel) const {
  return {content_.Forward(mel, nullptr), static_cast<int>(mel.rows())};
}

std::vector<ContentFeature> AinnModel::EncodeContent(std::span<const Matrix> mels) const {
  std::vector<ContentFeature> out;
  out.reserve(mels.size());
  for (const Matrix& m : mels) out.push_back(EncodeContent(m));
  return out;
}

EmotionFeature AinnModel::EncodeEmotion(const Matrix& mel) const {
  return {emotion_.Forward(mel, nullptr)};
}

RecognitionOutput AinnModel::Recognize(const EmotionFeature& e) const {
  return recognition_.Forward(e.frames, nullptr);
}

EmotionalCue AinnModel::Cue(const EmotionFeature& e, int class_index) const {
  Require(class_index >= 0 && class_index < cfg_.num_emotions, ErrorKind::kInvalidArgument,
          "cue: class index out of range");
  return CueFromClassWeights(e.frames, recognition_.ClassifierWeights().row(class_index));
}

Matrix AinnModel::Generate(const ContentFeature& c, const CalibratedEmotion& e_star) const {
  const int frames = c.source_frames > 0 ? c.source_frames
                                         : static_cast<int>(c.frames.rows()) * cfg_.content_downsample;
  return generator_.Forward(UpsampleContent(c.frames, cfg_.content_downsample, frames),
                            e_star.vector, nullptr);
}

int AinnModel::ClassForCue(const EmotionFeature& e, std::optional<Emotion> ground_truth) const {
  if (ground_truth) return EmotionIndex(*ground_truth);
  return ArgMax(Recognize(e).class_probs);
}

int AinnModel::ClassForCue(const Matrix& mel, std::optional<Emotion> ground_truth) const {
  if (ground_truth) return EmotionIndex(*ground_truth);
  return ClassForCue(EncodeEmotion(mel), std::nullopt);
}

Matrix AinnModel::Convert(const Matrix& source, const Matrix& reference,
                          std::optional<Emotion> reference_label) const {
  ContentFeature c = EncodeContent(source);
  EmotionFeature e = EncodeEmotion(reference);
  EmotionalCue cue = Cue(e, ClassForCue(e, reference_label));
  return Generate(c, Calibrate(e, cue));
}

Matrix AinnModel::Reconstruct(const Matrix& mel, std::optional<Emotion> label) const {
  ContentFeature c = EncodeContent(mel);
  EmotionFeature e = EncodeEmotion(mel);
  EmotionalCue cue = Cue(e, ClassForCue(e, label));
  return Generate(c, Calibrate(e, cue));
}

nn::ParamList AinnModel::ContentParams() {
  nn::ParamList p;
  content_.Collect(p);
  return p;
}
nn::ParamList AinnModel::EmotionParams() {
  nn::ParamList p;
  emotion_.Collect(p);
  return p;
}
nn::ParamList AinnModel::RecognitionParams() {
  nn::ParamList p;
  recognition_.Collect(p);
  return p;
}
nn::ParamList AinnModel::GeneratorParams() {
  nn::ParamList p;
  generator_.Collect(p);
  return p;
}

nn::ParamList AinnModel::Params() {
  nn::ParamList p;
  content_.Collect(p);
  emotion_.Collect(p);
  recognition_.Collect(p);
  generator_.Collect(p);
  return p;
}

size_t AinnModel::ParameterCount() {
  size_t n = 0;
  for (const nn::Param* p : Params()) n += static_cast<size_t>(p->value.size());
  return n;
}

void AinnModel::FreezeEncoders(bool frozen) {
  for (nn::Param* p : ContentParams()) p->frozen = frozen;
  for (nn::Param* p : EmotionParams()) p->frozen = frozen;
  for (nn::Param* p : RecognitionParams()) p->frozen = frozen;
}

std::map<std::string, Matrix> AinnModel::ExportArrays() const {
  std::map<std::string, Matrix> out;
  for (const nn::Param* p : const_cast<AinnModel*>(this)->Params()) out[p->name] = p->value;
  return out;
}

void AinnModel::ImportArrays(const std::map<std::string, Matrix>& arrays) {
  for (nn::Param* p : Params()) {
    auto it = arrays.find(p->name);
    Require(it != arrays.end(), ErrorKind::kMismatch,
            "checkpoint is missing parameter " + p->name);
    Require(it->second.rows() == p->value.rows() && it->second.cols() == p->value.cols(),
            ErrorKind::kMismatch, "checkpoint parameter " + p->name + " has the wrong shape");
    p->value = it->second;
  }
}

}  // namespace ainn
