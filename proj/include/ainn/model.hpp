// include/ainn/model.hpp

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

#ifndef AINN_MODEL_HPP_
#define AINN_MODEL_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ainn/common.hpp"
#include "ainn/corpus.hpp"
#include "ainn/nn.hpp"

namespace ainn {

// Network widths. The defaults are the desk-scale preset (~1 M parameters);
// larger presets are plain config files.
struct ModelConfig {
  int n_mels = 80;
  int d_content = 64;
  int d_emotion = 64;
  int num_emotions = kNumEmotions;
  int content_downsample = 1;
  int kernel_size = 5;
  int content_channels = 128;
  int content_layers = 3;
  int emotion_channels = 64;
  int emotion_layers = 6;
  int generator_channels = 128;
  int generator_layers = 3;
  int generator_lstm = 128;
  // Networks see (mel - mel_shift) / mel_scale; the generator inverts it.
  float mel_shift = -4.0f;
  float mel_scale = 4.0f;
  double parameter_count_target = 0.0;  // informational only

  void Validate() const;
  bool operator==(const ModelConfig&) const = default;
};

struct ContentFeature {
  Matrix frames;          // T_c x d_content
  int source_frames = 0;  // frame count of the mel it was computed from
};

struct EmotionFeature {
  Matrix frames;  // T x d_emotion, frame-aligned with the input mel
  int num_frames() const { return static_cast<int>(frames.rows()); }
};

struct EmotionalCue {
  Vector weights;  // length T, entries in [0, 1]
};

struct CalibratedEmotion {
  RowVector vector;  // length d_emotion
};

struct RecognitionOutput {
  Vector class_probs;         // length K, on the simplex
  float strength = 0.0f;      // in [0, 1]
  Matrix classifier_weights;  // K x d_emotion (theta)
};

// M_t = ReLU(theta_class . e_t), then divided by max_t M_t when that max is
// positive; an all-zero response stays all-zero.
EmotionalCue CueFromClassWeights(const Matrix& emotion_frames, const RowVector& theta_class);

// e* = (1/T) sum_t M_t e_t.
CalibratedEmotion Calibrate(const EmotionFeature& e, const EmotionalCue& cue);

// Index of the largest entry; ties go to the lowest index.
int ArgMax(const Vector& v);

// Content encoder: conv stack + bidirectional LSTM, optional frame decimation.
class ContentEncoder {
 public:
  struct Trace {
    Matrix input;                 // normalized mel
    std::vector<Matrix> conv_out; // post-ReLU
    nn::LstmCache fwd, bwd;
    int full_frames = 0;
  };

  ContentEncoder() = default;
  ContentEncoder(const ModelConfig& cfg, Rng& rng);
  Matrix Forward(const Matrix& mel, Trace* trace) const;
  Matrix Backward(const Trace& trace, const Matrix& d_out);  // returns d mel
  void Collect(nn::ParamList& out);

 private:
  ModelConfig cfg_;
  std::vector<nn::Conv1d> convs_;
  nn::Lstm fwd_, bwd_;
};

// Emotion encoder: six conv layers + LSTM at desk scale, no decimation.
class EmotionEncoder {
 public:
  struct Trace {
    Matrix input;
    std::vector<Matrix> conv_out;
    nn::LstmCache lstm;
  };

  EmotionEncoder() = default;
  EmotionEncoder(const std::string& prefix, const ModelConfig& cfg, Rng& rng);
  Matrix Forward(const Matrix& mel, Trace* trace) const;
  Matrix Backward(const Trace& trace, const Matrix& d_out);
  void Collect(nn::ParamList& out);

 private:
  ModelConfig cfg_;
  std::vector<nn::Conv1d> convs_;
  nn::Lstm lstm_;
};

// Two frame-wise (1x1) heads; frame logits are averaged over time before
// the softmax / sigmoid.
class RecognitionNet {
 public:
  struct Trace {
    RowVector pooled;  // temporal mean of e
    int frames = 0;
    Vector q;
    float s = 0.0f;
  };

  RecognitionNet() = default;
  RecognitionNet(const std::string& prefix, const ModelConfig& cfg, Rng& rng);
  RecognitionOutput Forward(const Matrix& e, Trace* trace) const;
  // d_q: gradient w.r.t. class probabilities; d_s: w.r.t. strength.
  Matrix Backward(const Trace& trace, const Vector& d_q, float d_s);
  Matrix ClassifierWeights() const;  // K x d_emotion
  void Collect(nn::ParamList& out);
  void CollectClassifier(nn::ParamList& out) { cls_.Collect(out); }

 private:
  nn::Linear cls_, str_;
};

class Generator {
 public:
  struct Trace {
    Matrix input;  // [content | tiled e*]
    std::vector<Matrix> conv_out;
    nn::LstmCache lstm;
    Matrix lstm_out;
    int content_frames = 0;
  };

  Generator() = default;
  Generator(const ModelConfig& cfg, Rng& rng);
  // content is frame-aligned with the output (already upsampled).
  Matrix Forward(const Matrix& content, const RowVector& e_star, Trace* trace) const;
  void Backward(const Trace& trace, const Matrix& d_mel, Matrix* d_content,
                RowVector* d_e_star);
  void Collect(nn::ParamList& out);

 private:
  ModelConfig cfg_;
  std::vector<nn::Conv1d> convs_;
  nn::Lstm lstm_;
  nn::Linear out_;
};

// Repeats each content frame `factor` times and truncates to `frames`.
Matrix UpsampleContent(const Matrix& c, int factor, int frames);
Matrix UpsampleContentBackward(const Matrix& d_up, int factor, int content_frames);

// The full network: E_c, E_e, R = {R_c, R_s} and G.
class AinnModel {
 public:
  AinnModel() = default;
  AinnModel(const ModelConfig& cfg, std::uint64_t seed);

  const ModelConfig& config() const { return cfg_; }

  ContentFeature EncodeContent(const Matrix& mel) const;
  std::vector<ContentFeature> EncodeContent(std::span<const Matrix> mels) const;
  EmotionFeature EncodeEmotion(const Matrix& mel) const;
  RecognitionOutput Recognize(const EmotionFeature& e) const;
  EmotionalCue Cue(const EmotionFeature& e, int class_index) const;
  Matrix Generate(const ContentFeature& c, const CalibratedEmotion& e_star) const;
  // Ground truth when given, otherwise argmax of the recognized class.
  int ClassForCue(const Matrix& mel, std::optional<Emotion> ground_truth = std::nullopt) const;
  int ClassForCue(const EmotionFeature& e, std::optional<Emotion> ground_truth) const;

  // z = G(E_c(x), E_e(y)*), cue class from class_for_cue(y, reference_label).
  Matrix Convert(const Matrix& source, const Matrix& reference,
                 std::optional<Emotion> reference_label = std::nullopt) const;
  // Stage I path G(E_c(x), E_e(x)*).
  Matrix Reconstruct(const Matrix& mel, std::optional<Emotion> label = std::nullopt) const;

  ContentEncoder& content_encoder() { return content_; }
  EmotionEncoder& emotion_encoder() { return emotion_; }
  RecognitionNet& recognition() { return recognition_; }
  Generator& generator() { return generator_; }
  const ContentEncoder& content_encoder() const { return content_; }
  const EmotionEncoder& emotion_encoder() const { return emotion_; }
  const RecognitionNet& recognition() const { return recognition_; }
  const Generator& generator() const { return generator_; }

  nn::ParamList Params();
  nn::ParamList ContentParams();
  nn::ParamList EmotionParams();
  nn::ParamList RecognitionParams();
  nn::ParamList GeneratorParams();
  size_t ParameterCount();

  // Freezes E_c, E_e and R (Stage II).
  void FreezeEncoders(bool frozen);

  std::map<std::string, Matrix> ExportArrays() const;
  // Every parameter must be present with a matching shape.
  void ImportArrays(const std::map<std::string, Matrix>& arrays);

 private:
  ModelConfig cfg_;
  ContentEncoder content_;
  EmotionEncoder emotion_;
  RecognitionNet recognition_;
  Generator generator_;
};

}  // namespace ainn

#endif  // AINN_MODEL_HPP_
