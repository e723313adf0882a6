// tests/test_model.cpp

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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ainn/model.hpp"
#include "ainn/nn.hpp"
#include "test_helpers.hpp"

using namespace ainn;
using Catch::Approx;

namespace {

ModelConfig SmallConfig() { return testing::TinyModel(); }

Matrix RandomMel(int frames, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<float> n(-5.0f, 2.0f);
  return Matrix::NullaryExpr(frames, 80, [&] { return n(rng); });
}

// Directional derivative check of scalar f(x) = sum(w .* layer(x)).
template <class Forward>
double DirectionalError(Forward f, const Matrix& x, const Matrix& w, const Matrix& analytic,
                        std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<float> n(0.0f, 1.0f);
  Matrix dir = Matrix::NullaryExpr(x.rows(), x.cols(), [&] { return n(rng); });
  const float h = 1e-2f;
  const double plus = f(x + h * dir).cwiseProduct(w).sum();
  const double minus = f(x - h * dir).cwiseProduct(w).sum();
  const double numeric = (plus - minus) / (2 * h);
  const double exact = analytic.cwiseProduct(dir).sum();
  return std::abs(numeric - exact) / std::max(1e-3, std::abs(exact));
}

}  // namespace

TEST_CASE("layer input gradients match finite differences", "[model]") {
  Rng rng(1);
  std::normal_distribution<float> n(0.0f, 1.0f);
  Matrix x = Matrix::NullaryExpr(9, 6, [&] { return n(rng); });

  nn::Linear lin("l", 6, 4, rng);
  Matrix w4 = Matrix::NullaryExpr(9, 4, [&] { return n(rng); });
  CHECK(DirectionalError([&](const Matrix& v) { return lin.Forward(v); }, x, w4,
                         lin.Backward(x, w4), 2) < 2e-2);

  nn::Conv1d conv("c", 6, 5, 3, rng);
  Matrix w5 = Matrix::NullaryExpr(9, 5, [&] { return n(rng); });
  CHECK(DirectionalError([&](const Matrix& v) { return conv.Forward(v); }, x, w5,
                         conv.Backward(x, w5), 3) < 2e-2);

  for (bool reverse : {false, true}) {
    nn::Lstm lstm("r", 6, 4, reverse, rng);
    nn::LstmCache cache;
    lstm.Forward(x, &cache);
    CHECK(DirectionalError([&](const Matrix& v) { return lstm.Forward(v, nullptr); }, x, w4,
                           lstm.Backward(cache, w4), 4) < 2e-2);
  }
}

TEST_CASE("layer weight gradients match finite differences", "[model]") {
  Rng rng(2);
  std::normal_distribution<float> n(0.0f, 1.0f);
  Matrix x = Matrix::NullaryExpr(7, 5, [&] { return n(rng); });
  nn::Lstm lstm("r", 5, 3, false, rng);
  Matrix w = Matrix::NullaryExpr(7, 3, [&] { return n(rng); });
  nn::ParamList params;
  lstm.Collect(params);
  nn::ZeroGrads(params);
  nn::LstmCache cache;
  lstm.Forward(x, &cache);
  lstm.Backward(cache, w);
  for (nn::Param* p : params) {
    Matrix dir = Matrix::NullaryExpr(p->value.rows(), p->value.cols(), [&] { return n(rng); });
    const Matrix saved = p->value;
    const float h = 1e-2f;
    p->value = saved + h * dir;
    const double plus = lstm.Forward(x, nullptr).cwiseProduct(w).sum();
    p->value = saved - h * dir;
    const double minus = lstm.Forward(x, nullptr).cwiseProduct(w).sum();
    p->value = saved;
    const double exact = p->grad.cwiseProduct(dir).sum();
    CHECK(std::abs((plus - minus) / (2 * h) - exact) / std::max(1e-3, std::abs(exact)) < 2e-2);
  }
}

TEST_CASE("frozen parameters accumulate no gradient", "[model]") {
  Rng rng(3);
  nn::Linear lin("l", 3, 2, rng);
  lin.weight().frozen = true;
  lin.bias().frozen = true;
  nn::ParamList p;
  lin.Collect(p);
  nn::ZeroGrads(p);
  lin.Backward(Matrix::Ones(4, 3), Matrix::Ones(4, 2));
  CHECK(lin.weight().grad.isZero());
  nn::Adam adam;
  const Matrix before = lin.weight().value;
  adam.Step(p);
  CHECK(lin.weight().value == before);
}

TEST_CASE("cue hand example and degenerate case", "[model]") {
  Matrix e(3, 2);
  e << 1, 0, 2, 0, -1, 0;
  RowVector theta(2);
  theta << 1, 0;
  EmotionalCue m = CueFromClassWeights(e, theta);
  CHECK(m.weights(0) == Approx(0.5));
  CHECK(m.weights(1) == Approx(1.0));
  CHECK(m.weights(2) == 0.0f);
  RowVector ortho(2);
  ortho << 0, 1;
  CHECK(CueFromClassWeights(e, ortho).weights.isZero());
}

TEST_CASE("cue normalization contract", "[model][property]") {
  Rng rng(4);
  std::normal_distribution<float> n(0.0f, 1.0f);
  std::uniform_int_distribution<int> len(1, 20);
  for (int i = 0; i < 2000; ++i) {
    Matrix e = Matrix::NullaryExpr(len(rng), 4, [&] { return n(rng); });
    RowVector theta = RowVector::NullaryExpr(4, [&] { return n(rng); });
    Vector w = CueFromClassWeights(e, theta).weights;
    CHECK(w.minCoeff() >= 0.0f);
    CHECK(w.maxCoeff() <= 1.0f);
    CHECK((w.maxCoeff() == 1.0f || w.isZero()));
  }
}

TEST_CASE("calibration examples", "[model]") {
  EmotionFeature e{Matrix(2, 2)};
  e.frames << 1, 0, 0, 2;
  EmotionalCue m{Vector(2)};
  m.weights << 1, 0.5;
  RowVector s = Calibrate(e, m).vector;
  CHECK(s(0) == Approx(0.5));
  CHECK(s(1) == Approx(0.5));
  CHECK(Calibrate(e, EmotionalCue{Vector::Zero(2)}).vector.isZero());
  RowVector mean = Calibrate(e, EmotionalCue{Vector::Ones(2)}).vector;
  CHECK(mean(0) == Approx(0.5));
  CHECK(mean(1) == Approx(1.0));
  CHECK_THROWS_AS(Calibrate(e, EmotionalCue{Vector::Ones(3)}), Error);
}

TEST_CASE("calibration is linear in e", "[model][property]") {
  Rng rng(5);
  std::normal_distribution<float> n(0.0f, 1.0f);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (int i = 0; i < 500; ++i) {
    const int t = 1 + i % 12;
    Matrix e1 = Matrix::NullaryExpr(t, 6, [&] { return n(rng); });
    Matrix e2 = Matrix::NullaryExpr(t, 6, [&] { return n(rng); });
    EmotionalCue m{Vector::NullaryExpr(t, [&] { return u(rng); })};
    const float a = n(rng), b = n(rng);
    RowVector lhs = Calibrate({a * e1 + b * e2}, m).vector;
    RowVector rhs = a * Calibrate({e1}, m).vector + b * Calibrate({e2}, m).vector;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-5f);
  }
}

TEST_CASE("argmax tie-break", "[model]") {
  Vector v(4);
  v << 0.3f, 0.3f, 0.1f, 0.3f;
  CHECK(ArgMax(v) == 0);
  v << 0.1f, 0.4f, 0.4f, 0.1f;
  CHECK(ArgMax(v) == 1);
}

TEST_CASE("network shapes and determinism", "[model]") {
  ModelConfig cfg = SmallConfig();
  AinnModel model(cfg, 11);
  Matrix x = RandomMel(128, 1), y = RandomMel(77, 2);
  ContentFeature c = model.EncodeContent(x);
  CHECK(c.frames.rows() == 128);
  CHECK(c.frames.cols() == cfg.d_content);
  EmotionFeature e = model.EncodeEmotion(x);
  CHECK(e.frames.rows() == 128);
  CHECK(e.frames.cols() == cfg.d_emotion);
  CHECK(model.EncodeContent(x).frames == c.frames);
  CHECK(model.EncodeEmotion(x).frames == e.frames);

  std::vector<Matrix> batch{x, x};
  auto both = model.EncodeContent(std::span<const Matrix>(batch));
  CHECK(both[0].frames == c.frames);
  CHECK(both[1].frames == c.frames);

  Matrix z = model.Convert(x, y);
  CHECK(z.rows() == 128);
  CHECK(z.cols() == 80);
  CHECK(z.allFinite());
  CHECK(model.Convert(y, x).rows() == 77);
  CHECK(model.Convert(x, y) == z);

  // A different e* changes the output.
  CalibratedEmotion a = Calibrate(e, model.Cue(e, 1));
  CalibratedEmotion b{a.vector * 3.0f + RowVector::Ones(cfg.d_emotion)};
  CHECK(model.Generate(c, a) != model.Generate(c, b));
}

TEST_CASE("content decimation keeps output length", "[model]") {
  ModelConfig cfg = SmallConfig();
  cfg.content_downsample = 4;
  AinnModel model(cfg, 12);
  Matrix x = RandomMel(50, 3);
  ContentFeature c = model.EncodeContent(x);
  CHECK(c.frames.rows() == 13);
  CHECK(model.Convert(x, x).rows() == 50);
  CHECK_THROWS_AS(model.EncodeContent(RandomMel(3, 4)), Error);
}

TEST_CASE("recognition ranges and zero input", "[model]") {
  ModelConfig cfg = SmallConfig();
  AinnModel model(cfg, 13);
  for (int i = 0; i < 20; ++i) {
    RecognitionOutput r = model.Recognize(model.EncodeEmotion(RandomMel(10 + i, 100 + i)));
    CHECK(r.class_probs.sum() == Approx(1.0).margin(1e-6));
    CHECK(r.class_probs.minCoeff() >= 0.0f);
    CHECK(r.strength >= 0.0f);
    CHECK(r.strength <= 1.0f);
    CHECK(r.classifier_weights.rows() == cfg.num_emotions);
    CHECK(r.classifier_weights.cols() == cfg.d_emotion);
  }
  // Zero features with zero-bias heads: uniform q and s = 0.5.
  RecognitionOutput z = model.Recognize(EmotionFeature{Matrix::Zero(5, cfg.d_emotion)});
  for (int k = 0; k < 5; ++k) CHECK(z.class_probs(k) == Approx(0.2).margin(1e-6));
  CHECK(z.strength == Approx(0.5).margin(1e-6));
}

TEST_CASE("class for cue", "[model]") {
  AinnModel model(SmallConfig(), 14);
  Matrix x = RandomMel(20, 5);
  CHECK(model.ClassForCue(x, Emotion::kSad) == EmotionIndex(Emotion::kSad));
  CHECK(model.ClassForCue(x) == ArgMax(model.Recognize(model.EncodeEmotion(x)).class_probs));
}

TEST_CASE("convert(x, x) equals the reconstruction path bitwise", "[model]") {
  AinnModel model(SmallConfig(), 15);
  Matrix x = RandomMel(64, 6);
  CHECK(model.Convert(x, x) == model.Reconstruct(x));
  CHECK(model.Convert(x, x, Emotion::kAngry) == model.Reconstruct(x, Emotion::kAngry));
}

TEST_CASE("forward passes are finite on random mels", "[model][property]") {
  AinnModel model(SmallConfig(), 16);
  Rng rng(7);
  std::uniform_real_distribution<float> lvl(-12.0f, 4.0f);
  for (int i = 0; i < 10; ++i) {
    Matrix x = Matrix::NullaryExpr(8 + 5 * i, 80, [&] { return lvl(rng); });
    CHECK(model.EncodeContent(x).frames.allFinite());
    CHECK(model.Convert(x, x).allFinite());
  }
}

TEST_CASE("parameter export round trip and mismatch", "[model]") {
  ModelConfig cfg = SmallConfig();
  AinnModel a(cfg, 17), b(cfg, 18);
  Matrix x = RandomMel(30, 8);
  CHECK(a.Convert(x, x) != b.Convert(x, x));
  b.ImportArrays(a.ExportArrays());
  CHECK(a.Convert(x, x) == b.Convert(x, x));
  auto arrays = a.ExportArrays();
  arrays.erase(arrays.begin());
  CHECK_THROWS_AS(b.ImportArrays(arrays), Error);
  ModelConfig wide = cfg;
  wide.d_content = wide.d_emotion = 32;
  AinnModel c(wide, 1);
  try {
    c.ImportArrays(a.ExportArrays());
    FAIL("expected a mismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kMismatch);
  }
}

TEST_CASE("default preset size", "[model]") {
  AinnModel model(ModelConfig{}, 1);
  const size_t n = model.ParameterCount();
  CHECK(n >= 500'000);
  CHECK(n <= 2'000'000);
}

TEST_CASE("config validation", "[model]") {
  ModelConfig c;
  c.d_emotion = 32;
  CHECK_THROWS_AS(c.Validate(), Error);
  c = ModelConfig{};
  c.kernel_size = 4;
  CHECK_THROWS_AS(c.Validate(), Error);
}
