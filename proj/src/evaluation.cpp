// src/evaluation.cpp

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

#include "ainn/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "ainn/config.hpp"
#include "ainn/losses.hpp"
#include "ainn/training.hpp"

namespace ainn {

double McdConstant() { return 10.0 / std::log(10.0) * std::sqrt(2.0); }

namespace {

// Lexicographic order on (shape, values) so that the DTW input order, and
// with it every tie-break, does not depend on argument order.
bool CanonicalLess(const MatrixD& a, const MatrixD& b) {
  if (a.rows() != b.rows()) return a.rows() < b.rows();
  if (a.cols() != b.cols()) return a.cols() < b.cols();
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

double McdFromCepstra(const MatrixD& a, const MatrixD& b) {
  Require(a.rows() > 0 && b.rows() > 0, ErrorKind::kInvalidArgument, "mcd: empty input");
  Require(a.cols() == b.cols(), ErrorKind::kMismatch, "mcd: cepstral orders differ");
  const bool swap = CanonicalLess(b, a);
  const MatrixD& p = swap ? b : a;
  const MatrixD& q = swap ? a : b;
  DtwAlignment al = DtwAlign(p, q);
  double sum = 0.0;
  for (auto [i, j] : al.path) sum += (p.row(i) - q.row(j)).norm();
  return McdConstant() * sum / static_cast<double>(al.path.size());
}

double Mcd(const MelSpectrogram& converted, const MelSpectrogram& target) {
  Require(converted.num_frames() > 0 && target.num_frames() > 0, ErrorKind::kInvalidArgument,
          "mcd: empty spectrogram");
  return McdFromCepstra(MelCepstrum(converted).frames, MelCepstrum(target).frames);
}

double Mcd(const Matrix& converted, const Matrix& target) {
  MelSpectrogram a{converted, {}}, b{target, {}};
  return Mcd(a, b);
}

// ---------------------------------------------------------------------------
// Judge

JudgeClassifier::JudgeClassifier(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg.Validate();
  Rng rng(seed);
  encoder_ = EmotionEncoder("judge.emotion", cfg, rng);
  head_ = RecognitionNet("judge", cfg, rng);
}

Vector JudgeClassifier::Probabilities(const Matrix& mel) const {
  return head_.Forward(encoder_.Forward(mel, nullptr), nullptr).class_probs;
}

nn::ParamList JudgeClassifier::Params() {
  nn::ParamList p;
  encoder_.Collect(p);
  head_.CollectClassifier(p);
  return p;
}

double JudgeClassifier::TrainStep(const std::vector<std::pair<Matrix, Emotion>>& batch,
                                  nn::Adam& opt) {
  nn::ParamList params = Params();
  nn::ZeroGrads(params);
  const float inv_b = 1.0f / static_cast<float>(batch.size());
  double loss = 0.0;
  for (const auto& [mel, label] : batch) {
    EmotionEncoder::Trace et;
    RecognitionNet::Trace rt;
    Matrix e = encoder_.Forward(mel, &et);
    RecognitionOutput out = head_.Forward(e, &rt);
    Vector p = Vector::Zero(cfg_.num_emotions);
    p(EmotionIndex(label)) = 1.0f;
    Vector dq;
    loss += losses::LossCls<float>(out.class_probs, p, &dq);
    encoder_.Backward(et, head_.Backward(rt, dq * inv_b, 0.0f));
  }
  nn::ClipGradNorm(params, 1.0);
  opt.Step(params);
  return loss / static_cast<double>(batch.size());
}

Checkpoint JudgeClassifier::ToCheckpoint() const {
  TrainConfig tc;
  tc.model = cfg_;
  Checkpoint ck;
  ck.config_text = SerializeTrainConfig(tc);
  nn::ParamList p = const_cast<JudgeClassifier*>(this)->Params();
  for (const nn::Param* q : p) ck.arrays[q->name] = q->value;
  return ck;
}

JudgeClassifier JudgeClassifier::FromCheckpoint(const Checkpoint& ckpt) {
  Require(ckpt.Has("judge.cls.weight"), ErrorKind::kMismatch,
          "checkpoint does not contain a judge classifier");
  JudgeClassifier j(CheckpointConfig(ckpt).model, 0);
  for (nn::Param* p : j.Params()) {
    Require(ckpt.Has(p->name), ErrorKind::kMismatch, "judge checkpoint lacks " + p->name);
    const Matrix& m = ckpt.Get(p->name);
    Require(m.rows() == p->value.rows() && m.cols() == p->value.cols(), ErrorKind::kMismatch,
            "judge checkpoint shape mismatch for " + p->name);
    p->value = m;
  }
  return j;
}

JudgeClassifier TrainJudge(const MelCorpus& corpus, const JudgeConfig& cfg) {
  JudgeClassifier judge(cfg.model, cfg.seed);
  nn::Adam opt({cfg.lr, 0.9, 0.999, 1e-8});
  Rng rng(cfg.seed ^ 0x5bd1e995ULL);
  const std::vector<size_t> ids = corpus.index.InSplit(Split::kTrain);
  Require(!ids.empty(), ErrorKind::kInfeasible, "judge: no training utterances");
  std::uniform_int_distribution<size_t> pick(0, ids.size() - 1);
  for (int it = 0; it < cfg.iterations; ++it) {
    std::vector<std::pair<Matrix, Emotion>> batch;
    for (int b = 0; b < cfg.batch_size; ++b) {
      size_t u = ids[pick(rng)];
      batch.emplace_back(FixedCrop(corpus.mels[u].frames, cfg.t_fixed, rng),
                         corpus.index.utterances[u].emotion);
    }
    judge.TrainStep(batch, opt);
  }
  return judge;
}

double JudgeAccuracy(const JudgeClassifier& judge, const MelCorpus& corpus, Split split) {
  const std::vector<size_t> ids = corpus.index.InSplit(split);
  Require(!ids.empty(), ErrorKind::kInfeasible, "judge accuracy: empty split");
  int correct = 0;
  for (size_t u : ids)
    correct += judge.Predict(corpus.mels[u].frames) == EmotionIndex(corpus.index.utterances[u].emotion);
  return static_cast<double>(correct) / static_cast<double>(ids.size());
}

double AccCls(const JudgeClassifier& judge, const std::vector<Matrix>& converted,
              const std::vector<Emotion>& targets) {
  Require(converted.size() == targets.size(), ErrorKind::kMismatch,
          "acc_cls: converted and target counts differ");
  Require(!converted.empty(), ErrorKind::kInvalidArgument, "acc_cls: empty set");
  for (Emotion e : targets)
    Require(EmotionIndex(e) < judge.config().num_emotions, ErrorKind::kMismatch,
            "acc_cls: label outside the judge's classes");
  int correct = 0;
  for (size_t i = 0; i < converted.size(); ++i)
    correct += judge.Predict(converted[i]) == EmotionIndex(targets[i]);
  return static_cast<double>(correct) / static_cast<double>(converted.size());
}

// ---------------------------------------------------------------------------
// Strength

StrengthAssessor::StrengthAssessor(const Checkpoint& stage1) {
  Require(stage1.Has("model.recognition.strength.weight") &&
              stage1.Has("model.recognition.strength.bias"),
          ErrorKind::kMismatch, "checkpoint has no strength head");
  model_ = LoadModel(stage1);
}

float StrengthAssessor::Strength(const Matrix& mel) const {
  return model_.Recognize(model_.EncodeEmotion(mel)).strength;
}

double RmseStr(const std::vector<double>& s_converted, const std::vector<double>& s_reference) {
  Require(s_converted.size() == s_reference.size(), ErrorKind::kMismatch,
          "rmse_str: set sizes differ");
  Require(!s_converted.empty(), ErrorKind::kInvalidArgument, "rmse_str: empty set");
  double sum = 0.0;
  for (size_t i = 0; i < s_converted.size(); ++i) {
    const double d = s_converted[i] - s_reference[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(s_converted.size()));
}

double BinomialUpperTail(int k, int n) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  double sum = 0.0;
  for (int i = k; i <= n; ++i)
    sum += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) -
                    n * std::log(2.0));
  return std::min(1.0, sum);
}

PreferenceResult StrengthPreference(const MelCorpus& corpus,
                                    const std::map<std::string, double>& intensities,
                                    const StrengthAssessor& assessor, Split split) {
  const CorpusIndex& index = corpus.index;
  PreferenceResult r;
  std::map<size_t, float> cache;
  auto strength = [&](size_t u) {
    auto it = cache.find(u);
    if (it != cache.end()) return it->second;
    return cache[u] = assessor.Strength(corpus.mels[u].frames);
  };
  for (const std::string& spk : index.speakers) {
    for (Emotion e : kAllEmotions) {
      if (e == Emotion::kNeutral) continue;
      const std::vector<size_t> cell = index.Cell(spk, e, split);
      for (size_t a = 0; a < cell.size(); ++a) {
        for (size_t b = a + 1; b < cell.size(); ++b) {
          auto ia = intensities.find(index.utterances[cell[a]].id);
          auto ib = intensities.find(index.utterances[cell[b]].id);
          if (ia == intensities.end() || ib == intensities.end()) continue;
          if (ia->second == ib->second) continue;
          const size_t hi = ia->second > ib->second ? cell[a] : cell[b];
          const size_t lo = hi == cell[a] ? cell[b] : cell[a];
          ++r.total;
          r.correct += strength(hi) > strength(lo);
        }
      }
    }
  }
  if (r.total > 0) r.accuracy = static_cast<double>(r.correct) / r.total;
  r.p_value = BinomialUpperTail(r.correct, r.total);
  return r;
}

// ---------------------------------------------------------------------------
// Probe

void LinearProbe::Fit(const MatrixD& x, const std::vector<int>& labels, int num_classes,
                      int iterations, double lr, double l2) {
  Require(x.rows() == static_cast<Eigen::Index>(labels.size()) && x.rows() > 0,
          ErrorKind::kInvalidArgument, "probe: feature/label count mismatch");
  const Eigen::Index n = x.rows(), d = x.cols();
  mean_ = x.colwise().mean().transpose();
  inv_std_.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double var = (x.col(j).array() - mean_(j)).square().mean();
    inv_std_(j) = var > 1e-12 ? 1.0 / std::sqrt(var) : 0.0;
  }
  MatrixD z(n, d + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    z.row(i).head(d) = ((x.row(i).transpose() - mean_).array() * inv_std_.array()).matrix().transpose();
    z(i, d) = 1.0;
  }
  MatrixD y = MatrixD::Zero(n, num_classes);
  for (Eigen::Index i = 0; i < n; ++i) y(i, labels[i]) = 1.0;
  w_ = MatrixD::Zero(num_classes, d + 1);
  for (int it = 0; it < iterations; ++it) {
    MatrixD logits = z * w_.transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mx = logits.row(i).maxCoeff();
      logits.row(i) = (logits.row(i).array() - mx).exp();
      logits.row(i) /= logits.row(i).sum();
    }
    MatrixD grad = (logits - y).transpose() * z / static_cast<double>(n);
    grad.leftCols(d) += l2 * w_.leftCols(d);
    w_ -= lr * grad;
  }
}

int LinearProbe::Predict(const VectorD& x) const {
  const Eigen::Index d = mean_.size();
  VectorD z(d + 1);
  z.head(d) = ((x - mean_).array() * inv_std_.array()).matrix();
  z(d) = 1.0;
  VectorD scores = w_ * z;
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < scores.size(); ++k)
    if (scores(k) > scores(best)) best = k;
  return static_cast<int>(best);
}

double LinearProbe::Accuracy(const MatrixD& x, const std::vector<int>& labels) const {
  Require(x.rows() == static_cast<Eigen::Index>(labels.size()) && x.rows() > 0,
          ErrorKind::kInvalidArgument, "probe: feature/label count mismatch");
  int correct = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) correct += Predict(x.row(i).transpose()) == labels[i];
  return static_cast<double>(correct) / static_cast<double>(x.rows());
}

ProbeResult ProbeDisentanglement(const MelCorpus& corpus, const AinnModel& model) {
  const ModelConfig& mc = model.config();
  auto features = [&](Split split, MatrixD* content, MatrixD* emotion, std::vector<int>* labels) {
    const std::vector<size_t> ids = corpus.index.InSplit(split);
    Require(!ids.empty(), ErrorKind::kInfeasible,
            "probe: empty " + std::string(SplitName(split)) + " split");
    content->resize(static_cast<Eigen::Index>(ids.size()), mc.d_content);
    emotion->resize(static_cast<Eigen::Index>(ids.size()), mc.d_emotion);
    labels->clear();
    for (size_t i = 0; i < ids.size(); ++i) {
      const Matrix& mel = corpus.mels[ids[i]].frames;
      content->row(i) = model.EncodeContent(mel).frames.colwise().mean().cast<double>();
      emotion->row(i) = model.EncodeEmotion(mel).frames.colwise().mean().cast<double>();
      labels->push_back(EmotionIndex(corpus.index.utterances[ids[i]].emotion));
    }
  };
  MatrixD c_train, e_train, c_test, e_test;
  std::vector<int> y_train, y_test;
  features(Split::kTrain, &c_train, &e_train, &y_train);
  features(Split::kTest, &c_test, &e_test, &y_test);
  LinearProbe pc, pe;
  pc.Fit(c_train, y_train, mc.num_emotions);
  pe.Fit(e_train, y_train, mc.num_emotions);
  return {pc.Accuracy(c_test, y_test), pe.Accuracy(e_test, y_test)};
}

// ---------------------------------------------------------------------------
// Report

std::string McdModeName(McdMode m) { return m == McdMode::kParallel ? "parallel" : "self"; }

McdMode ParseMcdMode(const std::string& s) {
  if (s == "parallel") return McdMode::kParallel;
  if (s == "self") return McdMode::kSelf;
  Fail(ErrorKind::kInvalidArgument, "unknown mcd mode: " + s + " (expected parallel or self)");
}

std::string FormatReport(const EvalReport& r) {
  std::ostringstream out;
  out.precision(10);
  out << "mcd = " << r.mcd << "\n"
      << "acc_cls = " << r.acc_cls << "\n"
      << "rmse_str = " << r.rmse_str << "\n"
      << "probe_acc_content = " << r.probe_acc_content << "\n"
      << "probe_acc_emotion = " << r.probe_acc_emotion << "\n"
      << "strength_preference_acc = " << r.strength_preference_acc << "\n"
      << "n_pairs = " << r.n_pairs << "\n";
  return out.str();
}

EvalReport ParseReport(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto eq = line.find(" = ");
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  auto get = [&](const char* k) {
    Require(kv.count(k), ErrorKind::kIo, std::string("report lacks ") + k);
    return std::stod(kv[k]);
  };
  EvalReport r;
  r.mcd = get("mcd");
  r.acc_cls = get("acc_cls");
  r.rmse_str = get("rmse_str");
  r.probe_acc_content = get("probe_acc_content");
  r.probe_acc_emotion = get("probe_acc_emotion");
  r.strength_preference_acc = get("strength_preference_acc");
  r.n_pairs = static_cast<long>(get("n_pairs"));
  return r;
}

EvalOutput EvaluateAll(const MelCorpus& corpus, const std::vector<PairSample>& pairs,
                       const AinnModel& model, const StrengthAssessor& assessor,
                       const JudgeClassifier& judge,
                       const std::map<std::string, double>& intensities,
                       const EvalOptions& opts) {
  Require(!pairs.empty(), ErrorKind::kInvalidArgument, "evaluate: empty pair list");
  Require(judge.config().num_emotions == model.config().num_emotions, ErrorKind::kMismatch,
          "evaluate: judge and model disagree on the number of classes");
  const CorpusIndex& index = corpus.index;
  if (opts.mcd_mode == McdMode::kParallel) {
    for (const PairSample& p : pairs)
      Require(ParallelUtterance(index, p.source, p.reference.emotion).has_value(),
              ErrorKind::kInfeasible,
              "evaluate: no parallel target for " + p.source.id + "; use the self mcd mode");
  }

  EvalOutput out;
  out.pairs.resize(pairs.size());
  std::vector<Matrix> converted(pairs.size());
  auto score = [&](size_t i) {
    const PairSample& p = pairs[i];
    const Matrix& x = corpus.MelOf(p.source);
    const Matrix& y = corpus.MelOf(p.reference);
    Matrix z = model.Convert(x, y, p.reference.emotion);
    PairScore& s = out.pairs[i];
    s.pair_id = p.source.id + "->" + p.reference.id;
    if (opts.mcd_mode == McdMode::kParallel) {
      const size_t t = *ParallelUtterance(index, p.source, p.reference.emotion);
      s.mcd = Mcd(z, corpus.mels[t].frames);
    } else {
      s.mcd = Mcd(model.Reconstruct(x, p.source.emotion), x);
    }
    s.predicted_class = judge.Predict(z);
    s.s_z = assessor.Strength(z);
    s.s_y = assessor.Strength(y);
    converted[i] = std::move(z);
  };

  const int workers = std::max(1, std::min<int>(opts.workers > 0 ? opts.workers : NumWorkers(),
                                                static_cast<int>(pairs.size())));
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  auto run = [&](int w) {
    try {
      for (size_t i = next++; i < pairs.size(); i = next++) score(i);
    } catch (...) {
      errors[w] = std::current_exception();
      next = pairs.size();
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  // Reduce in pair order.
  std::vector<Emotion> targets;
  std::vector<double> sz, sy;
  double mcd_sum = 0.0;
  for (size_t i = 0; i < pairs.size(); ++i) {
    mcd_sum += out.pairs[i].mcd;
    targets.push_back(pairs[i].reference.emotion);
    sz.push_back(out.pairs[i].s_z);
    sy.push_back(out.pairs[i].s_y);
  }
  EvalReport& r = out.report;
  r.n_pairs = static_cast<long>(pairs.size());
  r.mcd = mcd_sum / static_cast<double>(pairs.size());
  r.acc_cls = AccCls(judge, converted, targets);
  r.rmse_str = RmseStr(sz, sy);
  ProbeResult probe = ProbeDisentanglement(corpus, model);
  r.probe_acc_content = probe.content;
  r.probe_acc_emotion = probe.emotion;
  out.preference = StrengthPreference(corpus, intensities, assessor, Split::kTest);
  r.strength_preference_acc = out.preference.accuracy;

  if (opts.out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(*opts.out_dir, ec);
    std::ofstream rep(*opts.out_dir / "report.txt", std::ios::trunc);
    Require(rep.good(), ErrorKind::kIo, "cannot write " + (*opts.out_dir / "report.txt").string());
    rep << FormatReport(r);
    std::ofstream det(*opts.out_dir / "pairs.tsv", std::ios::trunc);
    Require(det.good(), ErrorKind::kIo, "cannot write " + (*opts.out_dir / "pairs.tsv").string());
    det.precision(10);
    det << "pair_id\tmcd\tpredicted_class\ts_z\ts_y\n";
    for (const PairScore& s : out.pairs)
      det << s.pair_id << '\t' << s.mcd << '\t' << EmotionName(static_cast<Emotion>(s.predicted_class))
          << '\t' << s.s_z << '\t' << s.s_y << '\n';
  }
  return out;
}

}  // namespace ainn
