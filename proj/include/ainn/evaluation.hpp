// include/ainn/evaluation.hpp

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

#ifndef AINN_EVALUATION_HPP_
#define AINN_EVALUATION_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ainn/cepstrum.hpp"
#include "ainn/checkpoint.hpp"
#include "ainn/corpus.hpp"
#include "ainn/mel.hpp"
#include "ainn/model.hpp"

namespace ainn {

// (10 / ln 10) * sqrt(2).
double McdConstant();

// MCD between two cepstral sequences after DTW alignment: the constant times
// the mean over aligned pairs of the Euclidean cepstral distance.
double McdFromCepstra(const MatrixD& a, const MatrixD& b);
double Mcd(const MelSpectrogram& converted, const MelSpectrogram& target);
double Mcd(const Matrix& converted, const Matrix& target);

// Independent emotion classifier used as the ACC_cls judge: the emotion
// encoder architecture (own weights, "judge." names) followed by a linear
// softmax on the temporal mean.
struct JudgeConfig {
  int iterations = 400;
  int batch_size = 16;
  int t_fixed = 64;
  double lr = 1e-3;
  std::uint64_t seed = 7919;
  ModelConfig model;
};

class JudgeClassifier {
 public:
  JudgeClassifier() = default;
  JudgeClassifier(const ModelConfig& cfg, std::uint64_t seed);

  Vector Probabilities(const Matrix& mel) const;
  int Predict(const Matrix& mel) const { return ArgMax(Probabilities(mel)); }
  const ModelConfig& config() const { return cfg_; }

  nn::ParamList Params();
  Checkpoint ToCheckpoint() const;
  static JudgeClassifier FromCheckpoint(const Checkpoint& ckpt);

  // One cross-entropy update over a labeled batch; returns the mean loss.
  double TrainStep(const std::vector<std::pair<Matrix, Emotion>>& batch, nn::Adam& opt);

 private:
  ModelConfig cfg_;
  EmotionEncoder encoder_;
  RecognitionNet head_;
};

// Trains on the train split with random crops.
JudgeClassifier TrainJudge(const MelCorpus& corpus, const JudgeConfig& cfg);
// Accuracy on full utterances of one split.
double JudgeAccuracy(const JudgeClassifier& judge, const MelCorpus& corpus, Split split);

// Fraction of mels whose judge argmax equals the target emotion.
double AccCls(const JudgeClassifier& judge, const std::vector<Matrix>& converted,
              const std::vector<Emotion>& targets);

// Emotion encoder + recognition taken from a Stage I checkpoint. The Stage II
// model is never consulted.
class StrengthAssessor {
 public:
  explicit StrengthAssessor(const Checkpoint& stage1);
  float Strength(const Matrix& mel) const;

 private:
  AinnModel model_;
};

double RmseStr(const std::vector<double>& s_converted, const std::vector<double>& s_reference);

// Multinomial logistic regression on standardized features, full-batch
// gradient descent from zero weights.
class LinearProbe {
 public:
  void Fit(const MatrixD& x, const std::vector<int>& labels, int num_classes,
           int iterations = 500, double lr = 0.5, double l2 = 1e-3);
  int Predict(const VectorD& x) const;
  double Accuracy(const MatrixD& x, const std::vector<int>& labels) const;

 private:
  VectorD mean_, inv_std_;
  MatrixD w_;  // classes x (dims + 1)
};

struct ProbeResult {
  double content = 0.0;
  double emotion = 0.0;
};

// Probes fit on the train split, scored on the test split.
ProbeResult ProbeDisentanglement(const MelCorpus& corpus, const AinnModel& model);

struct PreferenceResult {
  int correct = 0;
  int total = 0;
  double accuracy = 0.0;
  double p_value = 1.0;  // one-sided binomial, chance 0.5
};

// P(X >= k) for X ~ Binomial(n, 0.5).
double BinomialUpperTail(int k, int n);

// Same-speaker, same-emotion utterance pairs of one split with different
// known intensities; a pair counts as correct when the stronger one gets the
// higher strength. Equal intensities are excluded.
PreferenceResult StrengthPreference(const MelCorpus& corpus,
                                    const std::map<std::string, double>& intensities,
                                    const StrengthAssessor& assessor, Split split);

enum class McdMode { kParallel, kSelf };
std::string McdModeName(McdMode m);
McdMode ParseMcdMode(const std::string& s);

struct EvalReport {
  double mcd = 0.0;
  double acc_cls = 0.0;
  double rmse_str = 0.0;
  double probe_acc_content = 0.0;
  double probe_acc_emotion = 0.0;
  double strength_preference_acc = 0.0;
  long n_pairs = 0;
};

struct PairScore {
  std::string pair_id;
  double mcd = 0.0;
  int predicted_class = 0;
  double s_z = 0.0;
  double s_y = 0.0;
};

struct EvalOptions {
  McdMode mcd_mode = McdMode::kParallel;
  std::optional<std::filesystem::path> out_dir;  // report.txt + pairs.tsv
  int workers = 0;                                // 0 = NumWorkers()
};

struct EvalOutput {
  EvalReport report;
  std::vector<PairScore> pairs;
  PreferenceResult preference;
};

EvalOutput EvaluateAll(const MelCorpus& corpus, const std::vector<PairSample>& pairs,
                       const AinnModel& model, const StrengthAssessor& assessor,
                       const JudgeClassifier& judge, const std::map<std::string, double>& intensities,
                       const EvalOptions& opts);

std::string FormatReport(const EvalReport& r);
EvalReport ParseReport(const std::string& text);

}  // namespace ainn

#endif  // AINN_EVALUATION_HPP_
