// include/ainn/training.hpp

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

#ifndef AINN_TRAINING_HPP_
#define AINN_TRAINING_HPP_

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ainn/checkpoint.hpp"
#include "ainn/config.hpp"
#include "ainn/corpus.hpp"
#include "ainn/model.hpp"
#include "ainn/nn.hpp"

namespace ainn {

struct LabeledMel {
  Matrix mel;
  Emotion label = Emotion::kNeutral;
};

struct TripletMels {
  Matrix anchor, positive, negative;
};

struct PairMels {
  Matrix source, reference;
  Emotion source_label = Emotion::kNeutral;
  Emotion reference_label = Emotion::kNeutral;
};

// Named loss terms in a fixed order plus the weighted total.
struct LossBreakdown {
  std::vector<std::pair<std::string, double>> terms;
  double total = 0.0;
  double Term(const std::string& name) const;
};

struct TrainState {
  long iteration = 0;
  AinnModel model;
  nn::Adam optimizer;
  Rng rng;
  std::map<std::string, double> running_sums;  // since the last log line
  long running_count = 0;
};

// Fresh state: model initialized from cfg.seed, optimizer from cfg.
TrainState MakeTrainState(const TrainConfig& cfg);

// One Stage I update on all parameters:
//   L_rec + L_cls + lambda_dis L_dis + lambda_str L_str
// The cue uses the ground-truth class and is treated as a constant weight.
LossBreakdown Stage1Step(TrainState& state, const TrainConfig& cfg,
                         std::span<const LabeledMel> batch,
                         std::span<const TripletMels> triplets);

// One Stage II update of the generator only:
//   L_rec (self path) + lambda_c (L_cc + L_ecc + L_esc) on z = convert(x, y)
// Throws if any encoder or recognition parameter changes.
LossBreakdown Stage2Step(TrainState& state, const TrainConfig& cfg,
                         std::span<const PairMels> pairs);

// Mean KL(q_y || q_z) over pairs, with z converted by the current model.
double HeldoutEmotionConsistency(const AinnModel& model, std::span<const PairMels> pairs);

// Checksum of E_c, E_e and R parameters.
std::uint64_t FrozenChecksum(AinnModel& model);

Checkpoint MakeCheckpoint(const TrainConfig& cfg, TrainState& state);
// Restores model, optimizer, rng and running averages.
TrainState RestoreTrainState(const Checkpoint& ckpt, const TrainConfig& cfg);
// Config embedded in a checkpoint (training state lines stripped).
TrainConfig CheckpointConfig(const Checkpoint& ckpt);
// Model with weights from a checkpoint.
AinnModel LoadModel(const Checkpoint& ckpt);

struct LogRecord {
  long iteration = 0;
  std::vector<std::pair<std::string, double>> values;
  double wall_seconds = 0.0;
};

struct TrainOptions {
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> resume;     // mid-run checkpoint
  std::optional<std::filesystem::path> init_from;  // Stage I checkpoint (stage 2)
  bool overwrite = false;
  long stop_after = -1;  // stop (and checkpoint) after this iteration; -1 = run to end
  std::function<void(const LogRecord&)> on_log;
};

struct TrainResult {
  std::filesystem::path final_checkpoint;
  std::filesystem::path metrics_log;
  std::vector<LogRecord> log;
  std::vector<LossBreakdown> steps;  // per-iteration breakdowns of this process
  std::vector<std::uint64_t> frozen_checksums;  // stage 2: after every step
  std::uint64_t frozen_checksum_initial = 0;
  double wall_seconds = 0.0;
};

TrainResult Train(const TrainConfig& cfg, const MelCorpus& corpus, const TrainOptions& opts);

// Fixed held-out pair set used for Stage II consistency tracking.
std::vector<PairMels> HeldoutPairs(const TrainConfig& cfg, const MelCorpus& corpus);

// Formats one metrics line: iteration, name/value pairs, wall seconds.
std::string FormatLogRecord(const LogRecord& r);

}  // namespace ainn

#endif  // AINN_TRAINING_HPP_
