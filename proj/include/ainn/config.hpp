// include/ainn/config.hpp

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

#ifndef AINN_CONFIG_HPP_
#define AINN_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>

#include "ainn/corpus.hpp"
#include "ainn/losses.hpp"
#include "ainn/model.hpp"

namespace ainn {

// Every training knob. Text form is one "section.key = value" per line;
// '#' starts a comment; unknown or repeated keys are errors; omitted keys keep
// their defaults (lr defaults to 1e-4 for stage 1 and 1e-5 for stage 2).
struct TrainConfig {
  int stage = 1;
  double lr = 1e-4;
  int batch_size = 64;
  int iterations = 50000;
  int desk_batch_size = 0;  // > 0 overrides batch_size
  int desk_iterations = 0;  // > 0 overrides iterations
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  losses::StageIWeights stage1_weights;
  losses::StageIIWeights stage2_weights;
  losses::StrengthMargins margins;
  losses::StrengthLossForm strength_form = losses::StrengthLossForm::kPrinted;
  double grad_clip = 1.0;
  int t_fixed = 128;
  int log_every = 100;
  int checkpoint_every = 5000;
  std::string corpus_root;
  PairCounts pairs_per_type{750, 50, 15};
  std::uint64_t pair_seed = 0;
  int heldout_every = 100;  // stage 2 held-out consistency evaluation
  int heldout_pairs = 40;
  ModelConfig model;

  int EffectiveBatchSize() const { return desk_batch_size > 0 ? desk_batch_size : batch_size; }
  int EffectiveIterations() const { return desk_iterations > 0 ? desk_iterations : iterations; }
  int TripletsPerBatch() const { return std::max(1, EffectiveBatchSize() / 4); }
  void Validate() const;
};

TrainConfig ParseTrainConfig(const std::string& text);
TrainConfig LoadTrainConfig(const std::filesystem::path& path);
// Writes every field; ParseTrainConfig(SerializeTrainConfig(c)) == c.
std::string SerializeTrainConfig(const TrainConfig& cfg);

}  // namespace ainn

#endif  // AINN_CONFIG_HPP_
