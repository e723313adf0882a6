// src/config.cpp

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

#include "ainn/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace ainn {
namespace {

std::string Trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void BadValue(const std::string& key, const std::string& value) {
  Fail(ErrorKind::kConfig, "invalid value for " + key + ": '" + value + "'");
}

template <class T>
T ParseNumber(const std::string& key, const std::string& v) {
  T out{};
  if constexpr (std::is_floating_point_v<T>) {
    try {
      size_t used = 0;
      double d = std::stod(v, &used);
      if (used != v.size()) BadValue(key, v);
      out = static_cast<T>(d);
    } catch (const std::logic_error&) {
      BadValue(key, v);
    }
  } else {
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) BadValue(key, v);
  }
  return out;
}

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Field {
  std::string key;
  std::function<void(TrainConfig&, const std::string&)> set;
  std::function<std::string(const TrainConfig&)> get;
};

template <class T>
Field Num(const std::string& key, T TrainConfig::*member) {
  return {key,
          [key, member](TrainConfig& c, const std::string& v) { c.*member = ParseNumber<T>(key, v); },
          [member](const TrainConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return FormatDouble(c.*member);
            else return std::to_string(c.*member);
          }};
}

template <class T, class Sub>
Field SubNum(const std::string& key, Sub TrainConfig::*outer, T Sub::*member) {
  return {key,
          [key, outer, member](TrainConfig& c, const std::string& v) {
            (c.*outer).*member = ParseNumber<T>(key, v);
          },
          [outer, member](const TrainConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return FormatDouble((c.*outer).*member);
            else return std::to_string((c.*outer).*member);
          }};
}

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = [] {
    using C = TrainConfig;
    std::vector<Field> f;
    f.push_back(Num("train.stage", &C::stage));
    f.push_back(Num("train.lr", &C::lr));
    f.push_back(Num("train.batch_size", &C::batch_size));
    f.push_back(Num("train.iterations", &C::iterations));
    f.push_back(Num("desk.batch_size", &C::desk_batch_size));
    f.push_back(Num("desk.iterations", &C::desk_iterations));
    f.push_back(Num("optim.beta1", &C::beta1));
    f.push_back(Num("optim.beta2", &C::beta2));
    f.push_back(Num("optim.eps", &C::adam_eps));
    f.push_back(Num("train.seed", &C::seed));
    f.push_back(Num("train.grad_clip", &C::grad_clip));
    f.push_back(SubNum("loss.lambda_dis", &C::stage1_weights, &losses::StageIWeights::lambda_dis));
    f.push_back(SubNum("loss.lambda_str", &C::stage1_weights, &losses::StageIWeights::lambda_str));
    f.push_back(SubNum("loss.lambda_c", &C::stage2_weights, &losses::StageIIWeights::lambda_c));
    f.push_back(SubNum("loss.delta1", &C::margins, &losses::StrengthMargins::delta1));
    f.push_back(SubNum("loss.delta2", &C::margins, &losses::StrengthMargins::delta2));
    f.push_back({"loss.strength_form",
                 [](C& c, const std::string& v) {
                   if (v == "printed") c.strength_form = losses::StrengthLossForm::kPrinted;
                   else if (v == "hinge") c.strength_form = losses::StrengthLossForm::kHinge;
                   else BadValue("loss.strength_form", v);
                 },
                 [](const C& c) {
                   return std::string(c.strength_form == losses::StrengthLossForm::kPrinted
                                          ? "printed"
                                          : "hinge");
                 }});
    f.push_back(Num("data.t_fixed", &C::t_fixed));
    f.push_back({"data.corpus_root", [](C& c, const std::string& v) { c.corpus_root = v; },
                 [](const C& c) { return c.corpus_root; }});
    f.push_back(SubNum("data.pairs_train", &C::pairs_per_type, &PairCounts::train));
    f.push_back(SubNum("data.pairs_val", &C::pairs_per_type, &PairCounts::val));
    f.push_back(SubNum("data.pairs_test", &C::pairs_per_type, &PairCounts::test));
    f.push_back(Num("data.pair_seed", &C::pair_seed));
    f.push_back(Num("log.every", &C::log_every));
    f.push_back(Num("log.checkpoint_every", &C::checkpoint_every));
    f.push_back(Num("log.heldout_every", &C::heldout_every));
    f.push_back(Num("log.heldout_pairs", &C::heldout_pairs));
    f.push_back(SubNum("model.n_mels", &C::model, &ModelConfig::n_mels));
    f.push_back(SubNum("model.d_content", &C::model, &ModelConfig::d_content));
    f.push_back(SubNum("model.d_emotion", &C::model, &ModelConfig::d_emotion));
    f.push_back(SubNum("model.num_emotions", &C::model, &ModelConfig::num_emotions));
    f.push_back(SubNum("model.content_downsample", &C::model, &ModelConfig::content_downsample));
    f.push_back(SubNum("model.kernel_size", &C::model, &ModelConfig::kernel_size));
    f.push_back(SubNum("model.content_channels", &C::model, &ModelConfig::content_channels));
    f.push_back(SubNum("model.content_layers", &C::model, &ModelConfig::content_layers));
    f.push_back(SubNum("model.emotion_channels", &C::model, &ModelConfig::emotion_channels));
    f.push_back(SubNum("model.emotion_layers", &C::model, &ModelConfig::emotion_layers));
    f.push_back(SubNum("model.generator_channels", &C::model, &ModelConfig::generator_channels));
    f.push_back(SubNum("model.generator_layers", &C::model, &ModelConfig::generator_layers));
    f.push_back(SubNum("model.generator_lstm", &C::model, &ModelConfig::generator_lstm));
    f.push_back(SubNum("model.mel_shift", &C::model, &ModelConfig::mel_shift));
    f.push_back(SubNum("model.mel_scale", &C::model, &ModelConfig::mel_scale));
    f.push_back(SubNum("model.parameter_count_target", &C::model,
                       &ModelConfig::parameter_count_target));
    return f;
  }();
  return fields;
}

}  // namespace

void TrainConfig::Validate() const {
  Require(stage == 1 || stage == 2, ErrorKind::kConfig, "train.stage must be 1 or 2");
  Require(lr > 0.0, ErrorKind::kConfig, "train.lr must be positive");
  Require(EffectiveBatchSize() >= 2, ErrorKind::kConfig, "batch size must be at least 2");
  Require(EffectiveIterations() >= 1, ErrorKind::kConfig, "iterations must be positive");
  Require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && adam_eps > 0.0,
          ErrorKind::kConfig, "invalid optimizer settings");
  Require(stage1_weights.lambda_dis >= 0 && stage1_weights.lambda_str >= 0 &&
              stage2_weights.lambda_c >= 0,
          ErrorKind::kConfig, "loss weights must be non-negative");
  Require(margins.delta1 >= 0 && margins.delta1 <= 1 && margins.delta2 >= 0 && margins.delta2 <= 1,
          ErrorKind::kConfig, "strength margins must lie in [0, 1]");
  Require(t_fixed >= 1, ErrorKind::kConfig, "data.t_fixed must be positive");
  Require(log_every >= 1 && checkpoint_every >= 1 && heldout_every >= 1, ErrorKind::kConfig,
          "logging intervals must be positive");
  Require(pairs_per_type.train >= 0 && pairs_per_type.val >= 0 && pairs_per_type.test >= 0,
          ErrorKind::kConfig, "pair counts must be non-negative");
  model.Validate();
}

TrainConfig ParseTrainConfig(const std::string& text) {
  std::map<std::string, const Field*> by_key;
  for (const Field& f : Fields()) by_key[f.key] = &f;

  TrainConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    Require(eq != std::string::npos, ErrorKind::kConfig,
            "line " + std::to_string(lineno) + ": expected 'section.key = value'");
    std::string key = Trim(line.substr(0, eq));
    std::string value = Trim(line.substr(eq + 1));
    auto it = by_key.find(key);
    Require(it != by_key.end(), ErrorKind::kConfig, "unknown config key: " + key);
    Require(seen.insert(key).second, ErrorKind::kConfig, "repeated config key: " + key);
    it->second->set(cfg, value);
  }
  if (!seen.count("train.lr")) cfg.lr = cfg.stage == 2 ? 1e-5 : 1e-4;
  cfg.Validate();
  return cfg;
}

TrainConfig LoadTrainConfig(const std::filesystem::path& path) {
  std::ifstream f(path);
  Require(f.good(), ErrorKind::kConfig, "cannot read config file: " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ParseTrainConfig(ss.str());
}

std::string SerializeTrainConfig(const TrainConfig& cfg) {
  std::string out;
  for (const Field& f : Fields()) out += f.key + " = " + f.get(cfg) + "\n";
  return out;
}

}  // namespace ainn
