// src/training.cpp

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

#include "ainn/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ainn/losses.hpp"

namespace ainn {
namespace fs = std::filesystem;

namespace {

constexpr char kStatePrefix[] = "state.";

Vector OneHot(Emotion e, int k) {
  Vector p = Vector::Zero(k);
  p(EmotionIndex(e)) = 1.0f;
  return p;
}

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void RethrowWithIteration(const Error& e, long iteration) {
  throw Error(e.kind(), std::string(e.what()) + " at iteration " + std::to_string(iteration));
}

void Accumulate(TrainState& state, const LossBreakdown& b) {
  for (const auto& [name, v] : b.terms) state.running_sums[name] += v;
  state.running_sums["total"] += b.total;
  ++state.running_count;
}

struct EmotionPath {
  EmotionEncoder::Trace enc;
  RecognitionNet::Trace rec;
  Matrix e;
  RecognitionOutput out;
};

EmotionPath RunEmotion(AinnModel& model, const Matrix& mel) {
  EmotionPath p;
  p.e = model.emotion_encoder().Forward(mel, &p.enc);
  p.out = model.recognition().Forward(p.e, &p.rec);
  return p;
}

}  // namespace

double LossBreakdown::Term(const std::string& name) const {
  if (name == "total") return total;
  for (const auto& [n, v] : terms)
    if (n == name) return v;
  Fail(ErrorKind::kInvalidArgument, "no loss term named " + name);
}

TrainState MakeTrainState(const TrainConfig& cfg) {
  cfg.Validate();
  TrainState s;
  s.model = AinnModel(cfg.model, cfg.seed);
  s.optimizer = nn::Adam({cfg.lr, cfg.beta1, cfg.beta2, cfg.adam_eps});
  s.rng.seed(cfg.seed * 0x9e3779b97f4a7c15ULL + 17);
  if (cfg.stage == 2) s.model.FreezeEncoders(true);
  return s;
}

std::uint64_t FrozenChecksum(AinnModel& model) {
  nn::ParamList p = model.ContentParams();
  for (nn::Param* q : model.EmotionParams()) p.push_back(q);
  for (nn::Param* q : model.RecognitionParams()) p.push_back(q);
  return nn::Checksum(p);
}

LossBreakdown Stage1Step(TrainState& state, const TrainConfig& cfg,
                         std::span<const LabeledMel> batch,
                         std::span<const TripletMels> triplets) {
  Require(!batch.empty(), ErrorKind::kInvalidArgument, "stage 1 needs a non-empty batch");
  AinnModel& model = state.model;
  const ModelConfig& mc = model.config();
  nn::ParamList params = model.Params();
  nn::ZeroGrads(params);

  const float inv_b = 1.0f / static_cast<float>(batch.size());
  const float lambda_dis = static_cast<float>(cfg.stage1_weights.lambda_dis);
  const Matrix theta = model.recognition().ClassifierWeights();
  double sum_rec = 0, sum_cls = 0, sum_dis = 0, sum_str = 0;

  for (const LabeledMel& sample : batch) {
    const Matrix& x = sample.mel;
    const int frames = static_cast<int>(x.rows());
    Require(x.cols() == mc.n_mels, ErrorKind::kMismatch, "stage 1: batch mel has wrong width");

    ContentEncoder::Trace ct;
    Matrix c = model.content_encoder().Forward(x, &ct);
    Matrix c_up = UpsampleContent(c, mc.content_downsample, frames);
    EmotionPath ep = RunEmotion(model, x);

    Vector d_q;
    sum_cls += losses::LossCls<float>(ep.out.class_probs, OneHot(sample.label, mc.num_emotions), &d_q);

    EmotionalCue cue = CueFromClassWeights(ep.e, theta.row(EmotionIndex(sample.label)));
    Vector sim = losses::FrameSimilarity<float>(ep.e, c_up);
    Vector d_sim;
    sum_dis += losses::LossDis<float>(cue.weights, sim, nullptr, &d_sim);
    Matrix de_dis, dc_dis;
    losses::FrameSimilarityBackward<float>(ep.e, c_up, d_sim, &de_dis, &dc_dis);

    CalibratedEmotion e_star = Calibrate({ep.e}, cue);
    Generator::Trace gt;
    Matrix x_hat = model.generator().Forward(c_up, e_star.vector, &gt);
    Matrix d_xhat;
    sum_rec += losses::LossRec<float>(x_hat, x, &d_xhat);

    Matrix dc_gen;
    RowVector de_star;
    model.generator().Backward(gt, d_xhat * inv_b, &dc_gen, &de_star);

    // e* = (1/T) sum_t M_t e_t with M held constant.
    Matrix de = (cue.weights * de_star) / static_cast<float>(frames);
    de += de_dis * (lambda_dis * inv_b);
    de += model.recognition().Backward(ep.rec, d_q * inv_b, 0.0f);
    model.emotion_encoder().Backward(ep.enc, de);

    Matrix dc_up = dc_gen + dc_dis * (lambda_dis * inv_b);
    model.content_encoder().Backward(
        ct, UpsampleContentBackward(dc_up, mc.content_downsample, static_cast<int>(c.rows())));
  }

  const float str_scale =
      triplets.empty() ? 0.0f
                       : static_cast<float>(cfg.stage1_weights.lambda_str) /
                             static_cast<float>(triplets.size());
  for (const TripletMels& t : triplets) {
    EmotionPath a = RunEmotion(model, t.anchor);
    EmotionPath p = RunEmotion(model, t.positive);
    EmotionPath n = RunEmotion(model, t.negative);
    losses::StrengthGrad g;
    sum_str += losses::LossStr<float>(a.out.strength, p.out.strength, n.out.strength, cfg.margins,
                                      cfg.strength_form, &g);
    const Vector zero_q = Vector::Zero(mc.num_emotions);
    for (auto [path, d] : {std::pair{&a, g.d_x}, std::pair{&p, g.d_pos}, std::pair{&n, g.d_neg}}) {
      if (d == 0.0) continue;
      Matrix de = model.recognition().Backward(path->rec, zero_q, static_cast<float>(d) * str_scale);
      model.emotion_encoder().Backward(path->enc, de);
    }
  }

  losses::StageIParts parts{sum_rec / batch.size(), sum_cls / batch.size(), sum_dis / batch.size(),
                            triplets.empty() ? 0.0 : sum_str / triplets.size()};
  LossBreakdown out;
  out.terms = {{"rec", parts.rec}, {"cls", parts.cls}, {"dis", parts.dis}, {"str", parts.str}};
  try {
    out.total = losses::StageITotal(parts, cfg.stage1_weights);
  } catch (const Error& e) {
    RethrowWithIteration(e, state.iteration + 1);
  }

  nn::ClipGradNorm(params, cfg.grad_clip);
  state.optimizer.Step(params);
  for (const nn::Param* p : params)
    Require(p->value.allFinite(), ErrorKind::kNumeric,
            "non-finite parameter " + p->name + " at iteration " + std::to_string(state.iteration + 1));
  ++state.iteration;
  Accumulate(state, out);
  return out;
}

LossBreakdown Stage2Step(TrainState& state, const TrainConfig& cfg,
                         std::span<const PairMels> pairs) {
  Require(!pairs.empty(), ErrorKind::kInvalidArgument, "stage 2 needs a non-empty batch");
  AinnModel& model = state.model;
  const ModelConfig& mc = model.config();
  model.FreezeEncoders(true);
  const std::uint64_t before = FrozenChecksum(model);

  nn::ParamList params = model.Params();
  nn::ZeroGrads(params);
  const float inv_b = 1.0f / static_cast<float>(pairs.size());
  const float lambda_c = static_cast<float>(cfg.stage2_weights.lambda_c);
  double sum_rec = 0, sum_cc = 0, sum_ecc = 0, sum_esc = 0;

  for (const PairMels& pm : pairs) {
    const Matrix& x = pm.source;
    const int frames = static_cast<int>(x.rows());
    ContentFeature cx = model.EncodeContent(x);
    Matrix cx_up = UpsampleContent(cx.frames, mc.content_downsample, frames);

    // Self-reconstruction keeps the generator stable.
    EmotionFeature ex = model.EncodeEmotion(x);
    CalibratedEmotion ex_star = Calibrate(ex, model.Cue(ex, EmotionIndex(pm.source_label)));
    Generator::Trace g_self;
    Matrix x_hat = model.generator().Forward(cx_up, ex_star.vector, &g_self);
    Matrix d_xhat;
    sum_rec += losses::LossRec<float>(x_hat, x, &d_xhat);
    model.generator().Backward(g_self, d_xhat * inv_b, nullptr, nullptr);

    // Conversion z = G(E_c(x), E_e(y)*).
    EmotionFeature ey = model.EncodeEmotion(pm.reference);
    RecognitionOutput ry = model.Recognize(ey);
    CalibratedEmotion ey_star = Calibrate(ey, model.Cue(ey, EmotionIndex(pm.reference_label)));
    Generator::Trace g_conv;
    Matrix z = model.generator().Forward(cx_up, ey_star.vector, &g_conv);

    ContentEncoder::Trace ct_z;
    Matrix cz = model.content_encoder().Forward(z, &ct_z);
    Matrix d_cz;
    sum_cc += losses::LossCc<float>(cz, cx.frames, &d_cz);
    EmotionPath ez = RunEmotion(model, z);
    Vector d_qz;
    sum_ecc += losses::LossEcc<float>(ry.class_probs, ez.out.class_probs, nullptr, &d_qz);
    float d_sz = 0.0f;
    sum_esc += losses::LossEsc<float>(ez.out.strength, ry.strength, &d_sz);

    const float w = lambda_c * inv_b;
    Matrix dz = model.content_encoder().Backward(ct_z, d_cz * w);
    Matrix de_z = model.recognition().Backward(ez.rec, d_qz * w, d_sz * w);
    dz += model.emotion_encoder().Backward(ez.enc, de_z);
    model.generator().Backward(g_conv, dz, nullptr, nullptr);
  }

  const double n = static_cast<double>(pairs.size());
  losses::StageIIParts parts{sum_rec / n, sum_cc / n, sum_ecc / n, sum_esc / n};
  LossBreakdown out;
  out.terms = {{"rec", parts.rec}, {"cc", parts.cc}, {"ecc", parts.ecc}, {"esc", parts.esc}};
  try {
    out.total = losses::StageIITotal(parts, cfg.stage2_weights);
  } catch (const Error& e) {
    RethrowWithIteration(e, state.iteration + 1);
  }

  nn::ClipGradNorm(params, cfg.grad_clip);
  state.optimizer.Step(params);
  for (const nn::Param* p : params)
    Require(p->value.allFinite(), ErrorKind::kNumeric,
            "non-finite parameter " + p->name + " at iteration " + std::to_string(state.iteration + 1));
  Require(FrozenChecksum(model) == before, ErrorKind::kNumeric,
          "frozen encoder/recognition parameters changed during stage 2");
  ++state.iteration;
  Accumulate(state, out);
  return out;
}

double HeldoutEmotionConsistency(const AinnModel& model, std::span<const PairMels> pairs) {
  Require(!pairs.empty(), ErrorKind::kInvalidArgument, "held-out pair set is empty");
  double sum = 0.0;
  for (const PairMels& pm : pairs) {
    Vector q_y = model.Recognize(model.EncodeEmotion(pm.reference)).class_probs;
    Matrix z = model.Convert(pm.source, pm.reference, pm.reference_label);
    Vector q_z = model.Recognize(model.EncodeEmotion(z)).class_probs;
    sum += losses::LossEcc<float>(q_y, q_z);
  }
  return sum / static_cast<double>(pairs.size());
}

// ---------------------------------------------------------------------------
// Checkpointing

Checkpoint MakeCheckpoint(const TrainConfig& cfg, TrainState& state) {
  Checkpoint ck;
  ck.config_text = SerializeTrainConfig(cfg);
  std::ostringstream st;
  st << kStatePrefix << "iteration = " << state.iteration << "\n";
  st << kStatePrefix << "adam_steps = " << state.optimizer.steps() << "\n";
  st << kStatePrefix << "running_count = " << state.running_count << "\n";
  for (const auto& [k, v] : state.running_sums)
    st << kStatePrefix << "running." << k << " = " << FormatDouble(v) << "\n";
  std::ostringstream rng;
  rng << state.rng;
  st << kStatePrefix << "rng = " << rng.str() << "\n";
  ck.config_text += st.str();

  for (auto& [name, m] : state.model.ExportArrays()) ck.arrays["model." + name] = m;
  for (auto& [name, m] : state.optimizer.first_moments()) ck.arrays["optim.m." + name] = m;
  for (auto& [name, m] : state.optimizer.second_moments()) ck.arrays["optim.v." + name] = m;
  return ck;
}

namespace {

void SplitCheckpointText(const std::string& text, std::string* config,
                         std::map<std::string, std::string>* state) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(kStatePrefix, 0) == 0) {
      auto eq = line.find(" = ");
      if (eq != std::string::npos && state)
        (*state)[line.substr(6, eq - 6)] = line.substr(eq + 3);
    } else if (config) {
      *config += line + "\n";
    }
  }
}

std::map<std::string, Matrix> ModelArrays(const Checkpoint& ckpt) {
  std::map<std::string, Matrix> out;
  for (const auto& [name, m] : ckpt.arrays)
    if (name.rfind("model.", 0) == 0) out[name.substr(6)] = m;
  return out;
}

}  // namespace

TrainConfig CheckpointConfig(const Checkpoint& ckpt) {
  std::string text;
  SplitCheckpointText(ckpt.config_text, &text, nullptr);
  return ParseTrainConfig(text);
}

AinnModel LoadModel(const Checkpoint& ckpt) {
  TrainConfig cfg = CheckpointConfig(ckpt);
  AinnModel model(cfg.model, cfg.seed);
  model.ImportArrays(ModelArrays(ckpt));
  return model;
}

TrainState RestoreTrainState(const Checkpoint& ckpt, const TrainConfig& cfg) {
  std::map<std::string, std::string> st;
  SplitCheckpointText(ckpt.config_text, nullptr, &st);
  Require(st.count("iteration") && st.count("rng"), ErrorKind::kMismatch,
          "checkpoint carries no training state");
  Require(CheckpointConfig(ckpt).model == cfg.model, ErrorKind::kMismatch,
          "checkpoint model config differs from the run config");
  TrainState s = MakeTrainState(cfg);
  s.model.ImportArrays(ModelArrays(ckpt));
  s.iteration = std::stol(st["iteration"]);
  s.optimizer.set_steps(std::stol(st["adam_steps"]));
  s.running_count = std::stol(st["running_count"]);
  for (const auto& [k, v] : st)
    if (k.rfind("running.", 0) == 0) s.running_sums[k.substr(8)] = std::stod(v);
  std::istringstream rng(st["rng"]);
  rng >> s.rng;
  Require(!rng.fail(), ErrorKind::kIo, "corrupt rng state in checkpoint");
  for (const auto& [name, m] : ckpt.arrays) {
    if (name.rfind("optim.m.", 0) == 0) s.optimizer.first_moments()[name.substr(8)] = m;
    if (name.rfind("optim.v.", 0) == 0) s.optimizer.second_moments()[name.substr(8)] = m;
  }
  if (cfg.stage == 2) s.model.FreezeEncoders(true);
  return s;
}

// ---------------------------------------------------------------------------
// Training loop

std::string FormatLogRecord(const LogRecord& r) {
  std::ostringstream out;
  out << r.iteration;
  for (const auto& [name, v] : r.values) out << '\t' << name << '\t' << FormatDouble(v);
  char wall[32];
  std::snprintf(wall, sizeof(wall), "%.3f", r.wall_seconds);
  out << "\twall_s\t" << wall;
  return out.str();
}

std::vector<PairMels> HeldoutPairs(const TrainConfig& cfg, const MelCorpus& corpus) {
  PairCounts counts{0, std::max(1, cfg.pairs_per_type.val), 0};
  PairSets sets = MakeConversionPairs(corpus.index, counts, cfg.pair_seed + 1);
  Rng rng(cfg.pair_seed * 31 + 7);
  std::vector<PairMels> out;
  const size_t n = std::min<size_t>(sets.val.size(), static_cast<size_t>(std::max(1, cfg.heldout_pairs)));
  // Spread the picks over all conversion types.
  for (size_t i = 0; i < n; ++i) {
    const PairSample& p = sets.val[i * sets.val.size() / n];
    out.push_back({FixedCrop(corpus.MelOf(p.source), cfg.t_fixed, rng),
                   FixedCrop(corpus.MelOf(p.reference), cfg.t_fixed, rng), p.source.emotion,
                   p.reference.emotion});
  }
  return out;
}

TrainResult Train(const TrainConfig& cfg, const MelCorpus& corpus, const TrainOptions& opts) {
  cfg.Validate();
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  std::error_code ec;
  fs::create_directories(opts.out_dir, ec);
  Require(fs::is_directory(opts.out_dir), ErrorKind::kIo,
          "cannot create output directory " + opts.out_dir.string());
  TrainResult result;
  result.final_checkpoint = opts.out_dir / "final.ckpt";
  result.metrics_log = opts.out_dir / "metrics.tsv";
  Require(opts.overwrite || opts.resume || !fs::exists(result.final_checkpoint), ErrorKind::kIo,
          "checkpoint path collision: " + result.final_checkpoint.string() + " already exists");

  TrainState state;
  if (opts.resume) {
    state = RestoreTrainState(LoadCheckpoint(*opts.resume), cfg);
  } else {
    state = MakeTrainState(cfg);
    if (cfg.stage == 2) {
      Require(opts.init_from.has_value(), ErrorKind::kConfig,
              "stage 2 requires a stage 1 checkpoint to initialize from");
      Checkpoint init = LoadCheckpoint(*opts.init_from);
      Require(CheckpointConfig(init).model == cfg.model, ErrorKind::kMismatch,
              "stage 1 checkpoint model config differs from the stage 2 config");
      state.model.ImportArrays(ModelArrays(init));
      state.model.FreezeEncoders(true);
    }
  }

  std::ofstream log(result.metrics_log, opts.resume ? std::ios::app : std::ios::trunc);
  Require(log.good(), ErrorKind::kIo, "cannot write metrics log " + result.metrics_log.string());
  auto emit = [&](LogRecord r) {
    r.wall_seconds = elapsed();
    log << FormatLogRecord(r) << '\n';
    log.flush();
    if (opts.on_log) opts.on_log(r);
    result.log.push_back(std::move(r));
  };

  const CorpusIndex& index = corpus.index;
  const std::vector<size_t> train_ids = index.InSplit(Split::kTrain);
  Require(!train_ids.empty(), ErrorKind::kInfeasible, "corpus has no training utterances");
  PairSets pairs;
  std::vector<PairMels> heldout;
  if (cfg.stage == 2) {
    pairs = MakeConversionPairs(index, {std::max(1, cfg.pairs_per_type.train), 0, 0}, cfg.pair_seed);
    heldout = HeldoutPairs(cfg, corpus);
    result.frozen_checksum_initial = FrozenChecksum(state.model);
    if (state.iteration == 0)
      emit({0, {{"heldout_ecc", HeldoutEmotionConsistency(state.model, heldout)}}, 0.0});
  }

  const int batch = cfg.EffectiveBatchSize();
  const long total_iters = cfg.EffectiveIterations();
  auto save = [&](const fs::path& p) { SaveCheckpoint(p, MakeCheckpoint(cfg, state)); };

  while (state.iteration < total_iters) {
    LossBreakdown b;
    if (cfg.stage == 1) {
      std::vector<LabeledMel> mels;
      mels.reserve(batch);
      std::uniform_int_distribution<size_t> pick(0, train_ids.size() - 1);
      for (int i = 0; i < batch; ++i) {
        size_t u = train_ids[pick(state.rng)];
        mels.push_back({FixedCrop(corpus.mels[u].frames, cfg.t_fixed, state.rng),
                        index.utterances[u].emotion});
      }
      std::vector<TripletMels> triplets;
      for (int i = 0; i < cfg.TripletsPerBatch(); ++i) {
        TripletSample t = SampleTriplet(index, state.rng, Split::kTrain);
        Matrix a = FixedCrop(corpus.MelOf(t.anchor), cfg.t_fixed, state.rng);
        Matrix p = FixedCrop(corpus.MelOf(t.positive), cfg.t_fixed, state.rng);
        Matrix n = FixedCrop(corpus.MelOf(t.negative), cfg.t_fixed, state.rng);
        triplets.push_back({std::move(a), std::move(p), std::move(n)});
      }
      b = Stage1Step(state, cfg, mels, triplets);
    } else {
      std::vector<PairMels> batch_pairs;
      std::uniform_int_distribution<size_t> pick(0, pairs.train.size() - 1);
      for (int i = 0; i < batch; ++i) {
        const PairSample& p = pairs.train[pick(state.rng)];
        Matrix x = FixedCrop(corpus.MelOf(p.source), cfg.t_fixed, state.rng);
        Matrix y = FixedCrop(corpus.MelOf(p.reference), cfg.t_fixed, state.rng);
        batch_pairs.push_back({std::move(x), std::move(y), p.source.emotion, p.reference.emotion});
      }
      b = Stage2Step(state, cfg, batch_pairs);
      result.frozen_checksums.push_back(FrozenChecksum(state.model));
    }
    result.steps.push_back(b);

    if (state.iteration % cfg.log_every == 0 || state.iteration == total_iters) {
      LogRecord r{state.iteration, {}, 0.0};
      for (const auto& [name, _] : b.terms)
        r.values.emplace_back(name, state.running_sums[name] / state.running_count);
      r.values.emplace_back("total", state.running_sums["total"] / state.running_count);
      state.running_sums.clear();
      state.running_count = 0;
      emit(std::move(r));
    }
    if (cfg.stage == 2 &&
        (state.iteration % cfg.heldout_every == 0 || state.iteration == total_iters))
      emit({state.iteration, {{"heldout_ecc", HeldoutEmotionConsistency(state.model, heldout)}}, 0.0});
    if (state.iteration % cfg.checkpoint_every == 0 && state.iteration != total_iters) {
      char name[48];
      std::snprintf(name, sizeof(name), "ckpt_%06ld.ckpt", state.iteration);
      save(opts.out_dir / name);
    }
    if (opts.stop_after >= 0 && state.iteration >= opts.stop_after) {
      char name[48];
      std::snprintf(name, sizeof(name), "ckpt_%06ld.ckpt", state.iteration);
      save(opts.out_dir / name);
      result.wall_seconds = elapsed();
      return result;
    }
  }
  save(result.final_checkpoint);
  result.wall_seconds = elapsed();
  return result;
}

}  // namespace ainn
