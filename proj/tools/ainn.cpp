// tools/ainn.cpp

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

// Command-line front end: corpus synthesis, indexing, training, conversion,
// evaluation and plots.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ainn/checkpoint.hpp"
#include "ainn/config.hpp"
#include "ainn/corpus.hpp"
#include "ainn/evaluation.hpp"
#include "ainn/mel.hpp"
#include "ainn/pitch.hpp"
#include "ainn/plot.hpp"
#include "ainn/toy_corpus.hpp"
#include "ainn/training.hpp"
#include "ainn/wav.hpp"

namespace fs = std::filesystem;
using namespace ainn;

namespace {

void RequireFile(const fs::path& p, const std::string& what) {
  Require(fs::is_regular_file(p), ErrorKind::kIo, what + " not found: " + p.string());
}

void RequireParent(const fs::path& out) {
  const fs::path parent = out.has_parent_path() ? out.parent_path() : fs::path(".");
  Require(fs::is_directory(parent), ErrorKind::kIo,
          "output directory does not exist: " + parent.string());
}

std::optional<Emotion> OptionalEmotion(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::optional<Emotion> e = ParseEmotion(s);
  Require(e.has_value(), ErrorKind::kInvalidArgument, "unknown emotion: " + s);
  return e;
}

// ---------------------------------------------------------------------------

struct ToyArgs {
  std::string out;
  ToyCorpusConfig cfg;
  std::uint64_t seed = 0;
};

int RunMakeToyCorpus(const ToyArgs& a) {
  Require(a.cfg.speakers >= 1 && a.cfg.train >= 2 && a.cfg.val >= 1 && a.cfg.test >= 1,
          ErrorKind::kInvalidArgument, "toy corpus needs >= 1 speaker, >= 2 train, >= 1 val/test");
  SynthToyCorpus(a.out, a.cfg, a.seed);
  CorpusIndex index = IndexCorpus(a.out);
  std::printf("wrote %zu utterances for %zu speakers to %s\n", index.utterances.size(),
              index.speakers.size(), a.out.c_str());
  return 0;
}

struct IndexArgs {
  std::string root, pairs_out, triplets_out;
  PairCounts counts{750, 50, 15};
  int triplets = 0;
  std::uint64_t seed = 0;
};

int RunIndex(const IndexArgs& a) {
  Require(fs::is_directory(a.root), ErrorKind::kIo, "corpus root not found: " + a.root);
  if (!a.pairs_out.empty()) RequireParent(a.pairs_out);
  if (!a.triplets_out.empty()) RequireParent(a.triplets_out);
  CorpusIndex index = IndexCorpus(a.root);
  std::printf("speakers %zu utterances %zu\n", index.speakers.size(), index.utterances.size());
  for (Split s : {Split::kTrain, Split::kVal, Split::kTest})
    std::printf("  %-5s %zu\n", std::string(SplitName(s)).c_str(), index.InSplit(s).size());
  if (!a.pairs_out.empty()) {
    PairSets pairs = MakeConversionPairs(index, a.counts, a.seed);
    WritePairManifest(a.pairs_out, pairs);
    std::printf("pairs: train %zu val %zu test %zu -> %s\n", pairs.train.size(), pairs.val.size(),
                pairs.test.size(), a.pairs_out.c_str());
  }
  if (!a.triplets_out.empty()) {
    Rng rng(a.seed);
    std::vector<TripletSample> t;
    for (int i = 0; i < a.triplets; ++i) t.push_back(SampleTriplet(index, rng, Split::kTrain));
    WriteTripletManifest(a.triplets_out, t, Split::kTrain);
    std::printf("triplets: %zu -> %s\n", t.size(), a.triplets_out.c_str());
  }
  return 0;
}

struct TrainArgs {
  std::string config, resume, init_from, out, corpus;
  int stage = 0;
  bool overwrite = false;
};

int RunTrain(const TrainArgs& a) {
  RequireFile(a.config, "config");
  TrainConfig cfg = LoadTrainConfig(a.config);
  Require(cfg.stage == a.stage, ErrorKind::kConfig,
          "config " + a.config + " is for stage " + std::to_string(cfg.stage) + " but --stage is " +
              std::to_string(a.stage));
  if (!a.corpus.empty()) cfg.corpus_root = a.corpus;
  Require(a.stage == 1 || !a.init_from.empty() || !a.resume.empty(), ErrorKind::kConfig,
          "stage 2 requires --init-from <stage 1 checkpoint>");
  if (!a.init_from.empty()) RequireFile(a.init_from, "init checkpoint");
  if (!a.resume.empty()) RequireFile(a.resume, "resume checkpoint");
  Require(!cfg.corpus_root.empty(), ErrorKind::kConfig,
          "no corpus: set data.corpus_root in the config or pass --corpus");
  Require(fs::is_directory(cfg.corpus_root), ErrorKind::kIo,
          "corpus root not found: " + cfg.corpus_root);

  MelCorpus corpus = LoadMelCorpus(cfg.corpus_root);
  TrainOptions opts;
  opts.out_dir = a.out;
  opts.overwrite = a.overwrite;
  if (!a.resume.empty()) opts.resume = a.resume;
  if (!a.init_from.empty()) opts.init_from = a.init_from;
  opts.on_log = [](const LogRecord& r) { std::printf("%s\n", FormatLogRecord(r).c_str()); };
  TrainResult res = Train(cfg, corpus, opts);
  std::printf("final checkpoint %s (%.1f s)\n", res.final_checkpoint.c_str(), res.wall_seconds);
  return 0;
}

struct ConvertArgs {
  std::string checkpoint, source, reference, out, vocoder = "internal", reference_emotion;
  int iterations = 32;
};

int RunConvert(const ConvertArgs& a) {
  RequireFile(a.checkpoint, "checkpoint");
  RequireFile(a.source, "source");
  RequireFile(a.reference, "reference");
  RequireParent(a.out);
  Require(a.iterations >= 1, ErrorKind::kInvalidArgument, "--iterations must be positive");
  std::optional<Emotion> label = OptionalEmotion(a.reference_emotion);

  AinnModel model = LoadModel(LoadCheckpoint(a.checkpoint));
  MelSpectrogram x = ComputeMelSpectrogram(LoadWav(a.source));
  MelSpectrogram y = ComputeMelSpectrogram(LoadWav(a.reference));
  Require(x.frames.cols() == model.config().n_mels, ErrorKind::kMismatch,
          "checkpoint expects " + std::to_string(model.config().n_mels) + " mel bins");
  MelSpectrogram z{model.Convert(x.frames, y.frames, label), x.config};
  if (a.vocoder == "external-mel-dump") {
    WriteMelCache(a.out, z);
  } else {
    SaveWav(a.out, InvertMel(z, a.iterations));
  }
  std::printf("%s: %d frames\n", a.out.c_str(), z.num_frames());
  return 0;
}

struct EvalArgs {
  std::string checkpoint, strength_checkpoint, judge, corpus, out, mcd_mode = "parallel";
  int pairs_test = 15;
  std::uint64_t seed = 0;
  int judge_iterations = 400;
};

int RunEvaluate(const EvalArgs& a) {
  RequireFile(a.checkpoint, "checkpoint");
  RequireFile(a.strength_checkpoint, "strength checkpoint");
  Require(fs::is_directory(a.corpus), ErrorKind::kIo, "corpus root not found: " + a.corpus);
  Require(a.pairs_test >= 1, ErrorKind::kInvalidArgument, "--pairs-test must be positive");
  McdMode mode = ParseMcdMode(a.mcd_mode);
  if (!fs::exists(a.judge)) RequireParent(a.judge);

  MelCorpus corpus = LoadMelCorpus(a.corpus);
  AinnModel model = LoadModel(LoadCheckpoint(a.checkpoint));
  StrengthAssessor assessor(LoadCheckpoint(a.strength_checkpoint));

  JudgeClassifier judge;
  if (fs::exists(a.judge)) {
    judge = JudgeClassifier::FromCheckpoint(LoadCheckpoint(a.judge));
  } else {
    JudgeConfig jc;
    jc.model = model.config();
    jc.iterations = a.judge_iterations;
    judge = TrainJudge(corpus, jc);
    SaveCheckpoint(a.judge, judge.ToCheckpoint());
    std::printf("trained judge -> %s\n", a.judge.c_str());
  }
  const double gate = JudgeAccuracy(judge, corpus, Split::kTest);
  std::printf("judge accuracy on real test utterances %.3f%s\n", gate,
              gate < 0.9 ? " (below the 0.9 sanity gate)" : "");

  std::map<std::string, double> intensity;
  if (fs::exists(fs::path(a.corpus) / "intensity.tsv")) intensity = ReadIntensityTable(a.corpus);
  PairSets pairs = MakeConversionPairs(corpus.index, {0, 0, a.pairs_test}, a.seed);
  EvalOptions opts;
  opts.mcd_mode = mode;
  opts.out_dir = a.out;
  EvalOutput res = EvaluateAll(corpus, pairs.test, model, assessor, judge, intensity, opts);
  std::printf("%s", FormatReport(res.report).c_str());
  std::printf("strength preference %d/%d p=%.3g\n", res.preference.correct, res.preference.total,
              res.preference.p_value);
  return 0;
}

struct CueArgs {
  std::string checkpoint, wav, out, emotion;
};

int RunPlotCue(const CueArgs& a) {
  RequireFile(a.checkpoint, "checkpoint");
  RequireFile(a.wav, "wav");
  RequireParent(a.out);
  std::optional<Emotion> label = OptionalEmotion(a.emotion);
  AinnModel model = LoadModel(LoadCheckpoint(a.checkpoint));
  MelSpectrogram mel = ComputeMelSpectrogram(LoadWav(a.wav));
  EmotionFeature e = model.EncodeEmotion(mel.frames);
  const int cls = model.ClassForCue(e, label);
  EmotionalCue cue = model.Cue(e, cls);
  PlotCue(mel.frames, cue.weights,
          static_cast<double>(mel.config.hop_size) / mel.config.sample_rate_hz, a.out);
  std::printf("%s: class %s, max cue %.3f\n", a.out.c_str(),
              std::string(EmotionName(static_cast<Emotion>(cls))).c_str(),
              cue.weights.size() ? cue.weights.maxCoeff() : 0.0f);
  return 0;
}

struct PitchArgs {
  std::vector<std::string> wavs, labels;
  std::string out;
};

int RunPlotPitch(const PitchArgs& a) {
  Require(!a.wavs.empty() && a.wavs.size() <= 5, ErrorKind::kInvalidArgument,
          "--wavs takes 1 to 5 files");
  Require(a.labels.empty() || a.labels.size() == a.wavs.size(), ErrorKind::kInvalidArgument,
          "--labels must match --wavs in count");
  for (const auto& w : a.wavs) RequireFile(w, "wav");
  RequireParent(a.out);
  PitchConfig pc;
  std::vector<PitchSeries> series;
  for (size_t i = 0; i < a.wavs.size(); ++i) {
    std::string label = a.labels.empty() ? fs::path(a.wavs[i]).stem().string() : a.labels[i];
    series.push_back({label, PitchContour(LoadWav(a.wavs[i]), pc)});
  }
  PlotPitch(series, static_cast<double>(pc.hop_size) / kCorpusSampleRate, a.out);
  std::printf("%s: %zu contours\n", a.out.c_str(), series.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Instance-level emotional voice conversion toolkit"};
  app.require_subcommand(1);

  ToyArgs toy;
  auto* c_toy = app.add_subcommand("make-toy-corpus", "Synthesize the toy emotional corpus");
  c_toy->add_option("--out", toy.out, "Output corpus root")->required();
  c_toy->add_option("--speakers", toy.cfg.speakers, "Number of speakers");
  c_toy->add_option("--train", toy.cfg.train, "Utterances per train cell");
  c_toy->add_option("--val", toy.cfg.val, "Utterances per val cell");
  c_toy->add_option("--test", toy.cfg.test, "Utterances per test cell");
  c_toy->add_option("--seed", toy.seed, "Corpus seed");

  IndexArgs idx;
  auto* c_idx = app.add_subcommand("index", "Index a corpus and export pair/triplet manifests");
  c_idx->add_option("--root", idx.root, "Corpus root")->required();
  c_idx->add_option("--pairs-out", idx.pairs_out, "Pair manifest (TSV)");
  c_idx->add_option("--pairs-train", idx.counts.train, "Pairs per conversion type, train");
  c_idx->add_option("--pairs-val", idx.counts.val, "Pairs per conversion type, val");
  c_idx->add_option("--pairs-test", idx.counts.test, "Pairs per conversion type, test");
  c_idx->add_option("--triplets-out", idx.triplets_out, "Triplet manifest (TSV)");
  c_idx->add_option("--triplets", idx.triplets, "Number of train triplets")->check(CLI::NonNegativeNumber);
  c_idx->add_option("--seed", idx.seed, "Sampling seed");

  TrainArgs tr;
  auto* c_tr = app.add_subcommand("train", "Run Stage I or Stage II training");
  c_tr->add_option("--config", tr.config, "Config file")->required();
  c_tr->add_option("--stage", tr.stage, "Training stage")->required()->check(CLI::IsMember({1, 2}));
  c_tr->add_option("--resume", tr.resume, "Resume from a mid-run checkpoint");
  c_tr->add_option("--init-from", tr.init_from, "Stage I checkpoint (stage 2)");
  c_tr->add_option("--out", tr.out, "Output directory")->required();
  c_tr->add_option("--corpus", tr.corpus, "Corpus root (overrides data.corpus_root)");
  c_tr->add_flag("--overwrite", tr.overwrite, "Replace an existing final checkpoint");

  ConvertArgs cv;
  auto* c_cv = app.add_subcommand("convert", "Convert a source utterance toward a reference");
  c_cv->add_option("--checkpoint", cv.checkpoint, "Model checkpoint")->required();
  c_cv->add_option("--source", cv.source, "Source WAV")->required();
  c_cv->add_option("--reference", cv.reference, "Reference WAV")->required();
  c_cv->add_option("--out", cv.out, "Output WAV, or mel file with external-mel-dump")->required();
  c_cv->add_option("--vocoder", cv.vocoder, "internal | external-mel-dump")
      ->check(CLI::IsMember({"internal", "external-mel-dump"}));
  c_cv->add_option("--iterations", cv.iterations, "Phase reconstruction iterations");
  c_cv->add_option("--reference-emotion", cv.reference_emotion,
                   "Known reference emotion (default: recognized)");

  EvalArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "Compute the objective metrics on test pairs");
  c_ev->add_option("--checkpoint", ev.checkpoint, "Stage II checkpoint")->required();
  c_ev->add_option("--strength-checkpoint", ev.strength_checkpoint,
                   "Stage I checkpoint with the strength head")->required();
  c_ev->add_option("--judge", ev.judge, "Judge classifier checkpoint (trained when missing)")->required();
  c_ev->add_option("--corpus", ev.corpus, "Corpus root")->required();
  c_ev->add_option("--out", ev.out, "Report directory")->required();
  c_ev->add_option("--mcd-mode", ev.mcd_mode, "parallel | self")
      ->check(CLI::IsMember({"parallel", "self"}));
  c_ev->add_option("--pairs-test", ev.pairs_test, "Test pairs per conversion type");
  c_ev->add_option("--seed", ev.seed, "Pair sampling seed");
  c_ev->add_option("--judge-iterations", ev.judge_iterations, "Judge training iterations");

  CueArgs cue;
  auto* c_cue = app.add_subcommand("plot-cue", "Plot the emotional cue over the mel-spectrogram");
  c_cue->add_option("--checkpoint", cue.checkpoint, "Model checkpoint")->required();
  c_cue->add_option("--wav", cue.wav, "Input WAV")->required();
  c_cue->add_option("--out", cue.out, "Output SVG")->required();
  c_cue->add_option("--emotion", cue.emotion, "Class for the cue (default: recognized)");

  PitchArgs pitch;
  auto* c_pitch = app.add_subcommand("plot-pitch", "Overlay pitch contours of 1 to 5 WAVs");
  c_pitch->add_option("--wavs", pitch.wavs, "Comma-separated WAVs")->required()->delimiter(',');
  c_pitch->add_option("--labels", pitch.labels, "Comma-separated legend labels")->delimiter(',');
  c_pitch->add_option("--out", pitch.out, "Output SVG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*c_toy) return RunMakeToyCorpus(toy);
    if (*c_idx) return RunIndex(idx);
    if (*c_tr) return RunTrain(tr);
    if (*c_cv) return RunConvert(cv);
    if (*c_ev) return RunEvaluate(ev);
    if (*c_cue) return RunPlotCue(cue);
    if (*c_pitch) return RunPlotPitch(pitch);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
