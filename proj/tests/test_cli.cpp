// tests/test_cli.cpp

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

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ainn/mel.hpp"
#include "ainn/wav.hpp"
#include "test_helpers.hpp"

using namespace ainn;
using namespace ainn::testing;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string output;
};

RunResult Run(const std::string& args, const fs::path& scratch) {
  const fs::path log = scratch / "cli_output.txt";
  const std::string cmd = std::string(AINN_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream f(log);
  std::stringstream ss;
  ss << f.rdbuf();
  r.output = ss.str();
  return r;
}

void WriteText(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

std::string TinyModelConfig() {
  return "model.d_content = 16\nmodel.d_emotion = 16\nmodel.content_channels = 24\n"
         "model.content_layers = 2\nmodel.emotion_channels = 16\nmodel.emotion_layers = 6\n"
         "model.generator_channels = 24\nmodel.generator_layers = 2\nmodel.generator_lstm = 24\n"
         "desk.batch_size = 4\ndata.t_fixed = 32\nlog.every = 1\nlog.heldout_every = 1\n"
         "log.heldout_pairs = 4\ndata.pairs_train = 2\ndata.pairs_val = 1\ndata.pairs_test = 1\n";
}

}  // namespace

TEST_CASE("argument errors exit with code 2", "[cli]") {
  TempDir dir("cli_args");
  CHECK(Run("", dir.path()).code == 2);
  CHECK(Run("no-such-command", dir.path()).code == 2);
  CHECK(Run("train --stage 1", dir.path()).code == 2);
  RunResult missing = Run("train --config " + (dir / "absent.conf").string() + " --stage 1 --out " +
                              (dir / "o").string(),
                          dir.path());
  CHECK(missing.code == 2);
  CHECK(missing.output.find("absent.conf") != std::string::npos);
}

TEST_CASE("config errors name the problem", "[cli]") {
  TempDir dir("cli_cfg");
  WriteText(dir / "bad.conf", "train.stage = 1\ntrain.mystery = 4\n");
  RunResult r = Run("train --config " + (dir / "bad.conf").string() + " --stage 1 --out " +
                        (dir / "o").string() + " --corpus " + SharedToyCorpus().string(),
                    dir.path());
  CHECK(r.code == 2);
  CHECK(r.output.find("train.mystery") != std::string::npos);

  WriteText(dir / "s2.conf", "train.stage = 2\n");
  RunResult s2 = Run("train --config " + (dir / "s2.conf").string() + " --stage 2 --out " +
                         (dir / "o").string() + " --corpus " + SharedToyCorpus().string(),
                     dir.path());
  CHECK(s2.code == 2);
  CHECK(s2.output.find("init-from") != std::string::npos);

  RunResult mismatch = Run("train --config " + (dir / "s2.conf").string() + " --stage 1 --out " +
                               (dir / "o").string(),
                           dir.path());
  CHECK(mismatch.code == 2);
}

TEST_CASE("missing and malformed inputs", "[cli]") {
  TempDir dir("cli_inputs");
  RunResult r = Run("plot-pitch --wavs " + (dir / "nope.wav").string() + " --out " +
                        (dir / "p.svg").string(),
                    dir.path());
  CHECK(r.code == 2);
  CHECK(r.output.find("nope.wav") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "p.svg"));

  SaveWav(dir / "a.wav", Sine(220.0, 0.5));
  CHECK(Run("plot-pitch --wavs " + (dir / "a.wav").string() + " --labels x,y --out " +
                (dir / "p.svg").string(),
            dir.path())
            .code == 2);
}

TEST_CASE("end to end on a small corpus", "[cli]") {
  TempDir dir("cli_e2e");
  const std::string corpus = (dir / "corpus").string();
  REQUIRE(Run("make-toy-corpus --out " + corpus + " --speakers 1 --train 3 --val 1 --test 2 --seed 3",
              dir.path())
              .code == 0);
  RunResult idx = Run("index --root " + corpus + " --pairs-out " + (dir / "pairs.tsv").string() +
                          " --pairs-train 2 --pairs-val 1 --pairs-test 1 --triplets-out " +
                          (dir / "triplets.tsv").string() + " --triplets 5",
                      dir.path());
  REQUIRE(idx.code == 0);
  CHECK(fs::file_size(dir / "pairs.tsv") > 0);
  CHECK(fs::file_size(dir / "triplets.tsv") > 0);

  WriteText(dir / "s1.conf", "train.stage = 1\ntrain.lr = 0.001\ndesk.iterations = 3\n" + TinyModelConfig());
  WriteText(dir / "s2.conf", "train.stage = 2\ndesk.iterations = 2\n" + TinyModelConfig());
  RunResult s1 = Run("train --config " + (dir / "s1.conf").string() + " --stage 1 --out " +
                         (dir / "s1").string() + " --corpus " + corpus,
                     dir.path());
  REQUIRE(s1.code == 0);
  CHECK(s1.output.find("\trec\t") != std::string::npos);
  const fs::path ckpt1 = dir / "s1" / "final.ckpt";
  REQUIRE(fs::exists(ckpt1));

  // A second run into the same directory refuses to clobber.
  CHECK(Run("train --config " + (dir / "s1.conf").string() + " --stage 1 --out " +
                (dir / "s1").string() + " --corpus " + corpus,
            dir.path())
            .code == 2);

  RunResult s2 = Run("train --config " + (dir / "s2.conf").string() + " --stage 2 --init-from " +
                         ckpt1.string() + " --out " + (dir / "s2").string() + " --corpus " + corpus,
                     dir.path());
  REQUIRE(s2.code == 0);
  CHECK(s2.output.find("heldout_ecc") != std::string::npos);
  const fs::path ckpt2 = dir / "s2" / "final.ckpt";
  REQUIRE(fs::exists(ckpt2));

  const fs::path src = fs::path(corpus) / "spk01" / "neutral" / "test";
  const fs::path ref = fs::path(corpus) / "spk01" / "angry" / "test";
  const std::string a = fs::directory_iterator(src)->path().string();
  const std::string b = fs::directory_iterator(ref)->path().string();

  RunResult cv = Run("convert --checkpoint " + ckpt2.string() + " --source " + a + " --reference " +
                         b + " --out " + (dir / "z.wav").string(),
                     dir.path());
  REQUIRE(cv.code == 0);
  Waveform z = LoadWav(dir / "z.wav");
  CHECK(z.sample_rate_hz == 16000);
  CHECK(z.samples.size() > 0);

  RunResult dump = Run("convert --checkpoint " + ckpt2.string() + " --source " + a +
                           " --reference " + b + " --vocoder external-mel-dump --out " +
                           (dir / "z.mel").string(),
                       dir.path());
  REQUIRE(dump.code == 0);
  {
    std::ifstream f(dir / "z.mel", std::ios::binary);
    char magic[8];
    f.read(magic, 8);
    CHECK(std::string(magic, 8) == "AINNMEL1");
  }
  MelSpectrogram zm = ReadMelCache(dir / "z.mel");
  CHECK(zm.num_frames() == ComputeMelSpectrogram(LoadWav(a)).num_frames());

  CHECK(Run("convert --checkpoint " + ckpt2.string() + " --source " + a + " --reference " + b +
                " --reference-emotion furious --out " + (dir / "q.wav").string(),
            dir.path())
            .code == 2);

  RunResult ev = Run("evaluate --checkpoint " + ckpt2.string() + " --strength-checkpoint " +
                         ckpt1.string() + " --judge " + (dir / "judge.ckpt").string() +
                         " --judge-iterations 2 --corpus " + corpus + " --out " +
                         (dir / "eval").string() + " --pairs-test 2",
                     dir.path());
  REQUIRE(ev.code == 0);
  CHECK(fs::exists(dir / "judge.ckpt"));
  CHECK(fs::exists(dir / "eval" / "report.txt"));
  CHECK(fs::exists(dir / "eval" / "pairs.tsv"));
  CHECK(ev.output.find("mcd") != std::string::npos);

  RunResult cue = Run("plot-cue --checkpoint " + ckpt1.string() + " --wav " + b + " --out " +
                          (dir / "cue.svg").string(),
                      dir.path());
  REQUIRE(cue.code == 0);
  CHECK(fs::file_size(dir / "cue.svg") > 0);

  RunResult pitch = Run("plot-pitch --wavs " + a + "," + b + "," + (dir / "z.wav").string() +
                            " --labels source,reference,converted --out " + (dir / "pitch.svg").string(),
                        dir.path());
  REQUIRE(pitch.code == 0);
  std::ifstream svg(dir / "pitch.svg");
  std::stringstream ss;
  ss << svg.rdbuf();
  size_t contours = 0;
  for (size_t pos = 0; (pos = ss.str().find("class=\"contour\"", pos)) != std::string::npos; ++pos)
    ++contours;
  CHECK(contours == 3);
}
