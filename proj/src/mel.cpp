// src/mel.cpp

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

#include "ainn/mel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>

namespace ainn {
namespace {

constexpr double kMinLogHz = 1000.0;
constexpr double kLinearSlope = 200.0 / 3.0;  // Hz per mel below 1 kHz
const double kMinLogMel = kMinLogHz / kLinearSlope;
const double kLogStep = std::log(6.4) / 27.0;

constexpr char kMelMagic[8] = {'A', 'I', 'N', 'N', 'M', 'E', 'L', '1'};

// FFTW planning is not thread safe; execution with new-array functions is.
std::mutex& PlanMutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void MelConfig::Validate() const {
  Require(n_mels == kNumMels, ErrorKind::kConfig, "n_mels must be 80");
  Require(fft_size > 0 && hop_size > 0 && hop_size < fft_size, ErrorKind::kConfig,
          "hop_size must be positive and smaller than fft_size");
  Require(window == "hann", ErrorKind::kConfig, "unsupported window: " + window);
  Require(fmin_hz >= 0.0 && fmin_hz < fmax_hz && fmax_hz <= sample_rate_hz / 2.0,
          ErrorKind::kConfig, "mel bounds must satisfy 0 <= fmin < fmax <= sr/2");
  Require(log_floor > 0.0, ErrorKind::kConfig, "log_floor must be positive");
}

double HzToMel(double hz) {
  if (hz < kMinLogHz) return hz / kLinearSlope;
  return kMinLogMel + std::log(hz / kMinLogHz) / kLogStep;
}

double MelToHz(double mel) {
  if (mel < kMinLogMel) return mel * kLinearSlope;
  return kMinLogHz * std::exp(kLogStep * (mel - kMinLogMel));
}

MatrixD MelFilterbank(const MelConfig& cfg) {
  cfg.Validate();
  const int bins = cfg.num_bins();
  const double lo = HzToMel(cfg.fmin_hz), hi = HzToMel(cfg.fmax_hz);
  std::vector<double> edges(cfg.n_mels + 2);
  for (int i = 0; i < cfg.n_mels + 2; ++i)
    edges[i] = MelToHz(lo + (hi - lo) * i / (cfg.n_mels + 1));

  MatrixD fb = MatrixD::Zero(cfg.n_mels, bins);
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    const double norm = 2.0 / (right - left);
    for (int k = 0; k < bins; ++k) {
      double f = static_cast<double>(k) * cfg.sample_rate_hz / cfg.fft_size;
      double up = (f - left) / (center - left);
      double down = (right - f) / (right - center);
      fb(m, k) = std::max(0.0, std::min(up, down)) * norm;
    }
  }
  return fb;
}

int NumFrames(int num_samples, const MelConfig& cfg) {
  if (num_samples < cfg.fft_size) return 0;
  return 1 + (num_samples - cfg.fft_size) / cfg.hop_size;
}

std::vector<double> AnalysisWindow(const MelConfig& cfg) {
  std::vector<double> w(cfg.fft_size);
  for (int n = 0; n < cfg.fft_size; ++n)
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / cfg.fft_size);
  return w;
}

MatrixD PowerSpectrogram(const Waveform& w, const MelConfig& cfg) {
  cfg.Validate();
  const int n = static_cast<int>(w.samples.size());
  Require(n >= cfg.fft_size, ErrorKind::kInvalidArgument,
          "audio shorter than one analysis window (" + std::to_string(n) + " < " +
              std::to_string(cfg.fft_size) + " samples)");
  const int frames = NumFrames(n, cfg);
  const int bins = cfg.num_bins();
  const auto window = AnalysisWindow(cfg);

  double* in = fftw_alloc_real(cfg.fft_size);
  fftw_complex* out = fftw_alloc_complex(bins);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(PlanMutex());
    plan = fftw_plan_dft_r2c_1d(cfg.fft_size, in, out, FFTW_ESTIMATE);
  }
  MatrixD power(frames, bins);
  for (int t = 0; t < frames; ++t) {
    const float* src = w.samples.data() + static_cast<size_t>(t) * cfg.hop_size;
    for (int i = 0; i < cfg.fft_size; ++i) in[i] = src[i] * window[i];
    fftw_execute_dft_r2c(plan, in, out);
    for (int k = 0; k < bins; ++k)
      power(t, k) = out[k][0] * out[k][0] + out[k][1] * out[k][1];
  }
  {
    std::lock_guard<std::mutex> lock(PlanMutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return power;
}

MelSpectrogram ComputeMelSpectrogram(const Waveform& w, const MelConfig& cfg) {
  Require(w.sample_rate_hz == cfg.sample_rate_hz, ErrorKind::kMismatch,
          "waveform rate does not match mel config rate");
  MatrixD power = PowerSpectrogram(w, cfg);
  MatrixD mel = power * MelFilterbank(cfg).transpose();
  MelSpectrogram out;
  out.config = cfg;
  out.frames = mel.unaryExpr([&](double v) { return std::log(std::max(v, cfg.log_floor)); })
                   .cast<float>();
  return out;
}

Waveform InvertMel(const MelSpectrogram& mel, int iterations) {
  const MelConfig& cfg = mel.config;
  cfg.Validate();
  Require(mel.num_frames() >= 1 && mel.frames.cols() == cfg.n_mels,
          ErrorKind::kInvalidArgument, "invalid mel spectrogram");
  Require(mel.frames.allFinite(), ErrorKind::kInvalidArgument,
          "mel spectrogram has non-finite entries");
  const int frames = mel.num_frames();
  const int bins = cfg.num_bins();
  const int n_fft = cfg.fft_size, hop = cfg.hop_size;

  // Magnitude estimate: power above the floor mapped back to linear bins by a
  // non-negative least-squares fit (multiplicative updates), so floor frames
  // stay exactly zero.
  MatrixD fb = MelFilterbank(cfg);  // mels x bins
  const double floor_log = std::log(cfg.log_floor);
  MatrixD mel_power = mel.frames.cast<double>().unaryExpr([&](double v) {
    return v <= floor_log + 1e-5 ? 0.0 : std::max(0.0, std::exp(v) - cfg.log_floor);
  });
  const MatrixD target = mel_power * fb;         // frames x bins
  const MatrixD gram = fb.transpose() * fb;      // bins x bins
  const Eigen::VectorXd col = fb.colwise().sum().transpose();
  MatrixD power(frames, bins);
  for (int k = 0; k < bins; ++k) power.col(k) = target.col(k) / std::max(col(k) * col(k), 1e-12);
  for (int it = 0; it < 200; ++it) {
    MatrixD denom = power * gram;
    power = power.cwiseProduct(target).cwiseQuotient(denom.unaryExpr([](double v) { return std::max(v, 1e-30); }));
  }
  MatrixD magnitude = power.cwiseSqrt();

  const auto window = AnalysisWindow(cfg);
  const int length = (frames - 1) * hop + n_fft;
  std::vector<double> norm(length, 0.0);
  for (int t = 0; t < frames; ++t)
    for (int i = 0; i < n_fft; ++i) norm[t * hop + i] += window[i] * window[i];

  double* real = fftw_alloc_real(n_fft);
  fftw_complex* spec = fftw_alloc_complex(bins);
  fftw_plan fwd, inv;
  {
    std::lock_guard<std::mutex> lock(PlanMutex());
    fwd = fftw_plan_dft_r2c_1d(n_fft, real, spec, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(n_fft, spec, real, FFTW_ESTIMATE);
  }

  MatrixD phase_re = MatrixD::Ones(frames, bins);
  MatrixD phase_im = MatrixD::Zero(frames, bins);
  std::vector<double> signal(length, 0.0);

  auto synthesize = [&] {
    std::fill(signal.begin(), signal.end(), 0.0);
    for (int t = 0; t < frames; ++t) {
      for (int k = 0; k < bins; ++k) {
        spec[k][0] = magnitude(t, k) * phase_re(t, k);
        spec[k][1] = magnitude(t, k) * phase_im(t, k);
      }
      fftw_execute_dft_c2r(inv, spec, real);
      for (int i = 0; i < n_fft; ++i)
        signal[t * hop + i] += real[i] / n_fft * window[i];
    }
    for (int i = 0; i < length; ++i)
      signal[i] = norm[i] > 1e-8 ? signal[i] / norm[i] : 0.0;
  };

  synthesize();
  for (int it = 0; it < iterations; ++it) {
    for (int t = 0; t < frames; ++t) {
      for (int i = 0; i < n_fft; ++i) real[i] = signal[t * hop + i] * window[i];
      fftw_execute_dft_r2c(fwd, real, spec);
      for (int k = 0; k < bins; ++k) {
        double re = spec[k][0], im = spec[k][1];
        double mag = std::hypot(re, im);
        if (mag > 1e-12) {
          phase_re(t, k) = re / mag;
          phase_im(t, k) = im / mag;
        } else {
          phase_re(t, k) = 1.0;
          phase_im(t, k) = 0.0;
        }
      }
    }
    synthesize();
  }

  {
    std::lock_guard<std::mutex> lock(PlanMutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }
  fftw_free(real);
  fftw_free(spec);

  Waveform out;
  out.sample_rate_hz = cfg.sample_rate_hz;
  out.samples.resize(length);
  for (int i = 0; i < length; ++i)
    out.samples[i] = static_cast<float>(std::clamp(signal[i], -1.0, 1.0));
  return out;
}

void WriteMelCache(const std::filesystem::path& path, const MelSpectrogram& mel) {
  static_assert(std::endian::native == std::endian::little,
                "mel cache writer assumes a little-endian host");
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  Require(f.good(), ErrorKind::kIo, "cannot write mel cache: " + path.string());
  uint32_t dims[2] = {static_cast<uint32_t>(mel.frames.rows()),
                      static_cast<uint32_t>(mel.frames.cols())};
  f.write(kMelMagic, 8);
  f.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  f.write(reinterpret_cast<const char*>(mel.frames.data()),
          static_cast<std::streamsize>(sizeof(float) * mel.frames.size()));
  Require(f.good(), ErrorKind::kIo, "short write: " + path.string());
}

MelSpectrogram ReadMelCache(const std::filesystem::path& path, const MelConfig& cfg) {
  std::ifstream f(path, std::ios::binary);
  Require(f.good(), ErrorKind::kIo, "cannot open mel cache: " + path.string());
  char magic[8];
  uint32_t dims[2];
  f.read(magic, 8);
  f.read(reinterpret_cast<char*>(dims), sizeof(dims));
  Require(f.good() && std::memcmp(magic, kMelMagic, 8) == 0, ErrorKind::kIo,
          "bad mel cache header: " + path.string());
  Require(dims[1] == static_cast<uint32_t>(cfg.n_mels) && dims[0] >= 1,
          ErrorKind::kMismatch, "mel cache has unexpected shape: " + path.string());
  MelSpectrogram mel;
  mel.config = cfg;
  mel.frames.resize(dims[0], dims[1]);
  f.read(reinterpret_cast<char*>(mel.frames.data()),
         static_cast<std::streamsize>(sizeof(float) * mel.frames.size()));
  Require(f.good(), ErrorKind::kIo, "truncated mel cache: " + path.string());
  return mel;
}

}  // namespace ainn
