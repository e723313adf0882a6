// src/plot.cpp

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

#include "ainn/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ainn {
namespace {

constexpr double kWidth = 900, kHeight = 360;
constexpr double kLeft = 60, kRight = 20, kTop = 20, kBottom = 40;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Viridis-like ramp, t in [0, 1].
std::string Color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(68 + t * (253 - 68));
  const int g = static_cast<int>(1 + t * (231 - 1));
  const int b = static_cast<int>(84 + (t < 0.5 ? t * 2 * (140 - 84) : (1 - t) * 2 * (140 - 84) - 47 * (t - 0.5) * 2));
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, std::clamp(b, 0, 255));
  return buf;
}

std::string Escape(const std::string& in) {
  std::string out;
  for (char c : in) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void Write(const std::filesystem::path& out, const std::string& svg) {
  std::ofstream f(out, std::ios::trunc);
  Require(f.good(), ErrorKind::kIo, "cannot write plot " + out.string());
  f << svg;
  Require(f.good(), ErrorKind::kIo, "failed writing plot " + out.string());
}

void Frame(std::ostringstream& s, const std::string& xlabel, const std::string& ylabel) {
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << Num(kLeft + (kWidth - kLeft - kRight) / 2) << "\" y=\"" << Num(kHeight - 8)
    << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  s << "<text x=\"14\" y=\"" << Num(kTop + (kHeight - kTop - kBottom) / 2)
    << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << Num(kTop + (kHeight - kTop - kBottom) / 2)
    << ")\">" << ylabel << "</text>\n";
}

}  // namespace

void PlotCue(const Matrix& mel, const Vector& cue, double frame_seconds,
             const std::filesystem::path& out) {
  Require(mel.rows() > 0, ErrorKind::kInvalidArgument, "plot-cue: empty spectrogram");
  Require(cue.size() == mel.rows(), ErrorKind::kMismatch, "plot-cue: cue length differs from frame count");
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const int frames = static_cast<int>(mel.rows()), bins = static_cast<int>(mel.cols());
  const double lo = mel.minCoeff(), hi = mel.maxCoeff();
  const double cw = pw / frames, ch = ph / bins;

  std::ostringstream s;
  Frame(s, "time (s)", "mel bin / cue");
  for (int t = 0; t < frames; ++t)
    for (int b = 0; b < bins; ++b) {
      const double v = hi > lo ? (mel(t, b) - lo) / (hi - lo) : 0.0;
      s << "<rect x=\"" << Num(kLeft + t * cw) << "\" y=\"" << Num(kTop + ph - (b + 1) * ch)
        << "\" width=\"" << Num(cw + 0.3) << "\" height=\"" << Num(ch + 0.3) << "\" fill=\""
        << Color(v) << "\"/>\n";
    }
  s << "<polyline fill=\"none\" stroke=\"white\" stroke-width=\"2\" points=\"";
  for (int t = 0; t < frames; ++t)
    s << Num(kLeft + (t + 0.5) * cw) << "," << Num(kTop + ph * (1.0 - cue(t))) << " ";
  s << "\"/>\n";
  int arg = 0;
  for (int t = 1; t < frames; ++t)
    if (cue(t) > cue(arg)) arg = t;
  const double ax = kLeft + (arg + 0.5) * cw, ay = kTop + ph * (1.0 - cue(arg));
  s << "<circle cx=\"" << Num(ax) << "\" cy=\"" << Num(ay) << "\" r=\"4\" fill=\"red\"/>\n";
  s << "<text x=\"" << Num(std::min(ax + 6, kWidth - 90)) << "\" y=\"" << Num(std::max(ay - 6, kTop + 12))
    << "\" fill=\"red\">max cue " << Num(cue(arg)) << " @ " << Num(arg * frame_seconds) << " s</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double sec = frames * frame_seconds * k / 4.0;
    s << "<text x=\"" << Num(kLeft + pw * k / 4.0) << "\" y=\"" << Num(kTop + ph + 16)
      << "\" text-anchor=\"middle\">" << Num(sec) << "</text>\n";
  }
  s << "</svg>\n";
  Write(out, s.str());
}

void PlotPitch(const std::vector<PitchSeries>& series, double frame_seconds,
               const std::filesystem::path& out) {
  Require(!series.empty() && series.size() <= 5, ErrorKind::kInvalidArgument,
          "plot-pitch: expected 1 to 5 contours");
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  size_t frames = 1;
  double f_lo = 1e9, f_hi = 0;
  for (const auto& ser : series) {
    frames = std::max(frames, ser.frames.size());
    for (const auto& f : ser.frames)
      if (f.f0_hz) {
        f_lo = std::min(f_lo, *f.f0_hz);
        f_hi = std::max(f_hi, *f.f0_hz);
      }
  }
  if (f_hi <= 0) f_lo = 50, f_hi = 500;
  f_lo = std::max(0.0, std::floor(f_lo / 50) * 50);
  f_hi = std::ceil(f_hi / 50) * 50 + (f_hi == f_lo ? 50 : 0);
  auto x = [&](double t) { return kLeft + pw * t / static_cast<double>(frames); };
  auto y = [&](double hz) { return kTop + ph * (1.0 - (hz - f_lo) / (f_hi - f_lo)); };

  std::ostringstream s;
  Frame(s, "time (s)", "F0 (Hz)");
  s << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << Num(pw) << "\" height=\"" << Num(ph)
    << "\" fill=\"none\" stroke=\"#888\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double hz = f_lo + (f_hi - f_lo) * k / 4.0;
    s << "<text x=\"" << Num(kLeft - 6) << "\" y=\"" << Num(y(hz) + 4) << "\" text-anchor=\"end\">"
      << Num(hz) << "</text>\n";
    s << "<text x=\"" << Num(kLeft + pw * k / 4.0) << "\" y=\"" << Num(kTop + ph + 16)
      << "\" text-anchor=\"middle\">" << Num(frames * frame_seconds * k / 4.0) << "</text>\n";
  }
  for (size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i];
    std::ostringstream path;
    bool pen = false;
    for (const auto& f : series[i].frames) {
      if (!f.f0_hz) {
        pen = false;
        continue;
      }
      path << (pen ? " L" : " M") << Num(x(f.frame_index + 0.5)) << " " << Num(y(*f.f0_hz));
      pen = true;
    }
    s << "<path class=\"contour\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" d=\""
      << path.str() << "\"/>\n";
    const double ly = kTop + 14 + 16 * i;
    s << "<line x1=\"" << Num(kWidth - kRight - 170) << "\" y1=\"" << Num(ly - 4) << "\" x2=\""
      << Num(kWidth - kRight - 150) << "\" y2=\"" << Num(ly - 4) << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n";
    s << "<text class=\"legend\" x=\"" << Num(kWidth - kRight - 145) << "\" y=\"" << Num(ly) << "\">"
      << Escape(series[i].label) << "</text>\n";
  }
  s << "</svg>\n";
  Write(out, s.str());
}

}  // namespace ainn
