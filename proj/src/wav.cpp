// src/wav.cpp

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

#include "ainn/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "ainn/common.hpp"

namespace ainn {
namespace {

uint32_t ReadU32(const uint8_t* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 |
         uint32_t(p[3]) << 24;
}
uint16_t ReadU16(const uint8_t* p) { return uint16_t(p[0] | p[1] << 8); }

void PutU32(std::string& s, uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void PutU16(std::string& s, uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>(v >> 8));
}

}  // namespace

Waveform LoadWav(const std::filesystem::path& path, int expected_rate) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), ErrorKind::kIo, "cannot open wav file: " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  const std::string where = " (" + path.string() + ")";
  Require(bytes.size() >= 12 && std::memcmp(bytes.data(), "RIFF", 4) == 0 &&
              std::memcmp(bytes.data() + 8, "WAVE", 4) == 0,
          ErrorKind::kIo, "not a RIFF/WAVE file" + where);

  bool have_fmt = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const uint8_t* data = nullptr;
  size_t data_size = 0;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint8_t* chunk = bytes.data() + pos;
    uint32_t size = ReadU32(chunk + 4);
    size_t body = pos + 8;
    size_t avail = std::min<size_t>(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0 && avail >= 16) {
      format = ReadU16(chunk + 8);
      channels = ReadU16(chunk + 10);
      rate = ReadU32(chunk + 12);
      bits = ReadU16(chunk + 22);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = avail;
    }
    pos = body + size + (size & 1);
  }
  Require(have_fmt && data != nullptr, ErrorKind::kIo,
          "wav file lacks fmt or data chunk" + where);
  Require(format == 1, ErrorKind::kIo, "PCM payload required" + where);
  Require(channels == 1, ErrorKind::kIo, "mono required, got " +
                                             std::to_string(channels) +
                                             " channels" + where);
  Require(bits == 16, ErrorKind::kIo, "16-bit samples required" + where);
  Require(expected_rate <= 0 || static_cast<int>(rate) == expected_rate,
          ErrorKind::kMismatch,
          "sample rate " + std::to_string(rate) + " Hz does not match expected " +
              std::to_string(expected_rate) + " Hz" + where);

  Waveform w;
  w.sample_rate_hz = static_cast<int>(rate);
  w.samples.resize(data_size / 2);
  for (size_t i = 0; i < w.samples.size(); ++i) {
    auto v = static_cast<int16_t>(ReadU16(data + 2 * i));
    w.samples[i] = static_cast<float>(v) / 32768.0f;
  }
  Require(!w.samples.empty(), ErrorKind::kIo, "empty wav payload" + where);
  return w;
}

void SaveWav(const std::filesystem::path& path, const Waveform& wave) {
  const uint32_t n = static_cast<uint32_t>(wave.samples.size());
  std::string out;
  out.reserve(44 + 2 * n);
  out += "RIFF";
  PutU32(out, 36 + 2 * n);
  out += "WAVEfmt ";
  PutU32(out, 16);
  PutU16(out, 1);
  PutU16(out, 1);
  PutU32(out, static_cast<uint32_t>(wave.sample_rate_hz));
  PutU32(out, static_cast<uint32_t>(wave.sample_rate_hz) * 2);
  PutU16(out, 2);
  PutU16(out, 16);
  out += "data";
  PutU32(out, 2 * n);
  for (float s : wave.samples) {
    float c = std::clamp(s, -1.0f, 1.0f);
    auto v = static_cast<int16_t>(std::lrint(c * 32767.0f));
    PutU16(out, static_cast<uint16_t>(v));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  Require(f.good(), ErrorKind::kIo, "cannot write wav file: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  Require(f.good(), ErrorKind::kIo, "short write: " + path.string());
}

}  // namespace ainn
