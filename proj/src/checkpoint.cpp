// src/checkpoint.cpp

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

#include "ainn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace ainn {
namespace {

constexpr char kMagic[] = "AINNCKPT1";
constexpr size_t kMagicLen = 9;

static_assert(std::endian::native == std::endian::little,
              "checkpoint IO assumes a little-endian host");

template <class T>
void Put(std::ofstream& f, T v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T Get(std::ifstream& f, const std::filesystem::path& path) {
  T v{};
  f.read(reinterpret_cast<char*>(&v), sizeof(T));
  Require(f.good(), ErrorKind::kIo, "truncated checkpoint: " + path.string());
  return v;
}

}  // namespace

const Matrix& Checkpoint::Get(const std::string& name) const {
  auto it = arrays.find(name);
  Require(it != arrays.end(), ErrorKind::kMismatch, "checkpoint lacks array " + name);
  return it->second;
}

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  // Write to a sibling temp file, then rename, so readers never see a
  // partial checkpoint.
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    Require(f.good(), ErrorKind::kIo, "cannot write checkpoint: " + path.string());
    f.write(kMagic, kMagicLen);
    Put<std::uint64_t>(f, ckpt.config_text.size());
    f.write(ckpt.config_text.data(), static_cast<std::streamsize>(ckpt.config_text.size()));
    Put<std::uint32_t>(f, static_cast<std::uint32_t>(ckpt.arrays.size()));
    for (const auto& [name, m] : ckpt.arrays) {
      Put<std::uint32_t>(f, static_cast<std::uint32_t>(name.size()));
      f.write(name.data(), static_cast<std::streamsize>(name.size()));
      Put<std::uint32_t>(f, static_cast<std::uint32_t>(m.rows()));
      Put<std::uint32_t>(f, static_cast<std::uint32_t>(m.cols()));
      f.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(sizeof(float) * m.size()));
    }
    Require(f.good(), ErrorKind::kIo, "short write: " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  Require(!ec, ErrorKind::kIo, "cannot finalize checkpoint: " + path.string());
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  Require(f.good(), ErrorKind::kIo, "cannot open checkpoint: " + path.string());
  char magic[kMagicLen];
  f.read(magic, kMagicLen);
  Require(f.good() && std::memcmp(magic, kMagic, kMagicLen) == 0, ErrorKind::kIo,
          "not an AINNCKPT1 checkpoint: " + path.string());
  Checkpoint ckpt;
  auto text_len = Get<std::uint64_t>(f, path);
  Require(text_len < (1u << 26), ErrorKind::kIo, "corrupt checkpoint header: " + path.string());
  ckpt.config_text.resize(text_len);
  f.read(ckpt.config_text.data(), static_cast<std::streamsize>(text_len));
  auto count = Get<std::uint32_t>(f, path);
  for (std::uint32_t i = 0; i < count; ++i) {
    auto name_len = Get<std::uint32_t>(f, path);
    Require(name_len < 4096, ErrorKind::kIo, "corrupt array name: " + path.string());
    std::string name(name_len, '\0');
    f.read(name.data(), name_len);
    auto rows = Get<std::uint32_t>(f, path);
    auto cols = Get<std::uint32_t>(f, path);
    Matrix m(rows, cols);
    f.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(float) * m.size()));
    Require(f.good(), ErrorKind::kIo, "truncated checkpoint: " + path.string());
    ckpt.arrays.emplace(std::move(name), std::move(m));
  }
  return ckpt;
}

}  // namespace ainn
