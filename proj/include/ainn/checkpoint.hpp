// include/ainn/checkpoint.hpp

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

#ifndef AINN_CHECKPOINT_HPP_
#define AINN_CHECKPOINT_HPP_

#include <filesystem>
#include <map>
#include <string>

#include "ainn/common.hpp"

namespace ainn {

// Named-array archive. Layout (little endian):
//   "AINNCKPT1"
//   u64 length + UTF-8 config text (section.key = value lines)
//   u32 array count, then per array: u32 name length, name,
//   u32 rows, u32 cols, rows*cols float32 in row-major order.
struct Checkpoint {
  std::string config_text;
  std::map<std::string, Matrix> arrays;

  bool Has(const std::string& name) const { return arrays.count(name) != 0; }
  const Matrix& Get(const std::string& name) const;
};

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace ainn

#endif  // AINN_CHECKPOINT_HPP_
