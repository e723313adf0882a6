// include/ainn/common.hpp

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

#ifndef AINN_COMMON_HPP_
#define AINN_COMMON_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace ainn {

// Network tensors are single precision and row-major (frames x channels).
using Matrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<float, 1, Eigen::Dynamic>;
using Vector = Eigen::VectorXf;

using MatrixD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using VectorD = Eigen::VectorXd;

using Rng = std::mt19937_64;

enum class ErrorKind {
  kInvalidArgument,  // usage or precondition violation
  kIo,
  kConfig,
  kInfeasible,       // corpus cannot satisfy a sampling request
  kNumeric,          // non-finite loss or parameter
  kMismatch,         // shape or config mismatch between artifacts
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// CLI exit code contract: 2 usage/I-O, 3 numerical abort, 4 mismatch.
int ExitCodeFor(ErrorKind kind);

[[noreturn]] void Fail(ErrorKind kind, const std::string& what);

inline void Require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) Fail(kind, what);
}

// Number of worker threads for embarrassingly parallel loops; honours
// AINN_NUM_WORKERS and never returns less than 1.
int NumWorkers();

}  // namespace ainn

#endif  // AINN_COMMON_HPP_
