// Copyright (c) 2026 The gradstyle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GSA_CORE_COMMON_HPP_
#define GSA_CORE_COMMON_HPP_

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace gsa {

// Time-major dense matrix used throughout: rows are frames / tokens.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

enum class ErrorCode {
  kInvalidArgument = 1,
  kIo,
  kFormat,
  kUnsupported,
  kDegenerateInput,
  kConfiguration,
  kBounds,
  kTraining,
  kData,
  kVersion,
  kUsage,
  kDegenerateOutput,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code,
                    const std::string& message) {
  if (!condition) fail(code, message);
}

// Number of worker threads; honours GSA_NUM_THREADS.
int worker_threads();

}  // namespace gsa

#endif  // GSA_CORE_COMMON_HPP_
