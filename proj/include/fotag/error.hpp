// Copyright 2026 The fotag Authors.
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

#ifndef FOTAG_ERROR_HPP
#define FOTAG_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace fotag {

enum class ErrorCode {
  // dataset
  MalformedRow,
  UnknownLabel,
  WordNotInSentence,
  EmptyDataset,
  BadRatios,
  // embedding store / containers
  BadMagic,
  CorruptHeader,
  NonFiniteValue,
  TruncatedPayload,
  ManifestMismatch,
  // probes and training
  DimensionMismatch,
  NonFiniteInput,
  InvalidDistribution,
  NonFiniteLoss,
  InvalidConfig,
  // sweep / report
  BadRange,
  AlignmentError,
  AllProbesFailed,
  OutOfRange,
  MixedTasks,
  // tagger
  ModeMismatch,
  CorruptModel,
  VersionMismatch,
  // files
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every recoverable failure in the library is reported as an Error carrying
/// a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  [[nodiscard]] bool is_io() const noexcept { return code_ == ErrorCode::IoError; }

 private:
  ErrorCode code_;
};

}  // namespace fotag

#endif  // FOTAG_ERROR_HPP
