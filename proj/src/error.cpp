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

#include "fotag/error.hpp"

namespace fotag {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::WordNotInSentence: return "WordNotInSentence";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::BadRatios: return "BadRatios";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::CorruptHeader: return "CorruptHeader";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::ManifestMismatch: return "ManifestMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::AlignmentError: return "AlignmentError";
    case ErrorCode::AllProbesFailed: return "AllProbesFailed";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::MixedTasks: return "MixedTasks";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::CorruptModel: return "CorruptModel";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace fotag
