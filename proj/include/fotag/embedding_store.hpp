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

#ifndef FOTAG_EMBEDDING_STORE_HPP
#define FOTAG_EMBEDDING_STORE_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fotag/dataset.hpp"

namespace fotag {

/// n x d embeddings, one row per sample.
using EmbeddingMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ExtractionMode {
  SentenceAvgPenultimate,
  BinarySentenceAvgPenultimate,
  SingularLast4Concat,
};

std::string_view to_string(ExtractionMode mode) noexcept;
std::optional<ExtractionMode> parse_extraction_mode(std::string_view text) noexcept;

/// Dimensions produced by base / large backbones for the mode.
std::vector<std::size_t> expected_dimensions(ExtractionMode mode);

/// d is one of 768, 1024, 3072, 4096.
bool is_standard_dimension(std::size_t d) noexcept;

struct EmbeddingManifest {
  std::string model_id;
  ExtractionMode extraction_mode = ExtractionMode::SentenceAvgPenultimate;
  std::size_t n = 0;
  std::size_t d = 0;
  std::string dataset_checksum;  // SHA-256 hex of the source TSV
  std::string created_at;

  friend bool operator==(const EmbeddingManifest&, const EmbeddingManifest&) = default;
};

inline constexpr std::string_view kEmbeddingMagic = "FOEMB1\n";

/// Writes magic, the manifest as one JSON line, then n*d little-endian f32.
/// Throws ManifestMismatch when (n, d) disagree with the matrix, NonFiniteValue
/// on NaN/Inf, IoError on write failure.
void write_embeddings(const std::filesystem::path& path, const EmbeddingManifest& manifest,
                      const EmbeddingMatrix& matrix);

struct EmbeddingFile {
  EmbeddingManifest manifest;
  EmbeddingMatrix matrix;
};

/// Throws BadMagic, CorruptHeader, TruncatedPayload, NonFiniteValue, IoError.
EmbeddingFile read_embeddings(const std::filesystem::path& path);
EmbeddingFile decode_embeddings(std::string_view bytes);

enum class MismatchKind {
  ManifestMatrixMismatch,
  RowCountMismatch,
  ChecksumMismatch,
  DimensionModeMismatch,
  NonStandardDimension,
};

std::string_view to_string(MismatchKind kind) noexcept;

struct Mismatch {
  MismatchKind kind;
  bool is_warning = false;
  std::string detail;
};

struct AlignmentReport {
  std::vector<Mismatch> mismatches;

  /// No error-level mismatches (warnings allowed).
  [[nodiscard]] bool ok() const noexcept;
  [[nodiscard]] bool contains(MismatchKind kind) const noexcept;
};

/// Checks an embedding file against the samples it claims to describe.
///
/// A standard dimension that does not belong to the extraction mode is an
/// error; a non-standard dimension (synthetic data, other backbones) is only a
/// warning. The checksum is compared when dataset_checksum is given.
AlignmentReport validate_alignment(const EmbeddingManifest& manifest, const EmbeddingMatrix& matrix,
                                   std::size_t sample_count,
                                   const std::optional<std::string>& dataset_checksum = std::nullopt);

inline AlignmentReport validate_alignment(const EmbeddingManifest& manifest,
                                          const EmbeddingMatrix& matrix,
                                          std::span<const Sample> samples,
                                          const std::optional<std::string>& dataset_checksum = std::nullopt) {
  return validate_alignment(manifest, matrix, samples.size(), dataset_checksum);
}

}  // namespace fotag

#endif  // FOTAG_EMBEDDING_STORE_HPP
