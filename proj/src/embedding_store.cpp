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

#include "fotag/embedding_store.hpp"

#include <algorithm>
#include <cmath>

#include "fotag/container.hpp"
#include "fotag/error.hpp"

namespace fotag {
namespace {

constexpr std::array<std::pair<ExtractionMode, std::string_view>, 3> kModes = {{
    {ExtractionMode::SentenceAvgPenultimate, "sentence_avg_penultimate"},
    {ExtractionMode::BinarySentenceAvgPenultimate, "binary_sentence_avg_penultimate"},
    {ExtractionMode::SingularLast4Concat, "singular_last4_concat"},
}};

std::string manifest_line(const EmbeddingManifest& m) {
  nlohmann::ordered_json j;
  j["model_id"] = m.model_id;
  j["extraction_mode"] = to_string(m.extraction_mode);
  j["n"] = m.n;
  j["d"] = m.d;
  j["dataset_checksum"] = m.dataset_checksum;
  j["created_at"] = m.created_at;
  return j.dump();
}

EmbeddingManifest manifest_from_json(const nlohmann::json& j) {
  EmbeddingManifest m;
  try {
    m.model_id = j.at("model_id").get<std::string>();
    const auto mode = parse_extraction_mode(j.at("extraction_mode").get<std::string>());
    if (!mode) throw Error(ErrorCode::CorruptHeader, "unknown extraction_mode");
    m.extraction_mode = *mode;
    m.n = j.at("n").get<std::size_t>();
    m.d = j.at("d").get<std::size_t>();
    m.dataset_checksum = j.at("dataset_checksum").get<std::string>();
    m.created_at = j.value("created_at", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptHeader, e.what());
  }
  return m;
}

}  // namespace

std::string_view to_string(ExtractionMode mode) noexcept {
  for (const auto& [m, name] : kModes) {
    if (m == mode) return name;
  }
  return "unknown";
}

std::optional<ExtractionMode> parse_extraction_mode(std::string_view text) noexcept {
  for (const auto& [m, name] : kModes) {
    if (name == text) return m;
  }
  return std::nullopt;
}

std::vector<std::size_t> expected_dimensions(ExtractionMode mode) {
  if (mode == ExtractionMode::SingularLast4Concat) return {3072, 4096};
  return {768, 1024};
}

bool is_standard_dimension(std::size_t d) noexcept {
  return d == 768 || d == 1024 || d == 3072 || d == 4096;
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingManifest& manifest,
                      const EmbeddingMatrix& matrix) {
  if (manifest.n != static_cast<std::size_t>(matrix.rows()) ||
      manifest.d != static_cast<std::size_t>(matrix.cols())) {
    throw Error(ErrorCode::ManifestMismatch,
                "manifest says " + std::to_string(manifest.n) + "x" + std::to_string(manifest.d) +
                    ", matrix is " + std::to_string(matrix.rows()) + "x" +
                    std::to_string(matrix.cols()));
  }
  if (!matrix.allFinite()) throw Error(ErrorCode::NonFiniteValue, "embedding matrix has NaN/Inf");
  write_container(path, kEmbeddingMagic, manifest_line(manifest),
                  std::span<const float>(matrix.data(), static_cast<std::size_t>(matrix.size())));
}

static EmbeddingFile from_container(const RawContainer& raw) {
  EmbeddingFile out;
  out.manifest = manifest_from_json(raw.header);
  const std::size_t expected = out.manifest.n * out.manifest.d * 4;
  if (raw.payload.size() < expected) {
    throw Error(ErrorCode::TruncatedPayload, "payload has " + std::to_string(raw.payload.size()) +
                                                 " bytes, expected " + std::to_string(expected));
  }
  if (raw.payload.size() > expected) {
    throw Error(ErrorCode::CorruptHeader, "payload has " + std::to_string(raw.payload.size()) +
                                              " bytes, header implies " + std::to_string(expected));
  }
  const std::vector<float> values = decode_f32(raw.payload);
  if (!std::all_of(values.begin(), values.end(), [](float v) { return std::isfinite(v); })) {
    throw Error(ErrorCode::NonFiniteValue, "payload contains NaN/Inf");
  }
  out.matrix = Eigen::Map<const EmbeddingMatrix>(values.data(),
                                                 static_cast<Eigen::Index>(out.manifest.n),
                                                 static_cast<Eigen::Index>(out.manifest.d));
  return out;
}

EmbeddingFile decode_embeddings(std::string_view bytes) {
  return from_container(decode_container(bytes, kEmbeddingMagic));
}

EmbeddingFile read_embeddings(const std::filesystem::path& path) {
  return from_container(read_container(path, kEmbeddingMagic));
}

std::string_view to_string(MismatchKind kind) noexcept {
  switch (kind) {
    case MismatchKind::ManifestMatrixMismatch: return "ManifestMatrixMismatch";
    case MismatchKind::RowCountMismatch: return "RowCountMismatch";
    case MismatchKind::ChecksumMismatch: return "ChecksumMismatch";
    case MismatchKind::DimensionModeMismatch: return "DimensionModeMismatch";
    case MismatchKind::NonStandardDimension: return "NonStandardDimension";
  }
  return "Unknown";
}

bool AlignmentReport::ok() const noexcept {
  return std::none_of(mismatches.begin(), mismatches.end(),
                      [](const Mismatch& m) { return !m.is_warning; });
}

bool AlignmentReport::contains(MismatchKind kind) const noexcept {
  return std::any_of(mismatches.begin(), mismatches.end(),
                     [kind](const Mismatch& m) { return m.kind == kind; });
}

AlignmentReport validate_alignment(const EmbeddingManifest& manifest, const EmbeddingMatrix& matrix,
                                   std::size_t sample_count,
                                   const std::optional<std::string>& dataset_checksum) {
  AlignmentReport report;
  const auto rows = static_cast<std::size_t>(matrix.rows());
  const auto cols = static_cast<std::size_t>(matrix.cols());
  if (manifest.n != rows || manifest.d != cols) {
    report.mismatches.push_back({MismatchKind::ManifestMatrixMismatch, false,
                                 "manifest " + std::to_string(manifest.n) + "x" +
                                     std::to_string(manifest.d) + " vs matrix " +
                                     std::to_string(rows) + "x" + std::to_string(cols)});
  }
  if (rows != sample_count) {
    report.mismatches.push_back({MismatchKind::RowCountMismatch, false,
                                 std::to_string(rows) + " rows for " +
                                     std::to_string(sample_count) + " samples"});
  }
  if (dataset_checksum && *dataset_checksum != manifest.dataset_checksum) {
    report.mismatches.push_back({MismatchKind::ChecksumMismatch, false,
                                 "manifest " + manifest.dataset_checksum + " vs dataset " +
                                     *dataset_checksum});
  }
  const auto allowed = expected_dimensions(manifest.extraction_mode);
  if (std::find(allowed.begin(), allowed.end(), cols) == allowed.end()) {
    if (is_standard_dimension(cols)) {
      report.mismatches.push_back({MismatchKind::DimensionModeMismatch, false,
                                   "d=" + std::to_string(cols) + " does not fit mode " +
                                       std::string(to_string(manifest.extraction_mode))});
    } else {
      report.mismatches.push_back({MismatchKind::NonStandardDimension, true,
                                   "d=" + std::to_string(cols) + " is not a backbone dimension"});
    }
  }
  return report;
}

}  // namespace fotag
