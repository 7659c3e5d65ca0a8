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

#ifndef FOTAG_TAGGER_HPP
#define FOTAG_TAGGER_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fotag/dataset.hpp"
#include "fotag/embedding_store.hpp"
#include "fotag/training.hpp"

namespace fotag {

struct TaggerConfig {
  ProbeFamily family = ProbeFamily::Mlp;
  int hidden = 256;
  /// Training settings; lambda only applies to linear taggers.
  TrainConfig train = TrainConfig::defaults_for(ProbeFamily::Mlp);
};

struct ClassEvaluation {
  double accuracy = 0.0;
  std::vector<double> per_class_accuracy;  // 0 for classes absent from the rows
  std::vector<std::size_t> per_class_count;
};

ClassEvaluation evaluate_classwise(const AnyProbe& probe, const LabelledRows& rows);

struct TaggerModel {
  AnyProbe probe;
  ExtractionMode mode = ExtractionMode::SentenceAvgPenultimate;
  std::size_t embedding_dim = 0;
  std::vector<std::string> classes;
  std::string model_id;

  // training metadata
  std::uint64_t seed = 0;
  std::uint64_t split_seed = 0;
  Ratios ratios{};
  int epochs = 0;
  int batch_size = 0;
  double learning_rate = 0.0;
  double lambda = 0.0;
  int selected_epoch = 0;
  std::vector<double> validation_losses;
  ClassEvaluation test;
};

/// Frozen-feature tagger: trains the configured probe on the train part,
/// keeps the epoch with the lowest validation loss, and scores it on the test
/// part overall and per class. Parameters are stored at float precision, and
/// the reported scores are computed from those stored parameters.
TaggerModel train_tagger(const EmbeddingFile& embeddings, std::span<const int> labels,
                         std::vector<std::string> class_names, const SplitAssignment& split,
                         const TaggerConfig& config);

/// FO tagging over the six canonical classes.
TaggerModel train_tagger(const EmbeddingFile& embeddings, std::span<const Sample> samples,
                         const SplitAssignment& split, const TaggerConfig& config);

struct Prediction {
  int class_index = 0;
  std::string class_name;
  Vector<double> probabilities;
};

/// Per-row argmax class (ties to the lowest index) and full distribution.
/// Each row is evaluated independently so batched and single-row results are
/// identical. Throws DimensionMismatch.
std::vector<Prediction> tag(const TaggerModel& model, const EmbeddingMatrix& rows);

/// As above, and also throws ModeMismatch when the embeddings were extracted
/// with a different mode than the model was trained on.
std::vector<Prediction> tag(const TaggerModel& model, const EmbeddingFile& embeddings);

Prediction tag_row(const TaggerModel& model, const Eigen::Ref<const Vector<float>>& row);

inline constexpr std::string_view kTaggerMagic = "FOTAG1\n";
inline constexpr int kTaggerFormatVersion = 1;

void save_tagger(const TaggerModel& model, const std::filesystem::path& path);

/// Throws IoError, CorruptModel, VersionMismatch.
TaggerModel load_tagger(const std::filesystem::path& path);

}  // namespace fotag

#endif  // FOTAG_TAGGER_HPP
