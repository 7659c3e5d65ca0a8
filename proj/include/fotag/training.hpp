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

#ifndef FOTAG_TRAINING_HPP
#define FOTAG_TRAINING_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "fotag/probes.hpp"

namespace fotag {

enum class ProbeFamily { Linear, Mlp };

std::string_view to_string(ProbeFamily family) noexcept;
std::optional<ProbeFamily> parse_probe_family(std::string_view text) noexcept;

enum class CheckpointRule {
  LastEpoch,
  MinValidationLoss,
};

struct TrainConfig {
  int epochs = 25;
  int batch_size = 128;
  double learning_rate = 1e-2;
  /// Nuclear-norm penalty weight; linear probes only.
  double lambda = 0.0;
  std::uint64_t seed = 0;
  CheckpointRule checkpoint = CheckpointRule::LastEpoch;

  /// Throws InvalidConfig.
  void validate() const;

  /// Defaults per family: learning rate 1e-2 for both.
  static TrainConfig defaults_for(ProbeFamily family);
};

/// Probe architecture: the number of classes and, for MLPs, the hidden size.
struct ProbeShape {
  ProbeFamily family = ProbeFamily::Linear;
  Eigen::Index num_classes = 0;
  Eigen::Index hidden = 0;
};

using AnyProbe = std::variant<LinearProbe<double>, MlpProbe<double>>;

ProbeFamily family_of(const AnyProbe& probe) noexcept;
Eigen::Index input_dim(const AnyProbe& probe);
Eigen::Index num_classes(const AnyProbe& probe);

/// Non-owning view of rows with their labels.
struct LabelledRows {
  Eigen::Ref<const Matrix<double>> x;
  std::span<const int> labels;
};

struct TrainedProbe {
  AnyProbe probe;
  /// Nuclear norm of W for linear probes, hidden size for MLPs.
  double complexity = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> train_losses;          // per epoch, total loss
  std::vector<double> validation_losses;     // per epoch, data loss; empty without validation rows
  std::vector<double> validation_accuracies;
  /// 1-based epoch whose parameters were kept.
  int selected_epoch = 0;
};

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialisation.
AnyProbe initialize_probe(const ProbeShape& shape, Eigen::Index input_dim, std::uint64_t seed);

/// Minibatch gradient descent on mean cross-entropy (+ lambda * nuclear norm
/// for linear probes) with a constant learning rate. The shuffle order and the
/// initialisation derive from config.seed only, so a run is bitwise
/// reproducible.
///
/// Throws DimensionMismatch on misaligned inputs and NonFiniteLoss when the
/// loss or parameters become NaN/Inf.
TrainedProbe train_probe(const ProbeShape& shape, const LabelledRows& train,
                         const LabelledRows& validation, const TrainConfig& config);

Matrix<double> predict_proba(const AnyProbe& probe, const Eigen::Ref<const Matrix<double>>& x);

/// Argmax class per row, ties to the lowest index.
std::vector<int> predict(const AnyProbe& probe, const Eigen::Ref<const Matrix<double>>& x);

double evaluate_accuracy(const AnyProbe& probe, const LabelledRows& rows);

double validation_loss(const AnyProbe& probe, const LabelledRows& rows);

// --- parameter (de)serialisation -------------------------------------------

std::size_t parameter_count(const ProbeShape& shape, Eigen::Index input_dim);

/// Row-major W then b (linear); W1, b1, W2, b2 (MLP).
std::vector<float> flatten_parameters(const AnyProbe& probe);
AnyProbe unflatten_parameters(const ProbeShape& shape, Eigen::Index input_dim,
                              std::span<const float> values);

/// Rounds every parameter to the nearest float so that f32 storage is exact.
void round_to_float(AnyProbe& probe);

inline constexpr std::string_view kProbeMagic = "FOPRB1\n";

void save_probe(const std::filesystem::path& path, const TrainedProbe& trained);
/// Parameters come back rounded to float precision.
TrainedProbe load_probe(const std::filesystem::path& path);

}  // namespace fotag

#endif  // FOTAG_TRAINING_HPP
