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

#ifndef FOTAG_SWEEP_HPP
#define FOTAG_SWEEP_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fotag/dataset.hpp"
#include "fotag/embedding_store.hpp"
#include "fotag/training.hpp"

namespace fotag {

/// n geometrically spaced values from lambda_min to lambda_max (both exact).
/// Throws BadRange unless 0 < lambda_min <= lambda_max and n >= 1, with
/// n == 1 only for a degenerate range.
std::vector<double> make_linear_schedule(double lambda_min, double lambda_max, int n);

/// n hidden sizes: rounded geometric spacing from h_min to h_max, made strictly
/// increasing whenever the integer range has room for n distinct values, and
/// non-decreasing otherwise. Endpoints are exact.
std::vector<int> make_mlp_schedule(int h_min, int h_max, int n);

struct SweepConfig {
  ProbeFamily family = ProbeFamily::Linear;
  int num_classes = 6;
  int n_probes = 50;
  double lambda_min = 1e-4;
  double lambda_max = 10.0;
  /// Adds an unregularised point ahead of the geometric schedule.
  bool include_zero_lambda = false;
  int hidden_min = 4;
  int hidden_max = 1024;
  /// Template for every probe; lambda is overwritten from the schedule. All
  /// points and both label sets share train.seed.
  TrainConfig train;
  /// Concurrent probe trainings. Results do not depend on it.
  int jobs = 1;
  std::string task_id;
  std::string model_id;

  void validate() const;

  static SweepConfig defaults_for(ProbeFamily family);
};

struct SweepRecord {
  std::size_t index = 0;
  /// lambda for linear sweeps, hidden size for MLP sweeps.
  double schedule_value = 0.0;
  double realized_complexity = 0.0;
  double aux_accuracy = 0.0;
  double control_accuracy = 0.0;
  double selectivity = 0.0;
  double aux_validation_accuracy = 0.0;
  double control_validation_accuracy = 0.0;
  bool failed = false;

  friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

struct SweepResult {
  std::string task_id;
  std::string model_id;
  ProbeFamily family = ProbeFamily::Linear;
  int num_classes = 0;
  std::vector<SweepRecord> records;

  [[nodiscard]] std::size_t failed_count() const noexcept;
};

/// Trains, at every schedule point, one probe on the task labels and one
/// identically configured probe on each control label set. Both are scored on
/// the test part (validation accuracies are kept alongside). Control accuracy
/// is the mean over control sets.
///
/// Linear records carry the realised nuclear norm of the trained W as their
/// complexity. Divergent probes become failed records; other errors propagate.
/// Throws AlignmentError when rows, labels, control labels or the split
/// disagree.
SweepResult run_sweep(const SweepConfig& config, const EmbeddingMatrix& embeddings,
                      std::span<const int> labels,
                      std::span<const std::vector<int>> control_label_sets,
                      const SplitAssignment& split);

SweepResult run_sweep(const SweepConfig& config, const EmbeddingMatrix& embeddings,
                      std::span<const int> labels, std::span<const int> control_labels,
                      const SplitAssignment& split);

/// One JSON object per record, in schedule order.
std::string format_sweep_jsonl(const SweepResult& result);
void write_sweep_jsonl(const std::filesystem::path& path, const SweepResult& result);
std::vector<SweepRecord> read_sweep_jsonl(const std::filesystem::path& path);

}  // namespace fotag

#endif  // FOTAG_SWEEP_HPP
