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

#ifndef FOTAG_RUN_CONFIG_HPP
#define FOTAG_RUN_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fotag/dataset.hpp"
#include "fotag/embedding_store.hpp"
#include "fotag/sweep.hpp"
#include "fotag/tagger.hpp"

namespace fotag {

enum class TaskKind { Basic, Binary, Singular };

std::string_view to_string(TaskKind task) noexcept;
std::optional<TaskKind> parse_task(std::string_view text) noexcept;

/// The extraction mode each task's embeddings must come from.
ExtractionMode required_mode(TaskKind task) noexcept;
int task_num_classes(TaskKind task) noexcept;

/// One experiment, read from a flat `key = value` file. Relative paths are
/// resolved against the file's directory.
///
///   task = basic | binary | singular
///   dataset = <tsv>            embeddings = <foemb>
///   out = <dir>                model_id = <name, default from manifest>
///   families = linear,mlp      n_probes = 50
///   lambda_min = 0.0001        lambda_max = 10       include_zero_lambda = false
///   hidden_min = 4             hidden_max = 1024
///   epochs = 25                batch_size = 128
///   lr_linear = 0.01           lr_mlp = 0.01 
///   seed = 0                   (split_seed, control_seed, train_seed derive from it)
///   control_repeats = 1        ratios = 0.2,0.2,0.6   stratified = true
///   jobs = 1
///   tagger_family = mlp        tagger_hidden = 256    tagger_lambda = 0
///   tagger_lr = 0.01           tagger_epochs = 25
struct RunConfig {
  TaskKind task = TaskKind::Basic;
  std::filesystem::path dataset;
  std::filesystem::path embeddings;
  std::filesystem::path out_dir = ".";
  std::string model_id;
  std::vector<ProbeFamily> families{ProbeFamily::Linear, ProbeFamily::Mlp};
  int n_probes = 50;
  double lambda_min = 1e-4;
  double lambda_max = 10.0;
  bool include_zero_lambda = false;
  int hidden_min = 4;
  int hidden_max = 1024;
  int epochs = 25;
  int batch_size = 128;
  double lr_linear = 1e-2;
  double lr_mlp = 1e-2;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> split_seed;
  std::optional<std::uint64_t> control_seed;
  std::optional<std::uint64_t> train_seed;
  int control_repeats = 1;
  Ratios ratios{0.2, 0.2, 0.6};
  bool stratified = true;
  int jobs = 1;
  ProbeFamily tagger_family = ProbeFamily::Mlp;
  int tagger_hidden = 256;
  double tagger_lambda = 0.0;
  double tagger_lr = 1e-2;
  int tagger_epochs = 25;

  [[nodiscard]] std::uint64_t effective_split_seed() const;
  [[nodiscard]] std::uint64_t effective_control_seed() const;
  [[nodiscard]] std::uint64_t effective_train_seed() const;

  [[nodiscard]] SweepConfig sweep_config(ProbeFamily family) const;
  [[nodiscard]] TaggerConfig tagger_config() const;
};

/// Throws InvalidConfig on unknown keys or unparsable values, IoError when the
/// file cannot be read.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir);

/// Throws ModeMismatch when the embeddings' extraction mode does not belong to
/// the task.
void check_task_mode(TaskKind task, ExtractionMode mode);

}  // namespace fotag

#endif  // FOTAG_RUN_CONFIG_HPP
