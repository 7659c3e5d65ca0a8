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

#ifndef FOTAG_REPORT_HPP
#define FOTAG_REPORT_HPP

#include <filesystem>
#include <span>
#include <string>

#include <json.hpp>

#include "fotag/sweep.hpp"

namespace fotag {

struct ProbeSummary {
  std::string model_id;
  std::string task_id;
  ProbeFamily family = ProbeFamily::Linear;
  int num_classes = 0;
  double accuracy_at_max_selectivity = 0.0;
  double max_selectivity = 0.0;
  double complexity_at_max = 0.0;
  double schedule_value_at_max = 0.0;
  std::size_t index_at_max = 0;
  std::size_t failed_count = 0;

  friend bool operator==(const ProbeSummary&, const ProbeSummary&) = default;
};

/// aux - control. Throws OutOfRange unless both lie in [0, 1].
double selectivity(double aux_accuracy, double control_accuracy);

/// 1 / n_classes. Throws OutOfRange for fewer than two classes.
double baseline_accuracy(int n_classes);

/// The non-failed record with the highest selectivity; ties go to the lower
/// realised complexity, then to the lower schedule index. Accuracy and
/// selectivity always come from that one record. Throws AllProbesFailed.
ProbeSummary max_selectivity_point(const SweepResult& sweep);

/// Round half up to two decimals, e.g. 0.1666 -> "0.17", -0.2 -> "-0.20".
std::string format_two_decimals(double value);

enum class ReportFormat { Markdown, Csv };

/// Model-by-family table: (MLP accuracy, MLP max selectivity, linear accuracy,
/// linear max selectivity) per model, after a random-baseline row. Models
/// appear in first-seen order; a missing family prints "-".
///
/// num_classes sets the baseline when summaries is empty; otherwise the
/// summaries' own class count is used. Throws MixedTasks when summaries
/// disagree on task or class count.
std::string render_report(std::span<const ProbeSummary> summaries, ReportFormat format,
                          int num_classes = 6);

/// CSV `complexity,aux_accuracy,control_accuracy,selectivity` over the
/// non-failed records, sorted by complexity (then schedule index).
std::string format_plot_data(const SweepResult& sweep);
void emit_plot_data(const SweepResult& sweep, const std::filesystem::path& path);

nlohmann::ordered_json summary_to_json(const ProbeSummary& summary);
ProbeSummary summary_from_json(const nlohmann::json& j);
void save_summary(const std::filesystem::path& path, const ProbeSummary& summary);
ProbeSummary load_summary(const std::filesystem::path& path);

/// One-line human readable summary.
std::string describe(const ProbeSummary& summary);

}  // namespace fotag

#endif  // FOTAG_REPORT_HPP
