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

#include "fotag/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include "fotag/error.hpp"

namespace fotag {
namespace {

std::string shortest(double v) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string md_field(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '|') out += '\\';
    out += ch;
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace

double selectivity(double aux_accuracy, double control_accuracy) {
  const auto valid = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!valid(aux_accuracy) || !valid(control_accuracy)) {
    throw Error(ErrorCode::OutOfRange, "accuracies must lie in [0, 1]");
  }
  return aux_accuracy - control_accuracy;
}

double baseline_accuracy(int n_classes) {
  if (n_classes < 2) throw Error(ErrorCode::OutOfRange, "baseline needs at least 2 classes");
  return 1.0 / n_classes;
}

ProbeSummary max_selectivity_point(const SweepResult& sweep) {
  const SweepRecord* best = nullptr;
  for (const SweepRecord& r : sweep.records) {
    if (r.failed) continue;
    if (best == nullptr || r.selectivity > best->selectivity ||
        (r.selectivity == best->selectivity &&
         (r.realized_complexity < best->realized_complexity ||
          (r.realized_complexity == best->realized_complexity && r.index < best->index)))) {
      best = &r;
    }
  }
  if (best == nullptr) throw Error(ErrorCode::AllProbesFailed, "no successful probe in sweep");
  ProbeSummary s;
  s.model_id = sweep.model_id;
  s.task_id = sweep.task_id;
  s.family = sweep.family;
  s.num_classes = sweep.num_classes;
  s.accuracy_at_max_selectivity = best->aux_accuracy;
  s.max_selectivity = best->selectivity;
  s.complexity_at_max = best->realized_complexity;
  s.schedule_value_at_max = best->schedule_value;
  s.index_at_max = best->index;
  s.failed_count = sweep.failed_count();
  return s;
}

std::string format_two_decimals(double value) {
  // The nudge absorbs binary representation error so 0.125 rounds up.
  const auto cents = static_cast<long long>(std::floor(value * 100.0 + 0.5 + 1e-9));
  const long long mag = cents < 0 ? -cents : cents;
  std::string out = cents < 0 ? "-" : "";
  out += std::to_string(mag / 100);
  out += '.';
  const long long frac = mag % 100;
  if (frac < 10) out += '0';
  out += std::to_string(frac);
  return out;
}

std::string render_report(std::span<const ProbeSummary> summaries, ReportFormat format,
                          int num_classes) {
  std::optional<std::string> task;
  for (const ProbeSummary& s : summaries) {
    if (!task) {
      task = s.task_id;
      num_classes = s.num_classes;
    } else if (*task != s.task_id || s.num_classes != num_classes) {
      throw Error(ErrorCode::MixedTasks, "summaries from tasks '" + *task + "' and '" + s.task_id + "'");
    }
  }
  const std::string baseline = format_two_decimals(baseline_accuracy(num_classes));

  struct Row {
    std::string model;
    std::array<std::string, 4> cells{"-", "-", "-", "-"};
  };
  std::vector<Row> rows;
  std::map<std::string, std::size_t> row_of;
  for (const ProbeSummary& s : summaries) {
    auto [it, inserted] = row_of.try_emplace(s.model_id, rows.size());
    if (inserted) rows.push_back(Row{s.model_id});
    const std::size_t col = s.family == ProbeFamily::Mlp ? 0 : 2;
    rows[it->second].cells[col] = format_two_decimals(s.accuracy_at_max_selectivity);
    rows[it->second].cells[col + 1] = format_two_decimals(s.max_selectivity);
  }

  std::ostringstream out;
  if (format == ReportFormat::Markdown) {
    out << "| Model | MLP Accuracy | MLP Max Selectivity | Linear Accuracy | Linear Max Selectivity |\n";
    out << "| --- | --- | --- | --- | --- |\n";
    out << "| Random baseline | " << baseline << " | - | " << baseline << " | - |\n";
    for (const Row& r : rows) {
      out << "| " << md_field(r.model);
      for (const auto& c : r.cells) out << " | " << c;
      out << " |\n";
    }
  } else {
    out << "model,mlp_accuracy,mlp_max_selectivity,linear_accuracy,linear_max_selectivity\n";
    out << "Random baseline," << baseline << ",-," << baseline << ",-\n";
    for (const Row& r : rows) {
      out << csv_field(r.model);
      for (const auto& c : r.cells) out << ',' << c;
      out << '\n';
    }
  }
  return out.str();
}

std::string format_plot_data(const SweepResult& sweep) {
  std::vector<const SweepRecord*> ok;
  for (const SweepRecord& r : sweep.records) {
    if (!r.failed) ok.push_back(&r);
  }
  std::stable_sort(ok.begin(), ok.end(), [](const SweepRecord* a, const SweepRecord* b) {
    if (a->realized_complexity != b->realized_complexity) {
      return a->realized_complexity < b->realized_complexity;
    }
    return a->index < b->index;
  });
  std::string out = "complexity,aux_accuracy,control_accuracy,selectivity\n";
  for (const SweepRecord* r : ok) {
    out += shortest(r->realized_complexity) + ',' + shortest(r->aux_accuracy) + ',' +
           shortest(r->control_accuracy) + ',' + shortest(r->selectivity) + '\n';
  }
  return out;
}

void emit_plot_data(const SweepResult& sweep, const std::filesystem::path& path) {
  write_file(path, format_plot_data(sweep));
}

nlohmann::ordered_json summary_to_json(const ProbeSummary& s) {
  nlohmann::ordered_json j;
  j["model_id"] = s.model_id;
  j["task_id"] = s.task_id;
  j["family"] = to_string(s.family);
  j["num_classes"] = s.num_classes;
  j["accuracy_at_max_selectivity"] = s.accuracy_at_max_selectivity;
  j["max_selectivity"] = s.max_selectivity;
  j["complexity_at_max"] = s.complexity_at_max;
  j["schedule_value_at_max"] = s.schedule_value_at_max;
  j["index_at_max"] = s.index_at_max;
  j["failed_count"] = s.failed_count;
  return j;
}

ProbeSummary summary_from_json(const nlohmann::json& j) {
  ProbeSummary s;
  try {
    s.model_id = j.at("model_id").get<std::string>();
    s.task_id = j.at("task_id").get<std::string>();
    const auto family = parse_probe_family(j.at("family").get<std::string>());
    if (!family) throw Error(ErrorCode::MalformedRow, "unknown probe family in summary");
    s.family = *family;
    s.num_classes = j.at("num_classes").get<int>();
    s.accuracy_at_max_selectivity = j.at("accuracy_at_max_selectivity").get<double>();
    s.max_selectivity = j.at("max_selectivity").get<double>();
    s.complexity_at_max = j.at("complexity_at_max").get<double>();
    s.schedule_value_at_max = j.value("schedule_value_at_max", 0.0);
    s.index_at_max = j.value("index_at_max", std::size_t{0});
    s.failed_count = j.value("failed_count", std::size_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRow, std::string("summary: ") + e.what());
  }
  return s;
}

void save_summary(const std::filesystem::path& path, const ProbeSummary& summary) {
  write_file(path, summary_to_json(summary).dump(2) + "\n");
}

ProbeSummary load_summary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return summary_from_json(nlohmann::json::parse(buf.str()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRow, path.string() + ": " + e.what());
  }
}

std::string describe(const ProbeSummary& s) {
  std::ostringstream out;
  out << s.model_id << " " << s.task_id << " " << to_string(s.family)
      << ": accuracy " << format_two_decimals(s.accuracy_at_max_selectivity)
      << ", max selectivity " << format_two_decimals(s.max_selectivity)
      << ", complexity " << s.complexity_at_max << " (probe " << s.index_at_max << ", "
      << s.failed_count << " failed)";
  return out.str();
}

}  // namespace fotag
