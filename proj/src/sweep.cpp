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

#include "fotag/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fotag/error.hpp"

namespace fotag {

std::vector<double> make_linear_schedule(double lambda_min, double lambda_max, int n) {
  if (n < 1) throw Error(ErrorCode::BadRange, "schedule needs at least one point");
  if (!(lambda_min > 0.0) || !(lambda_max >= lambda_min) || !std::isfinite(lambda_max)) {
    throw Error(ErrorCode::BadRange, "need 0 < lambda_min <= lambda_max");
  }
  if (n == 1) {
    if (lambda_min != lambda_max) throw Error(ErrorCode::BadRange, "one point needs lambda_min == lambda_max");
    return {lambda_min};
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  const double log_min = std::log(lambda_min);
  const double log_span = std::log(lambda_max) - log_min;
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = std::exp(log_min + log_span * i / (n - 1));
  }
  out.front() = lambda_min;
  out.back() = lambda_max;
  return out;
}

std::vector<int> make_mlp_schedule(int h_min, int h_max, int n) {
  if (n < 1) throw Error(ErrorCode::BadRange, "schedule needs at least one point");
  if (h_min < 1 || h_max < h_min) throw Error(ErrorCode::BadRange, "need 1 <= h_min <= h_max");
  if (n == 1) {
    if (h_min != h_max) throw Error(ErrorCode::BadRange, "one point needs h_min == h_max");
    return {h_min};
  }
  std::vector<int> out(static_cast<std::size_t>(n));
  const double log_min = std::log(static_cast<double>(h_min));
  const double log_span = std::log(static_cast<double>(h_max)) - log_min;
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = static_cast<int>(std::lround(std::exp(log_min + log_span * i / (n - 1))));
  }
  out.front() = h_min;
  out.back() = h_max;
  const bool room = static_cast<long long>(h_max) - h_min + 1 >= n;
  // Forward pass pushes duplicates up, backward pass pulls the tail back
  // under h_max; with enough room the result is strictly increasing.
  for (std::size_t i = 1; i < out.size(); ++i) {
    out[i] = std::max(out[i], room ? out[i - 1] + 1 : out[i - 1]);
  }
  out.back() = h_max;
  for (std::size_t i = out.size() - 1; i-- > 0;) {
    out[i] = std::min(out[i], room ? out[i + 1] - 1 : out[i + 1]);
  }
  return out;
}

void SweepConfig::validate() const {
  if (n_probes < 2) throw Error(ErrorCode::BadRange, "n_probes must be >= 2");
  if (num_classes < 2) throw Error(ErrorCode::InvalidConfig, "num_classes must be >= 2");
  if (jobs < 1) throw Error(ErrorCode::InvalidConfig, "jobs must be >= 1");
  if (family == ProbeFamily::Linear) {
    if (!(lambda_min > 0.0) || !(lambda_max > lambda_min)) {
      throw Error(ErrorCode::BadRange, "need 0 < lambda_min < lambda_max");
    }
  } else if (hidden_min < 1 || hidden_max < hidden_min) {
    throw Error(ErrorCode::BadRange, "need 1 <= hidden_min <= hidden_max");
  }
  train.validate();
}

SweepConfig SweepConfig::defaults_for(ProbeFamily family) {
  SweepConfig c;
  c.family = family;
  c.train = TrainConfig::defaults_for(family);
  return c;
}

std::size_t SweepResult::failed_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const SweepRecord& r) { return r.failed; }));
}

namespace {

std::vector<int> gather(std::span<const int> labels, const std::vector<std::size_t>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(labels[i]);
  return out;
}

Matrix<double> gather(const EmbeddingMatrix& x, const std::vector<std::size_t>& idx) {
  Matrix<double> out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(idx[r])).cast<double>();
  }
  return out;
}

void check_alignment(const SweepConfig& config, const EmbeddingMatrix& embeddings,
                     std::span<const int> labels, std::span<const std::vector<int>> controls,
                     const SplitAssignment& split) {
  const auto n = static_cast<std::size_t>(embeddings.rows());
  if (labels.size() != n) {
    throw Error(ErrorCode::AlignmentError, std::to_string(n) + " embedding rows but " +
                                               std::to_string(labels.size()) + " labels");
  }
  if (controls.empty()) throw Error(ErrorCode::AlignmentError, "no control label set");
  for (const auto& c : controls) {
    if (c.size() != n) throw Error(ErrorCode::AlignmentError, "control labels differ in length");
  }
  const auto in_range = [&](int v) { return v >= 0 && v < config.num_classes; };
  if (!std::all_of(labels.begin(), labels.end(), in_range)) {
    throw Error(ErrorCode::AlignmentError, "task label outside 0.." + std::to_string(config.num_classes - 1));
  }
  for (const auto& c : controls) {
    if (!std::all_of(c.begin(), c.end(), in_range)) {
      throw Error(ErrorCode::AlignmentError, "control label out of range");
    }
  }
  if (split.size() != n) throw Error(ErrorCode::AlignmentError, "split does not cover every row");
  std::vector<char> seen(n, 0);
  for (const auto* part : {&split.train, &split.validation, &split.test}) {
    for (std::size_t i : *part) {
      if (i >= n || seen[i]) throw Error(ErrorCode::AlignmentError, "split indices invalid");
      seen[i] = 1;
    }
  }
  if (split.train.empty() || split.test.empty()) {
    throw Error(ErrorCode::AlignmentError, "split needs non-empty train and test parts");
  }
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config, const EmbeddingMatrix& embeddings,
                      std::span<const int> labels,
                      std::span<const std::vector<int>> control_label_sets,
                      const SplitAssignment& split) {
  config.validate();
  check_alignment(config, embeddings, labels, control_label_sets, split);

  std::vector<double> schedule;
  if (config.family == ProbeFamily::Linear) {
    schedule = make_linear_schedule(config.lambda_min, config.lambda_max, config.n_probes);
    if (config.include_zero_lambda) schedule.insert(schedule.begin(), 0.0);
  } else {
    for (int h : make_mlp_schedule(config.hidden_min, config.hidden_max, config.n_probes)) {
      schedule.push_back(h);
    }
  }

  const Matrix<double> x_train = gather(embeddings, split.train);
  const Matrix<double> x_val = gather(embeddings, split.validation);
  const Matrix<double> x_test = gather(embeddings, split.test);
  struct LabelSet {
    std::vector<int> train, val, test;
  };
  std::vector<LabelSet> sets;  // [0] is the task, the rest are controls
  sets.push_back({gather(labels, split.train), gather(labels, split.validation), gather(labels, split.test)});
  for (const auto& c : control_label_sets) {
    sets.push_back({gather(c, split.train), gather(c, split.validation), gather(c, split.test)});
  }

  SweepResult result;
  result.task_id = config.task_id;
  result.model_id = config.model_id;
  result.family = config.family;
  result.num_classes = config.num_classes;
  result.records.resize(schedule.size());

  const auto run_point = [&](std::size_t k) {
    SweepRecord& rec = result.records[k];
    rec.index = k;
    rec.schedule_value = schedule[k];
    ProbeShape shape{config.family, config.num_classes, 0};
    TrainConfig tc = config.train;
    if (config.family == ProbeFamily::Linear) {
      tc.lambda = schedule[k];
    } else {
      shape.hidden = static_cast<Eigen::Index>(schedule[k]);
      tc.lambda = 0.0;
    }
    try {
      std::vector<double> test_acc, val_acc;
      for (std::size_t s = 0; s < sets.size(); ++s) {
        const LabelledRows train{x_train, sets[s].train};
        const LabelledRows val{x_val, sets[s].val};
        const TrainedProbe trained = train_probe(shape, train, val, tc);
        if (s == 0) rec.realized_complexity = trained.complexity;
        test_acc.push_back(evaluate_accuracy(trained.probe, {x_test, sets[s].test}));
        val_acc.push_back(x_val.rows() > 0 ? evaluate_accuracy(trained.probe, val) : 0.0);
      }
      double control = 0.0, control_val = 0.0;
      for (std::size_t s = 1; s < sets.size(); ++s) {
        control += test_acc[s];
        control_val += val_acc[s];
      }
      const auto controls = static_cast<double>(sets.size() - 1);
      rec.aux_accuracy = test_acc[0];
      rec.control_accuracy = control / controls;
      rec.selectivity = rec.aux_accuracy - rec.control_accuracy;
      rec.aux_validation_accuracy = val_acc[0];
      rec.control_validation_accuracy = control_val / controls;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonFiniteLoss) throw;
      rec = SweepRecord{};
      rec.index = k;
      rec.schedule_value = schedule[k];
      rec.failed = true;
    }
  };

  const auto workers = static_cast<std::size_t>(std::min<long long>(config.jobs, static_cast<long long>(schedule.size())));
  if (workers <= 1) {
    for (std::size_t k = 0; k < schedule.size(); ++k) run_point(k);
    return result;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < schedule.size(); k = next++) {
          try {
            run_point(k);
          } catch (...) {
            const std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return result;
}

SweepResult run_sweep(const SweepConfig& config, const EmbeddingMatrix& embeddings,
                      std::span<const int> labels, std::span<const int> control_labels,
                      const SplitAssignment& split) {
  const std::vector<std::vector<int>> sets{std::vector<int>(control_labels.begin(), control_labels.end())};
  return run_sweep(config, embeddings, labels, std::span<const std::vector<int>>(sets), split);
}

std::string format_sweep_jsonl(const SweepResult& result) {
  std::string out;
  for (const SweepRecord& r : result.records) {
    nlohmann::ordered_json j;
    j["index"] = r.index;
    j["lambda_or_hidden"] = r.schedule_value;
    j["realized_complexity"] = r.realized_complexity;
    j["aux_accuracy"] = r.aux_accuracy;
    j["control_accuracy"] = r.control_accuracy;
    j["selectivity"] = r.selectivity;
    j["failed"] = r.failed;
    j["aux_validation_accuracy"] = r.aux_validation_accuracy;
    j["control_validation_accuracy"] = r.control_validation_accuracy;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void write_sweep_jsonl(const std::filesystem::path& path, const SweepResult& result) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << format_sweep_jsonl(result);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::vector<SweepRecord> read_sweep_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<SweepRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      SweepRecord r;
      r.index = j.at("index").get<std::size_t>();
      r.schedule_value = j.at("lambda_or_hidden").get<double>();
      r.realized_complexity = j.at("realized_complexity").get<double>();
      r.aux_accuracy = j.at("aux_accuracy").get<double>();
      r.control_accuracy = j.at("control_accuracy").get<double>();
      r.selectivity = j.at("selectivity").get<double>();
      r.failed = j.at("failed").get<bool>();
      r.aux_validation_accuracy = j.value("aux_validation_accuracy", 0.0);
      r.control_validation_accuracy = j.value("control_validation_accuracy", 0.0);
      out.push_back(r);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedRow, path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace fotag
