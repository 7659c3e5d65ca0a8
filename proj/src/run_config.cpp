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

#include "fotag/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fotag/error.hpp"
#include "fotag/random.hpp"

namespace fotag {
namespace {

namespace pt = boost::property_tree;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

template <typename T>
T parse_value(const pt::ptree& tree, const std::string& key) {
  try {
    return tree.get<T>(key);
  } catch (const pt::ptree_error& e) {
    throw Error(ErrorCode::InvalidConfig, "bad value for '" + key + "': " + e.what());
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorCode::InvalidConfig, "bad boolean for '" + key + "': " + v);
}

}  // namespace

std::string_view to_string(TaskKind task) noexcept {
  switch (task) {
    case TaskKind::Basic: return "basic";
    case TaskKind::Binary: return "binary";
    case TaskKind::Singular: return "singular";
  }
  return "unknown";
}

std::optional<TaskKind> parse_task(std::string_view text) noexcept {
  if (text == "basic") return TaskKind::Basic;
  if (text == "binary") return TaskKind::Binary;
  if (text == "singular") return TaskKind::Singular;
  return std::nullopt;
}

ExtractionMode required_mode(TaskKind task) noexcept {
  switch (task) {
    case TaskKind::Binary: return ExtractionMode::BinarySentenceAvgPenultimate;
    case TaskKind::Singular: return ExtractionMode::SingularLast4Concat;
    case TaskKind::Basic: break;
  }
  return ExtractionMode::SentenceAvgPenultimate;
}

int task_num_classes(TaskKind task) noexcept {
  return task == TaskKind::Binary ? static_cast<int>(kNumBinaryLabels)
                                  : static_cast<int>(kNumFoClasses);
}

void check_task_mode(TaskKind task, ExtractionMode mode) {
  if (required_mode(task) != mode) {
    throw Error(ErrorCode::ModeMismatch, "task '" + std::string(to_string(task)) +
                                             "' needs " + std::string(to_string(required_mode(task))) +
                                             " embeddings, got " + std::string(to_string(mode)));
  }
}

std::uint64_t RunConfig::effective_split_seed() const { return split_seed.value_or(derive_seed(seed, 1)); }
std::uint64_t RunConfig::effective_control_seed() const { return control_seed.value_or(derive_seed(seed, 2)); }
std::uint64_t RunConfig::effective_train_seed() const { return train_seed.value_or(derive_seed(seed, 3)); }

SweepConfig RunConfig::sweep_config(ProbeFamily family) const {
  SweepConfig c = SweepConfig::defaults_for(family);
  c.num_classes = task_num_classes(task);
  c.n_probes = n_probes;
  c.lambda_min = lambda_min;
  c.lambda_max = lambda_max;
  c.include_zero_lambda = include_zero_lambda;
  c.hidden_min = hidden_min;
  c.hidden_max = hidden_max;
  c.train.epochs = epochs;
  c.train.batch_size = batch_size;
  c.train.learning_rate = family == ProbeFamily::Linear ? lr_linear : lr_mlp;
  c.train.seed = effective_train_seed();
  c.jobs = jobs;
  c.task_id = std::string(to_string(task));
  c.model_id = model_id;
  return c;
}

TaggerConfig RunConfig::tagger_config() const {
  TaggerConfig c;
  c.family = tagger_family;
  c.hidden = tagger_hidden;
  c.train.epochs = tagger_epochs;
  c.train.batch_size = batch_size;
  c.train.learning_rate = tagger_lr;
  c.train.lambda = tagger_lambda;
  c.train.seed = effective_train_seed();
  return c;
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  static const std::set<std::string> kKnown = {
      "task", "dataset", "embeddings", "out", "model_id", "families", "n_probes",
      "lambda_min", "lambda_max", "include_zero_lambda", "hidden_min", "hidden_max",
      "epochs", "batch_size", "lr_linear", "lr_mlp", "seed", "split_seed", "control_seed",
      "train_seed", "control_repeats", "ratios", "stratified", "jobs", "tagger_family",
      "tagger_hidden", "tagger_lambda", "tagger_lr", "tagger_epochs"};
  for (const auto& [key, child] : tree) {
    if (!child.empty()) throw Error(ErrorCode::InvalidConfig, "sections are not supported: [" + key + "]");
    if (!kKnown.contains(key)) throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "'");
  }
  const auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };

  RunConfig c;
  if (auto v = tree.get_optional<std::string>("task")) {
    const auto task = parse_task(*v);
    if (!task) throw Error(ErrorCode::InvalidConfig, "unknown task '" + *v + "'");
    c.task = *task;
  }
  if (auto v = tree.get_optional<std::string>("dataset")) c.dataset = resolve(*v);
  if (auto v = tree.get_optional<std::string>("embeddings")) c.embeddings = resolve(*v);
  c.out_dir = resolve(tree.get<std::string>("out", "."));
  c.model_id = tree.get<std::string>("model_id", "");
  if (auto v = tree.get_optional<std::string>("families")) {
    c.families.clear();
    for (const auto& name : split_list(*v)) {
      const auto f = parse_probe_family(name);
      if (!f) throw Error(ErrorCode::InvalidConfig, "unknown probe family '" + name + "'");
      c.families.push_back(*f);
    }
    if (c.families.empty()) throw Error(ErrorCode::InvalidConfig, "families is empty");
  }
  const auto get_int = [&](const char* key, int& dst) {
    if (tree.count(key)) dst = parse_value<int>(tree, key);
  };
  const auto get_double = [&](const char* key, double& dst) {
    if (tree.count(key)) dst = parse_value<double>(tree, key);
  };
  const auto get_bool = [&](const char* key, bool& dst) {
    if (auto v = tree.get_optional<std::string>(key)) dst = parse_bool(key, *v);
  };
  const auto get_seed = [&](const char* key) -> std::optional<std::uint64_t> {
    if (!tree.count(key)) return std::nullopt;
    return parse_value<std::uint64_t>(tree, key);
  };
  get_int("n_probes", c.n_probes);
  get_double("lambda_min", c.lambda_min);
  get_double("lambda_max", c.lambda_max);
  get_bool("include_zero_lambda", c.include_zero_lambda);
  get_int("hidden_min", c.hidden_min);
  get_int("hidden_max", c.hidden_max);
  get_int("epochs", c.epochs);
  get_int("batch_size", c.batch_size);
  get_double("lr_linear", c.lr_linear);
  get_double("lr_mlp", c.lr_mlp);
  if (auto s = get_seed("seed")) c.seed = *s;
  c.split_seed = get_seed("split_seed");
  c.control_seed = get_seed("control_seed");
  c.train_seed = get_seed("train_seed");
  get_int("control_repeats", c.control_repeats);
  if (auto v = tree.get_optional<std::string>("ratios")) {
    const auto parts = split_list(*v);
    if (parts.size() != 3) throw Error(ErrorCode::InvalidConfig, "ratios needs three values");
    for (std::size_t i = 0; i < 3; ++i) {
      try {
        c.ratios[i] = std::stod(parts[i]);
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidConfig, "bad ratio '" + parts[i] + "'");
      }
    }
  }
  get_bool("stratified", c.stratified);
  get_int("jobs", c.jobs);
  if (auto v = tree.get_optional<std::string>("tagger_family")) {
    const auto f = parse_probe_family(*v);
    if (!f) throw Error(ErrorCode::InvalidConfig, "unknown tagger family '" + *v + "'");
    c.tagger_family = *f;
  }
  get_int("tagger_hidden", c.tagger_hidden);
  get_double("tagger_lambda", c.tagger_lambda);
  get_double("tagger_lr", c.tagger_lr);
  get_int("tagger_epochs", c.tagger_epochs);
  if (c.control_repeats < 1) throw Error(ErrorCode::InvalidConfig, "control_repeats must be >= 1");
  if (c.jobs < 1) throw Error(ErrorCode::InvalidConfig, "jobs must be >= 1");
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path.parent_path());
}

}  // namespace fotag
