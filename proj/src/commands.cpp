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

#include "fotag/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fotag/checksum.hpp"
#include "fotag/dataset.hpp"
#include "fotag/embedding_store.hpp"
#include "fotag/error.hpp"
#include "fotag/random.hpp"
#include "fotag/report.hpp"
#include "fotag/run_config.hpp"
#include "fotag/sweep.hpp"
#include "fotag/synthetic.hpp"
#include "fotag/tagger.hpp"

namespace fotag {
namespace {

namespace fs = std::filesystem;

/// Task labels plus the checksum of the TSV they came from.
struct TaskData {
  std::vector<int> labels;
  std::vector<std::string> class_names;
  std::string checksum;
};

TaskData load_task_data(TaskKind task, const fs::path& dataset) {
  TaskData data;
  if (task == TaskKind::Binary) {
    const auto samples = load_binary_dataset(dataset);
    data.labels = binary_indices(samples);
    for (BinaryLabel l : {BinaryLabel::Correct, BinaryLabel::Incorrect}) {
      data.class_names.emplace_back(canonical_name(l));
    }
  } else {
    const auto samples = load_dataset(dataset);
    data.labels = class_indices(samples);
    for (FoClass c : kAllFoClasses) data.class_names.emplace_back(canonical_name(c));
  }
  if (data.labels.empty()) throw Error(ErrorCode::EmptyDataset, dataset.string() + " has no rows");
  data.checksum = sha256_file(dataset);
  return data;
}

/// Reads the embeddings and refuses anything that does not line up with the
/// task or the dataset. Warnings go to err.
EmbeddingFile load_checked_embeddings(const RunConfig& cfg, const TaskData& data, std::ostream& err) {
  if (cfg.embeddings.empty()) throw Error(ErrorCode::InvalidConfig, "config has no embeddings path");
  EmbeddingFile emb = read_embeddings(cfg.embeddings);
  check_task_mode(cfg.task, emb.manifest.extraction_mode);
  const std::optional<std::string> checksum =
      emb.manifest.dataset_checksum.empty() ? std::nullopt : std::optional(data.checksum);
  const AlignmentReport report =
      validate_alignment(emb.manifest, emb.matrix, data.labels.size(), checksum);
  std::string problems;
  for (const Mismatch& m : report.mismatches) {
    if (m.is_warning) {
      err << "warning: " << to_string(m.kind) << ": " << m.detail << '\n';
    } else {
      problems += (problems.empty() ? "" : "; ") + std::string(to_string(m.kind)) + ": " + m.detail;
    }
  }
  if (!report.ok()) throw Error(ErrorCode::AlignmentError, problems);
  return emb;
}

std::string file_stem_for(std::string id) {
  std::replace_if(id.begin(), id.end(), [](char c) { return c == '/' || c == '\\' || c == ' '; }, '_');
  return id.empty() ? "model" : id;
}

void apply_overrides(RunConfig& cfg, std::optional<std::uint64_t> seed, std::optional<int> jobs,
                     const std::optional<std::string>& out) {
  if (seed) cfg.seed = *seed;
  if (jobs) {
    if (*jobs < 1) throw Error(ErrorCode::InvalidConfig, "--jobs must be >= 1");
    cfg.jobs = *jobs;
  }
  if (out) cfg.out_dir = *out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

int cmd_derive_binary(const std::string& in, const std::string& out, std::uint64_t seed) {
  const auto samples = load_dataset(in);
  save_binary_dataset(out, derive_binary(samples, seed));
  return kExitOk;
}

int cmd_sweep(RunConfig cfg, std::ostream& out, std::ostream& err) {
  if (cfg.dataset.empty()) throw Error(ErrorCode::InvalidConfig, "config has no dataset path");
  const TaskData data = load_task_data(cfg.task, cfg.dataset);
  const EmbeddingFile emb = load_checked_embeddings(cfg, data, err);
  if (cfg.model_id.empty()) cfg.model_id = emb.manifest.model_id;
  for (ProbeFamily f : cfg.families) cfg.sweep_config(f).validate();

  const int t = task_num_classes(cfg.task);
  const SplitAssignment parts = split(data.labels, cfg.ratios, cfg.effective_split_seed(), cfg.stratified);
  std::vector<std::vector<int>> controls;
  for (int r = 0; r < cfg.control_repeats; ++r) {
    const std::uint64_t s = r == 0 ? cfg.effective_control_seed()
                                   : derive_seed(cfg.effective_control_seed(), static_cast<std::uint64_t>(r));
    controls.push_back(make_control_labels(data.labels.size(), t, s).labels);
  }

  ensure_dir(cfg.out_dir);
  const std::string stem = file_stem_for(cfg.model_id) + "." + std::string(to_string(cfg.task));
  for (ProbeFamily family : cfg.families) {
    const SweepConfig sc = cfg.sweep_config(family);
    const SweepResult result = run_sweep(sc, emb.matrix, data.labels, controls, parts);
    const std::string base = stem + "." + std::string(to_string(family));
    write_sweep_jsonl(cfg.out_dir / (base + ".sweep.jsonl"), result);
    emit_plot_data(result, cfg.out_dir / (base + ".plot.csv"));

    const ProbeSummary summary = max_selectivity_point(result);
    nlohmann::ordered_json j = summary_to_json(summary);
    j["seed"] = cfg.seed;
    j["split_seed"] = cfg.effective_split_seed();
    j["control_seed"] = cfg.effective_control_seed();
    j["train_seed"] = cfg.effective_train_seed();
    j["control_repeats"] = cfg.control_repeats;
    j["n_probes"] = result.records.size();
    j["ratios"] = cfg.ratios;
    j["dataset_checksum"] = data.checksum;
    const fs::path summary_path = cfg.out_dir / (base + ".summary.json");
    std::ofstream f(summary_path, std::ios::binary | std::ios::trunc);
    if (!(f << j.dump(2) << '\n')) throw Error(ErrorCode::IoError, "cannot write " + summary_path.string());
    out << describe(summary) << '\n';
  }
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& files, const std::string& format, int classes,
               const std::string& out_file, std::ostream& out) {
  std::vector<ProbeSummary> summaries;
  for (const auto& f : files) summaries.push_back(load_summary(f));
  const ReportFormat fmt = format == "csv" ? ReportFormat::Csv : ReportFormat::Markdown;
  const std::string table = render_report(summaries, fmt, classes);
  if (out_file.empty()) {
    out << table;
  } else {
    std::ofstream f(out_file, std::ios::binary | std::ios::trunc);
    if (!(f << table)) throw Error(ErrorCode::IoError, "cannot write " + out_file);
  }
  return kExitOk;
}

int cmd_tag(const std::string& model_path, const std::string& embeddings_path, std::ostream& out) {
  const TaggerModel model = load_tagger(model_path);
  const EmbeddingFile emb = read_embeddings(embeddings_path);
  const std::vector<Prediction> predictions = tag(model, emb);
  char prob[32];
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const Prediction& p = predictions[i];
    std::snprintf(prob, sizeof prob, "%.6f", p.probabilities(p.class_index));
    out << i << '\t' << p.class_name << '\t' << prob << '\n';
  }
  return kExitOk;
}

int cmd_train_tagger(RunConfig cfg, const std::optional<std::string>& from_summary, std::ostream& out,
                     std::ostream& err) {
  if (cfg.dataset.empty()) throw Error(ErrorCode::InvalidConfig, "config has no dataset path");
  if (from_summary) {
    const ProbeSummary s = load_summary(*from_summary);
    if (s.task_id != to_string(cfg.task)) {
      throw Error(ErrorCode::MixedTasks, "summary is for task '" + s.task_id + "'");
    }
    cfg.tagger_family = s.family;
    if (s.family == ProbeFamily::Mlp) {
      cfg.tagger_hidden = static_cast<int>(s.schedule_value_at_max);
      cfg.tagger_lr = cfg.lr_mlp;
    } else {
      cfg.tagger_lambda = s.schedule_value_at_max;
      cfg.tagger_lr = cfg.lr_linear;
    }
  }
  const TaskData data = load_task_data(cfg.task, cfg.dataset);
  const EmbeddingFile emb = load_checked_embeddings(cfg, data, err);
  if (cfg.model_id.empty()) cfg.model_id = emb.manifest.model_id;
  const TaggerConfig tc = cfg.tagger_config();
  tc.train.validate();

  const SplitAssignment parts = split(data.labels, cfg.ratios, cfg.effective_split_seed(), cfg.stratified);
  TaggerModel model = train_tagger(emb, data.labels, data.class_names, parts, tc);
  model.model_id = cfg.model_id;

  ensure_dir(cfg.out_dir);
  const fs::path path =
      cfg.out_dir / (file_stem_for(cfg.model_id) + "." + std::string(to_string(cfg.task)) + ".tagger");
  save_tagger(model, path);
  out << "test accuracy " << format_two_decimals(model.test.accuracy) << " (epoch "
      << model.selected_epoch << ") -> " << path.string() << '\n';
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    out << "  " << model.classes[c] << '\t' << format_two_decimals(model.test.per_class_accuracy[c])
        << '\t' << model.test.per_class_count[c] << '\n';
  }
  return kExitOk;
}

struct SynthOptions {
  std::string out_dir;
  std::string task = "basic";
  std::size_t n = 2760;
  std::size_t d = 64;
  double separation = 6.0;
  double sigma = 1.0;
  std::uint64_t seed = 0;
  std::string model_id = "synthetic";
};

int cmd_synth(const SynthOptions& o, std::ostream& out) {
  const auto task = parse_task(o.task);
  if (!task) throw Error(ErrorCode::InvalidConfig, "unknown task '" + o.task + "'");
  const fs::path dir = o.out_dir;
  ensure_dir(dir);
  const fs::path tsv = dir / (o.model_id + "." + o.task + ".tsv");
  std::vector<int> labels;
  if (*task == TaskKind::Binary) {
    // Half as many base samples; each one yields a Correct and an Incorrect row.
    const auto base = balanced_labels(o.n / 2, static_cast<int>(kNumFoClasses), derive_seed(o.seed, 1));
    const auto derived = derive_binary(synthetic_samples(base), derive_seed(o.seed, 4));
    save_binary_dataset(tsv, derived);
    labels = binary_indices(derived);
  } else {
    labels = balanced_labels(o.n, static_cast<int>(kNumFoClasses), derive_seed(o.seed, 1));
    save_dataset(tsv, synthetic_samples(labels));
  }
  const EmbeddingMatrix x = planted_embeddings(labels, o.d, task_num_classes(*task), o.separation,
                                               o.sigma, derive_seed(o.seed, 5));
  EmbeddingManifest m;
  m.model_id = o.model_id;
  m.extraction_mode = required_mode(*task);
  m.n = static_cast<std::size_t>(x.rows());
  m.d = static_cast<std::size_t>(x.cols());
  m.dataset_checksum = sha256_file(tsv);
  const fs::path emb = dir / (o.model_id + "." + o.task + ".foemb");
  write_embeddings(emb, m, x);
  out << tsv.string() << '\n' << emb.string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Foundational-ontology probing and tagging", "fotag"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> out_dir;

  auto* derive = app.add_subcommand("derive-binary", "Duplicate each sample into Correct/Incorrect rows");
  std::string derive_in, derive_out;
  std::uint64_t derive_seed_value = 0;
  derive->add_option("--in", derive_in, "Input dataset TSV")->required();
  derive->add_option("--out", derive_out, "Output binary TSV")->required();
  derive->add_option("--seed", derive_seed_value, "Seed for the wrong-candidate draw");

  auto* sweep = app.add_subcommand("sweep", "Run complexity sweeps described by a config file");
  sweep->add_option("--config", config, "Run config")->required();
  sweep->add_option("--seed", seed, "Override the base seed");
  sweep->add_option("--jobs", jobs, "Concurrent probe trainings");
  sweep->add_option("--out", out_dir, "Override the output directory");

  auto* report = app.add_subcommand("report", "Aggregate sweep summaries into a results table");
  std::vector<std::string> report_files;
  std::string report_format = "md";
  std::string report_out;
  int report_classes = 6;
  report->add_option("summaries", report_files, "Summary JSON files");
  report->add_option("--format", report_format, "md or csv")->check(CLI::IsMember({"md", "csv"}));
  report->add_option("--classes", report_classes, "Class count for the baseline of an empty table");
  report->add_option("--out", report_out, "Write the table here instead of stdout");

  auto* tag_cmd = app.add_subcommand("tag", "Predict an FO class for each embedding row");
  std::string tag_model, tag_embeddings;
  tag_cmd->add_option("--model", tag_model, "Tagger model file")->required();
  tag_cmd->add_option("--embeddings", tag_embeddings, "FOEMB1 file")->required();

  auto* train = app.add_subcommand("train-tagger", "Train a frozen-feature tagger");
  std::optional<std::string> from_summary;
  train->add_option("--config", config, "Run config")->required();
  train->add_option("--from-summary", from_summary, "Take family and complexity from a sweep summary");
  train->add_option("--seed", seed, "Override the base seed");
  train->add_option("--out", out_dir, "Override the output directory");

  auto* synth = app.add_subcommand("synth", "Write a planted-signal dataset and embeddings");
  SynthOptions so;
  synth->add_option("--out", so.out_dir, "Output directory")->required();
  synth->add_option("--task", so.task, "basic, binary or singular");
  synth->add_option("--n", so.n, "Rows");
  synth->add_option("--d", so.d, "Embedding dimension");
  synth->add_option("--separation", so.separation, "Distance between class means in units of sigma");
  synth->add_option("--sigma", so.sigma, "Noise standard deviation");
  synth->add_option("--seed", so.seed, "Seed");
  synth->add_option("--model-id", so.model_id, "Model id written to the manifest");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (derive->parsed()) return cmd_derive_binary(derive_in, derive_out, derive_seed_value);
    if (sweep->parsed() || train->parsed()) {
      RunConfig cfg = load_run_config(config);
      apply_overrides(cfg, seed, jobs, out_dir);
      return sweep->parsed() ? cmd_sweep(std::move(cfg), out, err)
                             : cmd_train_tagger(std::move(cfg), from_summary, out, err);
    }
    if (report->parsed()) return cmd_report(report_files, report_format, report_classes, report_out, out);
    if (tag_cmd->parsed()) return cmd_tag(tag_model, tag_embeddings, out);
    if (synth->parsed()) return cmd_synth(so, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_io() ? kExitIo : kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace fotag
