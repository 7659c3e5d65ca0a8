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

#include "fotag/tagger.hpp"

#include <algorithm>

#include "fotag/container.hpp"
#include "fotag/error.hpp"

namespace fotag {
namespace {

Matrix<double> gather_rows(const EmbeddingMatrix& x, const std::vector<std::size_t>& idx) {
  Matrix<double> out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(idx[r])).cast<double>();
  }
  return out;
}

std::vector<int> gather_labels(std::span<const int> labels, const std::vector<std::size_t>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(labels[i]);
  return out;
}

Vector<double> row_probabilities(const AnyProbe& probe, const Vector<double>& x) {
  return std::visit(
      [&](const auto& p) -> Vector<double> {
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, LinearProbe<double>>) {
          return linear_forward(p, x);
        } else {
          return mlp_forward(p, x);
        }
      },
      probe);
}

}  // namespace

ClassEvaluation evaluate_classwise(const AnyProbe& probe, const LabelledRows& rows) {
  const auto t = static_cast<std::size_t>(num_classes(probe));
  ClassEvaluation out;
  out.per_class_accuracy.assign(t, 0.0);
  out.per_class_count.assign(t, 0);
  if (rows.labels.empty()) return out;
  const std::vector<int> predicted = predict(probe, rows.x);
  std::vector<std::size_t> correct(t, 0);
  std::size_t total_correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const auto label = static_cast<std::size_t>(rows.labels[i]);
    if (label >= t) throw Error(ErrorCode::DimensionMismatch, "label outside the model's classes");
    ++out.per_class_count[label];
    if (predicted[i] == rows.labels[i]) {
      ++correct[label];
      ++total_correct;
    }
  }
  for (std::size_t c = 0; c < t; ++c) {
    if (out.per_class_count[c] > 0) {
      out.per_class_accuracy[c] =
          static_cast<double>(correct[c]) / static_cast<double>(out.per_class_count[c]);
    }
  }
  out.accuracy = static_cast<double>(total_correct) / static_cast<double>(predicted.size());
  return out;
}

TaggerModel train_tagger(const EmbeddingFile& embeddings, std::span<const int> labels,
                         std::vector<std::string> class_names, const SplitAssignment& split,
                         const TaggerConfig& config) {
  const EmbeddingMatrix& x = embeddings.matrix;
  if (static_cast<std::size_t>(x.rows()) != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(x.rows()) + " embedding rows but " +
                                                  std::to_string(labels.size()) + " labels");
  }
  if (split.size() != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "split does not cover the dataset");
  }
  const ProbeShape shape{config.family, static_cast<Eigen::Index>(class_names.size()),
                         config.family == ProbeFamily::Mlp ? config.hidden : 0};
  TrainConfig tc = config.train;
  tc.checkpoint = CheckpointRule::MinValidationLoss;
  if (config.family == ProbeFamily::Mlp) tc.lambda = 0.0;

  const Matrix<double> x_train = gather_rows(x, split.train);
  const Matrix<double> x_val = gather_rows(x, split.validation);
  const Matrix<double> x_test = gather_rows(x, split.test);
  const std::vector<int> y_train = gather_labels(labels, split.train);
  const std::vector<int> y_val = gather_labels(labels, split.validation);
  const std::vector<int> y_test = gather_labels(labels, split.test);

  TrainedProbe trained = train_probe(shape, {x_train, y_train}, {x_val, y_val}, tc);
  round_to_float(trained.probe);

  TaggerModel model;
  model.probe = std::move(trained.probe);
  model.mode = embeddings.manifest.extraction_mode;
  model.embedding_dim = static_cast<std::size_t>(x.cols());
  model.classes = std::move(class_names);
  model.model_id = embeddings.manifest.model_id;
  model.seed = tc.seed;
  model.split_seed = split.seed;
  model.ratios = split.ratios;
  model.epochs = tc.epochs;
  model.batch_size = tc.batch_size;
  model.learning_rate = tc.learning_rate;
  model.lambda = tc.lambda;
  model.selected_epoch = trained.selected_epoch;
  model.validation_losses = std::move(trained.validation_losses);
  model.test = evaluate_classwise(model.probe, {x_test, y_test});
  return model;
}

TaggerModel train_tagger(const EmbeddingFile& embeddings, std::span<const Sample> samples,
                         const SplitAssignment& split, const TaggerConfig& config) {
  std::vector<std::string> names;
  for (FoClass c : kAllFoClasses) names.emplace_back(canonical_name(c));
  const std::vector<int> labels = class_indices(samples);
  return train_tagger(embeddings, labels, std::move(names), split, config);
}

Prediction tag_row(const TaggerModel& model, const Eigen::Ref<const Vector<float>>& row) {
  if (static_cast<std::size_t>(row.size()) != model.embedding_dim) {
    throw Error(ErrorCode::DimensionMismatch, "row has dimension " + std::to_string(row.size()) +
                                                  ", model expects " +
                                                  std::to_string(model.embedding_dim));
  }
  Prediction p;
  p.probabilities = row_probabilities(model.probe, row.cast<double>());
  p.class_index = argmax(p.probabilities);
  p.class_name = model.classes.at(static_cast<std::size_t>(p.class_index));
  return p;
}

std::vector<Prediction> tag(const TaggerModel& model, const EmbeddingMatrix& rows) {
  if (rows.rows() > 0 && static_cast<std::size_t>(rows.cols()) != model.embedding_dim) {
    throw Error(ErrorCode::DimensionMismatch, "embeddings have dimension " +
                                                  std::to_string(rows.cols()) + ", model expects " +
                                                  std::to_string(model.embedding_dim));
  }
  std::vector<Prediction> out;
  out.reserve(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    out.push_back(tag_row(model, rows.row(i).transpose()));
  }
  return out;
}

std::vector<Prediction> tag(const TaggerModel& model, const EmbeddingFile& embeddings) {
  if (embeddings.manifest.extraction_mode != model.mode) {
    throw Error(ErrorCode::ModeMismatch,
                "embeddings use " + std::string(to_string(embeddings.manifest.extraction_mode)) +
                    ", model was trained on " + std::string(to_string(model.mode)));
  }
  return tag(model, embeddings.matrix);
}

void save_tagger(const TaggerModel& model, const std::filesystem::path& path) {
  const ProbeFamily family = family_of(model.probe);
  const Eigen::Index hidden =
      family == ProbeFamily::Mlp ? std::get<MlpProbe<double>>(model.probe).hidden_size() : 0;
  nlohmann::ordered_json training;
  training["seed"] = model.seed;
  training["split_seed"] = model.split_seed;
  training["ratios"] = model.ratios;
  training["epochs"] = model.epochs;
  training["batch_size"] = model.batch_size;
  training["learning_rate"] = model.learning_rate;
  training["lambda"] = model.lambda;
  training["selected_epoch"] = model.selected_epoch;
  training["validation_losses"] = model.validation_losses;
  training["test_accuracy"] = model.test.accuracy;
  training["per_class_accuracy"] = model.test.per_class_accuracy;
  training["per_class_count"] = model.test.per_class_count;

  nlohmann::ordered_json header;
  header["format_version"] = kTaggerFormatVersion;
  header["family"] = to_string(family);
  header["num_classes"] = model.classes.size();
  header["embedding_dim"] = model.embedding_dim;
  header["hidden"] = hidden;
  header["extraction_mode"] = to_string(model.mode);
  header["classes"] = model.classes;
  header["model_id"] = model.model_id;
  header["training"] = training;
  write_container(path, kTaggerMagic, header.dump(),
                  flatten_parameters(model.probe));
}

TaggerModel load_tagger(const std::filesystem::path& path) {
  RawContainer raw;
  try {
    raw = read_container(path, kTaggerMagic);
  } catch (const Error& e) {
    if (e.is_io()) throw;
    throw Error(ErrorCode::CorruptModel, e.what());
  }
  TaggerModel model;
  ProbeShape shape;
  try {
    const auto& h = raw.header;
    const int version = h.at("format_version").get<int>();
    if (version != kTaggerFormatVersion) {
      throw Error(ErrorCode::VersionMismatch, "tagger format version " + std::to_string(version) +
                                                  ", expected " +
                                                  std::to_string(kTaggerFormatVersion));
    }
    const auto family = parse_probe_family(h.at("family").get<std::string>());
    if (!family) throw Error(ErrorCode::CorruptModel, "unknown probe family");
    const auto mode = parse_extraction_mode(h.at("extraction_mode").get<std::string>());
    if (!mode) throw Error(ErrorCode::CorruptModel, "unknown extraction mode");
    shape.family = *family;
    shape.num_classes = h.at("num_classes").get<Eigen::Index>();
    shape.hidden = h.at("hidden").get<Eigen::Index>();
    model.mode = *mode;
    model.embedding_dim = h.at("embedding_dim").get<std::size_t>();
    model.classes = h.at("classes").get<std::vector<std::string>>();
    model.model_id = h.value("model_id", std::string{});
    const auto& t = h.at("training");
    model.seed = t.at("seed").get<std::uint64_t>();
    model.split_seed = t.at("split_seed").get<std::uint64_t>();
    model.ratios = t.at("ratios").get<Ratios>();
    model.epochs = t.at("epochs").get<int>();
    model.batch_size = t.at("batch_size").get<int>();
    model.learning_rate = t.at("learning_rate").get<double>();
    model.lambda = t.at("lambda").get<double>();
    model.selected_epoch = t.at("selected_epoch").get<int>();
    model.validation_losses = t.at("validation_losses").get<std::vector<double>>();
    model.test.accuracy = t.at("test_accuracy").get<double>();
    model.test.per_class_accuracy = t.at("per_class_accuracy").get<std::vector<double>>();
    model.test.per_class_count = t.at("per_class_count").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptModel, e.what());
  }
  if (model.classes.size() != static_cast<std::size_t>(shape.num_classes) || shape.num_classes < 2) {
    throw Error(ErrorCode::CorruptModel, "class list does not match num_classes");
  }
  if (shape.family == ProbeFamily::Mlp && shape.hidden < 1) {
    throw Error(ErrorCode::CorruptModel, "MLP tagger without hidden units");
  }
  const auto d = static_cast<Eigen::Index>(model.embedding_dim);
  const std::size_t expected = parameter_count(shape, d) * 4;
  if (raw.payload.size() != expected) {
    throw Error(ErrorCode::CorruptModel, "payload has " + std::to_string(raw.payload.size()) +
                                             " bytes, manifest implies " + std::to_string(expected));
  }
  model.probe = unflatten_parameters(shape, d, decode_f32(raw.payload));
  const bool finite = std::visit([](const auto& p) { return all_finite(p); }, model.probe);
  if (!finite) throw Error(ErrorCode::CorruptModel, "parameters contain NaN/Inf");
  return model;
}

}  // namespace fotag
