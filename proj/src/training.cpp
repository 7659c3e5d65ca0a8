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

#include "fotag/training.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/SVD>

#include "fotag/error.hpp"
#include "fotag/random.hpp"

namespace fotag {
namespace {

template <typename Derived>
void fill_uniform(Eigen::MatrixBase<Derived>& m, double bound, Rng& rng) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform(-bound, bound);
  }
}

void sgd_step(LinearProbe<double>& p, const LinearProbe<double>& g, double lr) {
  p.weight -= lr * g.weight;
  p.bias -= lr * g.bias;
}

void sgd_step(MlpProbe<double>& p, const MlpProbe<double>& g, double lr) {
  p.hidden_weight -= lr * g.hidden_weight;
  p.hidden_bias -= lr * g.hidden_bias;
  p.output_weight -= lr * g.output_weight;
  p.output_bias -= lr * g.output_bias;
}

/// Adds lambda * ||W||_* to the loss and lambda * U V^T to the gradient, from
/// one SVD.
void add_nuclear_penalty(const LinearProbe<double>& p, double lambda,
                         LossGradient<LinearProbe<double>>& lg) {
  if (lambda == 0.0) return;
  if (!p.weight.allFinite()) return;  // the caller reports divergence
  const Eigen::JacobiSVD<Matrix<double>> svd(p.weight, Eigen::ComputeThinU | Eigen::ComputeThinV);
  lg.loss += lambda * svd.singularValues().sum();
  lg.gradient.weight += lambda * (svd.matrixU() * svd.matrixV().transpose());
}

void add_nuclear_penalty(const MlpProbe<double>&, double, LossGradient<MlpProbe<double>>&) {}

void check_rows(const LabelledRows& rows, Eigen::Index input_dim, const char* what) {
  if (static_cast<std::size_t>(rows.x.rows()) != rows.labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": " +
                                                  std::to_string(rows.x.rows()) + " rows but " +
                                                  std::to_string(rows.labels.size()) + " labels");
  }
  if (rows.x.rows() > 0 && rows.x.cols() != input_dim) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": dimension " +
                                                  std::to_string(rows.x.cols()) + ", expected " +
                                                  std::to_string(input_dim));
  }
}

template <typename Probe>
TrainedProbe run_training(Probe probe, const LabelledRows& train, const LabelledRows& validation,
                          const TrainConfig& config, Rng& rng) {
  TrainedProbe out;
  out.lambda = config.lambda;
  out.seed = config.seed;

  const auto n = static_cast<std::size_t>(train.x.rows());
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::vector<int> batch_labels;
  const bool track_best = config.checkpoint == CheckpointRule::MinValidationLoss &&
                          validation.x.rows() > 0;
  Probe best = probe;
  double best_loss = std::numeric_limits<double>::infinity();

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop = std::min(n, start + static_cast<std::size_t>(config.batch_size));
      const std::vector<Eigen::Index> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                           order.begin() + static_cast<std::ptrdiff_t>(stop));
      const Matrix<double> xb = train.x(rows, Eigen::all);
      batch_labels.clear();
      for (Eigen::Index r : rows) batch_labels.push_back(train.labels[static_cast<std::size_t>(r)]);

      auto lg = data_loss_gradient(probe, xb, std::span<const int>(batch_labels));
      add_nuclear_penalty(probe, config.lambda, lg);
      if (!std::isfinite(lg.loss)) {
        throw Error(ErrorCode::NonFiniteLoss,
                    "loss diverged at epoch " + std::to_string(epoch) + ", batch starting at " +
                        std::to_string(start) + " (learning rate " +
                        std::to_string(config.learning_rate) + ")");
      }
      sgd_step(probe, lg.gradient, config.learning_rate);
      if (!all_finite(probe)) {
        throw Error(ErrorCode::NonFiniteLoss,
                    "parameters became non-finite at epoch " + std::to_string(epoch));
      }
      epoch_loss += lg.loss * static_cast<double>(stop - start);
    }
    out.train_losses.push_back(n > 0 ? epoch_loss / static_cast<double>(n) : 0.0);

    if (validation.x.rows() > 0) {
      const AnyProbe view{probe};
      const double vloss = validation_loss(view, validation);
      out.validation_losses.push_back(vloss);
      out.validation_accuracies.push_back(evaluate_accuracy(view, validation));
      if (track_best && vloss < best_loss) {
        best_loss = vloss;
        best = probe;
        out.selected_epoch = epoch;
      }
    }
  }
  if (track_best) {
    out.probe = std::move(best);
  } else {
    out.probe = std::move(probe);
    out.selected_epoch = config.epochs;
  }
  return out;
}

}  // namespace

std::string_view to_string(ProbeFamily family) noexcept {
  return family == ProbeFamily::Linear ? "linear" : "mlp";
}

std::optional<ProbeFamily> parse_probe_family(std::string_view text) noexcept {
  if (text == "linear") return ProbeFamily::Linear;
  if (text == "mlp") return ProbeFamily::Mlp;
  return std::nullopt;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw Error(ErrorCode::InvalidConfig, "epochs must be >= 1");
  if (batch_size < 1) throw Error(ErrorCode::InvalidConfig, "batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::InvalidConfig, "learning_rate must be positive");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidConfig, "lambda must be non-negative");
  }
}

TrainConfig TrainConfig::defaults_for(ProbeFamily /*family*/) {
  // At 1e-3 an MLP gets too few plain GD steps in 25 epochs to fit even well
  // separated classes, so both families share 1e-2.
  TrainConfig c;
  c.learning_rate = 1e-2;
  return c;
}

ProbeFamily family_of(const AnyProbe& probe) noexcept {
  return std::holds_alternative<LinearProbe<double>>(probe) ? ProbeFamily::Linear : ProbeFamily::Mlp;
}

Eigen::Index input_dim(const AnyProbe& probe) {
  return std::visit([](const auto& p) { return p.input_dim(); }, probe);
}

Eigen::Index num_classes(const AnyProbe& probe) {
  return std::visit([](const auto& p) { return p.num_classes(); }, probe);
}

AnyProbe initialize_probe(const ProbeShape& shape, Eigen::Index input_dim, std::uint64_t seed) {
  if (shape.num_classes < 2) throw Error(ErrorCode::InvalidConfig, "probe needs at least 2 classes");
  if (input_dim < 1) throw Error(ErrorCode::InvalidConfig, "input dimension must be >= 1");
  Rng rng(derive_seed(seed, 0));
  if (shape.family == ProbeFamily::Linear) {
    LinearProbe<double> p(shape.num_classes, input_dim);
    const double bound = 1.0 / std::sqrt(static_cast<double>(input_dim));
    fill_uniform(p.weight, bound, rng);
    fill_uniform(p.bias, bound, rng);
    return p;
  }
  if (shape.hidden < 1) throw Error(ErrorCode::InvalidConfig, "MLP hidden size must be >= 1");
  MlpProbe<double> p(shape.num_classes, input_dim, shape.hidden);
  const double b1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  const double b2 = 1.0 / std::sqrt(static_cast<double>(shape.hidden));
  fill_uniform(p.hidden_weight, b1, rng);
  fill_uniform(p.hidden_bias, b1, rng);
  fill_uniform(p.output_weight, b2, rng);
  fill_uniform(p.output_bias, b2, rng);
  return p;
}

TrainedProbe train_probe(const ProbeShape& shape, const LabelledRows& train,
                         const LabelledRows& validation, const TrainConfig& config) {
  config.validate();
  if (train.x.rows() == 0) throw Error(ErrorCode::InvalidConfig, "empty training set");
  const Eigen::Index d = train.x.cols();
  check_rows(train, d, "train");
  check_rows(validation, d, "validation");
  for (int label : train.labels) {
    if (label < 0 || label >= shape.num_classes) {
      throw Error(ErrorCode::InvalidConfig, "training label " + std::to_string(label) +
                                                " outside 0.." +
                                                std::to_string(shape.num_classes - 1));
    }
  }
  AnyProbe init = initialize_probe(shape, d, config.seed);
  Rng rng(derive_seed(config.seed, 1));
  TrainedProbe out = std::visit(
      [&](auto& p) { return run_training(std::move(p), train, validation, config, rng); }, init);
  if (shape.family == ProbeFamily::Linear) {
    out.complexity = nuclear_norm(std::get<LinearProbe<double>>(out.probe).weight);
  } else {
    out.complexity = static_cast<double>(shape.hidden);
  }
  return out;
}

Matrix<double> predict_proba(const AnyProbe& probe, const Eigen::Ref<const Matrix<double>>& x) {
  return std::visit([&](const auto& p) -> Matrix<double> { return fotag::predict_proba<std::decay_t<decltype(p)>>(p, x); }, probe);
}

std::vector<int> predict(const AnyProbe& probe, const Eigen::Ref<const Matrix<double>>& x) {
  const Matrix<double> z = std::visit([&](const auto& p) -> Matrix<double> { return logits(p, x); }, probe);
  std::vector<int> out(static_cast<std::size_t>(z.rows()));
  for (Eigen::Index i = 0; i < z.rows(); ++i) out[static_cast<std::size_t>(i)] = argmax(z.row(i));
  return out;
}

double evaluate_accuracy(const AnyProbe& probe, const LabelledRows& rows) {
  check_rows(rows, input_dim(probe), "evaluation");
  if (rows.labels.empty()) return 0.0;
  const std::vector<int> predicted = predict(probe, rows.x);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == rows.labels[i];
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

double validation_loss(const AnyProbe& probe, const LabelledRows& rows) {
  check_rows(rows, input_dim(probe), "validation");
  return mean_cross_entropy(predict_proba(probe, rows.x), rows.labels);
}

std::size_t parameter_count(const ProbeShape& shape, Eigen::Index input_dim) {
  const auto t = static_cast<std::size_t>(shape.num_classes);
  const auto d = static_cast<std::size_t>(input_dim);
  if (shape.family == ProbeFamily::Linear) return t * d + t;
  const auto h = static_cast<std::size_t>(shape.hidden);
  return h * d + h + t * h + t;
}

namespace {

template <typename Derived>
void append_row_major(std::vector<float>& out, const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(static_cast<float>(m(i, j)));
  }
}

template <typename Derived>
void take_row_major(std::span<const float>& in, Eigen::MatrixBase<Derived>& m) {
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = static_cast<double>(in[k++]);
  }
  in = in.subspan(k);
}

}  // namespace

std::vector<float> flatten_parameters(const AnyProbe& probe) {
  std::vector<float> out;
  if (const auto* lin = std::get_if<LinearProbe<double>>(&probe)) {
    append_row_major(out, lin->weight);
    append_row_major(out, lin->bias);
  } else {
    const auto& mlp = std::get<MlpProbe<double>>(probe);
    append_row_major(out, mlp.hidden_weight);
    append_row_major(out, mlp.hidden_bias);
    append_row_major(out, mlp.output_weight);
    append_row_major(out, mlp.output_bias);
  }
  return out;
}

AnyProbe unflatten_parameters(const ProbeShape& shape, Eigen::Index input_dim,
                              std::span<const float> values) {
  if (values.size() != parameter_count(shape, input_dim)) {
    throw Error(ErrorCode::CorruptModel, "parameter payload has " + std::to_string(values.size()) +
                                             " values, shape needs " +
                                             std::to_string(parameter_count(shape, input_dim)));
  }
  if (shape.family == ProbeFamily::Linear) {
    LinearProbe<double> p(shape.num_classes, input_dim);
    take_row_major(values, p.weight);
    take_row_major(values, p.bias);
    return p;
  }
  MlpProbe<double> p(shape.num_classes, input_dim, shape.hidden);
  take_row_major(values, p.hidden_weight);
  take_row_major(values, p.hidden_bias);
  take_row_major(values, p.output_weight);
  take_row_major(values, p.output_bias);
  return p;
}

void round_to_float(AnyProbe& probe) {
  const auto round = [](auto& m) { m = m.template cast<float>().template cast<double>(); };
  std::visit(
      [&](auto& p) {
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, LinearProbe<double>>) {
          round(p.weight);
          round(p.bias);
        } else {
          round(p.hidden_weight);
          round(p.hidden_bias);
          round(p.output_weight);
          round(p.output_bias);
        }
      },
      probe);
}

}  // namespace fotag
