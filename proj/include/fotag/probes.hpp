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

#ifndef FOTAG_PROBES_HPP
#define FOTAG_PROBES_HPP

#include <cmath>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "fotag/error.hpp"
#include "fotag/linalg.hpp"

namespace fotag {

/// y = softmax(W x + b) with W of shape T x d.
template <typename Scalar>
struct LinearProbe {
  Matrix<Scalar> weight;
  Vector<Scalar> bias;

  LinearProbe() = default;
  LinearProbe(Eigen::Index num_classes, Eigen::Index input_dim)
      : weight(Matrix<Scalar>::Zero(num_classes, input_dim)), bias(Vector<Scalar>::Zero(num_classes)) {}

  [[nodiscard]] Eigen::Index num_classes() const { return weight.rows(); }
  [[nodiscard]] Eigen::Index input_dim() const { return weight.cols(); }
};

/// One rectified hidden layer: softmax(W2 relu(W1 x + b1) + b2).
template <typename Scalar>
struct MlpProbe {
  Matrix<Scalar> hidden_weight;  // h x d
  Vector<Scalar> hidden_bias;    // h
  Matrix<Scalar> output_weight;  // T x h
  Vector<Scalar> output_bias;    // T

  MlpProbe() = default;
  MlpProbe(Eigen::Index num_classes, Eigen::Index input_dim, Eigen::Index hidden)
      : hidden_weight(Matrix<Scalar>::Zero(hidden, input_dim)),
        hidden_bias(Vector<Scalar>::Zero(hidden)),
        output_weight(Matrix<Scalar>::Zero(num_classes, hidden)),
        output_bias(Vector<Scalar>::Zero(num_classes)) {}

  [[nodiscard]] Eigen::Index num_classes() const { return output_weight.rows(); }
  [[nodiscard]] Eigen::Index input_dim() const { return hidden_weight.cols(); }
  [[nodiscard]] Eigen::Index hidden_size() const { return hidden_weight.rows(); }
};

template <typename Scalar>
bool all_finite(const LinearProbe<Scalar>& p) {
  return p.weight.allFinite() && p.bias.allFinite();
}

template <typename Scalar>
bool all_finite(const MlpProbe<Scalar>& p) {
  return p.hidden_weight.allFinite() && p.hidden_bias.allFinite() && p.output_weight.allFinite() &&
         p.output_bias.allFinite();
}

namespace detail {
inline void check_input_dim(Eigen::Index expected, Eigen::Index got) {
  if (expected != got) {
    throw Error(ErrorCode::DimensionMismatch,
                "input has dimension " + std::to_string(got) + ", probe expects " +
                    std::to_string(expected));
  }
}
}  // namespace detail

// --- forward ----------------------------------------------------------------

/// Batch logits; x holds one sample per row.
template <typename Scalar, typename Derived>
Matrix<Scalar> logits(const LinearProbe<Scalar>& p, const Eigen::MatrixBase<Derived>& x) {
  detail::check_input_dim(p.input_dim(), x.cols());
  Matrix<Scalar> z = x * p.weight.transpose();
  z.rowwise() += p.bias.transpose();
  return z;
}

template <typename Scalar, typename Derived>
Matrix<Scalar> hidden_activations(const MlpProbe<Scalar>& p, const Eigen::MatrixBase<Derived>& x) {
  detail::check_input_dim(p.input_dim(), x.cols());
  Matrix<Scalar> h = x * p.hidden_weight.transpose();
  h.rowwise() += p.hidden_bias.transpose();
  return h.cwiseMax(Scalar(0));
}

template <typename Scalar, typename Derived>
Matrix<Scalar> logits(const MlpProbe<Scalar>& p, const Eigen::MatrixBase<Derived>& x) {
  Matrix<Scalar> z = hidden_activations(p, x) * p.output_weight.transpose();
  z.rowwise() += p.output_bias.transpose();
  return z;
}

template <typename Probe, typename Derived>
auto predict_proba(const Probe& p, const Eigen::MatrixBase<Derived>& x) {
  return softmax_rows(logits(p, x));
}

/// Class probabilities for a single input vector.
template <typename Scalar, typename Derived>
Vector<Scalar> linear_forward(const LinearProbe<Scalar>& p, const Eigen::MatrixBase<Derived>& x) {
  detail::check_input_dim(p.input_dim(), x.size());
  return softmax(Vector<Scalar>(p.weight * x + p.bias));
}

template <typename Scalar, typename Derived>
Vector<Scalar> mlp_forward(const MlpProbe<Scalar>& p, const Eigen::MatrixBase<Derived>& x) {
  detail::check_input_dim(p.input_dim(), x.size());
  const Vector<Scalar> h = (p.hidden_weight * x + p.hidden_bias).cwiseMax(Scalar(0));
  return softmax(Vector<Scalar>(p.output_weight * h + p.output_bias));
}

// --- losses and gradients ---------------------------------------------------

/// Mean floored cross-entropy of row-wise probabilities against labels.
template <typename Derived>
double mean_cross_entropy(const Eigen::MatrixBase<Derived>& proba, std::span<const int> labels) {
  if (static_cast<std::size_t>(proba.rows()) != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "probabilities and labels differ in length");
  }
  if (labels.empty()) throw Error(ErrorCode::InvalidConfig, "empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int t = labels[i];
    if (t < 0 || t >= proba.cols()) throw Error(ErrorCode::InvalidDistribution, "label out of range");
    const double p = static_cast<double>(proba(static_cast<Eigen::Index>(i), t));
    total -= std::log(std::max(p, kProbabilityFloor));
  }
  return total / static_cast<double>(labels.size());
}

/// dL/dlogits for the mean cross-entropy: (P - onehot(labels)) / batch.
template <typename Scalar>
Matrix<Scalar> logit_gradient(Matrix<Scalar> proba, std::span<const int> labels) {
  for (std::size_t i = 0; i < labels.size(); ++i) proba(static_cast<Eigen::Index>(i), labels[i]) -= Scalar(1);
  return proba / static_cast<Scalar>(labels.size());
}

/// Data loss and its gradient, stored with the same layout as the probe.
template <typename Probe>
struct LossGradient {
  double loss = 0.0;
  Probe gradient;
};

template <typename Scalar, typename Derived>
LossGradient<LinearProbe<Scalar>> data_loss_gradient(const LinearProbe<Scalar>& p,
                                                     const Eigen::MatrixBase<Derived>& x,
                                                     std::span<const int> labels) {
  const Matrix<Scalar> proba = predict_proba(p, x);
  LossGradient<LinearProbe<Scalar>> out;
  out.loss = mean_cross_entropy(proba, labels);
  const Matrix<Scalar> g = logit_gradient(proba, labels);
  out.gradient.weight = g.transpose() * x;
  out.gradient.bias = g.colwise().sum().transpose();
  return out;
}

template <typename Scalar, typename Derived>
LossGradient<MlpProbe<Scalar>> data_loss_gradient(const MlpProbe<Scalar>& p,
                                                  const Eigen::MatrixBase<Derived>& x,
                                                  std::span<const int> labels) {
  const Matrix<Scalar> h = hidden_activations(p, x);
  Matrix<Scalar> z = h * p.output_weight.transpose();
  z.rowwise() += p.output_bias.transpose();
  const Matrix<Scalar> proba = softmax_rows(z);
  LossGradient<MlpProbe<Scalar>> out;
  out.loss = mean_cross_entropy(proba, labels);
  const Matrix<Scalar> g = logit_gradient(proba, labels);
  out.gradient.output_weight = g.transpose() * h;
  out.gradient.output_bias = g.colwise().sum().transpose();
  // relu'(a) is taken as 0 at a == 0, matching h == 0.
  const Matrix<Scalar> gh = ((g * p.output_weight).array() * (h.array() > Scalar(0)).template cast<Scalar>()).matrix();
  out.gradient.hidden_weight = gh.transpose() * x;
  out.gradient.hidden_bias = gh.colwise().sum().transpose();
  return out;
}

/// Mean cross-entropy over the batch plus lambda times the nuclear norm of W.
template <typename Scalar, typename Derived>
double total_loss_linear(const LinearProbe<Scalar>& p, const Eigen::MatrixBase<Derived>& x,
                         std::span<const int> labels, double lambda) {
  const double data = mean_cross_entropy(predict_proba(p, x), labels);
  if (lambda == 0.0) return data;
  return data + lambda * static_cast<double>(nuclear_norm(p.weight));
}

}  // namespace fotag

#endif  // FOTAG_PROBES_HPP
