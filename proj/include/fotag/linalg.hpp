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

#ifndef FOTAG_LINALG_HPP
#define FOTAG_LINALG_HPP

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "fotag/error.hpp"

namespace fotag {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

inline constexpr double kProbabilityFloor = 1e-12;

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorCode::NonFiniteInput, std::string(what) + " has NaN/Inf");
}

/// Sum of singular values, the convex surrogate of rank used as the linear
/// probe complexity.
template <typename Derived>
typename Derived::RealScalar nuclear_norm(const Eigen::MatrixBase<Derived>& w) {
  using Real = typename Derived::RealScalar;
  require_finite(w, "nuclear_norm input");
  if (w.size() == 0) return Real(0);
  const Eigen::JacobiSVD<Matrix<typename Derived::Scalar>> svd(w.eval());
  return svd.singularValues().sum();
}

/// U * V^T from the thin SVD of w. This is the gradient of the nuclear norm
/// wherever w has full rank and distinct singular values, and a valid
/// subgradient elsewhere.
template <typename Derived>
Matrix<typename Derived::Scalar> nuclear_norm_subgradient(const Eigen::MatrixBase<Derived>& w) {
  using Scalar = typename Derived::Scalar;
  require_finite(w, "nuclear_norm_subgradient input");
  if (w.size() == 0) return Matrix<Scalar>(w.rows(), w.cols());
  const Eigen::JacobiSVD<Matrix<Scalar>> svd(w.eval(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

/// Row-wise softmax of a batch of logits (one sample per row).
template <typename Derived>
Matrix<typename Derived::Scalar> softmax_rows(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> out = logits;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
  return out;
}

template <typename Derived>
Vector<typename Derived::Scalar> softmax(const Eigen::MatrixBase<Derived>& logits) {
  static_assert(Derived::ColsAtCompileTime == 1 || Derived::ColsAtCompileTime == Eigen::Dynamic);
  return softmax_rows(logits.transpose()).transpose();
}

/// -log p(target) with a 1e-12 floor on the probability. Throws
/// InvalidDistribution unless probabilities are non-negative, finite and sum
/// to one within 1e-6, and the target indexes into them.
template <typename Derived>
double cross_entropy(const Eigen::MatrixBase<Derived>& probabilities, int target) {
  if (target < 0 || target >= probabilities.size()) {
    throw Error(ErrorCode::InvalidDistribution, "target index out of range");
  }
  if (!probabilities.allFinite() || (probabilities.array() < 0).any() ||
      std::abs(static_cast<double>(probabilities.sum()) - 1.0) > 1e-6) {
    throw Error(ErrorCode::InvalidDistribution, "probabilities are not a distribution");
  }
  const double p = static_cast<double>(probabilities(target));
  return -std::log(std::max(p, kProbabilityFloor));
}

/// Index of the largest entry; ties resolve to the lowest index.
template <typename Derived>
int argmax(const Eigen::MatrixBase<Derived>& v) {
  int best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace fotag

#endif  // FOTAG_LINALG_HPP
