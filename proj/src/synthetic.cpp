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

#include "fotag/synthetic.hpp"

#include <cmath>
#include <string>

#include "fotag/error.hpp"
#include "fotag/random.hpp"

namespace fotag {

std::vector<int> balanced_labels(std::size_t n, int num_classes, std::uint64_t seed) {
  if (num_classes < 1) throw Error(ErrorCode::InvalidConfig, "num_classes must be positive");
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<int>(i % static_cast<std::size_t>(num_classes));
  Rng rng(seed);
  rng.shuffle(std::span(out));
  return out;
}

EmbeddingMatrix planted_embeddings(std::span<const int> labels, std::size_t d, int num_classes,
                                   double separation, double sigma, std::uint64_t seed) {
  if (d == 0) throw Error(ErrorCode::InvalidConfig, "dimension must be positive");
  if (separation > 0.0 && d < static_cast<std::size_t>(num_classes)) {
    throw Error(ErrorCode::InvalidConfig, "planted signal needs d >= num_classes");
  }
  // Axis-aligned means a * e_c are pairwise a * sqrt(2) apart.
  const double scale = separation * sigma / std::sqrt(2.0);
  Rng rng(seed);
  EmbeddingMatrix x(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = static_cast<float>(sigma * rng.normal());
    if (separation > 0.0) x(i, labels[static_cast<std::size_t>(i)]) += static_cast<float>(scale);
  }
  return x;
}

std::vector<Sample> synthetic_samples(std::span<const int> labels) {
  std::vector<Sample> out;
  out.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::string word = "term" + std::to_string(i);
    out.push_back(make_sample(word, "A synthetic sentence about " + word + ".",
                              fo_class_from_index(labels[i])));
  }
  return out;
}

}  // namespace fotag
