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

#ifndef FOTAG_SYNTHETIC_HPP
#define FOTAG_SYNTHETIC_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "fotag/dataset.hpp"
#include "fotag/embedding_store.hpp"

namespace fotag {

/// n labels with every class count within one of n / num_classes, in a
/// seeded random order.
std::vector<int> balanced_labels(std::size_t n, int num_classes, std::uint64_t seed);

/// Gaussian blobs: row i is mean(labels[i]) + N(0, sigma^2 I). Class means sit
/// on distinct coordinate axes scaled so every pair of means is exactly
/// separation * sigma apart. separation = 0 gives pure noise. Requires
/// d >= num_classes when separation > 0.
EmbeddingMatrix planted_embeddings(std::span<const int> labels, std::size_t d, int num_classes,
                                   double separation, double sigma, std::uint64_t seed);

/// Placeholder samples ("term17" in a template sentence) carrying the labels
/// as FO classes, so synthetic embeddings have a dataset to align with.
std::vector<Sample> synthetic_samples(std::span<const int> labels);

}  // namespace fotag

#endif  // FOTAG_SYNTHETIC_HPP
