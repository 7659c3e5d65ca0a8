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

#ifndef FOTAG_DATASET_HPP
#define FOTAG_DATASET_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fotag/fo_class.hpp"

namespace fotag {

/// One labelled (word, example sentence, class) record.
struct Sample {
  std::string word;
  std::string sentence;
  FoClass label{};
  /// Byte offset of the first case-insensitive occurrence of word in sentence.
  std::size_t occurrence = 0;
  /// The occurrence matches with identical case.
  bool exact_case = true;
  /// word occurs more than once in sentence.
  bool ambiguous = false;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Validates the fields and resolves the occurrence index.
/// Throws MalformedRow on empty fields, WordNotInSentence when absent.
Sample make_sample(std::string word, std::string sentence, FoClass label);

enum class BinaryLabel : int { Correct = 0, Incorrect = 1 };

inline constexpr std::size_t kNumBinaryLabels = 2;

std::string_view canonical_name(BinaryLabel label) noexcept;

struct BinarySample {
  std::string word;
  std::string sentence;
  FoClass candidate{};
  FoClass truth{};
  BinaryLabel label{};

  friend bool operator==(const BinarySample&, const BinarySample&) = default;
};

using Ratios = std::array<double, 3>;

/// Partition of 0..n-1 into train / validation / test, each sorted ascending.
struct SplitAssignment {
  std::uint64_t seed = 0;
  Ratios ratios{};
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;

  [[nodiscard]] std::size_t size() const noexcept {
    return train.size() + validation.size() + test.size();
  }
  friend bool operator==(const SplitAssignment&, const SplitAssignment&) = default;
};

struct ControlLabels {
  std::uint64_t seed = 0;
  int label_set_size = 0;
  std::vector<int> labels;
};

// --- TSV io -----------------------------------------------------------------

/// Reads a `word\tsentence\tlabel` TSV. Errors carry the 1-based line number.
std::vector<Sample> load_dataset(const std::filesystem::path& path);
std::vector<Sample> parse_dataset(std::string_view text);

void save_dataset(const std::filesystem::path& path, std::span<const Sample> samples);
std::string format_dataset(std::span<const Sample> samples);

/// Binary TSV: `word\tsentence\tlabel\tcandidate\tbinary_label`, where label is
/// the true class.
std::vector<BinarySample> load_binary_dataset(const std::filesystem::path& path);
void save_binary_dataset(const std::filesystem::path& path, std::span<const BinarySample> samples);

/// `\t`, `\n`, `\r` and `\\` escaping used inside TSV fields.
std::string escape_field(std::string_view raw);
std::string unescape_field(std::string_view escaped);

// --- task construction ------------------------------------------------------

/// Each input sample yields a Correct copy followed by an Incorrect copy whose
/// candidate is drawn uniformly from the five other classes.
std::vector<BinarySample> derive_binary(std::span<const Sample> samples, std::uint64_t seed);

std::vector<int> class_indices(std::span<const Sample> samples);
std::vector<int> binary_indices(std::span<const BinarySample> samples);

/// Seeded train / validation / test partition.
///
/// Part sizes are the largest-remainder rounding of ratios * n. With
/// stratified set, each label's members are spread so that the per-part
/// count of every label is within one of its proportional share, while the
/// part sizes still match the unstratified totals.
SplitAssignment split(std::span<const int> labels, const Ratios& ratios, std::uint64_t seed,
                      bool stratified = true);

/// Largest-remainder apportionment of total over the given weights.
std::vector<std::size_t> apportion(std::size_t total, std::span<const double> weights);

ControlLabels make_control_labels(std::size_t n, int label_set_size, std::uint64_t seed);

void save_split(const std::filesystem::path& path, const SplitAssignment& split);
SplitAssignment load_split(const std::filesystem::path& path);

}  // namespace fotag

#endif  // FOTAG_DATASET_HPP
