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

#include "fotag/fo_class.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "fotag/error.hpp"

namespace fotag {
namespace {

constexpr std::array<std::string_view, kNumFoClasses> kNames = {
    "Socially-constructed-person",    "Cognitive-event",    "Geographical-Object",
    "Biological-Object", "Non-agentive-functional-object", "Information-Object",
};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

FoClass fo_class_from_index(int index) {
  if (index < 0 || index >= static_cast<int>(kNumFoClasses)) {
    throw Error(ErrorCode::UnknownLabel, "class index " + std::to_string(index));
  }
  return static_cast<FoClass>(index);
}

std::string_view canonical_name(FoClass c) noexcept { return kNames[static_cast<std::size_t>(c)]; }

std::optional<FoClass> parse_fo_class(std::string_view text) noexcept {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (iequals(text, kNames[i])) return static_cast<FoClass>(i);
  }
  return std::nullopt;
}

}  // namespace fotag
