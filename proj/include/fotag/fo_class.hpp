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

#ifndef FOTAG_FO_CLASS_HPP
#define FOTAG_FO_CLASS_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace fotag {

/// The six foundational-ontology categories. The enumerator value is the
/// stable class index used by every probe and file format.
enum class FoClass : int {
  SociallyConstructedPerson = 0,
  CognitiveEvent = 1,
  GeographicalObject = 2,
  BiologicalObject = 3,
  NonAgentiveFunctionalObject = 4,
  InformationObject = 5,
};

inline constexpr std::size_t kNumFoClasses = 6;

inline constexpr std::array<FoClass, kNumFoClasses> kAllFoClasses = {
    FoClass::SociallyConstructedPerson, FoClass::CognitiveEvent,
    FoClass::GeographicalObject,        FoClass::BiologicalObject,
    FoClass::NonAgentiveFunctionalObject, FoClass::InformationObject,
};

constexpr int index_of(FoClass c) noexcept { return static_cast<int>(c); }

/// Throws Error(UnknownLabel) outside 0..5.
FoClass fo_class_from_index(int index);

/// Canonical dataset spelling, e.g. "Socially-constructed-person".
std::string_view canonical_name(FoClass c) noexcept;

/// Case-insensitive parse of the canonical spelling.
std::optional<FoClass> parse_fo_class(std::string_view text) noexcept;

}  // namespace fotag

#endif  // FOTAG_FO_CLASS_HPP
