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

#ifndef FOTAG_CONTAINER_HPP
#define FOTAG_CONTAINER_HPP

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace fotag {

/// Shared on-disk layout for embeddings, probes and tagger models:
///   magic bytes (ending in '\n') | one JSON line | little-endian f32 payload.
struct RawContainer {
  nlohmann::json header;
  std::string payload;  // raw bytes after the header line
};

/// header_json must be a single line (no raw newlines), e.g. json::dump().
std::string encode_container(std::string_view magic, std::string_view header_json,
                             std::span<const float> payload);

void write_container(const std::filesystem::path& path, std::string_view magic,
                     std::string_view header_json, std::span<const float> payload);

/// Splits a container. Throws BadMagic when the prefix differs and
/// CorruptHeader when the JSON line is missing or unparsable.
RawContainer decode_container(std::string_view bytes, std::string_view magic);

RawContainer read_container(const std::filesystem::path& path, std::string_view magic);

/// Decodes exactly bytes.size() / 4 little-endian floats.
std::vector<float> decode_f32(std::string_view bytes);

}  // namespace fotag

#endif  // FOTAG_CONTAINER_HPP
