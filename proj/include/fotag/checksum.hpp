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

#ifndef FOTAG_CHECKSUM_HPP
#define FOTAG_CHECKSUM_HPP

#include <filesystem>
#include <string>
#include <string_view>

namespace fotag {

/// Lowercase hex SHA-256 (64 digits) of the given bytes.
std::string sha256_hex(std::string_view bytes);

/// SHA-256 of a file's contents. Throws Error(IoError).
std::string sha256_file(const std::filesystem::path& path);

}  // namespace fotag

#endif  // FOTAG_CHECKSUM_HPP
