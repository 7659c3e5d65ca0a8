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

#include "fotag/container.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "fotag/error.hpp"

namespace fotag {

std::string encode_container(std::string_view magic, std::string_view header_json,
                             std::span<const float> payload) {
  std::string out(magic);
  out += header_json;
  out += '\n';
  out.reserve(out.size() + 4 * payload.size());
  for (float v : payload) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    for (int shift = 0; shift < 32; shift += 8) out += static_cast<char>((bits >> shift) & 0xffu);
  }
  return out;
}

void write_container(const std::filesystem::path& path, std::string_view magic,
                     std::string_view header_json, std::span<const float> payload) {
  const std::string bytes = encode_container(magic, header_json, payload);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

RawContainer decode_container(std::string_view bytes, std::string_view magic) {
  if (bytes.substr(0, magic.size()) != magic) throw Error(ErrorCode::BadMagic, "unexpected file magic");
  const std::size_t eol = bytes.find('\n', magic.size());
  if (eol == std::string_view::npos) throw Error(ErrorCode::CorruptHeader, "unterminated header line");
  RawContainer out;
  try {
    out.header = nlohmann::json::parse(bytes.substr(magic.size(), eol - magic.size()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptHeader, e.what());
  }
  if (!out.header.is_object()) throw Error(ErrorCode::CorruptHeader, "header is not a JSON object");
  out.payload = std::string(bytes.substr(eol + 1));
  return out;
}

RawContainer read_container(const std::filesystem::path& path, std::string_view magic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_container(buf.str(), magic);
}

std::vector<float> decode_f32(std::string_view bytes) {
  std::vector<float> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) {
      bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 * i + b])) << (8 * b);
    }
    out[i] = std::bit_cast<float>(bits);
  }
  return out;
}

}  // namespace fotag
