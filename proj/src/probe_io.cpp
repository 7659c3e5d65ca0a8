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

#include <string>

#include "fotag/container.hpp"
#include "fotag/error.hpp"
#include "fotag/training.hpp"

namespace fotag {

void save_probe(const std::filesystem::path& path, const TrainedProbe& trained) {
  const ProbeFamily family = family_of(trained.probe);
  const Eigen::Index hidden =
      family == ProbeFamily::Mlp ? std::get<MlpProbe<double>>(trained.probe).hidden_size() : 0;
  const nlohmann::json header = {
      {"format_version", 1},
      {"family", to_string(family)},
      {"num_classes", num_classes(trained.probe)},
      {"input_dim", input_dim(trained.probe)},
      {"hidden", hidden},
      {"lambda", trained.lambda},
      {"seed", trained.seed},
      {"complexity", trained.complexity},
      {"selected_epoch", trained.selected_epoch},
      {"train_losses", trained.train_losses},
      {"validation_losses", trained.validation_losses},
  };
  write_container(path, kProbeMagic, header.dump(), flatten_parameters(trained.probe));
}

TrainedProbe load_probe(const std::filesystem::path& path) {
  RawContainer raw;
  try {
    raw = read_container(path, kProbeMagic);
  } catch (const Error& e) {
    if (e.is_io()) throw;
    throw Error(ErrorCode::CorruptModel, e.what());
  }
  TrainedProbe out;
  ProbeShape shape;
  Eigen::Index d = 0;
  try {
    const auto& h = raw.header;
    if (h.at("format_version").get<int>() != 1) {
      throw Error(ErrorCode::VersionMismatch, "unsupported probe format version");
    }
    const auto family = parse_probe_family(h.at("family").get<std::string>());
    if (!family) throw Error(ErrorCode::CorruptModel, "unknown probe family");
    shape.family = *family;
    shape.num_classes = h.at("num_classes").get<Eigen::Index>();
    shape.hidden = h.at("hidden").get<Eigen::Index>();
    d = h.at("input_dim").get<Eigen::Index>();
    out.lambda = h.at("lambda").get<double>();
    out.seed = h.at("seed").get<std::uint64_t>();
    out.complexity = h.at("complexity").get<double>();
    out.selected_epoch = h.at("selected_epoch").get<int>();
    out.train_losses = h.at("train_losses").get<std::vector<double>>();
    out.validation_losses = h.at("validation_losses").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptModel, e.what());
  }
  if (raw.payload.size() % 4 != 0) throw Error(ErrorCode::CorruptModel, "ragged payload");
  const std::vector<float> values = decode_f32(raw.payload);
  out.probe = unflatten_parameters(shape, d, values);
  return out;
}

}  // namespace fotag
