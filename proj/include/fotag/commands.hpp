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

#ifndef FOTAG_COMMANDS_HPP
#define FOTAG_COMMANDS_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace fotag {

/// Exit statuses shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Parses args (without the program name) and runs the selected subcommand.
/// Normal output goes to out, diagnostics to err.
///
///   derive-binary --in TSV --out TSV [--seed N]
///   sweep         --config INI [--seed N] [--jobs N] [--out DIR]
///   report        [--format md|csv] [--classes N] [--out FILE] SUMMARY...
///   tag           --model FILE --embeddings FILE
///   train-tagger  --config INI [--from-summary JSON] [--seed N] [--out DIR]
///   synth         --out DIR [--task T] [--n N] [--d D] [--separation S] [--seed N]
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace fotag

#endif  // FOTAG_COMMANDS_HPP
