// Copyright 2026 The SCL Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file cli.hpp
 * @brief The `scl` command line: synth, split, plan, eval, preview, validate.
 *
 * Every subcommand accepts `--config <file>`, either a flat `key = value` file
 * whose keys are long flag names, or a `run.json` written by an earlier run.
 * Flags on the command line override values from the file.
 *
 * Exit codes: 0 success, 1 usage error, 2 data or IO error.
 */
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "scl/raster.hpp"
#include "scl/synth.hpp"

namespace scl::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Runs one invocation; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct PreviewSheet {
  RasterRGB image;
  std::vector<Box> boxes;  // annotation boxes in sheet coordinates
  int columns = 0;
  int rows = 0;
};

/**
 * Contact sheet of `n` records drawn from the dataset `config` would produce
 * (record k uses class k mod C, index k div C), each with its annotation box
 * outlined in green. Cells are the size of the largest record; unused area is
 * black. Throws InvalidParameterError when n < 1.
 */
PreviewSheet make_preview(const Registry& registry, const SynthConfig& config, int n);

}  // namespace scl::cli
