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
 * @file exemplar.hpp
 * @brief Logo exemplars on transparent backgrounds, and context images.
 *
 * Layout on disk:
 *
 *     exemplars/<class_name>.png                   (8-bit RGBA, nesting allowed)
 *     contexts/<any/depth>/<name>.{png,jpg,jpeg}   (logo-free scene images)
 *
 * Exemplars are kept whole; the opaque box is recorded, never cropped.
 */
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scl/geometry.hpp"
#include "scl/raster.hpp"

namespace scl {

struct Exemplar {
  std::string class_name;
  int class_id = 0;
  RasterRGBA pixels;
  Box opaque_bbox;  // tight box over alpha > threshold
};

/// A scene image. Pixels are decoded on demand (see load_context_pixels) so a
/// registry over thousands of photos stays small.
struct ContextImage {
  std::string path;  // relative to the context root, '/'-separated
  int width = 0;
  int height = 0;
  std::optional<std::string> tag;  // first directory component, if any
};

/// Immutable after loading; safe to share across threads.
struct Registry {
  std::vector<Exemplar> exemplars;  // sorted by class_name, class_id == index
  std::vector<ContextImage> contexts;  // sorted by path
  std::filesystem::path context_root;

  const Exemplar* find(const std::string& class_name) const;
  std::vector<std::string> class_names() const;
};

struct LoadOptions {
  int alpha_threshold = 0;
  int threads = 1;
};

/// Throws DecodeError, NoAlphaError, EmptyLogoError.
Exemplar load_exemplar(const std::filesystem::path& path, const std::string& class_name,
                       int alpha_threshold = 0);

/// Builds an exemplar from pixels already in memory.
Exemplar make_exemplar(RasterRGBA pixels, const std::string& class_name, int class_id = 0,
                       int alpha_threshold = 0);

/**
 * Scans both directories recursively. Class names are exemplar file stems.
 * Per-file errors are rethrown with the offending path in the message.
 * An empty `context_dir` path skips context loading.
 *
 * Throws EmptyRegistryError, DuplicateClassError and the per-file errors.
 */
Registry load_registry(const std::filesystem::path& exemplar_dir,
                       const std::filesystem::path& context_dir, const LoadOptions& options = {});

RasterRGB load_context_pixels(const Registry& registry, const ContextImage& context);

}  // namespace scl
