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
#pragma once

#include <filesystem>

#include "scl/raster.hpp"

namespace scl {

enum class ImageFormat { png, jpeg };

/// Decodes an image that must carry an alpha channel.
/// Throws DecodeError, NoAlphaError.
RasterRGBA read_rgba(const std::filesystem::path& path);

/// Decodes any supported image to RGB; alpha, if present, is discarded.
RasterRGB read_rgb(const std::filesystem::path& path);

/// Width and height of a decodable image. Throws DecodeError.
struct ImageSize {
  int width = 0;
  int height = 0;
};
ImageSize probe_image(const std::filesystem::path& path);

/// PNG output is lossless and byte-deterministic for identical pixels.
void write_image(const std::filesystem::path& path, const RasterRGB& img,
                 ImageFormat format = ImageFormat::png);
void write_image(const std::filesystem::path& path, const RasterRGBA& img);

/// Keeps image codecs single-threaded so worker pools own all parallelism.
void configure_codec_threads();

}  // namespace scl
