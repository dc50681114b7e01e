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
 * @file raster.hpp
 * @brief 8-bit rasters and the pixel operations of the synthesis pipeline.
 *
 * All 8-bit quantization rounds half up: q(v) = floor(v + 0.5), clamped to
 * [0, 255].
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "scl/errors.hpp"
#include "scl/geometry.hpp"

namespace scl {

/// Row-major interleaved 8-bit raster with `Channels` samples per pixel.
template <int Channels>
class Raster {
 public:
  static constexpr int kChannels = Channels;

  Raster() = default;
  Raster(int width, int height, std::uint8_t fill = 0)
      : width_(width), height_(height),
        data_(checked_size(width, height), fill) {}
  Raster(int width, int height, std::vector<std::uint8_t> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != checked_size(width, height)) {
      throw InvalidParameterError("raster data length does not match its dimensions");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }

  std::uint8_t* pixel(int x, int y) { return data_.data() + offset(x, y); }
  const std::uint8_t* pixel(int x, int y) const { return data_.data() + offset(x, y); }

  std::span<std::uint8_t> data() { return data_; }
  std::span<const std::uint8_t> data() const { return data_; }
  const std::vector<std::uint8_t>& bytes() const { return data_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  static std::size_t checked_size(int width, int height) {
    if (width < 0 || height < 0) throw InvalidParameterError("negative raster dimensions");
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * Channels;
  }
  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * Channels;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

using RasterRGBA = Raster<4>;
using RasterRGB = Raster<3>;
using RasterGray = Raster<1>;

/// Colour transform c* = r c. Pure-black pixels are lifted to
/// `black_substitute` first, since scaling zero is a no-op.
struct ColourParams {
  double r = 1.0;
  int black_substitute = 100;
};

enum class Interp { nearest, bilinear };

inline std::uint8_t quantize(double v) {
  if (!(v > 0.0)) return 0;  // also maps NaN to 0
  if (v >= 254.5) return 255;
  const double n = std::floor(v);
  return static_cast<std::uint8_t>(static_cast<int>(n) + (v - n >= 0.5 ? 1 : 0));
}

/// quantize of the exact product r * c, without the rounding of the multiply.
inline std::uint8_t quantize_product(double r, double c) {
  const double p = r * c;
  const double n = std::floor(p);
  if (p - n == 0.5 && std::fma(r, c, -p) < 0.0) return quantize(n);
  return quantize(p);
}

/// Applies the colour transform to every pixel with alpha > 0. Alpha is left
/// untouched. Throws InvalidParameterError for r outside [0, 2].
RasterRGBA apply_colour(const RasterRGBA& img, const ColourParams& params);

/**
 * Resamples `src` under `map` into an out_w x out_h raster: output pixel p
 * takes src sampled at map^-1(center of p). Samples outside src are fully
 * transparent.
 *
 * Bilinear sampling interpolates alpha-premultiplied values. The interpolation
 * ramp is narrowed wherever one source pixel would reach across more than one
 * output pixel (magnification, rotation, shear), so edges bleed by at most half
 * an output pixel per axis. A sample landing exactly on a source pixel center
 * reproduces that pixel bit for bit; fully transparent pixels come out as zero.
 *
 * Throws SingularMapError, InvalidParameterError for empty output.
 */
RasterRGBA warp_rgba(const RasterRGBA& src, const PlanarMap& map, int out_w, int out_h,
                     Interp interp = Interp::bilinear);

/// Tight box over pixels with alpha > alpha_threshold. Throws EmptyLogoError.
Box tight_bbox(const RasterRGBA& img, int alpha_threshold = 0);

/// Same, for a single-channel mask.
Box tight_bbox(const RasterGray& mask, int threshold = 0);

struct Composite {
  RasterRGB image;
  Box placed_bbox;
};

/**
 * Source-over blend of `logo` onto `context` with the logo's top-left pixel at
 * (left, top). Only pixels inside the logo's tight box (alpha > alpha_threshold)
 * are blended:
 *
 *     c_out = q((c_logo * a + c_ctx * (255 - a)) / 255)
 *
 * so every context pixel outside `placed_bbox` is bitwise unchanged.
 *
 * Throws EmptyLogoError, OutOfBoundsError if the tight box does not fit.
 */
Composite composite(const RasterRGB& context, const RasterRGBA& logo, int left, int top,
                    int alpha_threshold = 0);

RasterRGBA to_rgba(const RasterRGB& img, std::uint8_t alpha = 255);
RasterRGB drop_alpha(const RasterRGBA& img);

/// Bilinear resize through warp_rgba; used for context normalization.
RasterRGB resize(const RasterRGB& img, int out_w, int out_h);

}  // namespace scl
