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
#include "scl/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace scl {

namespace {

// Bilinear ramp position, narrowed so that it spans at most one output pixel
// along either output axis.
inline double sharpen(double f, double narrowing) {
  if (narrowing <= 1.0) return f;
  const double g = (f - 0.5) * narrowing + 0.5;
  return g < 0.0 ? 0.0 : (g > 1.0 ? 1.0 : g);
}

struct BilinearSampler {
  const RasterRGBA& src;

  // Writes the premultiplied-interpolated sample at continuous source
  // position (ux, uy) into `out`.
  void sample(double ux, double uy, double narrowing, std::uint8_t* out) const {
    const double tx = ux - 0.5;
    const double ty = uy - 0.5;
    const double fx0 = std::floor(tx);
    const double fy0 = std::floor(ty);
    const int w = src.width();
    const int h = src.height();
    if (fx0 < -1.0 || fy0 < -1.0 || fx0 >= w || fy0 >= h) {
      out[0] = out[1] = out[2] = out[3] = 0;
      return;
    }
    const int x0 = static_cast<int>(fx0);
    const int y0 = static_cast<int>(fy0);
    const double fx = sharpen(tx - fx0, narrowing);
    const double fy = sharpen(ty - fy0, narrowing);

    const double wx[2] = {1.0 - fx, fx};
    const double wy[2] = {1.0 - fy, fy};
    double acc_a = 0.0, acc_r = 0.0, acc_g = 0.0, acc_b = 0.0;
    for (int dy = 0; dy < 2; ++dy) {
      const int y = y0 + dy;
      if (y < 0 || y >= h || wy[dy] == 0.0) continue;
      for (int dx = 0; dx < 2; ++dx) {
        const int x = x0 + dx;
        if (x < 0 || x >= w || wx[dx] == 0.0) continue;
        const std::uint8_t* p = src.pixel(x, y);
        const double wa = wx[dx] * wy[dy] * p[3];
        acc_a += wa;
        acc_r += wa * p[0];
        acc_g += wa * p[1];
        acc_b += wa * p[2];
      }
    }
    if (!(acc_a > 0.0)) {
      out[0] = out[1] = out[2] = out[3] = 0;
      return;
    }
    out[0] = quantize(acc_r / acc_a);
    out[1] = quantize(acc_g / acc_a);
    out[2] = quantize(acc_b / acc_a);
    out[3] = quantize(acc_a);
  }
};

template <int C>
Box scan_bbox(const Raster<C>& img, int channel, int threshold) {
  Box b{std::numeric_limits<int>::max(), std::numeric_limits<int>::max(), -1, -1};
  for (int y = 0; y < img.height(); ++y) {
    const std::uint8_t* row = img.pixel(0, y);
    for (int x = 0; x < img.width(); ++x) {
      if (row[x * C + channel] > threshold) {
        b.x0 = std::min(b.x0, x);
        b.x1 = std::max(b.x1, x);
        b.y0 = std::min(b.y0, y);
        b.y1 = std::max(b.y1, y);
      }
    }
  }
  if (b.x1 < 0) {
    throw EmptyLogoError("no pixel with alpha above " + std::to_string(threshold));
  }
  return b;
}

}  // namespace

RasterRGBA apply_colour(const RasterRGBA& img, const ColourParams& params) {
  if (!(params.r >= 0.0 && params.r <= 2.0)) {
    throw InvalidParameterError("colour factor r must lie in [0, 2]");
  }
  if (params.black_substitute < 0 || params.black_substitute > 255) {
    throw InvalidParameterError("black substitute must lie in [0, 255]");
  }
  RasterRGBA out = img;
  const auto sub = static_cast<std::uint8_t>(params.black_substitute);
  auto data = out.data();
  for (std::size_t i = 0; i < data.size(); i += 4) {
    std::uint8_t* p = data.data() + i;
    if (p[3] == 0) continue;
    if (p[0] == 0 && p[1] == 0 && p[2] == 0) p[0] = p[1] = p[2] = sub;
    for (int c = 0; c < 3; ++c) p[c] = quantize_product(params.r, p[c]);
  }
  return out;
}

namespace {

RasterRGBA warp_impl(const RasterRGBA& src, const PlanarMap& map, int out_w, int out_h,
                     Interp interp, bool sharpen_edges) {
  if (out_w < 1 || out_h < 1) {
    throw InvalidParameterError("warp output must be at least 1x1");
  }
  const PlanarMap inv = map.inverse();
  const auto& g = inv.matrix();
  const auto& f = map.matrix();
  const bool affine = map.is_affine();

  // Largest row sum of |Jacobian|: how far one source pixel reaches along an
  // output axis. Constant for affine maps.
  auto reach = [](double j00, double j01, double j10, double j11) {
    return std::max(std::abs(j00) + std::abs(j01), std::abs(j10) + std::abs(j11));
  };
  const double aff_narrowing = sharpen_edges ? reach(f[0], f[1], f[3], f[4]) : 1.0;

  RasterRGBA out(out_w, out_h, 0);
  const BilinearSampler sampler{src};
  const int sw = src.width();
  const int sh = src.height();

  for (int j = 0; j < out_h; ++j) {
    const double py = j + 0.5;
    std::uint8_t* row = out.pixel(0, j);
    for (int i = 0; i < out_w; ++i) {
      const double px = i + 0.5;
      double ux = g[0] * px + g[1] * py + g[2];
      double uy = g[3] * px + g[4] * py + g[5];
      double narrowing = aff_narrowing;
      if (!affine) {
        const double gw = g[6] * px + g[7] * py + g[8];
        if (!(gw > 0.0)) continue;
        ux /= gw;
        uy /= gw;
        const double fw = f[6] * ux + f[7] * uy + f[8];
        if (!(fw > 0.0)) continue;  // beyond the horizon
        if (sharpen_edges) {
          narrowing = reach(f[0] - px * f[6], f[1] - px * f[7], f[3] - py * f[6],
                            f[4] - py * f[7]) / fw;
        }
      }
      std::uint8_t* o = row + 4 * i;
      if (interp == Interp::nearest) {
        const double fx = std::floor(ux);
        const double fy = std::floor(uy);
        if (fx < 0.0 || fy < 0.0 || fx >= sw || fy >= sh) continue;
        const std::uint8_t* p = src.pixel(static_cast<int>(fx), static_cast<int>(fy));
        o[0] = p[0], o[1] = p[1], o[2] = p[2], o[3] = p[3];
      } else {
        sampler.sample(ux, uy, narrowing, o);
      }
    }
  }
  return out;
}

}  // namespace

RasterRGBA warp_rgba(const RasterRGBA& src, const PlanarMap& map, int out_w, int out_h,
                     Interp interp) {
  return warp_impl(src, map, out_w, out_h, interp, true);
}

Box tight_bbox(const RasterRGBA& img, int alpha_threshold) {
  return scan_bbox(img, 3, alpha_threshold);
}

Box tight_bbox(const RasterGray& mask, int threshold) { return scan_bbox(mask, 0, threshold); }

Composite composite(const RasterRGB& context, const RasterRGBA& logo, int left, int top,
                    int alpha_threshold) {
  const Box local = tight_bbox(logo, alpha_threshold);
  const Box placed = local.translated(left, top);
  if (placed.x0 < 0 || placed.y0 < 0 || placed.x1 >= context.width() ||
      placed.y1 >= context.height()) {
    throw OutOfBoundsError("logo box does not fit inside the context image");
  }
  Composite result{context, placed};
  for (int y = local.y0; y <= local.y1; ++y) {
    for (int x = local.x0; x <= local.x1; ++x) {
      const std::uint8_t* s = logo.pixel(x, y);
      const unsigned a = s[3];
      if (a == 0) continue;
      std::uint8_t* d = result.image.pixel(x + left, y + top);
      for (int c = 0; c < 3; ++c) {
        const unsigned num = s[c] * a + d[c] * (255u - a);
        d[c] = static_cast<std::uint8_t>((2u * num + 255u) / 510u);
      }
    }
  }
  return result;
}

RasterRGBA to_rgba(const RasterRGB& img, std::uint8_t alpha) {
  RasterRGBA out(img.width(), img.height(), alpha);
  auto s = img.data();
  auto d = out.data();
  for (std::size_t i = 0, j = 0; i < s.size(); i += 3, j += 4) {
    d[j] = s[i];
    d[j + 1] = s[i + 1];
    d[j + 2] = s[i + 2];
  }
  return out;
}

RasterRGB drop_alpha(const RasterRGBA& img) {
  RasterRGB out(img.width(), img.height(), 0);
  auto s = img.data();
  auto d = out.data();
  for (std::size_t i = 0, j = 0; i < s.size(); i += 4, j += 3) {
    d[j] = s[i];
    d[j + 1] = s[i + 1];
    d[j + 2] = s[i + 2];
  }
  return out;
}

RasterRGB resize(const RasterRGB& img, int out_w, int out_h) {
  if (img.width() == out_w && img.height() == out_h) return img;
  const PlanarMap m = make_scale(double(out_w) / img.width(), double(out_h) / img.height());
  return drop_alpha(warp_impl(to_rgba(img), m, out_w, out_h, Interp::bilinear, false));
}

}  // namespace scl
