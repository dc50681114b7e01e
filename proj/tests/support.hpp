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

// Shared fixtures for the test binaries.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "scl/dataset.hpp"
#include "scl/exemplar.hpp"
#include "scl/image_io.hpp"
#include "scl/raster.hpp"

namespace scl::test {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("scl-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& p) const { return path_ / p; }

 private:
  fs::path path_;
};

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// W x H canvas with a fully opaque rectangle [x0, x1] x [y0, y1] of `rgb`.
inline RasterRGBA rect_logo(int w, int h, Box opaque, std::uint8_t r = 200, std::uint8_t g = 40,
                            std::uint8_t b = 90) {
  RasterRGBA img(w, h, 0);
  for (int y = opaque.y0; y <= opaque.y1; ++y) {
    for (int x = opaque.x0; x <= opaque.x1; ++x) {
      std::uint8_t* p = img.pixel(x, y);
      p[0] = r, p[1] = g, p[2] = b, p[3] = 255;
    }
  }
  return img;
}

/// Varied logo shapes keyed by `k`: filled box, ring, stripes, disc.
inline RasterRGBA shaped_logo(int k, int w, int h) {
  RasterRGBA img(w, h, 0);
  const double cx = w / 2.0, cy = h / 2.0;
  const double rx = w * 0.4, ry = h * 0.4;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = (x + 0.5 - cx) / rx, dy = (y + 0.5 - cy) / ry;
      const double d = dx * dx + dy * dy;
      bool on = false;
      switch (k % 4) {
        case 0: on = std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0; break;
        case 1: on = d <= 1.0 && d >= 0.4; break;
        case 2: on = std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0 && (x / 4) % 2 == 0; break;
        default: on = d <= 1.0; break;
      }
      if (!on) continue;
      std::uint8_t* p = img.pixel(x, y);
      p[0] = static_cast<std::uint8_t>(37 * k + 3 * x);
      p[1] = static_cast<std::uint8_t>(91 * k + 2 * y);
      p[2] = static_cast<std::uint8_t>(17 * k);
      p[3] = 255;
    }
  }
  return img;
}

/// Smooth RGB gradient (compresses well, so fixtures stay small).
inline RasterRGB gradient_context(int w, int h, int k) {
  RasterRGB img(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint8_t* p = img.pixel(x, y);
      p[0] = static_cast<std::uint8_t>((x * 255) / std::max(1, w - 1));
      p[1] = static_cast<std::uint8_t>((y * 255) / std::max(1, h - 1));
      p[2] = static_cast<std::uint8_t>(40 * k);
    }
  }
  return img;
}

/// Writes `n_classes` exemplars named logo000.. and `n_contexts` contexts
/// split over two subdirectories.
inline void write_fixture(const fs::path& exemplar_dir, const fs::path& context_dir,
                          int n_classes, int n_contexts, int logo_size = 64,
                          int context_w = 320, int context_h = 240) {
  fs::create_directories(exemplar_dir);
  for (int k = 0; k < n_classes; ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "logo%03d.png", k);
    const int w = logo_size + (k % 5) * 8;
    const int h = logo_size - (k % 3) * 8;
    write_image(exemplar_dir / name, shaped_logo(k, w, h));
  }
  for (int k = 0; k < n_contexts; ++k) {
    const fs::path dir = context_dir / (k % 2 ? "outdoor" : "indoor");
    fs::create_directories(dir);
    char name[32];
    std::snprintf(name, sizeof name, "ctx%03d.png", k);
    const int w = context_w + (k % 3) * 16;
    const int h = context_h + (k % 2) * 16;
    write_image(dir / name, gradient_context(w, h, k));
  }
}

/// In-memory registry of rectangle-filled exemplars (no contexts).
inline Registry rect_registry(int n_classes) {
  Registry reg;
  for (int k = 0; k < n_classes; ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "rect%02d", k);
    const int w = 40 + 6 * k, h = 30 + 4 * (k % 4);
    reg.exemplars.push_back(
        make_exemplar(rect_logo(w + 8, h + 6, {3, 2, w + 2, h + 1}), name, k));
  }
  return reg;
}

/// Real-image manifest with `per_class` single-annotation images per class.
inline DatasetManifest grid_manifest(int n_classes, int per_class, const std::string& name = "real") {
  DatasetManifest m;
  m.name = name;
  for (int c = 0; c < n_classes; ++c) {
    char cls[32];
    std::snprintf(cls, sizeof cls, n_classes > 100 ? "brand%03d" : "brand%02d", c);
    m.classes.push_back(cls);
    for (int i = 0; i < per_class; ++i) {
      const std::string id = std::string(cls) + "_" + std::to_string(i);
      m.images.push_back({id, id + ".jpg", 500, 375});
      m.annotations.push_back({id, cls, {i, c, i + 40, c + 30}, Source::real, false});
    }
  }
  m.config_digest = digest_text(name);
  return m;
}

/// Random valid manifest with roughly `n_annotations` annotations; names
/// include characters that need JSON escaping.
inline DatasetManifest random_manifest(std::mt19937_64& rng, std::size_t n_annotations) {
  static const char* kNames[] = {"adidas", "apple", "coca-cola", "dhl", "ford", "h\u00e9", "quote\"d",
                                 "tab\tname", "ünïcode", "z"};
  DatasetManifest m;
  m.name = "random-" + std::to_string(rng() % 1000);
  const int n_classes = 1 + static_cast<int>(rng() % 10);
  for (int c = 0; c < n_classes; ++c) m.classes.push_back(kNames[c]);
  std::sort(m.classes.begin(), m.classes.end());
  const std::size_t n_images = std::max<std::size_t>(1, n_annotations / 2 + rng() % 3);
  for (std::size_t i = 0; i < n_images; ++i) {
    const std::string id = "img/" + std::to_string(i) + (rng() % 2 ? " sp" : "");
    m.images.push_back({id, id + ".png", static_cast<int>(rng() % 4000),
                        static_cast<int>(rng() % 4000)});
  }
  for (std::size_t k = 0; k < n_annotations; ++k) {
    Annotation a;
    a.image_id = m.images[rng() % n_images].image_id;
    a.class_name = m.classes[rng() % m.classes.size()];
    const int x0 = static_cast<int>(rng() % 3000) - 100, y0 = static_cast<int>(rng() % 3000) - 100;
    a.bbox = {x0, y0, x0 + static_cast<int>(rng() % 500), y0 + static_cast<int>(rng() % 500)};
    a.source = rng() % 2 ? Source::real : Source::synthetic;
    a.difficult = rng() % 7 == 0;
    m.annotations.push_back(std::move(a));
  }
  m.seed = rng();
  m.config_digest = digest_text(std::to_string(m.seed));
  return m;
}

}  // namespace scl::test
