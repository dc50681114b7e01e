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
 * @file synth.hpp
 * @brief Synthetic context logo generation.
 *
 * One record = one exemplar, warped and recoloured, pasted once at a uniformly
 * random position of a context image (or a black canvas). The annotation is
 * the tight box of the pasted alpha, so every synthesized logo is labelled.
 *
 * Reproducibility: record (class_id, index) is rendered from
 * derive_seed(master_seed, class_id, index) alone (see random.hpp), so a
 * dataset is a pure function of the registry and config, whatever the worker
 * count. Within a record the sub-streams are:
 *
 *   sub_seed(seed, 1)          transform parameters
 *   sub_seed(seed, 2)          placement
 *   sub_seed(seed, 3)          context choice (with replacement)
 *   sub_seed(seed, 100 + k)    scale redraw for retry k >= 1
 *   sub_seed(seed, 200 + k)    placement for retry k >= 1
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scl/dataset.hpp"
#include "scl/exemplar.hpp"
#include "scl/geometry.hpp"
#include "scl/image_io.hpp"
#include "scl/raster.hpp"

namespace scl {

enum class ContextMode { scene, clean_black };
enum class PlacementPolicy { fully_inside };

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const { return v >= lo && v <= hi; }
  friend bool operator==(const Range&, const Range&) = default;
};

struct SynthConfig {
  int images_per_class = 100;
  ContextMode context_mode = ContextMode::scene;

  bool enable_scaling = true;
  bool enable_shearing = true;
  bool enable_rotation = true;
  bool enable_colouring = true;
  bool enable_tilt = false;

  /// Logo width as a fraction of the canvas width.
  Range scale_range{0.05, 0.4};
  Range shear_range{-0.3, 0.3};
  /// Degrees, half-open [lo, hi).
  Range rotation_range{0.0, 360.0};
  Range colour_r_range{0.0, 2.0};
  /// Degrees, applied to both tilt axes.
  Range tilt_range{-30.0, 30.0};
  double focal = 1000.0;

  int clean_canvas_width = 512;
  int clean_canvas_height = 512;
  PlacementPolicy placement_policy = PlacementPolicy::fully_inside;
  std::uint64_t master_seed = 0;
  /// Scene contexts are resized so their longer side equals this.
  std::optional<int> output_long_side;

  int alpha_threshold = 0;
  int black_substitute = 100;
  Interp interp = Interp::bilinear;
  int max_attempts = 10;
  ImageFormat image_format = ImageFormat::png;
  /// Subset of class names to synthesize; empty means every class.
  std::vector<std::string> classes;

  /// Throws InvalidParameterError.
  void validate() const;

  /// Flat, sorted key=value pairs; the basis of config_digest. Excludes
  /// anything that does not affect output bytes.
  std::vector<std::pair<std::string, std::string>> canonical() const;
  std::string digest() const;
};

struct SampledSpec {
  TransformSpec spec;
  /// Logo-to-canvas width ratio behind spec.sx/sy; nullopt when scaling is off.
  std::optional<double> scale_ratio;
};

/**
 * Draws one TransformSpec. Every parameter is drawn regardless of the enable
 * switches, and disabled ones are then reset to identity, so toggling one
 * switch leaves the others' values untouched.
 *
 * `scale_reference` converts a width ratio into a pixel scale factor:
 * sx = sy = ratio * scale_reference (canvas width / logo width).
 */
SampledSpec sample_spec(std::uint64_t rng_seed, const SynthConfig& config,
                        double scale_reference = 1.0);

struct Placement {
  int x = 0;
  int y = 0;
};

/// Uniform top-left position keeping a hull_w x hull_h box inside the
/// context. Throws DoesNotFitError.
Placement sample_placement(std::uint64_t rng_seed, int context_w, int context_h, int hull_w,
                           int hull_h, PlacementPolicy policy = PlacementPolicy::fully_inside);

/// Background for one record: a decoded context, or the black canvas.
struct Canvas {
  RasterRGB pixels;
  std::string source;  // context path relative to its root, or "clean"
};

Canvas clean_canvas(const SynthConfig& config);

struct SynthRecord {
  std::string image_id;
  std::string class_name;
  int class_id = 0;
  int index = 0;
  RasterRGB image;
  /// Pasted logo alpha on the canvas grid (zero outside bbox).
  RasterGray mask;
  Box bbox;
  Quad quad;         // exemplar opaque box under `logo_to_image`
  PlanarMap logo_to_image;
  TransformSpec spec;
  std::optional<double> scale_ratio;
  std::string context_path;
  std::uint64_t seed = 0;
  int attempts = 1;
};

/**
 * Renders one record: sample_spec, apply_colour, compose, warp_rgba,
 * tight_bbox, sample_placement, composite. If the logo does not fit the scale
 * is redrawn, up to config.max_attempts in total.
 *
 * Throws GenerationFailedError (naming class and seed) when all attempts fail.
 */
SynthRecord generate_record(const Exemplar& exemplar, const Canvas& canvas,
                            const SynthConfig& config, std::uint64_t per_image_seed);

/// Pixel map from exemplar coordinates to the local warp raster, as used by
/// generate_record (exposed for tests and tooling).
struct LocalWarp {
  PlanarMap map;
  int width = 0;
  int height = 0;
};
LocalWarp local_warp(const Exemplar& exemplar, const TransformSpec& spec);

/// Index into registry.contexts used for record `seed` in scene mode.
std::size_t choose_context(std::uint64_t seed, std::size_t num_contexts);

/// Loads and normalizes the canvas for `seed` (scene or clean mode).
Canvas canvas_for(const Registry& registry, const SynthConfig& config, std::uint64_t seed);

struct DatasetOptions {
  int threads = 1;
  /// Called after each record with (done, total); may be called concurrently.
  std::function<void(std::size_t, std::size_t)> progress;
};

struct DatasetResult {
  DatasetManifest manifest;
  std::vector<SynthRecord> records;  // pixels dropped; ordered by (class_id, index)
};

/**
 * Writes
 *
 *   out_dir/images/<class>/<class>_<index:05>.<png|jpg>
 *   out_dir/annotations.jsonl
 *   out_dir/records.jsonl     (per-record transform, quad, context, seed)
 *   out_dir/manifest.json
 *
 * Throws GenerationFailedError listing failed records if any class ends up
 * short of images_per_class.
 */
DatasetResult generate_dataset(const Registry& registry, const SynthConfig& config,
                               const std::filesystem::path& out_dir,
                               const DatasetOptions& options = {});

/// One JSON object per line describing record provenance.
std::string record_json(const SynthRecord& record);

std::string to_string(ContextMode mode);
ContextMode parse_context_mode(const std::string& text);

}  // namespace scl
