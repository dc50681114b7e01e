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
#include "scl/synth.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "scl/errors.hpp"
#include "scl/parallel.hpp"
#include "scl/random.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace scl {

namespace {

// Hull dimensions beyond this are treated as "does not fit" before any
// allocation happens (grazing tilts can blow up the projected size).
constexpr double kMaxWarpExtent = 1 << 15;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_range(const Range& r) { return fmt_double(r.lo) + "," + fmt_double(r.hi); }

std::string pad5(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%05d", i);
  return buf;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidParameterError("invalid synth config: " + what);
}

std::string image_extension(const SynthConfig& c) {
  return c.context_mode == ContextMode::scene && c.image_format == ImageFormat::jpeg ? ".jpg"
                                                                                      : ".png";
}

}  // namespace

std::string to_string(ContextMode mode) {
  return mode == ContextMode::scene ? "scene" : "clean_black";
}

ContextMode parse_context_mode(const std::string& text) {
  if (text == "scene") return ContextMode::scene;
  if (text == "clean_black" || text == "clean") return ContextMode::clean_black;
  throw UsageError("unknown context mode '" + text + "' (expected scene or clean_black)");
}

void SynthConfig::validate() const {
  require(images_per_class >= 1, "images_per_class must be >= 1");
  require(scale_range.lo > 0.0 && scale_range.lo <= scale_range.hi,
          "scale_range must satisfy 0 < lo <= hi");
  require(shear_range.lo <= shear_range.hi && shear_range.lo > -1.0 && shear_range.hi < 1.0,
          "shear_range must satisfy -1 < lo <= hi < 1");
  require(rotation_range.lo >= 0.0 && rotation_range.lo <= rotation_range.hi &&
              rotation_range.hi <= 360.0,
          "rotation_range must lie within [0, 360]");
  require(colour_r_range.lo >= 0.0 && colour_r_range.lo <= colour_r_range.hi &&
              colour_r_range.hi <= 2.0,
          "colour_r_range must lie within [0, 2]");
  require(tilt_range.lo <= tilt_range.hi && tilt_range.lo > -90.0 && tilt_range.hi < 90.0,
          "tilt_range must lie within (-90, 90)");
  require(focal > 0.0, "focal must be positive");
  require(clean_canvas_width >= 1 && clean_canvas_height >= 1, "clean canvas must be >= 1x1");
  require(!output_long_side || *output_long_side >= 1, "output_long_side must be >= 1");
  require(alpha_threshold >= 0 && alpha_threshold <= 254, "alpha_threshold must be in [0, 254]");
  require(black_substitute >= 0 && black_substitute <= 255, "black_substitute must be in [0, 255]");
  require(max_attempts >= 1, "max_attempts must be >= 1");
}

std::vector<std::pair<std::string, std::string>> SynthConfig::canonical() const {
  std::string class_list;
  for (const auto& c : classes) class_list += (class_list.empty() ? "" : ",") + c;
  std::vector<std::pair<std::string, std::string>> kv{
      {"alpha_threshold", std::to_string(alpha_threshold)},
      {"black_substitute", std::to_string(black_substitute)},
      {"classes", class_list.empty() ? "all" : class_list},
      {"clean_canvas", std::to_string(clean_canvas_width) + "x" +
                           std::to_string(clean_canvas_height)},
      {"colour_r_range", fmt_range(colour_r_range)},
      {"context_mode", to_string(context_mode)},
      {"enable_colouring", enable_colouring ? "true" : "false"},
      {"enable_rotation", enable_rotation ? "true" : "false"},
      {"enable_scaling", enable_scaling ? "true" : "false"},
      {"enable_shearing", enable_shearing ? "true" : "false"},
      {"enable_tilt", enable_tilt ? "true" : "false"},
      {"focal", fmt_double(focal)},
      {"image_format", image_extension(*this) == ".jpg" ? "jpeg" : "png"},
      {"images_per_class", std::to_string(images_per_class)},
      {"interp", interp == Interp::bilinear ? "bilinear" : "nearest"},
      {"master_seed", std::to_string(master_seed)},
      {"max_attempts", std::to_string(max_attempts)},
      {"output_long_side", output_long_side ? std::to_string(*output_long_side) : "none"},
      {"placement_policy", "fully_inside"},
      {"rotation_range", fmt_range(rotation_range)},
      {"scale_range", fmt_range(scale_range)},
      {"shear_range", fmt_range(shear_range)},
      {"tilt_range", fmt_range(tilt_range)},
  };
  return kv;
}

std::string SynthConfig::digest() const {
  std::string text;
  for (const auto& [k, v] : canonical()) text += k + "=" + v + "\n";
  return digest_text(text);
}

SampledSpec sample_spec(std::uint64_t rng_seed, const SynthConfig& c, double scale_reference) {
  Engine eng(rng_seed);
  const double ratio = uniform_real(eng, c.scale_range.lo, c.scale_range.hi);
  const double kx = uniform_real(eng, c.shear_range.lo, c.shear_range.hi);
  const double ky = uniform_real(eng, c.shear_range.lo, c.shear_range.hi);
  const double theta = uniform_real(eng, c.rotation_range.lo, c.rotation_range.hi);
  const double tilt_x = uniform_real(eng, c.tilt_range.lo, c.tilt_range.hi);
  const double tilt_y = uniform_real(eng, c.tilt_range.lo, c.tilt_range.hi);
  const double r = uniform_real(eng, c.colour_r_range.lo, c.colour_r_range.hi);

  SampledSpec out;
  TransformSpec& s = out.spec;
  s.focal = c.focal;
  if (c.enable_scaling) {
    s.sx = s.sy = ratio * scale_reference;
    out.scale_ratio = ratio;
  }
  if (c.enable_shearing) s.kx = kx, s.ky = ky;
  if (c.enable_rotation) s.theta = theta >= 360.0 ? 0.0 : theta;
  if (c.enable_tilt) s.tilt_x = tilt_x, s.tilt_y = tilt_y;
  if (c.enable_colouring) s.colour_r = r;
  return out;
}

Placement sample_placement(std::uint64_t rng_seed, int context_w, int context_h, int hull_w,
                           int hull_h, PlacementPolicy) {
  if (hull_w < 1 || hull_h < 1) throw InvalidParameterError("hull must be at least 1x1");
  if (hull_w > context_w || hull_h > context_h) {
    throw DoesNotFitError("logo " + std::to_string(hull_w) + "x" + std::to_string(hull_h) +
                          " does not fit in context " + std::to_string(context_w) + "x" +
                          std::to_string(context_h));
  }
  Engine eng(rng_seed);
  Placement p;
  p.x = static_cast<int>(uniform_index(eng, static_cast<std::uint64_t>(context_w - hull_w) + 1));
  p.y = static_cast<int>(uniform_index(eng, static_cast<std::uint64_t>(context_h - hull_h) + 1));
  return p;
}

Canvas clean_canvas(const SynthConfig& config) {
  return {RasterRGB(config.clean_canvas_width, config.clean_canvas_height, 0), "clean"};
}

LocalWarp local_warp(const Exemplar& exemplar, const TransformSpec& spec) {
  const Box& ob = exemplar.opaque_bbox;
  // Integer pivot next to the box center keeps identity-like maps on the
  // pixel grid.
  const int px = ob.x0 + ob.width() / 2;
  const int py = ob.y0 + ob.height() / 2;
  const PlanarMap core = compose(spec) * make_translation(-px, -py);
  const RectF hull = transform_quad(core, ob.area_rect()).hull;
  if (!(hull.width() < kMaxWarpExtent) || !(hull.height() < kMaxWarpExtent)) {
    throw DoesNotFitError("warped exemplar is unreasonably large");
  }
  // One pixel of margin so interpolation fringes are never clipped.
  const double ox = std::floor(hull.x0) - 1.0;
  const double oy = std::floor(hull.y0) - 1.0;
  LocalWarp lw;
  lw.width = static_cast<int>(std::ceil(hull.x1) - ox) + 1;
  lw.height = static_cast<int>(std::ceil(hull.y1) - oy) + 1;
  lw.map = make_translation(-ox, -oy) * core;
  return lw;
}

SynthRecord generate_record(const Exemplar& exemplar, const Canvas& canvas,
                            const SynthConfig& config, std::uint64_t seed) {
  const int cw = canvas.pixels.width();
  const int ch = canvas.pixels.height();
  const Box& ob = exemplar.opaque_bbox;
  const double scale_reference = double(cw) / ob.width();

  SampledSpec sampled = sample_spec(sub_seed(seed, 1), config, scale_reference);

  RasterRGBA coloured;
  const RasterRGBA* src = &exemplar.pixels;
  if (config.enable_colouring) {
    coloured = apply_colour(exemplar.pixels, {sampled.spec.colour_r, config.black_substitute});
    src = &coloured;
  }

  std::string last_failure = "no attempt made";
  for (int attempt = 1; attempt <= config.max_attempts; ++attempt) {
    if (attempt > 1) {
      if (!config.enable_scaling) break;  // nothing left to redraw
      Engine eng(sub_seed(seed, 100 + static_cast<std::uint64_t>(attempt - 1)));
      const double ratio = uniform_real(eng, config.scale_range.lo, config.scale_range.hi);
      sampled.spec.sx = sampled.spec.sy = ratio * scale_reference;
      sampled.scale_ratio = ratio;
    }

    LocalWarp lw;
    try {
      lw = local_warp(exemplar, sampled.spec);
    } catch (const BackFacingError& e) {
      last_failure = e.what();
      continue;
    } catch (const DoesNotFitError& e) {
      last_failure = e.what();
      continue;
    }
    if (lw.width > cw + 4 || lw.height > ch + 4) {
      last_failure = "warped exemplar larger than the canvas";
      continue;
    }
    RasterRGBA warped = warp_rgba(*src, lw.map, lw.width, lw.height, config.interp);
    Box local;
    try {
      local = tight_bbox(warped, config.alpha_threshold);
    } catch (const EmptyLogoError& e) {
      last_failure = "warped exemplar vanished";
      continue;
    }
    Placement pos;
    try {
      const std::uint64_t pseed =
          attempt == 1 ? sub_seed(seed, 2) : sub_seed(seed, 200 + std::uint64_t(attempt - 1));
      pos = sample_placement(pseed, cw, ch, local.width(), local.height(),
                             config.placement_policy);
    } catch (const DoesNotFitError& e) {
      last_failure = e.what();
      continue;
    }
    const int left = pos.x - local.x0;
    const int top = pos.y - local.y0;

    Composite comp = composite(canvas.pixels, warped, left, top, config.alpha_threshold);

    SynthRecord rec;
    rec.class_name = exemplar.class_name;
    rec.class_id = exemplar.class_id;
    rec.image = std::move(comp.image);
    rec.bbox = comp.placed_bbox;
    rec.mask = RasterGray(cw, ch, 0);
    for (int y = local.y0; y <= local.y1; ++y) {
      for (int x = local.x0; x <= local.x1; ++x) {
        *rec.mask.pixel(x + left, y + top) = warped.pixel(x, y)[3];
      }
    }
    rec.logo_to_image = make_translation(left, top) * lw.map;
    rec.quad = transform_quad(rec.logo_to_image, ob.area_rect()).quad;
    rec.spec = sampled.spec;
    rec.scale_ratio = sampled.scale_ratio;
    rec.context_path = canvas.source;
    rec.seed = seed;
    rec.attempts = attempt;
    return rec;
  }
  throw GenerationFailedError("class '" + exemplar.class_name + "' seed " +
                              std::to_string(seed) + ": " + last_failure);
}

std::size_t choose_context(std::uint64_t seed, std::size_t num_contexts) {
  Engine eng(sub_seed(seed, 3));
  return static_cast<std::size_t>(uniform_index(eng, num_contexts));
}

Canvas canvas_for(const Registry& registry, const SynthConfig& config, std::uint64_t seed) {
  if (config.context_mode == ContextMode::clean_black) return clean_canvas(config);
  if (registry.contexts.empty()) {
    throw EmptyRegistryError("scene context mode needs at least one context image");
  }
  const ContextImage& ctx = registry.contexts[choose_context(seed, registry.contexts.size())];
  Canvas c{load_context_pixels(registry, ctx), ctx.path};
  if (config.output_long_side) {
    const int w = c.pixels.width();
    const int h = c.pixels.height();
    const double s = double(*config.output_long_side) / std::max(w, h);
    const int nw = std::max(1, static_cast<int>(std::floor(w * s + 0.5)));
    const int nh = std::max(1, static_cast<int>(std::floor(h * s + 0.5)));
    c.pixels = resize(c.pixels, nw, nh);
  }
  return c;
}

std::string record_json(const SynthRecord& r) {
  json quad = json::array();
  for (const Point& p : r.quad.corners) quad.push_back({p.x, p.y});
  const auto& m = r.logo_to_image.matrix();
  const json doc{
      {"image_id", r.image_id},
      {"class_name", r.class_name},
      {"class_id", r.class_id},
      {"index", r.index},
      {"bbox", {r.bbox.x0, r.bbox.y0, r.bbox.x1, r.bbox.y1}},
      {"quad", quad},
      {"map", std::vector<double>(m.begin(), m.end())},
      {"spec",
       {{"sx", r.spec.sx},
        {"sy", r.spec.sy},
        {"kx", r.spec.kx},
        {"ky", r.spec.ky},
        {"theta", r.spec.theta},
        {"tilt_x", r.spec.tilt_x},
        {"tilt_y", r.spec.tilt_y},
        {"focal", r.spec.focal},
        {"colour_r", r.spec.colour_r}}},
      {"scale_ratio", r.scale_ratio ? json(*r.scale_ratio) : json(nullptr)},
      {"context", r.context_path},
      {"seed", r.seed},
      {"attempts", r.attempts}};
  return doc.dump();
}

DatasetResult generate_dataset(const Registry& registry, const SynthConfig& config,
                               const fs::path& out_dir, const DatasetOptions& options) {
  config.validate();
  if (registry.exemplars.empty()) throw EmptyRegistryError("registry has no exemplars");

  std::vector<const Exemplar*> classes;
  if (config.classes.empty()) {
    for (const auto& e : registry.exemplars) classes.push_back(&e);
  } else {
    for (const auto& name : config.classes) {
      const Exemplar* e = registry.find(name);
      if (!e) throw UnknownClassError("class '" + name + "' has no exemplar");
      classes.push_back(e);
    }
    std::sort(classes.begin(), classes.end(),
              [](const Exemplar* a, const Exemplar* b) { return a->class_id < b->class_id; });
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  }
  if (config.context_mode == ContextMode::scene && registry.contexts.empty()) {
    throw EmptyRegistryError("scene context mode needs at least one context image");
  }

  std::error_code ec;
  for (const Exemplar* e : classes) {
    fs::create_directories(out_dir / "images" / e->class_name, ec);
    if (ec) throw IoError((out_dir / "images" / e->class_name).string() + ": " + ec.message());
  }

  const auto per_class = static_cast<std::size_t>(config.images_per_class);
  const std::size_t total = classes.size() * per_class;
  const std::string ext = image_extension(config);
  const ImageFormat format = ext == ".jpg" ? ImageFormat::jpeg : ImageFormat::png;

  std::vector<SynthRecord> slots(total);
  std::vector<std::pair<int, int>> sizes(total);
  std::vector<std::string> failures(total);
  std::atomic<std::size_t> done{0};

  configure_codec_threads();
  parallel_for(total, options.threads, [&](std::size_t job) {
    const Exemplar& ex = *classes[job / per_class];
    const auto index = static_cast<std::uint32_t>(job % per_class);
    const std::uint64_t seed =
        derive_seed(config.master_seed, static_cast<std::uint32_t>(ex.class_id), index);
    const Canvas canvas = canvas_for(registry, config, seed);
    SynthRecord rec;
    try {
      rec = generate_record(ex, canvas, config, seed);
    } catch (const GenerationFailedError& e) {
      failures[job] = e.what();
      return;
    }
    rec.index = static_cast<int>(index);
    rec.image_id = ex.class_name + "_" + pad5(rec.index);
    write_image(out_dir / "images" / ex.class_name / (rec.image_id + ext), rec.image, format);
    // Pixels are dropped once written; only the size is kept.
    sizes[job] = {rec.image.width(), rec.image.height()};
    rec.image = {};
    rec.mask = {};
    slots[job] = std::move(rec);
    const std::size_t n = ++done;
    if (options.progress) options.progress(n, total);
  });

  std::vector<std::string> failed;
  for (const auto& f : failures) {
    if (!f.empty()) failed.push_back(f);
  }
  if (!failed.empty()) {
    std::string msg = std::to_string(failed.size()) + " record(s) failed; first: " + failed[0];
    throw GenerationFailedError(msg);
  }

  DatasetResult result;
  DatasetManifest& m = result.manifest;
  m.name = "scl-synthetic";
  for (const Exemplar* e : classes) m.classes.push_back(e->class_name);
  m.seed = config.master_seed;
  m.config_digest = config.digest();
  m.images.reserve(total);
  m.annotations.reserve(total);
  std::string records_text;
  for (std::size_t k = 0; k < total; ++k) {
    const SynthRecord& rec = slots[k];
    const std::string path = "images/" + rec.class_name + "/" + rec.image_id + ext;
    m.images.push_back({rec.image_id, path, sizes[k].first, sizes[k].second});
    m.annotations.push_back({rec.image_id, rec.class_name, rec.bbox, Source::synthetic, false});
    records_text += record_json(rec);
    records_text += '\n';
  }

  write_annotations(m, out_dir / "annotations.jsonl");
  {
    std::ofstream f(out_dir / "records.jsonl", std::ios::binary);
    if (!f) throw IoError((out_dir / "records.jsonl").string() + ": cannot open for writing");
    f.write(records_text.data(), static_cast<std::streamsize>(records_text.size()));
  }
  write_manifest_json(m, out_dir / "manifest.json", "annotations.jsonl", config.canonical());
  result.records = std::move(slots);
  return result;
}

}  // namespace scl
