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
#include "scl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "scl/dataset.hpp"
#include "scl/errors.hpp"
#include "scl/eval.hpp"
#include "scl/exemplar.hpp"
#include "scl/image_io.hpp"
#include "scl/random.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace scl::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Reads `key = value` lines (# comments, optional leading dashes on keys) or
// a run.json document, whose "config" object holds the same pairs.
// Items are attributed to `section`, the subcommand being run.
class KeyValueConfig : public CLI::Config {
 public:
  explicit KeyValueConfig(std::string section) : section_(std::move(section)) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return ""; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    std::vector<CLI::ConfigItem> items;
    if (trim(text).rfind('{', 0) == 0) {
      json doc;
      try {
        doc = json::parse(text);
      } catch (const json::parse_error& e) {
        throw UsageError(std::string("config file: ") + e.what());
      }
      const json& cfg = doc.contains("config") ? doc.at("config") : doc;
      if (!cfg.is_object()) throw UsageError("config file: \"config\" must be an object");
      for (const auto& [key, value] : cfg.items()) {
        items.push_back(
            {{section_}, key, {value.is_string() ? value.get<std::string>() : value.dump()}});
      }
      return items;
    }
    std::istringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos) {
        throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
      }
      std::string key = trim(t.substr(0, eq));
      while (!key.empty() && key[0] == '-') key.erase(0, 1);
      std::string value = trim(t.substr(eq + 1));
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
        value = value.substr(1, value.size() - 2);
      }
      items.push_back({{section_}, key, {value}});
    }
    return items;
  }

 private:
  std::string section_;
};

struct Common {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;
  bool verbose = false;
};

void add_common(CLI::App* sub, Common& c, bool out_required) {
  sub->option_defaults()->always_capture_default();
  sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  sub->add_option("--threads", c.threads, "Worker threads (default: $SCL_THREADS or all cores)")
      ->envname("SCL_THREADS")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  auto* out = sub->add_option("--out", c.out, "Output directory");
  if (out_required) out->required();
  sub->add_flag("--verbose", c.verbose, "Progress on standard error");
}

struct SynthFlags {
  std::string exemplars;
  std::string contexts;
  int per_class = 100;
  std::string context_mode = "scene";
  bool no_scaling = false, no_shearing = false, no_rotation = false, no_colouring = false;
  bool tilt = false;
  double scale_min = 0.05, scale_max = 0.4;
  double shear_min = -0.3, shear_max = 0.3;
  double rotation_min = 0.0, rotation_max = 360.0;
  double colour_min = 0.0, colour_max = 2.0;
  double tilt_min = -30.0, tilt_max = 30.0;
  double focal = 1000.0;
  int canvas_width = 512, canvas_height = 512;
  int long_side = 0;
  std::string interp = "bilinear";
  std::string format = "png";
  std::string classes;
  int alpha_threshold = 0;
  int black_value = 100;
  int max_attempts = 10;
};

void add_synth_flags(CLI::App* sub, SynthFlags& f) {
  sub->add_option("--exemplars", f.exemplars, "Directory of transparent PNG exemplars")
      ->required();
  sub->add_option("--contexts", f.contexts, "Directory of context images (scene mode)");
  sub->add_option("--per-class", f.per_class, "Images per class")->check(CLI::PositiveNumber);
  sub->add_option("--context-mode", f.context_mode, "scene | clean_black")
      ->check(CLI::IsMember({"scene", "clean_black"}));
  sub->add_flag("--no-scaling", f.no_scaling, "Disable scaling");
  sub->add_flag("--no-shearing", f.no_shearing, "Disable shearing");
  sub->add_flag("--no-rotation", f.no_rotation, "Disable rotation");
  sub->add_flag("--no-colouring", f.no_colouring, "Disable colouring");
  sub->add_flag("--tilt", f.tilt, "Enable out-of-plane tilt");
  sub->add_option("--scale-min", f.scale_min, "Logo width / canvas width, lower bound");
  sub->add_option("--scale-max", f.scale_max, "Logo width / canvas width, upper bound");
  sub->add_option("--shear-min", f.shear_min);
  sub->add_option("--shear-max", f.shear_max);
  sub->add_option("--rotation-min", f.rotation_min, "Degrees");
  sub->add_option("--rotation-max", f.rotation_max, "Degrees");
  sub->add_option("--colour-min", f.colour_min);
  sub->add_option("--colour-max", f.colour_max);
  sub->add_option("--tilt-min", f.tilt_min, "Degrees");
  sub->add_option("--tilt-max", f.tilt_max, "Degrees");
  sub->add_option("--focal", f.focal, "Tilt focal length in pixels");
  sub->add_option("--canvas-width", f.canvas_width, "Clean canvas width");
  sub->add_option("--canvas-height", f.canvas_height, "Clean canvas height");
  sub->add_option("--long-side", f.long_side, "Resize contexts to this long side (0 keeps size)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--interp", f.interp, "bilinear | nearest")
      ->check(CLI::IsMember({"bilinear", "nearest"}));
  sub->add_option("--format", f.format, "png | jpeg (scene mode)")
      ->check(CLI::IsMember({"png", "jpeg"}));
  sub->add_option("--classes", f.classes, "Comma-separated class subset");
  sub->add_option("--alpha-threshold", f.alpha_threshold, "Alpha above this is opaque");
  sub->add_option("--black-value", f.black_value, "Substitute for pure black before colouring");
  sub->add_option("--max-attempts", f.max_attempts, "Placement attempts per image");
}

SynthConfig to_config(const SynthFlags& f, std::uint64_t seed) {
  SynthConfig c;
  c.images_per_class = f.per_class;
  c.context_mode = parse_context_mode(f.context_mode);
  c.enable_scaling = !f.no_scaling;
  c.enable_shearing = !f.no_shearing;
  c.enable_rotation = !f.no_rotation;
  c.enable_colouring = !f.no_colouring;
  c.enable_tilt = f.tilt;
  c.scale_range = {f.scale_min, f.scale_max};
  c.shear_range = {f.shear_min, f.shear_max};
  c.rotation_range = {f.rotation_min, f.rotation_max};
  c.colour_r_range = {f.colour_min, f.colour_max};
  c.tilt_range = {f.tilt_min, f.tilt_max};
  c.focal = f.focal;
  c.clean_canvas_width = f.canvas_width;
  c.clean_canvas_height = f.canvas_height;
  c.master_seed = seed;
  if (f.long_side > 0) c.output_long_side = f.long_side;
  c.interp = f.interp == "nearest" ? Interp::nearest : Interp::bilinear;
  c.image_format = f.format == "jpeg" ? ImageFormat::jpeg : ImageFormat::png;
  std::stringstream ss(f.classes);
  std::string name;
  while (std::getline(ss, name, ',')) {
    name = trim(name);
    if (!name.empty()) c.classes.push_back(name);
  }
  c.alpha_threshold = f.alpha_threshold;
  c.black_substitute = f.black_value;
  c.max_attempts = f.max_attempts;
  try {
    c.validate();
  } catch (const InvalidParameterError& e) {
    throw UsageError(e.what());
  }
  if (c.context_mode == ContextMode::scene && f.contexts.empty()) {
    throw UsageError("--contexts is required in scene mode");
  }
  return c;
}

Registry load_for(const SynthFlags& f, const SynthConfig& c, int threads) {
  LoadOptions lo;
  lo.alpha_threshold = c.alpha_threshold;
  lo.threads = threads;
  return load_registry(f.exemplars, c.context_mode == ContextMode::scene ? f.contexts : "", lo);
}

// Effective option values of `sub`, keyed by long flag name.
std::map<std::string, std::string> effective_config(const CLI::App* sub) {
  std::map<std::string, std::string> kv;
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "config" || name.empty()) continue;
    std::string value;
    if (opt->get_expected_max() == 0) {
      value = opt->count() && opt->as<bool>() ? "true" : "false";
    } else if (opt->count()) {
      value = opt->as<std::string>();
    } else {
      value = opt->get_default_str();
    }
    kv[name] = value;
  }
  return kv;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(path.string() + ": cannot open for writing");
  f << text;
  if (!f) throw IoError(path.string() + ": write failed");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string() + ": " + ec.message());
}

void write_run_files(const fs::path& out_dir, const std::vector<std::string>& argv,
                     const CLI::App* sub, std::uint64_t seed) {
  const auto kv = effective_config(sub);
  json config = json::object();
  std::string conf = "# scl " + sub->get_name() + " " + kVersion + "\n";
  for (const auto& [k, v] : kv) {
    config[k] = v;
    conf += k + " = " + v + "\n";
  }
  json argv_json = json::array();
  argv_json.push_back("scl");
  for (const auto& a : argv) argv_json.push_back(a);
  const json doc{{"argv", argv_json},
                 {"command", sub->get_name()},
                 {"config", config},
                 {"seed", seed},
                 {"version", kVersion}};
  write_text(out_dir / "run.json", doc.dump(2) + "\n");
  write_text(out_dir / "run.conf", conf);
}

int cmd_synth(const SynthFlags& f, const Common& c, std::ostream& out, std::ostream& err) {
  const SynthConfig config = to_config(f, c.seed);
  const Registry registry = load_for(f, config, c.threads);
  ensure_dir(c.out);
  DatasetOptions options;
  options.threads = c.threads;
  std::mutex mu;
  if (c.verbose) {
    options.progress = [&](std::size_t done, std::size_t total) {
      if (done % 1000 == 0 || done == total) {
        std::lock_guard<std::mutex> lock(mu);
        err << "synth: " << done << "/" << total << "\n";
      }
    };
  }
  const DatasetResult result = generate_dataset(registry, config, c.out, options);
  out << "wrote " << result.manifest.images.size() << " images, "
      << result.manifest.annotations.size() << " annotations, "
      << result.manifest.classes.size() << " classes to " << c.out << "\n";
  return 0;
}

int cmd_split(const std::string& manifest, int per_class, const Common& c, std::ostream& out) {
  const DatasetManifest m = load_manifest(manifest);
  const SplitResult s = split_dataset(m, per_class, c.seed);
  ensure_dir(c.out);
  write_annotations(s.train, fs::path(c.out) / "train.jsonl");
  write_annotations(s.test, fs::path(c.out) / "test.jsonl");
  out << "train: " << s.train.images.size() << " images, " << s.train.annotations.size()
      << " annotations\n"
      << "test: " << s.test.images.size() << " images, " << s.test.annotations.size()
      << " annotations\n";
  return 0;
}

int cmd_plan(const std::string& name, const std::string& synth, const std::string& real,
             const Common& c, std::ostream& out) {
  std::vector<PlanName> names;
  if (name == "all") {
    names.assign(std::begin(kAllPlans), std::end(kAllPlans));
  } else {
    names.push_back(parse_plan_name(name));
  }
  std::optional<ManifestRef> sref, rref;
  if (!synth.empty()) sref = ManifestRef::of(load_manifest(synth), Source::synthetic, synth);
  if (!real.empty()) rref = ManifestRef::of(load_manifest(real), Source::real, real);
  ensure_dir(c.out);
  for (PlanName n : names) {
    const CurriculumPlan plan = make_plan(n, sref, rref);
    plan.validate();
    const fs::path path = fs::path(c.out) / (to_string(n) + ".plan.json");
    write_text(path, plan.to_json());
    out << "wrote " << path.string() << " (" << plan.stages.size() << " stage"
        << (plan.stages.size() == 1 ? "" : "s") << ")\n";
  }
  return 0;
}

int cmd_eval(const std::string& pred, const std::string& gt, double iou_threshold,
             const std::string& interp, const Common& c, std::ostream& out) {
  const EvalReport report = evaluate(pred, gt, iou_threshold, parse_interpolation(interp));
  out << report.table();
  if (!c.out.empty()) {
    ensure_dir(c.out);
    write_text(fs::path(c.out) / "report.json", report.to_json());
  }
  return 0;
}

int cmd_preview(const SynthFlags& f, int n, const Common& c, std::ostream& out) {
  if (n < 1) throw UsageError("preview needs -n >= 1 (empty grid)");
  const SynthConfig config = to_config(f, c.seed);
  const Registry registry = load_for(f, config, c.threads);
  const PreviewSheet sheet = make_preview(registry, config, n);
  ensure_dir(c.out);
  const fs::path path = fs::path(c.out) / "preview.png";
  write_image(path, sheet.image);
  json boxes = json::array();
  for (const Box& b : sheet.boxes) boxes.push_back({b.x0, b.y0, b.x1, b.y1});
  write_text(fs::path(c.out) / "preview.json",
             json{{"columns", sheet.columns}, {"rows", sheet.rows}, {"boxes", boxes}}.dump() +
                 "\n");
  out << "wrote " << path.string() << " (" << sheet.columns << "x" << sheet.rows << ")\n";
  return 0;
}

int cmd_validate(const std::string& manifest, const std::string& plan, bool check_images,
                 std::ostream& out) {
  if (manifest.empty() == plan.empty()) {
    throw UsageError("validate needs exactly one of --manifest or --plan");
  }
  if (!plan.empty()) {
    std::ifstream in(plan, std::ios::binary);
    if (!in) throw IoError(plan + ": cannot open");
    std::stringstream buf;
    buf << in.rdbuf();
    const CurriculumPlan p = CurriculumPlan::from_json(buf.str());
    p.validate();
    out << "ok: plan " << to_string(p.name) << ", " << p.stages.size() << " stage(s)\n";
    return 0;
  }
  const DatasetManifest m = load_manifest(manifest);
  m.validate();
  if (check_images) {
    const fs::path root = fs::path(manifest).parent_path();
    for (const auto& img : m.images) {
      const ImageSize size = probe_image(root / img.path);
      if ((img.width && size.width != img.width) || (img.height && size.height != img.height)) {
        throw SchemaError("image '" + img.image_id + "' is " + std::to_string(size.width) + "x" +
                          std::to_string(size.height) + ", manifest says " +
                          std::to_string(img.width) + "x" + std::to_string(img.height));
      }
    }
  }
  out << "ok: " << (m.name.empty() ? manifest : m.name) << ", " << m.images.size()
      << " images, " << m.annotations.size() << " annotations, " << m.classes.size()
      << " classes\n";
  return 0;
}

void draw_outline(RasterRGB& img, const Box& b) {
  auto put = [&](int x, int y) {
    if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) return;
    std::uint8_t* p = img.pixel(x, y);
    p[0] = 0;
    p[1] = 255;
    p[2] = 0;
  };
  for (int x = b.x0; x <= b.x1; ++x) put(x, b.y0), put(x, b.y1);
  for (int y = b.y0; y <= b.y1; ++y) put(b.x0, y), put(b.x1, y);
}

}  // namespace

PreviewSheet make_preview(const Registry& registry, const SynthConfig& config, int n) {
  if (n < 1) throw InvalidParameterError("preview needs at least one cell (empty grid)");
  std::vector<const Exemplar*> classes;
  if (config.classes.empty()) {
    for (const auto& e : registry.exemplars) classes.push_back(&e);
  } else {
    for (const auto& name : config.classes) {
      const Exemplar* e = registry.find(name);
      if (!e) throw UnknownClassError("class '" + name + "' has no exemplar");
      classes.push_back(e);
    }
  }
  if (classes.empty()) throw EmptyRegistryError("registry has no exemplars");

  std::vector<SynthRecord> records;
  records.reserve(static_cast<std::size_t>(n));
  int cell_w = 1, cell_h = 1;
  for (int k = 0; k < n; ++k) {
    const Exemplar& ex = *classes[static_cast<std::size_t>(k) % classes.size()];
    const auto index = static_cast<std::uint32_t>(static_cast<std::size_t>(k) / classes.size());
    const std::uint64_t seed =
        derive_seed(config.master_seed, static_cast<std::uint32_t>(ex.class_id), index);
    records.push_back(generate_record(ex, canvas_for(registry, config, seed), config, seed));
    cell_w = std::max(cell_w, records.back().image.width());
    cell_h = std::max(cell_h, records.back().image.height());
  }

  PreviewSheet sheet;
  sheet.columns = static_cast<int>(std::ceil(std::sqrt(double(n))));
  sheet.rows = (n + sheet.columns - 1) / sheet.columns;
  sheet.image = RasterRGB(sheet.columns * cell_w, sheet.rows * cell_h, 0);
  for (int k = 0; k < n; ++k) {
    const RasterRGB& img = records[static_cast<std::size_t>(k)].image;
    const int ox = (k % sheet.columns) * cell_w;
    const int oy = (k / sheet.columns) * cell_h;
    for (int y = 0; y < img.height(); ++y) {
      std::copy_n(img.pixel(0, y), 3 * img.width(), sheet.image.pixel(ox, oy + y));
    }
    const Box b = records[static_cast<std::size_t>(k)].bbox.translated(ox, oy);
    draw_outline(sheet.image, b);
    sheet.boxes.push_back(b);
  }
  return sheet;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthetic context logo toolkit", "scl"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Flat key = value file or a previous run.json");
  app.allow_config_extras(CLI::config_extras_mode::error);
  {
    std::string section;
    for (const auto& a : args) {
      if (a == "synth" || a == "split" || a == "plan" || a == "eval" || a == "preview" ||
          a == "validate") {
        section = a;
        break;
      }
    }
    app.config_formatter(std::make_shared<KeyValueConfig>(section));
  }

  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  Common common;
  common.threads = hw;
  SynthFlags synth_flags;
  std::string manifest, plan_file, synth_manifest, real_manifest, plan_name = "all";
  std::string pred, gt, interp = "all_point";
  double iou_threshold = 0.5;
  int split_per_class = 10;
  int preview_n = 4;
  bool check_images = false;

  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic context logo dataset");
  add_common(synth, common, true);
  add_synth_flags(synth, synth_flags);

  CLI::App* split = app.add_subcommand("split", "Per-class train/test split of a manifest");
  add_common(split, common, true);
  split->add_option("--manifest", manifest, "annotations.jsonl or CSV")->required();
  split->add_option("--per-class", split_per_class, "Training images per class")
      ->check(CLI::PositiveNumber);

  CLI::App* plan = app.add_subcommand("plan", "Emit curriculum training plans");
  add_common(plan, common, true);
  plan->add_option("--name", plan_name, "Plan name or 'all'");
  plan->add_option("--synthetic", synth_manifest, "Synthetic manifest");
  plan->add_option("--real", real_manifest, "Real manifest");

  CLI::App* evalc = app.add_subcommand("eval", "Per-class AP and mAP of detections");
  add_common(evalc, common, false);
  evalc->add_option("--pred", pred, "Detections (JSON Lines)")->required();
  evalc->add_option("--gt", gt, "Ground-truth manifest")->required();
  evalc->add_option("--iou", iou_threshold, "IoU threshold")->check(CLI::Range(0.0, 1.0));
  evalc->add_option("--interp", interp, "all_point | eleven_point")
      ->check(CLI::IsMember({"all_point", "eleven_point"}));

  CLI::App* preview = app.add_subcommand("preview", "Contact sheet of sample composites");
  add_common(preview, common, true);
  add_synth_flags(preview, synth_flags);
  preview->add_option("-n,--count", preview_n, "Number of composites");

  CLI::App* validate = app.add_subcommand("validate", "Check a manifest or plan file");
  add_common(validate, common, false);
  validate->add_option("--manifest", manifest, "Manifest to check");
  validate->add_option("--plan", plan_file, "Plan to check");
  validate->add_flag("--check-images", check_images, "Also probe every image");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    const auto parsed = app.get_subcommands();
    err << (parsed.empty() ? app.help() : parsed.front()->help());
    return 1;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    int code = 0;
    if (sub == synth) code = cmd_synth(synth_flags, common, out, err);
    if (sub == split) code = cmd_split(manifest, split_per_class, common, out);
    if (sub == plan) code = cmd_plan(plan_name, synth_manifest, real_manifest, common, out);
    if (sub == evalc) code = cmd_eval(pred, gt, iou_threshold, interp, common, out);
    if (sub == preview) code = cmd_preview(synth_flags, preview_n, common, out);
    if (sub == validate) code = cmd_validate(manifest, plan_file, check_images, out);
    if (code == 0 && !common.out.empty()) write_run_files(common.out, args, sub, common.seed);
    return code;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace scl::cli
