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

// Acceptance checks. Prints one "criterion N: PASS|FAIL ..." line per
// criterion and exits non-zero if any fails.
//
//   acceptance [--only N]...

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "scl/cli.hpp"
#include "scl/dataset.hpp"
#include "scl/eval.hpp"
#include "scl/geometry.hpp"
#include "scl/random.hpp"
#include "scl/raster.hpp"
#include "scl/synth.hpp"
#include "support.hpp"

namespace {

using namespace scl;
using test::TempDir;
namespace fs = std::filesystem;
using json = nlohmann::json;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int run_cli(const std::vector<std::string>& args, std::string* output = nullptr) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (output) *output = out.str();
  if (code != 0) std::cerr << "scl " << args.front() << " failed: " << err.str();
  return code;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), dir).generic_string();
    if (rel == "run.json" || rel == "run.conf") continue;
    files[rel] = test::slurp(e.path());
  }
  return files;
}

std::vector<json> read_jsonl(const fs::path& path) {
  std::ifstream in(path);
  std::vector<json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

// 1. 463 classes x 100 images per class at 512 px.
Outcome scale_reproduction() {
  constexpr int kClasses = 463, kPerClass = 100, kContexts = 100, kWorkers = 8;
  TempDir dir("acceptance-scale");
  test::write_fixture(dir / "exemplars", dir / "contexts", kClasses, kContexts, 72, 640, 480);

  const auto t0 = std::chrono::steady_clock::now();
  const int code = run_cli({"synth", "--exemplars", (dir / "exemplars").string(), "--contexts",
                            (dir / "contexts").string(), "--per-class", std::to_string(kPerClass),
                            "--long-side", "512", "--threads", std::to_string(kWorkers), "--seed",
                            "463", "--out", (dir / "out").string()});
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (code != 0) return {false, "synth exited with " + std::to_string(code)};

  const DatasetManifest m = read_annotations(dir / "out" / "annotations.jsonl");
  std::map<std::string, int> per_image;
  for (const auto& a : m.annotations) ++per_image[a.image_id];
  bool one_each = per_image.size() == m.images.size();
  for (const auto& [id, n] : per_image) one_each &= n == 1;
  std::size_t files = 0, long_side_ok = 0;
  for (const auto& img : m.images) {
    files += fs::is_regular_file(dir / "out" / img.path);
    long_side_ok += std::max(img.width, img.height) == 512;
  }
  const std::size_t want = static_cast<std::size_t>(kClasses) * kPerClass;
  Outcome o;
  o.pass = m.images.size() == want && m.annotations.size() == want && one_each && files == want &&
           long_side_ok == want && seconds < 1800.0;
  o.detail = std::to_string(m.images.size()) + " images, " + std::to_string(m.annotations.size()) +
             " annotations, " + (one_each ? "one per image" : "NOT one per image") + ", " +
             std::to_string(files) + " files, " + std::to_string(long_side_ok) +
             " at 512 px; " + fmt("%.1f", seconds) + " s with " + std::to_string(kWorkers) +
             " workers on " + std::to_string(std::thread::hardware_concurrency()) +
             " core(s) (limit 1800 s)";
  return o;
}

// 2. split --per-class 10 on 32 x 70 and 10 x 70.
Outcome split_reproduction() {
  TempDir dir("acceptance-split");
  Outcome o;
  const std::pair<int, std::pair<int, int>> cases[] = {{32, {320, 1920}}, {10, {100, 600}}};
  for (const auto& [classes, want] : cases) {
    const fs::path in = dir / ("real" + std::to_string(classes) + ".jsonl");
    const fs::path out = dir / ("split" + std::to_string(classes));
    write_annotations(test::grid_manifest(classes, 70), in);
    if (run_cli({"split", "--manifest", in.string(), "--per-class", "10", "--seed", "1", "--out",
                 out.string()}) != 0) {
      return {false, "split exited non-zero"};
    }
    const auto train = read_annotations(out / "train.jsonl");
    const auto test = read_annotations(out / "test.jsonl");
    const bool ok = train.images.size() == static_cast<std::size_t>(want.first) &&
                    test.images.size() == static_cast<std::size_t>(want.second);
    o.pass &= ok;
    o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(classes) + "x70 -> " +
                std::to_string(train.images.size()) + "/" + std::to_string(test.images.size()) +
                " (want " + std::to_string(want.first) + "/" + std::to_string(want.second) + ")";
  }
  return o;
}

// 3. Annotation box against the analytic hull of the transformed opaque box.
Outcome transform_correctness() {
  const Registry reg = test::rect_registry(8);
  int bilinear = 0, nearest = 0, fails = 0, ties = 0, tilted = 0;
  double worst = 0.0;
  std::mt19937_64 rng(2026);
  for (int i = 0; i < 10000; ++i) {
    SynthConfig c;
    c.context_mode = ContextMode::clean_black;
    c.clean_canvas_width = 400;
    c.clean_canvas_height = 300;
    c.master_seed = rng();
    const bool axis = i % 4 == 3;
    if (axis) {
      c.interp = Interp::nearest;
      c.enable_shearing = false;
      const double q = 90.0 * static_cast<int>(rng() % 4);
      c.rotation_range = {q, q};
      ++nearest;
    } else {
      c.enable_tilt = i % 2 == 1;
      tilted += c.enable_tilt;
      ++bilinear;
    }
    const Exemplar& ex = reg.exemplars[rng() % reg.exemplars.size()];
    const std::uint64_t seed = derive_seed(c.master_seed, static_cast<std::uint32_t>(ex.class_id),
                                           static_cast<std::uint32_t>(i));
    const SynthRecord r = generate_record(ex, clean_canvas(c), c, seed);
    const RectF h = transform_quad(r.logo_to_image, ex.opaque_bbox.area_rect()).hull;
    const RectF a = r.bbox.area_rect();
    bool ok = true;
    if (axis) {
      if (!r.logo_to_image.is_affine()) ok = false;
      const auto& m = r.logo_to_image.matrix();
      if (std::abs(m[0] * m[1]) + std::abs(m[3] * m[4]) > 1e-12) ok = false;
      auto edge = [&](double hull_edge, int got) {
        const double t = hull_edge - 0.5;
        const bool tie = std::floor(t) == t;
        ties += tie;
        return std::abs(got - static_cast<int>(std::ceil(t))) <= (tie ? 1 : 0);
      };
      ok = ok && edge(h.x0, r.bbox.x0) && edge(h.y0, r.bbox.y0) && edge(h.x1, r.bbox.x1 + 1) &&
           edge(h.y1, r.bbox.y1 + 1);
    } else {
      const double d = std::max({std::abs(a.x0 - h.x0), std::abs(a.y0 - h.y0),
                                 std::abs(a.x1 - h.x1), std::abs(a.y1 - h.y1)});
      worst = std::max(worst, d);
      ok = d <= 1.0;
    }
    if (!ok) {
      if (fails < 3) {
        std::cerr << "criterion 3 mismatch: " << r.image_id << " spec sx=" << r.spec.sx
                  << " theta=" << r.spec.theta << " tilt=" << r.spec.tilt_x << ","
                  << r.spec.tilt_y << " bbox=" << r.bbox << " hull=" << h.x0 << "," << h.y0
                  << "," << h.x1 << "," << h.y1 << "\n";
      }
      ++fails;
    }
  }
  Outcome o;
  o.pass = fails == 0;
  o.detail = std::to_string(10000 - fails) + "/10000 records agree (" + std::to_string(bilinear) +
             " bilinear incl. " + std::to_string(tilted) + " tilted, worst edge offset " +
             fmt("%.3f", worst) + " px; " + std::to_string(nearest) +
             " nearest axis-aligned exact, " + std::to_string(ties) + " exact-tie edges)";
  return o;
}

// 4. Colour transform against an exact oracle.
Outcome colour_conformance() {
  std::vector<double> rs{0.0, 0.5, 1.0, 1.5, 2.0};
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  while (rs.size() < 700) rs.push_back(u(rng));
  // Values at and next to rounding ties r * c = k + 0.5.
  while (rs.size() < 1000) {
    const int c = 1 + static_cast<int>(rng() % 255);
    const int k = static_cast<int>(rng() % (2 * c));
    double r = (k + 0.5) / c;
    if (rs.size() % 3 == 1) r = std::nextafter(r, 0.0);
    if (rs.size() % 3 == 2) r = std::nextafter(r, 3.0);
    if (r <= 2.0) rs.push_back(r);
  }

  // Row 0: grey c; row 1: (c, 0, 255 - c), which is never pure black.
  RasterRGBA img(256, 2, 255);
  for (int c = 0; c < 256; ++c) {
    std::uint8_t* g = img.pixel(c, 0);
    g[0] = g[1] = g[2] = static_cast<std::uint8_t>(c);
    std::uint8_t* m = img.pixel(c, 1);
    m[0] = static_cast<std::uint8_t>(c), m[1] = 0, m[2] = static_cast<std::uint8_t>(255 - c);
  }
  long checked = 0, wrong = 0;
  for (double r : rs) {
    const RasterRGBA out = apply_colour(img, {r, 100});
    for (int y = 0; y < 2; ++y) {
      for (int x = 0; x < 256; ++x) {
        const std::uint8_t* s = img.pixel(x, y);
        const bool black = s[0] == 0 && s[1] == 0 && s[2] == 0;
        for (int ch = 0; ch < 3; ++ch) {
          const long double v = static_cast<long double>(r) * (black ? 100 : s[ch]);
          const long double want = std::min(255.0L, std::floor(v + 0.5L));
          ++checked;
          wrong += out.pixel(x, y)[ch] != static_cast<int>(want);
        }
        wrong += out.pixel(x, y)[3] != 255;
      }
    }
  }
  Outcome o;
  o.pass = wrong == 0 && rs.size() == 1000;
  o.detail = std::to_string(rs.size()) + " r values x 256 c (plus 256 mixed pixels), " +
             std::to_string(checked) + " channel values, " + std::to_string(wrong) + " mismatches";
  return o;
}

// 5. Matching and AP against the enumeration oracle.
Outcome ap_oracle() {
  std::mt19937_64 rng(5);
  long label_bad = 0, ap_bad = 0, classes = 0;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto in = oracle::random_instance(rng, 10, 5, 3, false);
    const auto dets = oracle::to_detections(in.dets);
    label_bad += match_detections(dets, in.gt.annotations, 0.5) !=
                 oracle::match(in.dets, in.gt.annotations, 0.5);
    for (bool eleven : {false, true}) {
      const EvalReport r = evaluate(dets, in.gt, 0.5,
                                    eleven ? Interpolation::eleven_point : Interpolation::all_point);
      const auto per = oracle::per_class(in, 0.5, eleven);
      for (const auto& [cls, res] : per) {
        ++classes;
        const auto it = r.per_class_ap.find(cls);
        if (res.ap.has_value() != (it != r.per_class_ap.end())) {
          ++ap_bad;
          continue;
        }
        if (!res.ap) continue;
        const double d = std::abs(*res.ap - it->second);
        worst = std::max(worst, d);
        ap_bad += d > 1e-12;
      }
      const double dm = std::abs(r.map - oracle::mean_ap(per));
      worst = std::max(worst, dm);
      ap_bad += dm > 1e-12;
    }
  }
  using L = MatchLabel;
  const double worked = *average_precision({L::tp, L::fp, L::tp}, 2);
  const std::string worked_s = fmt("%.5f", worked);
  Outcome o;
  o.pass = label_bad == 0 && ap_bad == 0 && worked_s == "0.83333";
  o.detail = "10000 instances: " + std::to_string(label_bad) + " label mismatches, " +
             std::to_string(ap_bad) + " AP/mAP mismatches over " + std::to_string(classes) +
             " class evaluations (max diff " + fmt("%.1e", worst) +
             "); [TP,FP,TP] n_gt=2 -> " + worked_s;
  return o;
}

// 6. Worker count does not change output bytes.
Outcome determinism() {
  TempDir dir("acceptance-determinism");
  test::write_fixture(dir / "ex", dir / "ctx", 6, 5, 56, 320, 240);
  const std::vector<std::string> base{"synth", "--exemplars", (dir / "ex").string(),
                                      "--contexts", (dir / "ctx").string(), "--per-class", "12",
                                      "--tilt", "--seed", "99"};
  std::vector<std::map<std::string, std::string>> runs;
  for (const char* threads : {"1", "4", "8"}) {
    auto args = base;
    args.insert(args.end(), {"--threads", threads, "--out", (dir / threads).string()});
    if (run_cli(args) != 0) return {false, "synth failed"};
    runs.push_back(snapshot(dir / threads));
  }
  std::size_t images = 0;
  for (const auto& [path, bytes] : runs[0]) images += path.rfind("images/", 0) == 0;
  Outcome o;
  o.pass = runs[0] == runs[1] && runs[0] == runs[2] && images == 72 &&
           runs[0].count("annotations.jsonl") && runs[0].count("manifest.json");
  o.detail = "--threads 1/4/8: " + std::to_string(runs[0].size()) + " files (" +
             std::to_string(images) + " images, annotations, records, manifest) " +
             (o.pass ? "byte-identical" : "DIFFER");
  return o;
}

// 7. Plans and ablation modes.
Outcome ablation_coverage() {
  TempDir dir("acceptance-ablation");
  Outcome o;

  // Plans, through the command line and the library.
  write_annotations(test::grid_manifest(463, 1, "syn"), dir / "syn.jsonl");
  write_annotations(test::grid_manifest(32, 10, "real"), dir / "real.jsonl");
  if (run_cli({"plan", "--synthetic", (dir / "syn.jsonl").string(), "--real",
               (dir / "real.jsonl").string(), "--out", (dir / "plans").string()}) != 0) {
    return {false, "plan failed"};
  }
  int plans_ok = 0;
  for (PlanName n : kAllPlans) {
    const CurriculumPlan p =
        CurriculumPlan::from_json(test::slurp(dir / "plans" / (to_string(n) + ".plan.json")));
    p.validate();
    std::vector<std::vector<Source>> roles;
    for (const Stage& s : p.stages) {
      roles.emplace_back();
      for (const ManifestRef& r : s.manifests) roles.back().push_back(r.role);
    }
    using S = Source;
    std::vector<std::vector<S>> want;
    switch (n) {
      case PlanName::real_img: want = {{S::real}}; break;
      case PlanName::syn_img_x_cls:
      case PlanName::syn_img_463_cls: want = {{S::synthetic}}; break;
      case PlanName::syn_img_x_cls_real:
      case PlanName::syn_img_463_cls_real: want = {{S::synthetic}, {S::real}}; break;
      case PlanName::fusion: want = {{S::synthetic, S::real}}; break;
    }
    const bool staged = want.size() == 2;
    const bool modes_ok = !staged || (p.stages[0].mode == StageMode::train &&
                                      p.stages[1].mode == StageMode::finetune);
    plans_ok += roles == want && modes_ok && p.name == n;
  }
  o.pass &= plans_ok == 6;
  o.detail = std::to_string(plans_ok) + "/6 plans valid";

  // Ablation datasets.
  test::write_fixture(dir / "ex", dir / "ctx", 6, 4, 48, 240, 180);
  struct Mode {
    std::string flag;
    std::function<bool(const json& rec)> holds;
  };
  auto spec = [](const json& r, const char* k) { return r["spec"][k].get<double>(); };
  const std::vector<Mode> modes{
      {"clean_black", [](const json& r) { return r["context"] == "clean"; }},
      {"--no-scaling",
       [&](const json& r) {
         return spec(r, "sx") == 1.0 && spec(r, "sy") == 1.0 && r["scale_ratio"].is_null();
       }},
      {"--no-shearing", [&](const json& r) { return spec(r, "kx") == 0.0 && spec(r, "ky") == 0.0; }},
      {"--no-rotation", [&](const json& r) { return spec(r, "theta") == 0.0; }},
      {"--no-colouring", [&](const json& r) { return spec(r, "colour_r") == 1.0; }},
  };
  long records = 0, violations = 0;
  for (const Mode& mode : modes) {
    const fs::path out = dir / ("mode" + mode.flag);
    std::vector<std::string> args{"synth", "--exemplars", (dir / "ex").string(), "--per-class",
                                  "20", "--seed", "17", "--out", out.string()};
    if (mode.flag == "clean_black") {
      args.insert(args.end(), {"--context-mode", "clean_black", "--canvas-width", "200",
                               "--canvas-height", "160"});
    } else {
      args.insert(args.end(), {"--contexts", (dir / "ctx").string(), mode.flag});
    }
    if (run_cli(args) != 0) return {false, "synth " + mode.flag + " failed"};
    const auto recs = read_jsonl(out / "records.jsonl");
    const DatasetManifest m = read_annotations(out / "annotations.jsonl");
    for (const json& r : recs) {
      ++records;
      bool ok = mode.holds(r) && spec(r, "tilt_x") == 0.0 && spec(r, "tilt_y") == 0.0;
      if (mode.flag == "clean_black") {
        // Identity background: nothing but black outside the annotation box.
        const std::string id = r["image_id"];
        const auto& b = r["bbox"];
        const Box box{b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()};
        const RasterRGB px = read_rgb(out / "images" / r["class_name"].get<std::string>() /
                                      (id + ".png"));
        for (int y = 0; y < px.height() && ok; ++y) {
          for (int x = 0; x < px.width(); ++x) {
            const std::uint8_t* p = px.pixel(x, y);
            if (!box.contains(x, y) && (p[0] | p[1] | p[2])) {
              ok = false;
              break;
            }
          }
        }
      }
      violations += !ok;
    }
    if (recs.size() != 120 || m.images.size() != 120) return {false, mode.flag + ": wrong count"};
  }
  o.pass &= violations == 0;
  o.detail += "; 5 modes (clean_black, --no-scaling, --no-shearing, --no-rotation, "
              "--no-colouring): " +
              std::to_string(records - violations) + "/" + std::to_string(records) +
              " records satisfy their identity invariants";
  return o;
}

// 8. write -> read -> write is byte-identical.
Outcome roundtrip_io() {
  TempDir dir("acceptance-io");
  std::mt19937_64 rng(8);
  std::vector<std::size_t> sizes{0, 1, 2, 10, 1000, 50000};
  while (sizes.size() < 40) sizes.push_back(rng() % 50001);
  int ok = 0;
  for (std::size_t n : sizes) {
    const DatasetManifest m = test::random_manifest(rng, n);
    write_annotations(m, dir / "a.jsonl");
    const DatasetManifest back = read_annotations(dir / "a.jsonl");
    write_annotations(back, dir / "b.jsonl");
    ok += back == m && test::slurp(dir / "a.jsonl") == test::slurp(dir / "b.jsonl");
  }
  Outcome o;
  o.pass = ok == static_cast<int>(sizes.size());
  o.detail = std::to_string(ok) + "/" + std::to_string(sizes.size()) +
             " random manifests (0 to 50000 annotations) byte-identical on second write";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      only.insert(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--only N]...\n";
      return 2;
    }
  }
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, scale_reproduction}, {2, split_reproduction}, {3, transform_correctness},
      {4, colour_conformance}, {5, ap_oracle},          {6, determinism},
      {7, ablation_coverage},  {8, roundtrip_io},
  };
  bool all = true;
  for (const auto& [n, check] : criteria) {
    if (!only.empty() && !only.count(n)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all &= o.pass;
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail
              << "  [" << fmt("%.1f", s) << " s]" << std::endl;
  }
  return all ? 0 : 1;
}
