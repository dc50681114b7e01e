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
 * @file dataset.hpp
 * @brief Annotation manifests, train/test splitting and curriculum plans.
 *
 * annotations.jsonl (schema_version 1) is UTF-8 JSON Lines with keys sorted:
 *
 *   line 1      {"classes":[...],"config_digest":"..","name":"..","num_annotations":A,
 *                "num_images":I,"schema_version":1,"seed":S,"type":"header"}
 *   I lines     {"height":H,"image_id":"..","path":"..","type":"image","width":W}
 *   A lines     {"bbox":[xmin,ymin,xmax,ymax],"class_name":"..","difficult":false,
 *                "image_id":"..","source":"synthetic"|"real","type":"annotation"}
 *
 * Boxes are integer pixels with inclusive corners. A width or height of 0
 * means the image size is unknown (e.g. imported from CSV).
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scl/geometry.hpp"

namespace scl {

inline constexpr int kSchemaVersion = 1;

enum class Source { synthetic, real };

struct Annotation {
  std::string image_id;
  std::string class_name;
  Box bbox;
  Source source = Source::real;
  bool difficult = false;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct ImageEntry {
  std::string image_id;
  std::string path;
  int width = 0;
  int height = 0;

  friend bool operator==(const ImageEntry&, const ImageEntry&) = default;
};

struct DatasetManifest {
  std::string name;
  std::vector<std::string> classes;  // sorted, unique
  std::vector<ImageEntry> images;
  std::vector<Annotation> annotations;
  std::uint64_t seed = 0;
  std::string config_digest;

  /// Throws SchemaError or UnknownClassError on the first violated invariant.
  void validate() const;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/// FNV-1a 64 of `text` as 16 lowercase hex digits.
std::string digest_text(std::string_view text);

std::string to_string(Source s);

std::string serialize_annotations(const DatasetManifest& manifest);
void write_annotations(const DatasetManifest& manifest, const std::filesystem::path& path);

/// Throws SchemaError (with line number) and UnknownClassError.
DatasetManifest parse_annotations(std::istream& in);
DatasetManifest read_annotations(const std::filesystem::path& path);

/// Imports CSV rows `image,class,xmin,ymin,xmax,ymax` (header row optional).
DatasetManifest import_csv(const std::filesystem::path& path, const std::string& name = "");

/// read_annotations, or import_csv for *.csv files.
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Summary document written next to annotations.jsonl.
void write_manifest_json(const DatasetManifest& manifest, const std::filesystem::path& path,
                         const std::string& annotations_file,
                         const std::vector<std::pair<std::string, std::string>>& config = {});

struct SplitResult {
  DatasetManifest train;
  DatasetManifest test;
};

/**
 * Image-level split: for every class, `n_train_per_class` of its images are
 * drawn uniformly without replacement. Each image belongs to the bucket of
 * its lexicographically first class; images without annotations go to test.
 *
 * Throws InsufficientImagesError when a class has <= n_train_per_class images.
 */
SplitResult split_dataset(const DatasetManifest& manifest, int n_train_per_class,
                          std::uint64_t seed);

// ---------------------------------------------------------------------------
// Curriculum plans

enum class PlanName {
  real_img,              // RealImg
  syn_img_x_cls,         // SynImg-xCls
  syn_img_463_cls,       // SynImg-463Cls
  syn_img_x_cls_real,    // SynImg-xCls+RealImg
  syn_img_463_cls_real,  // SynImg-463Cls+RealImg
  fusion,                // Fusion
};

inline constexpr PlanName kAllPlans[] = {
    PlanName::real_img,           PlanName::syn_img_x_cls,        PlanName::syn_img_463_cls,
    PlanName::syn_img_x_cls_real, PlanName::syn_img_463_cls_real, PlanName::fusion,
};

std::string to_string(PlanName name);
/// Accepts the canonical names above. Throws UsageError.
PlanName parse_plan_name(std::string_view text);

enum class StageMode { train, finetune };

struct ManifestRef {
  Source role = Source::synthetic;
  std::string name;
  std::string path;
  std::size_t num_images = 0;
  std::size_t num_annotations = 0;
  std::size_t num_classes = 0;
  std::string config_digest;

  static ManifestRef of(const DatasetManifest& m, Source role, std::string path);
  friend bool operator==(const ManifestRef&, const ManifestRef&) = default;
};

struct Stage {
  int stage_id = 1;
  StageMode mode = StageMode::train;
  std::vector<ManifestRef> manifests;

  friend bool operator==(const Stage&, const Stage&) = default;
};

struct CurriculumPlan {
  PlanName name = PlanName::real_img;
  std::vector<Stage> stages;

  /// Checks the stage structure required by `name`. Throws SchemaError.
  void validate() const;
  std::string to_json() const;
  static CurriculumPlan from_json(std::string_view text);

  friend bool operator==(const CurriculumPlan&, const CurriculumPlan&) = default;
};

/**
 * RealImg and SynImg-* run a single training stage on one source. The staged
 * plans pre-train on synthetic data and fine-tune on real data. Fusion trains
 * once on the union.
 *
 * Throws MissingManifestError when a required manifest is absent.
 */
CurriculumPlan make_plan(PlanName name, const std::optional<ManifestRef>& synthetic,
                         const std::optional<ManifestRef>& real);

}  // namespace scl
