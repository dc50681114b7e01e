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
#include "scl/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "scl/errors.hpp"
#include "scl/random.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace scl {

namespace {

template <typename T>
T field(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(std::string("missing field '") + key + "'", line);
  try {
    if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) throw SchemaError("", line);
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw SchemaError("", line);
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw SchemaError("", line);
      if constexpr (std::is_unsigned_v<T>) {
        if (it->is_number_integer() && !it->is_number_unsigned()) throw SchemaError("", line);
      }
    }
    return it->get<T>();
  } catch (const std::exception&) {
    throw SchemaError(std::string("field '") + key + "' has the wrong type", line);
  }
}

json header_json(const DatasetManifest& m) {
  return json{{"type", "header"},
              {"schema_version", kSchemaVersion},
              {"name", m.name},
              {"classes", m.classes},
              {"seed", m.seed},
              {"config_digest", m.config_digest},
              {"num_images", m.images.size()},
              {"num_annotations", m.annotations.size()}};
}

json image_json(const ImageEntry& e) {
  return json{{"type", "image"},
              {"image_id", e.image_id},
              {"path", e.path},
              {"width", e.width},
              {"height", e.height}};
}

json annotation_json(const Annotation& a) {
  return json{{"type", "annotation"},
              {"image_id", a.image_id},
              {"class_name", a.class_name},
              {"bbox", {a.bbox.x0, a.bbox.y0, a.bbox.x1, a.bbox.y1}},
              {"source", to_string(a.source)},
              {"difficult", a.difficult}};
}

Source parse_source(const std::string& s, std::size_t line) {
  if (s == "synthetic") return Source::synthetic;
  if (s == "real") return Source::real;
  throw SchemaError("unknown source '" + s + "'", line);
}

void check_classes(const std::vector<std::string>& classes, std::size_t line) {
  for (std::size_t i = 1; i < classes.size(); ++i) {
    if (!(classes[i - 1] < classes[i])) {
      throw SchemaError("class list must be sorted and unique", line);
    }
  }
}

void check_bbox(const Box& b, std::size_t line) {
  if (b.x1 < b.x0 || b.y1 < b.y0) {
    std::ostringstream os;
    os << "bbox " << b << " has xmax < xmin or ymax < ymin";
    throw SchemaError(os.str(), line);
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string plan_description(PlanName name) {
  switch (name) {
    case PlanName::real_img:
      return "train on real images only";
    case PlanName::syn_img_x_cls:
      return "train on synthetic images of the target classes only";
    case PlanName::syn_img_463_cls:
      return "train on synthetic images of all exemplar classes only";
    case PlanName::syn_img_x_cls_real:
      return "pre-train on target-class synthetic images, then fine-tune on real images";
    case PlanName::syn_img_463_cls_real:
      return "pre-train on all-class synthetic images, then fine-tune on real images";
    case PlanName::fusion:
      return "train once on the union of synthetic and real images";
  }
  return {};
}

std::string to_string(StageMode m) { return m == StageMode::train ? "train" : "finetune"; }

}  // namespace

std::string digest_text(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  static const char* kHex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[i] = kHex[h & 0xF];
  return out;
}

std::string to_string(Source s) { return s == Source::synthetic ? "synthetic" : "real"; }

void DatasetManifest::validate() const {
  check_classes(classes, 0);
  std::unordered_set<std::string> ids;
  for (const auto& img : images) {
    if (!ids.insert(img.image_id).second) {
      throw SchemaError("duplicate image_id '" + img.image_id + "'");
    }
    if (img.width < 0 || img.height < 0) throw SchemaError("negative image size");
  }
  for (const auto& a : annotations) {
    if (!ids.count(a.image_id)) {
      throw SchemaError("annotation references unknown image '" + a.image_id + "'");
    }
    if (!std::binary_search(classes.begin(), classes.end(), a.class_name)) {
      throw UnknownClassError("annotation class '" + a.class_name + "' not in class list");
    }
    check_bbox(a.bbox, 0);
  }
}

std::string serialize_annotations(const DatasetManifest& m) {
  std::string out = header_json(m).dump();
  out += '\n';
  for (const auto& img : m.images) {
    out += image_json(img).dump();
    out += '\n';
  }
  for (const auto& a : m.annotations) {
    out += annotation_json(a).dump();
    out += '\n';
  }
  return out;
}

void write_annotations(const DatasetManifest& manifest, const fs::path& path) {
  manifest.validate();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(path.string() + ": cannot open for writing");
  const std::string text = serialize_annotations(manifest);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw IoError(path.string() + ": write failed");
}

DatasetManifest parse_annotations(std::istream& in) {
  DatasetManifest m;
  std::string text;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t want_images = 0, want_annotations = 0;
  std::unordered_set<std::string> ids;

  while (std::getline(in, text)) {
    ++line_no;
    if (text.empty() || text == "\r") continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!obj.is_object()) throw SchemaError("expected a JSON object", line_no);
    const auto type = field<std::string>(obj, "type", line_no);

    if (!have_header) {
      if (type != "header") throw SchemaError("first record must be the header", line_no);
      const int version = field<int>(obj, "schema_version", line_no);
      if (version != kSchemaVersion) {
        throw SchemaError("unsupported schema_version " + std::to_string(version), line_no);
      }
      m.name = field<std::string>(obj, "name", line_no);
      m.classes = field<std::vector<std::string>>(obj, "classes", line_no);
      check_classes(m.classes, line_no);
      m.seed = field<std::uint64_t>(obj, "seed", line_no);
      m.config_digest = field<std::string>(obj, "config_digest", line_no);
      want_images = field<std::size_t>(obj, "num_images", line_no);
      want_annotations = field<std::size_t>(obj, "num_annotations", line_no);
      m.images.reserve(want_images);
      m.annotations.reserve(want_annotations);
      have_header = true;
    } else if (type == "image") {
      ImageEntry e;
      e.image_id = field<std::string>(obj, "image_id", line_no);
      e.path = field<std::string>(obj, "path", line_no);
      e.width = field<int>(obj, "width", line_no);
      e.height = field<int>(obj, "height", line_no);
      if (e.width < 0 || e.height < 0) throw SchemaError("negative image size", line_no);
      if (!ids.insert(e.image_id).second) {
        throw SchemaError("duplicate image_id '" + e.image_id + "'", line_no);
      }
      m.images.push_back(std::move(e));
    } else if (type == "annotation") {
      Annotation a;
      a.image_id = field<std::string>(obj, "image_id", line_no);
      a.class_name = field<std::string>(obj, "class_name", line_no);
      const auto b = field<std::vector<int>>(obj, "bbox", line_no);
      if (b.size() != 4) throw SchemaError("bbox must have 4 integers", line_no);
      a.bbox = {b[0], b[1], b[2], b[3]};
      check_bbox(a.bbox, line_no);
      a.source = parse_source(field<std::string>(obj, "source", line_no), line_no);
      a.difficult = field<bool>(obj, "difficult", line_no);
      if (!std::binary_search(m.classes.begin(), m.classes.end(), a.class_name)) {
        throw UnknownClassError("line " + std::to_string(line_no) + ": class '" +
                                a.class_name + "' not in the header's class list");
      }
      m.annotations.push_back(std::move(a));
    } else {
      throw SchemaError("unknown record type '" + type + "'", line_no);
    }
  }
  if (!have_header) throw SchemaError("missing header line", line_no ? line_no : 1);
  if (m.images.size() != want_images || m.annotations.size() != want_annotations) {
    throw SchemaError("record counts do not match the header", line_no);
  }
  for (std::size_t i = 0; i < m.annotations.size(); ++i) {
    if (!ids.count(m.annotations[i].image_id)) {
      throw SchemaError("annotation references unknown image '" + m.annotations[i].image_id +
                        "'", 2 + m.images.size() + i);
    }
  }
  return m;
}

DatasetManifest read_annotations(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(path.string() + ": cannot open");
  try {
    return parse_annotations(f);
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.message(), e.line());
  }
}

DatasetManifest import_csv(const fs::path& path, const std::string& name) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(path.string() + ": cannot open");
  DatasetManifest m;
  m.name = name.empty() ? path.stem().string() : name;
  std::set<std::string> classes;
  std::unordered_map<std::string, std::size_t> seen;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(f, text)) {
    ++line_no;
    if (text.empty() || text == "\r") continue;
    const auto cols = split_csv_line(text);
    if (cols.size() != 6) throw SchemaError("expected 6 columns", line_no);
    if (line_no == 1 && cols[0] == "image") continue;
    Annotation a;
    a.image_id = cols[0];
    a.class_name = cols[1];
    int v[4];
    for (int k = 0; k < 4; ++k) {
      try {
        std::size_t used = 0;
        v[k] = std::stoi(cols[2 + k], &used);
        if (used != cols[2 + k].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw SchemaError("coordinate '" + cols[2 + k] + "' is not an integer", line_no);
      }
    }
    a.bbox = {v[0], v[1], v[2], v[3]};
    check_bbox(a.bbox, line_no);
    a.source = Source::real;
    if (!seen.count(a.image_id)) {
      seen.emplace(a.image_id, m.images.size());
      m.images.push_back({a.image_id, a.image_id, 0, 0});
    }
    classes.insert(a.class_name);
    m.annotations.push_back(std::move(a));
  }
  m.classes.assign(classes.begin(), classes.end());
  m.config_digest = digest_text(serialize_annotations(m));
  return m;
}

DatasetManifest load_manifest(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
  return ext == ".csv" ? import_csv(path) : read_annotations(path);
}

void write_manifest_json(const DatasetManifest& m, const fs::path& path,
                         const std::string& annotations_file,
                         const std::vector<std::pair<std::string, std::string>>& config) {
  std::map<std::string, std::size_t> per_class;
  for (const auto& c : m.classes) per_class[c] = 0;
  for (const auto& a : m.annotations) ++per_class[a.class_name];
  json cfg = json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  const json doc{{"schema_version", kSchemaVersion},
                 {"name", m.name},
                 {"classes", m.classes},
                 {"num_classes", m.classes.size()},
                 {"num_images", m.images.size()},
                 {"num_annotations", m.annotations.size()},
                 {"annotations_per_class", per_class},
                 {"seed", m.seed},
                 {"config_digest", m.config_digest},
                 {"annotations_file", annotations_file},
                 {"config", cfg}};
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(path.string() + ": cannot open for writing");
  f << doc.dump(2) << '\n';
}

SplitResult split_dataset(const DatasetManifest& manifest, int n_train_per_class,
                          std::uint64_t seed) {
  if (n_train_per_class < 0) throw InvalidParameterError("n_train_per_class must be >= 0");
  manifest.validate();

  // Lexicographically first class of each image.
  std::unordered_map<std::string, std::string> first_class;
  for (const auto& a : manifest.annotations) {
    auto [it, inserted] = first_class.emplace(a.image_id, a.class_name);
    if (!inserted && a.class_name < it->second) it->second = a.class_name;
  }
  std::map<std::string, std::vector<std::size_t>> buckets;
  for (const auto& c : manifest.classes) buckets[c];
  for (std::size_t i = 0; i < manifest.images.size(); ++i) {
    auto it = first_class.find(manifest.images[i].image_id);
    if (it != first_class.end()) buckets[it->second].push_back(i);
  }

  std::vector<bool> is_train(manifest.images.size(), false);
  std::size_t class_index = 0;
  for (auto& [cls, members] : buckets) {
    const auto need = static_cast<std::size_t>(n_train_per_class);
    if (members.size() <= need) {
      throw InsufficientImagesError("class '" + cls + "' has " + std::to_string(members.size()) +
                                    " images, needs more than " + std::to_string(need));
    }
    // Partial Fisher-Yates: the first `need` slots become a uniform sample.
    Engine eng(sub_seed(mix64(seed), class_index++));
    for (std::size_t k = 0; k < need; ++k) {
      const std::size_t j = k + uniform_index(eng, members.size() - k);
      std::swap(members[k], members[j]);
      is_train[members[k]] = true;
    }
  }

  SplitResult out;
  const std::string params = manifest.config_digest + "|split|" +
                             std::to_string(n_train_per_class) + "|" + std::to_string(seed);
  for (DatasetManifest* part : {&out.train, &out.test}) {
    part->classes = manifest.classes;
    part->seed = seed;
  }
  out.train.name = manifest.name + "-train";
  out.test.name = manifest.name + "-test";
  out.train.config_digest = digest_text(params + "|train");
  out.test.config_digest = digest_text(params + "|test");

  std::unordered_set<std::string> train_ids;
  for (std::size_t i = 0; i < manifest.images.size(); ++i) {
    (is_train[i] ? out.train : out.test).images.push_back(manifest.images[i]);
    if (is_train[i]) train_ids.insert(manifest.images[i].image_id);
  }
  for (const auto& a : manifest.annotations) {
    (train_ids.count(a.image_id) ? out.train : out.test).annotations.push_back(a);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(PlanName name) {
  switch (name) {
    case PlanName::real_img:
      return "RealImg";
    case PlanName::syn_img_x_cls:
      return "SynImg-xCls";
    case PlanName::syn_img_463_cls:
      return "SynImg-463Cls";
    case PlanName::syn_img_x_cls_real:
      return "SynImg-xCls+RealImg";
    case PlanName::syn_img_463_cls_real:
      return "SynImg-463Cls+RealImg";
    case PlanName::fusion:
      return "Fusion";
  }
  return {};
}

PlanName parse_plan_name(std::string_view text) {
  for (PlanName p : kAllPlans) {
    if (to_string(p) == text) return p;
  }
  std::string names;
  for (PlanName p : kAllPlans) names += (names.empty() ? "" : ", ") + to_string(p);
  throw UsageError("unknown plan '" + std::string(text) + "' (expected one of: " + names + ")");
}

ManifestRef ManifestRef::of(const DatasetManifest& m, Source role, std::string path) {
  return {role, m.name, std::move(path), m.images.size(), m.annotations.size(),
          m.classes.size(), m.config_digest};
}

void CurriculumPlan::validate() const {
  auto only = [](const Stage& s, Source role) {
    return s.manifests.size() == 1 && s.manifests[0].role == role;
  };
  const std::string n = to_string(name);
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (stages[i].stage_id != static_cast<int>(i) + 1) {
      throw SchemaError(n + ": stage ids must be 1, 2, ...");
    }
  }
  switch (name) {
    case PlanName::real_img:
      if (stages.size() != 1 || !only(stages[0], Source::real) ||
          stages[0].mode != StageMode::train) {
        throw SchemaError(n + ": expected one training stage on real images");
      }
      return;
    case PlanName::syn_img_x_cls:
    case PlanName::syn_img_463_cls:
      if (stages.size() != 1 || !only(stages[0], Source::synthetic) ||
          stages[0].mode != StageMode::train) {
        throw SchemaError(n + ": expected one training stage on synthetic images");
      }
      return;
    case PlanName::syn_img_x_cls_real:
    case PlanName::syn_img_463_cls_real:
      if (stages.size() != 2 || !only(stages[0], Source::synthetic) ||
          stages[0].mode != StageMode::train || !only(stages[1], Source::real) ||
          stages[1].mode != StageMode::finetune) {
        throw SchemaError(n + ": expected synthetic pre-training then real fine-tuning");
      }
      return;
    case PlanName::fusion:
      if (stages.size() != 1 || stages[0].manifests.size() != 2 ||
          stages[0].manifests[0].role != Source::synthetic ||
          stages[0].manifests[1].role != Source::real || stages[0].mode != StageMode::train) {
        throw SchemaError(n + ": expected one training stage on synthetic + real images");
      }
      return;
  }
}

std::string CurriculumPlan::to_json() const {
  json stages_json = json::array();
  for (const auto& s : stages) {
    json ms = json::array();
    for (const auto& r : s.manifests) {
      ms.push_back({{"role", to_string(r.role)},
                    {"name", r.name},
                    {"path", r.path},
                    {"num_images", r.num_images},
                    {"num_annotations", r.num_annotations},
                    {"num_classes", r.num_classes},
                    {"config_digest", r.config_digest}});
    }
    stages_json.push_back({{"stage_id", s.stage_id}, {"mode", to_string(s.mode)}, {"manifests", ms}});
  }
  const json doc{{"schema_version", kSchemaVersion},
                 {"plan_name", to_string(name)},
                 {"description", plan_description(name)},
                 {"stages", stages_json}};
  return doc.dump(2) + "\n";
}

CurriculumPlan CurriculumPlan::from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid plan JSON: ") + e.what());
  }
  if (field<int>(doc, "schema_version", 0) != kSchemaVersion) {
    throw SchemaError("unsupported plan schema_version");
  }
  CurriculumPlan plan;
  try {
    plan.name = parse_plan_name(field<std::string>(doc, "plan_name", 0));
  } catch (const UsageError& e) {
    throw SchemaError(e.what());
  }
  if (!doc.contains("stages") || !doc["stages"].is_array()) throw SchemaError("missing stages");
  for (const auto& s : doc["stages"]) {
    Stage st;
    st.stage_id = field<int>(s, "stage_id", 0);
    const auto mode = field<std::string>(s, "mode", 0);
    if (mode != "train" && mode != "finetune") throw SchemaError("unknown stage mode " + mode);
    st.mode = mode == "train" ? StageMode::train : StageMode::finetune;
    if (!s.contains("manifests") || !s["manifests"].is_array()) {
      throw SchemaError("stage without manifests");
    }
    for (const auto& r : s["manifests"]) {
      ManifestRef ref;
      ref.role = parse_source(field<std::string>(r, "role", 0), 0);
      ref.name = field<std::string>(r, "name", 0);
      ref.path = field<std::string>(r, "path", 0);
      ref.num_images = field<std::size_t>(r, "num_images", 0);
      ref.num_annotations = field<std::size_t>(r, "num_annotations", 0);
      ref.num_classes = field<std::size_t>(r, "num_classes", 0);
      ref.config_digest = field<std::string>(r, "config_digest", 0);
      st.manifests.push_back(std::move(ref));
    }
    plan.stages.push_back(std::move(st));
  }
  plan.validate();
  return plan;
}

CurriculumPlan make_plan(PlanName name, const std::optional<ManifestRef>& synthetic,
                         const std::optional<ManifestRef>& real) {
  const bool needs_synth = name != PlanName::real_img;
  const bool needs_real = name == PlanName::real_img || name == PlanName::syn_img_x_cls_real ||
                          name == PlanName::syn_img_463_cls_real || name == PlanName::fusion;
  if (needs_synth && !synthetic) {
    throw MissingManifestError(to_string(name) + " requires a synthetic manifest");
  }
  if (needs_real && !real) {
    throw MissingManifestError(to_string(name) + " requires a real training manifest");
  }
  auto as = [](ManifestRef r, Source role) {
    r.role = role;
    return r;
  };

  CurriculumPlan plan;
  plan.name = name;
  switch (name) {
    case PlanName::real_img:
      plan.stages = {{1, StageMode::train, {as(*real, Source::real)}}};
      break;
    case PlanName::syn_img_x_cls:
    case PlanName::syn_img_463_cls:
      plan.stages = {{1, StageMode::train, {as(*synthetic, Source::synthetic)}}};
      break;
    case PlanName::syn_img_x_cls_real:
    case PlanName::syn_img_463_cls_real:
      plan.stages = {{1, StageMode::train, {as(*synthetic, Source::synthetic)}},
                     {2, StageMode::finetune, {as(*real, Source::real)}}};
      break;
    case PlanName::fusion:
      plan.stages = {
          {1, StageMode::train, {as(*synthetic, Source::synthetic), as(*real, Source::real)}}};
      break;
  }
  plan.validate();
  return plan;
}

}  // namespace scl
