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
#include "scl/exemplar.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "scl/errors.hpp"
#include "scl/image_io.hpp"
#include "scl/parallel.hpp"

namespace fs = std::filesystem;

namespace scl {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool is_context_file(const fs::path& p) {
  const std::string ext = lower(p.extension().string());
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::vector<fs::path> list_files(const fs::path& dir, bool (*keep)(const fs::path&)) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw IoError(dir.string() + ": not a directory");
  }
  std::vector<fs::path> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && keep(entry.path())) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end(), [&](const fs::path& a, const fs::path& b) {
    return fs::relative(a, dir).generic_string() < fs::relative(b, dir).generic_string();
  });
  return out;
}

// Rethrows the active scl::Error with `path` prepended, preserving its type.
template <typename E>
[[noreturn]] void rethrow_with_path(const E& e, const fs::path& path) {
  const std::string what = e.what();
  const std::string p = path.string();
  if (what.rfind(p, 0) == 0) throw e;
  throw E(p + ": " + what);
}

}  // namespace

const Exemplar* Registry::find(const std::string& class_name) const {
  auto it = std::lower_bound(
      exemplars.begin(), exemplars.end(), class_name,
      [](const Exemplar& e, const std::string& name) { return e.class_name < name; });
  if (it == exemplars.end() || it->class_name != class_name) return nullptr;
  return &*it;
}

std::vector<std::string> Registry::class_names() const {
  std::vector<std::string> names;
  names.reserve(exemplars.size());
  for (const auto& e : exemplars) names.push_back(e.class_name);
  return names;
}

Exemplar make_exemplar(RasterRGBA pixels, const std::string& class_name, int class_id,
                       int alpha_threshold) {
  if (alpha_threshold < 0 || alpha_threshold > 255) {
    throw InvalidParameterError("alpha threshold must lie in [0, 255]");
  }
  Exemplar e;
  e.class_name = class_name;
  e.class_id = class_id;
  e.opaque_bbox = tight_bbox(pixels, alpha_threshold);
  e.pixels = std::move(pixels);
  return e;
}

Exemplar load_exemplar(const fs::path& path, const std::string& class_name,
                       int alpha_threshold) {
  try {
    return make_exemplar(read_rgba(path), class_name, 0, alpha_threshold);
  } catch (const EmptyLogoError& e) {
    rethrow_with_path(e, path);
  } catch (const NoAlphaError& e) {
    rethrow_with_path(e, path);
  } catch (const DecodeError& e) {
    rethrow_with_path(e, path);
  }
}

Registry load_registry(const fs::path& exemplar_dir, const fs::path& context_dir,
                       const LoadOptions& options) {
  Registry reg;

  const auto exemplar_files =
      list_files(exemplar_dir, [](const fs::path& p) { return lower(p.extension().string()) == ".png"; });
  std::map<std::string, fs::path> by_class;
  for (const auto& p : exemplar_files) {
    const std::string name = p.stem().string();
    auto [it, inserted] = by_class.emplace(name, p);
    if (!inserted) {
      throw DuplicateClassError("class '" + name + "' defined by both " + it->second.string() +
                                " and " + p.string());
    }
  }
  if (by_class.empty()) {
    throw EmptyRegistryError(exemplar_dir.string() + ": no exemplar images found");
  }

  reg.exemplars.resize(by_class.size());
  std::vector<std::pair<std::string, fs::path>> ordered(by_class.begin(), by_class.end());
  parallel_for(ordered.size(), options.threads, [&](std::size_t i) {
    reg.exemplars[i] = load_exemplar(ordered[i].second, ordered[i].first, options.alpha_threshold);
    reg.exemplars[i].class_id = static_cast<int>(i);
  });

  if (!context_dir.empty()) {
    reg.context_root = context_dir;
    const auto context_files = list_files(context_dir, is_context_file);
    reg.contexts.resize(context_files.size());
    parallel_for(context_files.size(), options.threads, [&](std::size_t i) {
      const fs::path rel = fs::relative(context_files[i], context_dir);
      ImageSize size;
      try {
        size = probe_image(context_files[i]);
      } catch (const DecodeError& e) {
        rethrow_with_path(e, context_files[i]);
      }
      ContextImage& c = reg.contexts[i];
      c.path = rel.generic_string();
      c.width = size.width;
      c.height = size.height;
      if (rel.has_parent_path() && !rel.parent_path().empty()) {
        c.tag = rel.begin()->string();
      }
    });
  }
  return reg;
}

RasterRGB load_context_pixels(const Registry& registry, const ContextImage& context) {
  return read_rgb(registry.context_root / context.path);
}

}  // namespace scl
