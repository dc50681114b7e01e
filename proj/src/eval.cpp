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
#include "scl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "scl/errors.hpp"

namespace scl {

using nlohmann::json;

double iou(const BoxD& a, const BoxD& b) {
  const double iw = std::min(a.x1, b.x1) - std::max(a.x0, b.x0) + 1.0;
  const double ih = std::min(a.y1, b.y1) - std::max(a.y0, b.y0) + 1.0;
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double area_a = (a.x1 - a.x0 + 1.0) * (a.y1 - a.y0 + 1.0);
  const double area_b = (b.x1 - b.x0 + 1.0) * (b.y1 - b.y0 + 1.0);
  return inter / (area_a + area_b - inter);
}

std::vector<MatchLabel> match_detections(const std::vector<Detection>& dets,
                                         const std::vector<Annotation>& gts,
                                         double iou_threshold) {
  std::unordered_map<std::string, std::vector<std::size_t>> by_key;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    by_key[gts[g].image_id + '\n' + gts[g].class_name].push_back(g);
  }
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });

  std::vector<char> used(gts.size(), 0);
  std::vector<MatchLabel> labels(dets.size(), MatchLabel::fp);
  for (std::size_t d : order) {
    auto it = by_key.find(dets[d].image_id + '\n' + dets[d].class_name);
    if (it == by_key.end()) continue;
    double best = -1.0;
    std::size_t best_g = 0;
    for (std::size_t g : it->second) {
      if (used[g]) continue;
      const double o = iou(dets[d].bbox, BoxD::of(gts[g].bbox));
      if (o > best) best = o, best_g = g;
    }
    if (best < iou_threshold) continue;
    if (gts[best_g].difficult) {
      labels[d] = MatchLabel::ignored;
    } else {
      labels[d] = MatchLabel::tp;
      used[best_g] = 1;
    }
  }
  return labels;
}

std::string to_string(Interpolation mode) {
  return mode == Interpolation::all_point ? "all_point" : "eleven_point";
}

Interpolation parse_interpolation(const std::string& text) {
  if (text == "all_point") return Interpolation::all_point;
  if (text == "eleven_point") return Interpolation::eleven_point;
  throw UsageError("unknown interpolation '" + text + "' (expected all_point or eleven_point)");
}

std::vector<PrPoint> pr_curve(const std::vector<MatchLabel>& ranked, std::size_t n_gt) {
  std::vector<PrPoint> pr;
  std::size_t tp = 0;
  std::size_t seen = 0;
  for (MatchLabel l : ranked) {
    if (l == MatchLabel::ignored) continue;
    ++seen;
    if (l == MatchLabel::tp) ++tp;
    const double recall = n_gt ? double(tp) / double(n_gt) : 0.0;
    pr.push_back({recall, double(tp) / double(seen)});
  }
  return pr;
}

std::optional<double> average_precision(const std::vector<MatchLabel>& ranked, std::size_t n_gt,
                                        Interpolation mode) {
  const std::vector<PrPoint> pr = pr_curve(ranked, n_gt);
  if (n_gt == 0) {
    if (pr.empty()) return std::nullopt;
    return 0.0;
  }
  if (pr.empty()) return 0.0;

  std::vector<double> envelope(pr.size());
  double run = 0.0;
  for (std::size_t i = pr.size(); i-- > 0;) {
    run = std::max(run, pr[i].precision);
    envelope[i] = run;
  }

  double ap = 0.0;
  if (mode == Interpolation::all_point) {
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < pr.size(); ++i) {
      ap += (pr[i].recall - prev_recall) * envelope[i];
      prev_recall = pr[i].recall;
    }
    return ap;
  }
  for (int k = 0; k <= 10; ++k) {
    const double t = k / 10.0;
    // Recall is non-decreasing, so the first point at or above t carries the
    // envelope for t.
    auto it = std::lower_bound(pr.begin(), pr.end(), t,
                               [](const PrPoint& p, double v) { return p.recall < v; });
    if (it != pr.end()) ap += envelope[static_cast<std::size_t>(it - pr.begin())];
  }
  return ap / 11.0;
}

namespace {

std::string fmt(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace

std::string EvalReport::to_json() const {
  json per_class = json::object();
  for (const auto& c : classes) {
    const ClassCounts& n = counts.at(c);
    json pr = json::array();
    for (const auto& p : per_class_pr.at(c)) pr.push_back({p.recall, p.precision});
    auto ap = per_class_ap.find(c);
    per_class[c] = {{"ap", ap == per_class_ap.end() ? json(nullptr) : json(ap->second)},
                    {"n_gt", n.n_gt},
                    {"n_det", n.n_det},
                    {"n_tp", n.n_tp},
                    {"n_fp", n.n_fp},
                    {"n_ignored", n.n_ignored},
                    {"pr", pr}};
  }
  const json doc{{"classes", per_class},
                 {"map", map},
                 {"iou_threshold", iou_threshold},
                 {"interpolation", to_string(interpolation)}};
  return doc.dump(2) + "\n";
}

std::string EvalReport::table() const {
  std::size_t name_w = 5;
  for (const auto& c : classes) name_w = std::max(name_w, c.size());
  std::ostringstream out;
  auto row = [&](const std::string& name, const std::string& ap, const std::string& gt,
                 const std::string& det, const std::string& tp, const std::string& fp) {
    out << name << std::string(name_w - name.size() + 2, ' ');
    for (const std::string* cell : {&ap, &gt, &det, &tp, &fp}) {
      out << std::string(cell->size() < 8 ? 8 - cell->size() : 0, ' ') << *cell;
    }
    out << '\n';
  };
  row("class", "AP", "n_gt", "n_det", "TP", "FP");
  for (const auto& c : classes) {
    const ClassCounts& n = counts.at(c);
    auto ap = per_class_ap.find(c);
    row(c, ap == per_class_ap.end() ? "-" : fmt(100.0 * ap->second, 1), std::to_string(n.n_gt),
        std::to_string(n.n_det), std::to_string(n.n_tp), std::to_string(n.n_fp));
  }
  row("mAP", fmt(100.0 * map, 1), "", "", "", "");
  return out.str();
}

std::vector<Detection> parse_detections(std::istream& in) {
  std::vector<Detection> dets;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("invalid JSON: ") + e.what(), lineno);
    }
    Detection d;
    try {
      d.image_id = j.at("image_id").get<std::string>();
      d.class_name = j.at("class_name").get<std::string>();
      const auto& b = j.at("bbox");
      if (!b.is_array() || b.size() != 4) throw SchemaError("bbox must have 4 numbers", lineno);
      d.bbox = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
      d.score = j.at("score").get<double>();
    } catch (const json::exception& e) {
      throw SchemaError(std::string("bad detection: ") + e.what(), lineno);
    }
    if (!std::isfinite(d.score)) throw SchemaError("score must be finite", lineno);
    if (!d.bbox.valid() || !std::isfinite(d.bbox.x0) || !std::isfinite(d.bbox.x1) ||
        !std::isfinite(d.bbox.y0) || !std::isfinite(d.bbox.y1)) {
      throw SchemaError("bbox must be finite with xmin <= xmax and ymin <= ymax", lineno);
    }
    dets.push_back(std::move(d));
  }
  return dets;
}

std::vector<Detection> read_detections(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open");
  try {
    return parse_detections(in);
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

EvalReport evaluate(const std::vector<Detection>& dets, const DatasetManifest& gt,
                    double iou_threshold, Interpolation mode) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw InvalidParameterError("IoU threshold must lie in (0, 1]");
  }
  EvalReport report;
  report.classes = gt.classes;
  std::sort(report.classes.begin(), report.classes.end());
  report.iou_threshold = iou_threshold;
  report.interpolation = mode;

  for (const auto& c : report.classes) report.counts[c];
  for (const auto& d : dets) {
    if (!report.counts.count(d.class_name)) {
      throw ClassMismatchError("prediction class '" + d.class_name +
                               "' is not in the ground-truth class list");
    }
  }
  for (const auto& a : gt.annotations) {
    if (!a.difficult) ++report.counts[a.class_name].n_gt;
  }

  const std::vector<MatchLabel> labels = match_detections(dets, gt.annotations, iou_threshold);

  // Rank per class by descending score, ties in input order.
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });
  std::map<std::string, std::vector<MatchLabel>> ranked;
  for (std::size_t i : order) {
    ranked[dets[i].class_name].push_back(labels[i]);
    ClassCounts& n = report.counts[dets[i].class_name];
    ++n.n_det;
    if (labels[i] == MatchLabel::tp) ++n.n_tp;
    if (labels[i] == MatchLabel::fp) ++n.n_fp;
    if (labels[i] == MatchLabel::ignored) ++n.n_ignored;
  }

  double sum = 0.0;
  std::size_t counted = 0;
  for (const auto& c : report.classes) {
    const ClassCounts& n = report.counts[c];
    const auto& r = ranked[c];
    report.per_class_pr[c] = pr_curve(r, n.n_gt);
    const std::optional<double> ap = average_precision(r, n.n_gt, mode);
    if (ap) report.per_class_ap[c] = *ap;
    if (n.n_gt > 0) {
      sum += *ap;
      ++counted;
    }
  }
  report.map = counted ? sum / double(counted) : 0.0;
  return report;
}

EvalReport evaluate(const std::filesystem::path& pred_file, const std::filesystem::path& gt_file,
                    double iou_threshold, Interpolation mode) {
  return evaluate(read_detections(pred_file), load_manifest(gt_file), iou_threshold, mode);
}

}  // namespace scl
