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
 * @file eval.hpp
 * @brief Detection scoring: IoU, greedy matching, AP and mAP.
 *
 * Boxes use inclusive corners, so a box spans (x1 - x0 + 1) x (y1 - y0 + 1)
 * pixels, the same convention as the annotation schema.
 *
 * Prediction files are JSON Lines, one detection per line:
 *
 *   {"image_id":"..","class_name":"..","bbox":[xmin,ymin,xmax,ymax],"score":0.93}
 */
#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scl/dataset.hpp"

namespace scl {

struct BoxD {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  static BoxD of(const Box& b) { return {double(b.x0), double(b.y0), double(b.x1), double(b.y1)}; }
  bool valid() const { return x0 <= x1 && y0 <= y1; }
  friend bool operator==(const BoxD&, const BoxD&) = default;
};

struct Detection {
  std::string image_id;
  std::string class_name;
  BoxD bbox;
  double score = 0.0;
};

/// Inclusive-corner IoU; 0 for disjoint boxes.
double iou(const BoxD& a, const BoxD& b);

enum class MatchLabel { tp, fp, ignored };

/**
 * Greedy matching. Detections are visited by descending score (ties keep
 * input order); each takes the unmatched ground truth of the same image and
 * class with the highest IoU (first one on ties). At IoU >= threshold it is a
 * TP, or `ignored` when that ground truth is difficult; otherwise an FP.
 * Difficult ground truths are never consumed.
 *
 * Returns one label per detection, in input order.
 */
std::vector<MatchLabel> match_detections(const std::vector<Detection>& dets,
                                         const std::vector<Annotation>& gts,
                                         double iou_threshold);

enum class Interpolation { all_point, eleven_point };

std::string to_string(Interpolation mode);
Interpolation parse_interpolation(const std::string& text);

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

/// Cumulative PR points for labels sorted by descending score; ignored
/// labels are skipped.
std::vector<PrPoint> pr_curve(const std::vector<MatchLabel>& ranked, std::size_t n_gt);

/**
 * AP over labels sorted by descending score.
 *
 *   all_point:    sum_i (r_i - r_{i-1}) * max_{k >= i} p_k
 *   eleven_point: mean over t in {0, 0.1, ..., 1} of max_{r_k >= t} p_k
 *
 * nullopt when n_gt == 0 and nothing was detected; 0 when n_gt == 0 and
 * there are detections.
 */
std::optional<double> average_precision(const std::vector<MatchLabel>& ranked, std::size_t n_gt,
                                         Interpolation mode = Interpolation::all_point);

struct ClassCounts {
  std::size_t n_gt = 0;  // excludes difficult
  std::size_t n_det = 0;
  std::size_t n_tp = 0;
  std::size_t n_fp = 0;
  std::size_t n_ignored = 0;
};

struct EvalReport {
  std::vector<std::string> classes;  // ground-truth class list, sorted
  std::map<std::string, double> per_class_ap;  // classes with a defined AP
  std::map<std::string, std::vector<PrPoint>> per_class_pr;
  std::map<std::string, ClassCounts> counts;
  /// Mean AP over classes with n_gt > 0 (0 when there are none).
  double map = 0.0;
  double iou_threshold = 0.5;
  Interpolation interpolation = Interpolation::all_point;

  std::string to_json() const;
  /// Aligned text table: one row per class, mAP last.
  std::string table() const;
};

/// Throws SchemaError (with line number).
std::vector<Detection> parse_detections(std::istream& in);
std::vector<Detection> read_detections(const std::filesystem::path& path);

/// Throws ClassMismatchError for a detection class absent from gt.classes.
EvalReport evaluate(const std::vector<Detection>& dets, const DatasetManifest& gt,
                    double iou_threshold = 0.5,
                    Interpolation mode = Interpolation::all_point);

EvalReport evaluate(const std::filesystem::path& pred_file, const std::filesystem::path& gt_file,
                    double iou_threshold = 0.5,
                    Interpolation mode = Interpolation::all_point);

}  // namespace scl
