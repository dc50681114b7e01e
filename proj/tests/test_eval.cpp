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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "scl/errors.hpp"
#include "scl/eval.hpp"
#include "support.hpp"

using namespace scl;
using test::TempDir;
using L = MatchLabel;

namespace {

Annotation gt(const std::string& image, const std::string& cls, Box b, bool difficult = false) {
  return {image, cls, b, Source::real, difficult};
}

Detection det(const std::string& image, const std::string& cls, Box b, double score) {
  return {image, cls, BoxD::of(b), score};
}

DatasetManifest manifest_of(std::vector<std::string> classes, std::vector<Annotation> anns) {
  DatasetManifest m;
  m.classes = std::move(classes);
  std::set<std::string> seen;
  for (const auto& a : anns) {
    if (seen.insert(a.image_id).second) m.images.push_back({a.image_id, a.image_id, 100, 100});
  }
  m.annotations = std::move(anns);
  return m;
}

}  // namespace

TEST_CASE("iou examples") {
  CHECK(iou({0, 0, 1, 1}, {1, 0, 2, 1}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(iou({3, 4, 9, 9}, {3, 4, 9, 9}) == 1.0);
  CHECK(iou({0, 0, 1, 1}, {5, 5, 6, 6}) == 0.0);
  CHECK(iou({0, 0, 1, 1}, {2, 0, 3, 1}) == 0.0);  // touching only
  CHECK(iou({0, 0, 0, 0}, {0, 0, 0, 0}) == 1.0);  // one pixel
}

TEST_CASE("iou agrees with pixel counting and is symmetric") {
  std::mt19937_64 rng(5);
  auto box = [&] {
    const int x0 = static_cast<int>(rng() % 20), y0 = static_cast<int>(rng() % 20);
    return Box{x0, y0, x0 + static_cast<int>(rng() % 8), y0 + static_cast<int>(rng() % 8)};
  };
  for (int i = 0; i < 5000; ++i) {
    const Box a = box(), b = box();
    const double v = iou(BoxD::of(a), BoxD::of(b));
    REQUIRE(v == doctest::Approx(oracle::iou(a, b)).epsilon(1e-14));
    REQUIRE(v == iou(BoxD::of(b), BoxD::of(a)));
    REQUIRE(v >= 0.0);
    REQUIRE(v <= 1.0);
  }
}

TEST_CASE("matching examples") {
  const std::vector<Annotation> gts{gt("a", "x", {0, 0, 9, 9})};
  CHECK(match_detections({det("a", "x", {0, 0, 9, 8}, 0.7)}, gts, 0.5) == std::vector<L>{L::tp});
  // Double detection: the higher score wins, regardless of input order.
  CHECK(match_detections({det("a", "x", {0, 0, 9, 8}, 0.2), det("a", "x", {0, 0, 9, 9}, 0.9)},
                         gts, 0.5) == std::vector<L>{L::fp, L::tp});
  // Wrong image or class never matches.
  CHECK(match_detections({det("b", "x", {0, 0, 9, 9}, 1), det("a", "y", {0, 0, 9, 9}, 1)}, gts,
                         0.5) == std::vector<L>{L::fp, L::fp});
  // Below threshold.
  CHECK(match_detections({det("a", "x", {0, 0, 4, 4}, 1)}, gts, 0.5) == std::vector<L>{L::fp});
  // Highest IoU among unmatched ground truths.
  const std::vector<Annotation> two{gt("a", "x", {0, 0, 9, 9}), gt("a", "x", {2, 0, 11, 9})};
  CHECK(match_detections({det("a", "x", {2, 0, 11, 9}, 0.9), det("a", "x", {2, 0, 11, 9}, 0.8)},
                         two, 0.5) == std::vector<L>{L::tp, L::tp});
  // Equal scores keep input order.
  CHECK(match_detections({det("a", "x", {0, 0, 9, 8}, 0.5), det("a", "x", {0, 0, 9, 9}, 0.5)},
                         gts, 0.5) == std::vector<L>{L::tp, L::fp});
}

TEST_CASE("difficult ground truths") {
  const std::vector<Annotation> gts{gt("a", "x", {0, 0, 9, 9}, true)};
  CHECK(match_detections({det("a", "x", {0, 0, 9, 9}, 1), det("a", "x", {0, 0, 9, 9}, 0.5)}, gts,
                         0.5) == std::vector<L>{L::ignored, L::ignored});
  const EvalReport r = evaluate({det("a", "x", {0, 0, 9, 9}, 1)},
                                manifest_of({"x"}, {gt("a", "x", {0, 0, 9, 9}, true)}));
  CHECK(r.counts.at("x").n_gt == 0);
  CHECK(r.counts.at("x").n_ignored == 1);
  CHECK(r.per_class_ap.count("x") == 0);  // nothing scorable
  CHECK(r.map == 0.0);
}

TEST_CASE("matching agrees with the step-by-step oracle") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 3000; ++i) {
    const auto in = oracle::random_instance(rng, 10, 5, 3, i % 2 == 1);
    const double thr = i % 3 == 0 ? 0.5 : 0.3;
    REQUIRE(match_detections(oracle::to_detections(in.dets), in.gt.annotations, thr) ==
            oracle::match(in.dets, in.gt.annotations, thr));
  }
}

TEST_CASE("average_precision examples") {
  CHECK(*average_precision({L::tp}, 1) == 1.0);
  CHECK(*average_precision({L::fp, L::fp}, 3) == 0.0);
  CHECK(*average_precision({}, 3) == 0.0);
  CHECK(*average_precision({L::tp, L::fp, L::tp}, 2) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(std::round(*average_precision({L::tp, L::fp, L::tp}, 2) * 1e5) / 1e5 == 0.83333);
  CHECK_FALSE(average_precision({}, 0).has_value());
  CHECK(*average_precision({L::fp}, 0) == 0.0);
  // Ignored entries do not move the curve.
  CHECK(*average_precision({L::tp, L::ignored, L::fp, L::tp}, 2) ==
        *average_precision({L::tp, L::fp, L::tp}, 2));

  const auto pr = pr_curve({L::tp, L::fp, L::tp}, 2);
  REQUIRE(pr.size() == 3);
  CHECK(pr[0].recall == 0.5);
  CHECK(pr[0].precision == 1.0);
  CHECK(pr[2].recall == 1.0);
  CHECK(pr[2].precision == doctest::Approx(2.0 / 3.0));

  // Eleven point on [TP, FP, TP], n_gt = 2: 1.0 up to recall 0.5, then 2/3.
  CHECK(*average_precision({L::tp, L::fp, L::tp}, 2, Interpolation::eleven_point) ==
        doctest::Approx((6 * 1.0 + 5 * 2.0 / 3.0) / 11.0).epsilon(1e-15));
}

TEST_CASE("average_precision agrees with the oracle") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20000; ++i) {
    const std::size_t n = rng() % 15;
    std::vector<L> labels;
    for (std::size_t k = 0; k < n; ++k) labels.push_back(static_cast<L>(rng() % 3));
    std::size_t tps = 0;
    for (L l : labels) tps += l == L::tp;
    const std::size_t n_gt = tps + rng() % 4;
    const auto a = average_precision(labels, n_gt);
    const auto b = oracle::ap_all_point(labels, n_gt);
    REQUIRE(a.has_value() == b.has_value());
    if (a) REQUIRE(std::abs(*a - *b) <= 1e-12);
    const auto c = average_precision(labels, n_gt, Interpolation::eleven_point);
    const auto d = oracle::ap_eleven_point(labels, n_gt);
    REQUIRE(c.has_value() == d.has_value());
    if (c) REQUIRE(std::abs(*c - *d) <= 1e-12);
  }
}

TEST_CASE("recall is monotone along the curve") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 500; ++i) {
    std::vector<L> labels;
    for (int k = 0; k < 30; ++k) labels.push_back(static_cast<L>(rng() % 3));
    const auto pr = pr_curve(labels, 40);
    for (std::size_t k = 1; k < pr.size(); ++k) REQUIRE(pr[k].recall >= pr[k - 1].recall);
  }
}

TEST_CASE("both interpolations agree on curves constant at the sample recalls") {
  // n_gt = 10 and blocks of (FP..., TP): precision only changes at recalls k/10,
  // and the envelope is constant between consecutive sample recalls.
  for (int fps = 0; fps < 4; ++fps) {
    std::vector<L> labels;
    for (int k = 0; k < 10; ++k) {
      for (int f = 0; f < fps; ++f) labels.push_back(L::fp);
      labels.push_back(L::tp);
    }
    const double all = *average_precision(labels, 10);
    const double eleven = *average_precision(labels, 10, Interpolation::eleven_point);
    CHECK(std::abs(all - eleven) <= 1e-12);
    CHECK(std::abs(all - 1.0 / (fps + 1)) <= 1e-12);
  }
}

TEST_CASE("a trailing zero-overlap detection never raises AP") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 2000; ++i) {
    auto in = oracle::random_instance(rng, 10, 5, 3, false);
    const EvalReport before = evaluate(oracle::to_detections(in.dets), in.gt);
    oracle::Det extra{"im0", in.gt.classes[rng() % in.gt.classes.size()], {100, 100, 104, 104}, -1.0};
    in.dets.push_back(extra);
    const EvalReport after = evaluate(oracle::to_detections(in.dets), in.gt);
    for (const auto& [cls, ap] : after.per_class_ap) {
      const auto it = before.per_class_ap.find(cls);
      REQUIRE(ap <= (it == before.per_class_ap.end() ? 0.0 : it->second));
    }
  }
}

TEST_CASE("score scaling leaves everything bitwise unchanged") {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 500; ++i) {
    const auto in = oracle::random_instance(rng, 10, 5, 3, i % 2 == 0);
    auto dets = oracle::to_detections(in.dets);
    const EvalReport a = evaluate(dets, in.gt);
    const auto la = match_detections(dets, in.gt.annotations, 0.5);
    const double k = 1e-3 + static_cast<double>(rng() % 100000);
    for (auto& d : dets) d.score *= k;
    const EvalReport b = evaluate(dets, in.gt);
    REQUIRE(match_detections(dets, in.gt.annotations, 0.5) == la);
    REQUIRE(a.per_class_ap == b.per_class_ap);
    REQUIRE(std::memcmp(&a.map, &b.map, sizeof(double)) == 0);
  }
}

TEST_CASE("evaluate: perfect and empty predictions") {
  const DatasetManifest m = test::grid_manifest(5, 4);
  std::vector<Detection> perfect;
  for (const auto& a : m.annotations) perfect.push_back({a.image_id, a.class_name, BoxD::of(a.bbox), 1.0});
  const EvalReport r = evaluate(perfect, m);
  CHECK(r.map == 1.0);
  for (const auto& c : m.classes) CHECK(r.per_class_ap.at(c) == 1.0);
  CHECK(evaluate({}, m).map == 0.0);

  TempDir dir("eval");
  write_annotations(m, dir / "gt.jsonl");
  std::ofstream(dir / "empty.jsonl");
  CHECK(evaluate(dir / "empty.jsonl", dir / "gt.jsonl").map == 0.0);
}

TEST_CASE("evaluate: mAP is the mean of oracle per-class APs") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 300; ++i) {
    const auto in = oracle::random_instance(rng, 40, 25, 10, i % 3 == 0);
    for (bool eleven : {false, true}) {
      const EvalReport r = evaluate(oracle::to_detections(in.dets), in.gt, 0.5,
                                    eleven ? Interpolation::eleven_point : Interpolation::all_point);
      const auto per = oracle::per_class(in, 0.5, eleven);
      for (const auto& [cls, res] : per) {
        const auto it = r.per_class_ap.find(cls);
        REQUIRE(res.ap.has_value() == (it != r.per_class_ap.end()));
        if (res.ap) REQUIRE(std::abs(*res.ap - it->second) <= 1e-12);
        REQUIRE(r.counts.at(cls).n_gt == res.n_gt);
      }
      REQUIRE(std::abs(r.map - oracle::mean_ap(per)) <= 1e-12);
    }
  }
}

TEST_CASE("evaluate: errors") {
  const DatasetManifest m = test::grid_manifest(2, 2);
  CHECK_THROWS_AS(evaluate({det("brand00_0", "pepsi", {0, 0, 5, 5}, 1)}, m), ClassMismatchError);
  CHECK_THROWS_AS(evaluate({}, m, 0.0), InvalidParameterError);
  CHECK_THROWS_AS(evaluate({}, m, 1.5), InvalidParameterError);
  CHECK_THROWS_AS(parse_interpolation("voc"), UsageError);
  CHECK(parse_interpolation("eleven_point") == Interpolation::eleven_point);

  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      parse_detections(in);
    } catch (const SchemaError& e) {
      return e.line();
    }
    return 0;
  };
  const std::string ok = R"({"image_id":"a","class_name":"x","bbox":[0,0,4,4],"score":0.5})";
  CHECK(line_of(ok + "\n" + ok + "\n") == 0);
  CHECK(line_of(ok + "\n{oops\n") == 2);
  CHECK(line_of(ok + "\n" + R"({"image_id":"a","class_name":"x","bbox":[5,0,4,4],"score":1})") ==
        2);
  CHECK(line_of(R"({"image_id":"a","class_name":"x","bbox":[0,0,4,4]})") == 1);
  CHECK(line_of(R"({"image_id":"a","class_name":"x","bbox":[0,0,4],"score":1})") == 1);
  CHECK(line_of(R"({"image_id":"a","class_name":"x","bbox":[0,0,4,4],"score":"high"})") == 1);
}

TEST_CASE("report output") {
  const DatasetManifest m = manifest_of({"adidas", "nike", "puma"},
                                        {gt("a", "adidas", {0, 0, 9, 9}), gt("b", "adidas", {0, 0, 9, 9}),
                                         gt("a", "nike", {20, 20, 29, 29})});
  const EvalReport r = evaluate({det("a", "adidas", {0, 0, 9, 9}, 0.9),
                                 det("a", "adidas", {50, 50, 59, 59}, 0.8),
                                 det("b", "adidas", {0, 0, 9, 9}, 0.7)},
                                m);
  CHECK(r.per_class_ap.at("adidas") == doctest::Approx(5.0 / 6.0));
  CHECK(r.per_class_ap.at("nike") == 0.0);
  CHECK(r.per_class_ap.count("puma") == 0);
  CHECK(r.map == doctest::Approx(5.0 / 12.0));
  const std::string table = r.table();
  CHECK(table.find("adidas") < table.find("nike"));
  CHECK(table.find("83.3") != std::string::npos);
  CHECK(table.find("41.7") != std::string::npos);
  CHECK(table.rfind("mAP") > table.find("puma"));
  const std::string json = r.to_json();
  CHECK(json.find("\"interpolation\": \"all_point\"") != std::string::npos);
  CHECK(json.find("\"n_tp\": 2") != std::string::npos);
}
