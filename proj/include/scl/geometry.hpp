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
 * @file geometry.hpp
 * @brief Planar maps used to warp logo exemplars, and box propagation.
 *
 * Coordinates are continuous pixel coordinates: pixel (i, j) covers the unit
 * square [i, i+1) x [j, j+1) and its center is (i + 0.5, j + 0.5). An
 * inclusive integer Box (x0..x1) therefore covers the continuous rectangle
 * [x0, x1 + 1] (see Box::area_rect()).
 *
 * The exemplar warp is built as
 *
 *     tilt * rotate * shear * scale
 *
 * i.e. scale first, then shear, then in-plane rotation, then the optional
 * out-of-plane tilt (a homography). All factors act about the origin; callers
 * move the pivot there first.
 */
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>

namespace scl {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Continuous axis-aligned rectangle [x0, x1] x [y0, y1].
struct RectF {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool contains(Point p, double tol = 0.0) const {
    return p.x >= x0 - tol && p.x <= x1 + tol && p.y >= y0 - tol && p.y <= y1 + tol;
  }
  friend bool operator==(const RectF&, const RectF&) = default;
};

/// Integer rectangle with inclusive corners, as used by annotations.
struct Box {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0 + 1; }
  int height() const { return y1 - y0 + 1; }
  bool valid() const { return x0 <= x1 && y0 <= y1; }
  Box translated(int dx, int dy) const { return {x0 + dx, y0 + dy, x1 + dx, y1 + dy}; }
  bool contains(int x, int y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  /// Continuous area covered by the pixels of this box.
  RectF area_rect() const {
    return {double(x0), double(y0), double(x1) + 1.0, double(y1) + 1.0};
  }
  friend bool operator==(const Box&, const Box&) = default;
};

std::ostream& operator<<(std::ostream& os, const Box& b);
std::ostream& operator<<(std::ostream& os, const Point& p);

enum class MapKind { affine, homography };

/**
 * Invertible 3x3 map in homogeneous coordinates, stored row-major with
 * m[2][2] normalized to 1 whenever it is not ~0. Affine maps keep their last
 * row exactly (0, 0, 1).
 */
class PlanarMap {
 public:
  using Matrix = std::array<double, 9>;

  /// Identity.
  PlanarMap();

  /// Validates invertibility and classifies the map. Throws SingularMapError.
  static PlanarMap from_matrix(const Matrix& m);

  const Matrix& matrix() const { return m_; }
  double operator()(int row, int col) const { return m_[row * 3 + col]; }
  MapKind kind() const { return kind_; }
  bool is_affine() const { return kind_ == MapKind::affine; }
  double determinant() const;

  /// Homogeneous weight of `p` under the map.
  double weight(Point p) const;

  /// Maps `p`. Throws BackFacingError when the homogeneous weight is <= 0.
  Point apply(Point p) const;

  PlanarMap inverse() const;

  /// `*this` after `inner`: (a * b)(p) == a(b(p)).
  PlanarMap operator*(const PlanarMap& inner) const;

  /// Elementwise comparison after normalization.
  bool approx_equal(const PlanarMap& other, double tol) const;

 private:
  explicit PlanarMap(const Matrix& m, MapKind kind) : m_(m), kind_(kind) {}

  Matrix m_;
  MapKind kind_;
};

/// Sampled parameters of one geometric + colour transform of an exemplar.
struct TransformSpec {
  double sx = 1.0;
  double sy = 1.0;
  double kx = 0.0;
  double ky = 0.0;
  double theta = 0.0;   // degrees, in-plane
  double tilt_x = 0.0;  // degrees, rotation about the logo plane's x axis
  double tilt_y = 0.0;  // degrees, rotation about the logo plane's y axis
  double focal = 1000.0;
  double colour_r = 1.0;

  bool has_tilt() const { return tilt_x != 0.0 || tilt_y != 0.0; }
  friend bool operator==(const TransformSpec&, const TransformSpec&) = default;
};

/// Four corners in the winding order of the source rectangle
/// (x0,y0), (x1,y0), (x1,y1), (x0,y1).
struct Quad {
  std::array<Point, 4> corners;

  double signed_area() const;
  bool is_simple() const;
  RectF bounds() const;
};

PlanarMap make_translation(double dx, double dy);

/// (x, y) -> (sx x, sy y). Throws NonPositiveScaleError.
PlanarMap make_scale(double sx, double sy);

/// (x, y) -> (x + kx y, y + ky x). Throws SingularShearError when kx ky == 1.
PlanarMap make_shear(double kx, double ky);

/// Rotation about the origin by `degrees`; (1, 0) -> (cos, sin). Exact at
/// multiples of 90 degrees.
PlanarMap make_rotation(double degrees);

/**
 * Pinhole projection of the logo plane rotated out of plane: first about its
 * x axis by `tilt_x`, then about its y axis by `tilt_y`, viewed from distance
 * `focal` along the optical axis. The origin is a fixed point.
 *
 * Throws InvalidParameterError for focal <= 0 and BackFacingError for
 * |tilt| >= 90 degrees.
 */
PlanarMap make_tilt(double tilt_x, double tilt_y, double focal);

/// tilt * rotate * shear * scale for `spec`. Affine whenever there is no tilt.
PlanarMap compose(const TransformSpec& spec);

struct QuadHull {
  Quad quad;
  RectF hull;
};

/// Maps the corners of `rect` and returns them with their tight bounding
/// rectangle. Throws BackFacingError if any corner has weight <= 0.
QuadHull transform_quad(const PlanarMap& map, const RectF& rect);

}  // namespace scl
