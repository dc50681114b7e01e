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
#include "scl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "scl/errors.hpp"

namespace scl {

namespace {

constexpr double kSingularTol = 1e-12;
constexpr double kNormalizeTol = 1e-12;

double det3(const PlanarMap::Matrix& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

// Sine and cosine with exact values at multiples of 90 degrees.
void sin_cos_degrees(double degrees, double& s, double& c) {
  double d = std::fmod(degrees, 360.0);
  if (d < 0) d += 360.0;
  if (d == 0.0) {
    s = 0.0, c = 1.0;
  } else if (d == 90.0) {
    s = 1.0, c = 0.0;
  } else if (d == 180.0) {
    s = 0.0, c = -1.0;
  } else if (d == 270.0) {
    s = -1.0, c = 0.0;
  } else {
    const double rad = d * std::numbers::pi / 180.0;
    s = std::sin(rad);
    c = std::cos(rad);
  }
}

double cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool segments_cross(Point p1, Point p2, Point q1, Point q2) {
  const double d1 = cross(q1, q2, p1);
  const double d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1);
  const double d4 = cross(p1, p2, q2);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
         ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace

std::ostream& operator<<(std::ostream& os, const Box& b) {
  return os << "(" << b.x0 << "," << b.y0 << "," << b.x1 << "," << b.y1 << ")";
}

std::ostream& operator<<(std::ostream& os, const Point& p) {
  return os << "(" << p.x << "," << p.y << ")";
}

PlanarMap::PlanarMap() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1}, kind_(MapKind::affine) {}

PlanarMap PlanarMap::from_matrix(const Matrix& in) {
  Matrix m = in;
  for (double v : m) {
    if (!std::isfinite(v)) throw SingularMapError("planar map has non-finite entries");
  }
  if (std::abs(m[8]) > kNormalizeTol && m[8] != 1.0) {
    const double s = m[8];
    for (double& v : m) v /= s;
    m[8] = 1.0;
  }
  if (!(std::abs(det3(m)) > kSingularTol)) {
    throw SingularMapError("planar map is not invertible (|det| <= 1e-12)");
  }
  const bool affine = m[6] == 0.0 && m[7] == 0.0 && m[8] == 1.0;
  return PlanarMap(m, affine ? MapKind::affine : MapKind::homography);
}

double PlanarMap::determinant() const { return det3(m_); }

double PlanarMap::weight(Point p) const { return m_[6] * p.x + m_[7] * p.y + m_[8]; }

Point PlanarMap::apply(Point p) const {
  const double x = m_[0] * p.x + m_[1] * p.y + m_[2];
  const double y = m_[3] * p.x + m_[4] * p.y + m_[5];
  if (kind_ == MapKind::affine) return {x, y};
  const double w = weight(p);
  if (!(w > 0.0)) throw BackFacingError("point maps behind the projection center");
  return {x / w, y / w};
}

PlanarMap PlanarMap::inverse() const {
  const Matrix& m = m_;
  if (kind_ == MapKind::affine) {
    const double det = m[0] * m[4] - m[1] * m[3];
    const double a = m[4] / det, b = -m[1] / det;
    const double c = -m[3] / det, d = m[0] / det;
    return from_matrix({a, b, -(a * m[2] + b * m[5]),  //
                        c, d, -(c * m[2] + d * m[5]),  //
                        0, 0, 1});
  }
  const double det = det3(m);
  Matrix adj{
      m[4] * m[8] - m[5] * m[7], m[2] * m[7] - m[1] * m[8], m[1] * m[5] - m[2] * m[4],
      m[5] * m[6] - m[3] * m[8], m[0] * m[8] - m[2] * m[6], m[2] * m[3] - m[0] * m[5],
      m[3] * m[7] - m[4] * m[6], m[1] * m[6] - m[0] * m[7], m[0] * m[4] - m[1] * m[3],
  };
  for (double& v : adj) v /= det;
  return from_matrix(adj);
}

PlanarMap PlanarMap::operator*(const PlanarMap& inner) const {
  const Matrix& a = m_;
  const Matrix& b = inner.m_;
  Matrix r{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      r[i * 3 + j] = a[i * 3] * b[j] + a[i * 3 + 1] * b[3 + j] + a[i * 3 + 2] * b[6 + j];
    }
  }
  if (kind_ == MapKind::affine && inner.kind_ == MapKind::affine) {
    r[6] = 0.0, r[7] = 0.0, r[8] = 1.0;
  }
  return from_matrix(r);
}

bool PlanarMap::approx_equal(const PlanarMap& other, double tol) const {
  for (int i = 0; i < 9; ++i) {
    if (std::abs(m_[i] - other.m_[i]) > tol) return false;
  }
  return true;
}

double Quad::signed_area() const {
  double a = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Point& p = corners[i];
    const Point& q = corners[(i + 1) % 4];
    a += p.x * q.y - q.x * p.y;
  }
  return a / 2.0;
}

bool Quad::is_simple() const {
  const auto& c = corners;
  return !segments_cross(c[0], c[1], c[2], c[3]) && !segments_cross(c[1], c[2], c[3], c[0]);
}

RectF Quad::bounds() const {
  RectF r{corners[0].x, corners[0].y, corners[0].x, corners[0].y};
  for (const Point& p : corners) {
    r.x0 = std::min(r.x0, p.x);
    r.y0 = std::min(r.y0, p.y);
    r.x1 = std::max(r.x1, p.x);
    r.y1 = std::max(r.y1, p.y);
  }
  return r;
}

PlanarMap make_translation(double dx, double dy) {
  return PlanarMap::from_matrix({1, 0, dx, 0, 1, dy, 0, 0, 1});
}

PlanarMap make_scale(double sx, double sy) {
  if (!(sx > 0.0) || !(sy > 0.0)) {
    throw NonPositiveScaleError("scale factors must be positive, got (" + std::to_string(sx) +
                                ", " + std::to_string(sy) + ")");
  }
  return PlanarMap::from_matrix({sx, 0, 0, 0, sy, 0, 0, 0, 1});
}

PlanarMap make_shear(double kx, double ky) {
  if (kx * ky == 1.0) {
    throw SingularShearError("shear with kx * ky == 1 is singular");
  }
  try {
    return PlanarMap::from_matrix({1, kx, 0, ky, 1, 0, 0, 0, 1});
  } catch (const SingularMapError&) {
    throw SingularShearError("shear with kx * ky ~ 1 is singular");
  }
}

PlanarMap make_rotation(double degrees) {
  double s, c;
  sin_cos_degrees(degrees, s, c);
  return PlanarMap::from_matrix({c, -s, 0, s, c, 0, 0, 0, 1});
}

PlanarMap make_tilt(double tilt_x, double tilt_y, double focal) {
  if (!(focal > 0.0)) throw InvalidParameterError("focal length must be positive");
  if (!(std::abs(tilt_x) < 90.0) || !(std::abs(tilt_y) < 90.0)) {
    throw BackFacingError("out-of-plane tilt must be within (-90, 90) degrees");
  }
  if (tilt_x == 0.0 && tilt_y == 0.0) return PlanarMap();

  double sa, ca, sb, cb;
  sin_cos_degrees(tilt_x, sa, ca);
  sin_cos_degrees(tilt_y, sb, cb);
  // R = Ry(b) * Rx(a); only the first two columns matter for points on z = 0.
  //   Rx(a) = [1 0 0; 0 ca -sa; 0 sa ca],  Ry(b) = [cb 0 sb; 0 1 0; -sb 0 cb]
  const double r00 = cb, r01 = sb * sa;
  const double r10 = 0.0, r11 = ca;
  const double r20 = -sb, r21 = cb * sa;
  return PlanarMap::from_matrix({r00, r01, 0,  //
                                 r10, r11, 0,  //
                                 r20 / focal, r21 / focal, 1});
}

PlanarMap compose(const TransformSpec& spec) {
  PlanarMap m = make_rotation(spec.theta) * make_shear(spec.kx, spec.ky) *
                make_scale(spec.sx, spec.sy);
  if (spec.has_tilt()) m = make_tilt(spec.tilt_x, spec.tilt_y, spec.focal) * m;
  return m;
}

QuadHull transform_quad(const PlanarMap& map, const RectF& rect) {
  if (!(rect.width() > 0.0) || !(rect.height() > 0.0)) {
    throw InvalidParameterError("rectangle must have positive area");
  }
  const std::array<Point, 4> src{Point{rect.x0, rect.y0}, Point{rect.x1, rect.y0},
                                 Point{rect.x1, rect.y1}, Point{rect.x0, rect.y1}};
  QuadHull out;
  for (int i = 0; i < 4; ++i) {
    if (!(map.weight(src[i]) > 0.0)) {
      throw BackFacingError("rectangle corner projects behind the camera");
    }
    out.quad.corners[i] = map.apply(src[i]);
  }
  out.hull = out.quad.bounds();
  return out;
}

}  // namespace scl
