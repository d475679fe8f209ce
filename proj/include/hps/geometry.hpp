// Copyright 2026 the hps authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HPS_GEOMETRY_HPP
#define HPS_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hps/common.hpp"

namespace hps {

// Image coordinates throughout: x grows right, y grows DOWN. Anything that
// cares about visual orientation (compass quadrants, above/below) flips y
// explicitly at the point of use.

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point& a, const Point& b) {
    return a.x == b.x && a.y == b.y;
  }
};

inline Point operator-(const Point& a, const Point& b) {
  return {a.x - b.x, a.y - b.y};
}
inline Point operator+(const Point& a, const Point& b) {
  return {a.x + b.x, a.y + b.y};
}
inline Point operator*(const Point& a, double s) { return {a.x * s, a.y * s}; }

inline double dot(const Point& a, const Point& b) {
  return a.x * b.x + a.y * b.y;
}
inline double cross(const Point& a, const Point& b) {
  return a.x * b.y - a.y * b.x;
}
inline double norm(const Point& a) { return std::hypot(a.x, a.y); }
inline double distance(const Point& a, const Point& b) { return norm(a - b); }

/// Axis-aligned rectangle, inclusive corners. Degenerate (zero width or
/// height) rectangles are representable; callers that need area reject them.
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  Point center() const { return {(x0 + x1) / 2.0, (y0 + y1) / 2.0}; }
  double diagonal() const { return std::hypot(width(), height()); }

  bool contains(const Point& p) const {
    return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  }

  Rect united(const Rect& o) const {
    return {std::min(x0, o.x0), std::min(y0, o.y0), std::max(x1, o.x1),
            std::max(y1, o.y1)};
  }

  friend bool operator==(const Rect& a, const Rect& b) {
    return a.x0 == b.x0 && a.y0 == b.y0 && a.x1 == b.x1 && a.y1 == b.y1;
  }
};

/// Ordered chain of points. A closed polyline does not repeat its first
/// point; the closing edge back to points.front() is implicit.
struct Polyline {
  std::vector<Point> points;
  bool closed = false;

  std::size_t size() const { return points.size(); }

  double length() const {
    double len = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
      len += distance(points[i - 1], points[i]);
    if (closed && points.size() > 2)
      len += distance(points.back(), points.front());
    return len;
  }

  Rect bbox() const {
    require(!points.empty(), "bbox of empty polyline");
    Rect r{points[0].x, points[0].y, points[0].x, points[0].y};
    for (const Point& p : points) {
      r.x0 = std::min(r.x0, p.x);
      r.y0 = std::min(r.y0, p.y);
      r.x1 = std::max(r.x1, p.x);
      r.y1 = std::max(r.y1, p.y);
    }
    return r;
  }
};

inline double point_segment_distance(const Point& p, const Point& a,
                                     const Point& b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

inline double segment_segment_distance(const Point& a, const Point& b,
                                       const Point& c, const Point& d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != d2 && d3 != d4)
    return 0.0;  // proper crossing
  return std::min({point_segment_distance(a, c, d),
                   point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b),
                   point_segment_distance(d, a, b)});
}

/// True when ab and cd cross at a single interior point of both segments.
inline bool segments_properly_intersect(const Point& a, const Point& b,
                                        const Point& c, const Point& d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
         ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

/// Shoelace area with sign. Positive when the vertex order is
/// counterclockwise in a y-up frame, i.e. clockwise as drawn on screen.
inline double signed_area(const std::vector<Point>& poly) {
  double a = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % n];
    a += p.x * q.y - q.x * p.y;
  }
  return a / 2.0;
}

/// Even-odd ray-cast containment test. Points exactly on the boundary are
/// not reliably classified; callers that care use a distance check first.
inline bool polygon_contains(const std::vector<Point>& poly, const Point& p) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

inline double polygon_boundary_distance(const std::vector<Point>& poly,
                                        const Point& p) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i)
    best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % n]));
  return best;
}

/// A point strictly inside a simple polygon. The centroid works for convex
/// shapes; concave ones fall back to a midpoint on a horizontal scanline
/// through the bounding-box middle.
inline Point polygon_interior_point(const std::vector<Point>& poly) {
  require(poly.size() >= 3, "interior point of degenerate polygon");
  Point c{0, 0};
  for (const Point& p : poly) c = c + p;
  c = c * (1.0 / static_cast<double>(poly.size()));
  if (polygon_contains(poly, c)) return c;

  double y0 = poly[0].y, y1 = poly[0].y;
  for (const Point& p : poly) {
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  const double ym = (y0 + y1) / 2.0;
  std::vector<double> xs;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    if ((a.y > ym) != (b.y > ym))
      xs.push_back(a.x + (ym - a.y) / (b.y - a.y) * (b.x - a.x));
  }
  std::sort(xs.begin(), xs.end());
  if (xs.size() >= 2) return {(xs[0] + xs[1]) / 2.0, ym};
  return c;
}

}  // namespace hps

#endif  // HPS_GEOMETRY_HPP
