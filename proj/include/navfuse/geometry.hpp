// Planar geometry primitives shared by the planner, simulator and sensors.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace navfuse {

inline constexpr double kPi = 3.14159265358979323846;

// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  bool operator==(const Vec2&) const = default;

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
  Vec2 normalized() const {
    double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
  }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// Direction angle of v, measured from +x toward +y.
inline double bearing_of(const Vec2& v) { return std::atan2(v.y, v.x); }

inline Vec2 heading_vector(double heading) {
  return {std::cos(heading), std::sin(heading)};
}

struct Rect {
  double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;

  bool operator==(const Rect&) const = default;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  bool contains(const Vec2& p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
  // Distance from an interior point to the nearest boundary edge; negative
  // when the point lies outside.
  double interior_margin(const Vec2& p) const {
    double m = std::min(std::min(p.x - xmin, xmax - p.x),
                        std::min(p.y - ymin, ymax - p.y));
    return m;
  }
};

// Simple polygon, vertices in order (either winding).
struct Polygon {
  std::vector<Vec2> vertices;

  bool operator==(const Polygon&) const = default;
};

struct MapGeometry {
  Rect bounds;
  std::vector<Polygon> obstacles;

  bool operator==(const MapGeometry&) const = default;
};

inline double point_segment_distance(const Vec2& p, const Vec2& a,
                                     const Vec2& b) {
  Vec2 ab = b - a;
  double len2 = ab.squared_norm();
  if (len2 <= 0.0) return distance(p, a);
  double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

inline bool point_in_polygon(const Vec2& p, const Polygon& poly) {
  bool inside = false;
  const auto& v = poly.vertices;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    bool crosses = (v[i].y > p.y) != (v[j].y > p.y);
    if (crosses) {
      double x_at =
          v[j].x + (v[i].x - v[j].x) * (p.y - v[j].y) / (v[i].y - v[j].y);
      if (p.x < x_at) inside = !inside;
    }
  }
  return inside;
}

// Distance from p to the polygon; zero when p is inside or on the boundary.
inline double point_polygon_distance(const Vec2& p, const Polygon& poly) {
  if (poly.vertices.size() < 3) return std::numeric_limits<double>::infinity();
  if (point_in_polygon(p, poly)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const auto& v = poly.vertices;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    best = std::min(best, point_segment_distance(p, v[j], v[i]));
  }
  return best;
}

// Distance from p to the nearest obstacle (including the outer boundary,
// treated as solid walls). Returns +inf on an empty unbounded map.
inline double clearance(const Vec2& p, const MapGeometry& map) {
  double best = map.bounds.width() > 0.0 ? map.bounds.interior_margin(p)
                                         : std::numeric_limits<double>::infinity();
  for (const auto& poly : map.obstacles) {
    best = std::min(best, point_polygon_distance(p, poly));
  }
  return best;
}

// Ray-segment intersection. Returns the ray parameter t >= 0 of the nearest
// hit, or +inf when the ray misses the segment.
inline double ray_segment_intersection(const Vec2& origin, const Vec2& dir,
                                       const Vec2& a, const Vec2& b) {
  Vec2 seg = b - a;
  double denom = dir.cross(seg);
  if (std::abs(denom) < 1e-12) return std::numeric_limits<double>::infinity();
  Vec2 diff = a - origin;
  double t = diff.cross(seg) / denom;
  double u = diff.cross(dir) / denom;
  if (t >= 0.0 && u >= 0.0 && u <= 1.0) return t;
  return std::numeric_limits<double>::infinity();
}

// Ray-circle intersection. Returns nearest t >= 0 or +inf.
inline double ray_circle_intersection(const Vec2& origin, const Vec2& dir,
                                      const Vec2& center, double radius) {
  Vec2 oc = origin - center;
  double b = oc.dot(dir);
  double c = oc.squared_norm() - radius * radius;
  double disc = b * b - c;
  if (disc < 0.0) return std::numeric_limits<double>::infinity();
  double sq = std::sqrt(disc);
  double t1 = -b - sq;
  if (t1 >= 0.0) return t1;
  double t2 = -b + sq;
  if (t2 >= 0.0) return t2;
  return std::numeric_limits<double>::infinity();
}

// Nearest hit along a ray against static geometry (obstacles + outer walls),
// capped at max_range.
inline double cast_ray_static(const Vec2& origin, double angle,
                              const MapGeometry& map, double max_range) {
  Vec2 dir = heading_vector(angle);
  double best = max_range;
  for (const auto& poly : map.obstacles) {
    const auto& v = poly.vertices;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
      best = std::min(best, ray_segment_intersection(origin, dir, v[j], v[i]));
    }
  }
  const Rect& b = map.bounds;
  if (b.width() > 0.0) {
    Vec2 c0{b.xmin, b.ymin}, c1{b.xmax, b.ymin}, c2{b.xmax, b.ymax},
        c3{b.xmin, b.ymax};
    best = std::min(best, ray_segment_intersection(origin, dir, c0, c1));
    best = std::min(best, ray_segment_intersection(origin, dir, c1, c2));
    best = std::min(best, ray_segment_intersection(origin, dir, c2, c3));
    best = std::min(best, ray_segment_intersection(origin, dir, c3, c0));
  }
  return std::min(best, max_range);
}

inline double polyline_length(const std::vector<Vec2>& pts) {
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    len += distance(pts[i - 1], pts[i]);
  }
  return len;
}

}  // namespace navfuse
