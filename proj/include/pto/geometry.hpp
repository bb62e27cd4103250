#pragma once

// Planar primitives used by the scenario oracle: points, boxes, discs,
// simple polygons and closed segment/polygon intersection predicates.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <random>
#include <variant>
#include <vector>

namespace pto {

inline constexpr std::size_t kDim = 2;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  double& operator[](std::size_t i) { return i == 0 ? x : y; }
  double operator[](std::size_t i) const { return i == 0 ? x : y; }

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

/// Robot configuration. Shipped scenarios plan the planar base position.
using Config = Vec2;

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(b - a); }
inline double squared_distance(Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  return d.x * d.x + d.y * d.y;
}
inline Vec2 lerp(Vec2 a, Vec2 b, double t) { return a + t * (b - a); }
inline bool is_finite(Vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

/// Lexicographic order, used to canonicalize segment direction.
inline bool lex_less(Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

struct Box {
  Vec2 min;
  Vec2 max;

  bool contains(Vec2 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  bool overlaps(const Box& o) const {
    return min.x <= o.max.x && o.min.x <= max.x && min.y <= o.max.y && o.min.y <= max.y;
  }
  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
  double area() const { return width() * height(); }
  double diagonal() const { return std::hypot(width(), height()); }
  Vec2 center() const { return 0.5 * (min + max); }
};

struct Disc {
  Vec2 center;
  double radius = 0.0;

  bool contains(Vec2 p) const { return squared_distance(center, p) <= radius * radius; }
};

inline Box segment_box(Vec2 a, Vec2 b) {
  return {{std::min(a.x, b.x), std::min(a.y, b.y)}, {std::max(a.x, b.x), std::max(a.y, b.y)}};
}

/// Sign of the turn a -> b -> c: +1 left, -1 right, 0 collinear.
inline int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

inline bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return orientation(a, b, p) == 0 && segment_box(a, b).contains(p);
}

/// Closed intersection test: touching endpoints and collinear overlap count.
inline bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

/// Simple polygon with a cached bounding box. Points on the boundary count
/// as inside (obstacles are closed sets).
class Polygon {
 public:
  Polygon() = default;
  explicit Polygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.empty()) return;
    box_ = {vertices_.front(), vertices_.front()};
    for (const Vec2& v : vertices_) {
      box_.min = {std::min(box_.min.x, v.x), std::min(box_.min.y, v.y)};
      box_.max = {std::max(box_.max.x, v.x), std::max(box_.max.y, v.y)};
    }
  }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const Box& box() const { return box_; }
  std::size_t size() const { return vertices_.size(); }

  bool contains(Vec2 p) const {
    if (vertices_.size() < 3 || !box_.contains(p)) return false;
    bool inside = false;
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Vec2 a = vertices_[i];
      const Vec2 b = vertices_[j];
      if (on_segment(a, b, p)) return true;
      if ((a.y > p.y) != (b.y > p.y)) {
        const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
        if (p.x < x_cross) inside = !inside;
      }
    }
    return inside;
  }

  bool intersects_segment(Vec2 a, Vec2 b) const {
    if (vertices_.size() < 3 || !box_.overlaps(segment_box(a, b))) return false;
    if (contains(a) || contains(b)) return true;
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      if (segments_intersect(a, b, vertices_[j], vertices_[i])) return true;
    }
    return false;
  }

 private:
  std::vector<Vec2> vertices_;
  Box box_{};
};

/// Rectangle around segment [a, b], grown by `margin` on every side.
inline Polygon inflate_segment(Vec2 a, Vec2 b, double margin) {
  const double len = distance(a, b);
  const Vec2 dir = len > 0.0 ? (1.0 / len) * (b - a) : Vec2{1.0, 0.0};
  const Vec2 n{-dir.y, dir.x};
  const Vec2 a0 = a - margin * dir;
  const Vec2 b0 = b + margin * dir;
  return Polygon({a0 - margin * n, b0 - margin * n, b0 + margin * n, a0 + margin * n});
}

/// Goal region of one or more hypotheses.
class GoalRegion {
 public:
  GoalRegion() = default;
  GoalRegion(Disc d) : shape_(d) {}  // NOLINT
  GoalRegion(Box b) : shape_(b) {}   // NOLINT

  bool contains(Vec2 p) const {
    return std::visit([&](const auto& s) { return s.contains(p); }, shape_);
  }
  bool is_disc() const { return std::holds_alternative<Disc>(shape_); }
  const Disc& disc() const { return std::get<Disc>(shape_); }
  const Box& box() const { return std::get<Box>(shape_); }
  Vec2 center() const { return is_disc() ? disc().center : box().center(); }

  /// Closest distance from p to the region (0 inside).
  double distance_to(Vec2 p) const {
    if (is_disc()) return std::max(0.0, distance(p, disc().center) - disc().radius);
    const Box& b = box();
    const double dx = std::max({b.min.x - p.x, 0.0, p.x - b.max.x});
    const double dy = std::max({b.min.y - p.y, 0.0, p.y - b.max.y});
    return std::hypot(dx, dy);
  }

  template <typename Rng>
  Vec2 sample(Rng& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (is_disc()) {
      const Disc& d = disc();
      const double r = d.radius * std::sqrt(unit(rng));
      const double a = 2.0 * M_PI * unit(rng);
      return {d.center.x + r * std::cos(a), d.center.y + r * std::sin(a)};
    }
    const Box& b = box();
    const double x = b.min.x + unit(rng) * b.width();
    const double y = b.min.y + unit(rng) * b.height();
    return {x, y};
  }

 private:
  std::variant<Disc, Box> shape_{Disc{}};
};

/// Polyline length.
inline double path_length(const std::vector<Config>& path) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) total += distance(path[i - 1], path[i]);
  return total;
}

}  // namespace pto
