#include "faultsim/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace faultsim {

double signed_area(const TrianglePoints &t) {
  return 0.5 * cross(t[1] - t[0], t[2] - t[0]);
}

double diameter(const TrianglePoints &t) {
  return std::max({distance(t[0], t[1]), distance(t[1], t[2]), distance(t[2], t[0])});
}

double min_angle_deg(const TrianglePoints &t) {
  double smallest = 180.0;
  for (int i = 0; i < 3; ++i) {
    Vec2 e1 = t[(i + 1) % 3] - t[i];
    Vec2 e2 = t[(i + 2) % 3] - t[i];
    double ang = std::atan2(std::abs(cross(e1, e2)), dot(e1, e2));
    smallest = std::min(smallest, ang * 180.0 / std::numbers::pi);
  }
  return smallest;
}

double point_segment_distance(Vec2 p, const Segment &s) {
  Vec2 d = s.b - s.a;
  double len2 = dot(d, d);
  if (len2 == 0.0) return distance(p, s.a);
  double r = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
  return distance(p, s.a + r * d);
}

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  double v = cross(b - a, c - a);
  return (v > 0) - (v < 0);
}

bool on_segment(Vec2 p, const Segment &s) {
  return std::min(s.a.x, s.b.x) <= p.x && p.x <= std::max(s.a.x, s.b.x) &&
         std::min(s.a.y, s.b.y) <= p.y && p.y <= std::max(s.a.y, s.b.y);
}

}  // namespace

bool segments_intersect(const Segment &s, const Segment &t) {
  int o1 = orientation(s.a, s.b, t.a);
  int o2 = orientation(s.a, s.b, t.b);
  int o3 = orientation(t.a, t.b, s.a);
  int o4 = orientation(t.a, t.b, s.b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(t.a, s)) return true;
  if (o2 == 0 && on_segment(t.b, s)) return true;
  if (o3 == 0 && on_segment(s.a, t)) return true;
  if (o4 == 0 && on_segment(s.b, t)) return true;
  return false;
}

bool point_in_triangle(Vec2 p, const TrianglePoints &t) {
  double d1 = cross(t[1] - t[0], p - t[0]);
  double d2 = cross(t[2] - t[1], p - t[1]);
  double d3 = cross(t[0] - t[2], p - t[2]);
  bool neg = d1 < 0 || d2 < 0 || d3 < 0;
  bool pos = d1 > 0 || d2 > 0 || d3 > 0;
  return !(neg && pos);
}

double triangle_segment_distance(const TrianglePoints &t, const Segment &s) {
  if (point_in_triangle(s.a, t) || point_in_triangle(s.b, t)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    Segment edge{t[i], t[(i + 1) % 3]};
    if (segments_intersect(edge, s)) return 0.0;
    best = std::min(best, point_segment_distance(t[i], s));
    best = std::min(best, point_segment_distance(s.a, edge));
    best = std::min(best, point_segment_distance(s.b, edge));
  }
  return best;
}

std::array<double, 3> barycentric(Vec2 p, const TrianglePoints &t) {
  double area = cross(t[1] - t[0], t[2] - t[0]);
  double l1 = cross(t[2] - t[1], p - t[1]) / area;
  double l2 = cross(t[0] - t[2], p - t[2]) / area;
  return {l1, l2, 1.0 - l1 - l2};
}

}  // namespace faultsim
