#pragma once

#include <array>
#include <cmath>

namespace faultsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 &operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2 &operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  Vec2 &operator*=(double s) { x *= s; y *= s; return *this; }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

struct Segment {
  Vec2 a, b;
};

using TrianglePoints = std::array<Vec2, 3>;

double signed_area(const TrianglePoints &t);
double diameter(const TrianglePoints &t);
// Smallest interior angle in degrees.
double min_angle_deg(const TrianglePoints &t);

double point_segment_distance(Vec2 p, const Segment &s);
bool segments_intersect(const Segment &s, const Segment &t);
bool point_in_triangle(Vec2 p, const TrianglePoints &t);
// Exact Euclidean distance between a closed triangle and a segment.
double triangle_segment_distance(const TrianglePoints &t, const Segment &s);

// Barycentric coordinates of p with respect to t.
std::array<double, 3> barycentric(Vec2 p, const TrianglePoints &t);

}  // namespace faultsim
