#include <doctest.h>

#include <cmath>

#include "faultsim/geometry.hpp"

using namespace faultsim;

TEST_CASE("triangle measures") {
  TrianglePoints t{Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}};
  CHECK(signed_area(t) == doctest::Approx(0.5));
  CHECK(diameter(t) == doctest::Approx(std::sqrt(2.0)));
  CHECK(min_angle_deg(t) == doctest::Approx(45.0));

  TrianglePoints cw{Vec2{0, 0}, Vec2{0, 1}, Vec2{1, 0}};
  CHECK(signed_area(cw) == doctest::Approx(-0.5));

  TrianglePoints eq{Vec2{0, 0}, Vec2{1, 0}, Vec2{0.5, std::sqrt(3.0) / 2}};
  CHECK(min_angle_deg(eq) == doctest::Approx(60.0));
}

TEST_CASE("point and segment queries") {
  Segment s{{0, 0}, {2, 0}};
  CHECK(point_segment_distance({1, 1}, s) == doctest::Approx(1.0));
  CHECK(point_segment_distance({3, 0}, s) == doctest::Approx(1.0));
  CHECK(point_segment_distance({-3, 4}, s) == doctest::Approx(5.0));

  CHECK(segments_intersect(s, {{1, -1}, {1, 1}}));
  CHECK(segments_intersect(s, {{2, 0}, {3, 1}}));  // touching end point
  CHECK_FALSE(segments_intersect(s, {{0, 1}, {2, 1}}));
  CHECK_FALSE(segments_intersect(s, {{3, 0}, {4, 0}}));  // collinear, disjoint
}

TEST_CASE("triangle to segment distance") {
  TrianglePoints t{Vec2{0, 1}, Vec2{1, 1}, Vec2{0, 2}};
  CHECK(triangle_segment_distance(t, {{-5, 0}, {5, 0}}) == doctest::Approx(1.0));
  CHECK(triangle_segment_distance(t, {{-5, 1.5}, {5, 1.5}}) == 0.0);
  // segment entirely inside
  CHECK(triangle_segment_distance(t, {{0.1, 1.1}, {0.2, 1.2}}) == 0.0);
  // closest feature: vertex (1, 1) against the segment end (4, 1)
  CHECK(triangle_segment_distance(t, {{4, 1}, {5, 1}}) == doctest::Approx(3.0));
  CHECK(triangle_segment_distance(t, {{4, 5}, {7, 9}}) == doctest::Approx(7.0 / std::sqrt(2.0)));
}

TEST_CASE("barycentric coordinates reproduce the point") {
  TrianglePoints t{Vec2{0.3, -0.2}, Vec2{1.7, 0.1}, Vec2{0.4, 1.9}};
  Vec2 p{0.8, 0.5};
  auto b = barycentric(p, t);
  CHECK(b[0] + b[1] + b[2] == doctest::Approx(1.0));
  Vec2 q = b[0] * t[0] + b[1] * t[1] + b[2] * t[2];
  CHECK(q.x == doctest::Approx(p.x));
  CHECK(q.y == doctest::Approx(p.y));
  CHECK(point_in_triangle(p, t));
  CHECK_FALSE(point_in_triangle({2, 2}, t));
}
