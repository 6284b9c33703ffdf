#pragma once

// Small 2D convex-polygon toolkit for ground-plane footprints. Polygons are
// counter-clockwise vertex lists produced by convex_hull.

#include <vector>

#include "fyi/geometry.hpp"

namespace fyi {

using Poly2 = std::vector<Vec2>;

// Monotone-chain hull, CCW, collinear points dropped. Degenerate inputs
// (all points collinear) yield the 2-point "hull" unchanged.
Poly2 convex_hull(std::vector<Vec2> points);

struct Bounds2 {
    Vec2 min, max;
};

Bounds2 poly_bounds(const Poly2& poly);

Poly2 translated(const Poly2& poly, const Vec2& offset);

// Boundary-inclusive containment. Assumes CCW convex input.
bool point_in_convex(const Poly2& poly, const Vec2& p);

// Closest point of the polygon (interior included) to p.
Vec2 closest_point_in_convex(const Poly2& poly, const Vec2& p);

// Euclidean distance between p and the polygon (0 when inside).
double distance_to_convex(const Poly2& poly, const Vec2& p);

// Minimum distance between an axis-aligned square [min,max] and the polygon;
// 0 when they intersect or touch.
double square_to_convex_distance(const Vec2& square_min, const Vec2& square_max, const Poly2& poly);

// Separating-axis overlap test for two convex polygons. Touching edges count
// as overlap only when the shared area is nonzero (strict interior overlap).
bool convex_overlap(const Poly2& a, const Poly2& b);

} // namespace fyi
