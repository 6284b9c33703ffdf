#include "fyi/polygon.hpp"

#include <algorithm>
#include <limits>

namespace fyi {

Poly2 convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    const size_t n = pts.size();
    if (n <= 2) return pts;

    std::vector<Vec2> hull(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) { // lower
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    for (size_t i = n - 1, t = k + 1; i-- > 0;) { // upper
        while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

Bounds2 poly_bounds(const Poly2& poly) {
    Bounds2 b{{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()},
              {std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()}};
    for (const auto& p : poly) {
        b.min.x = std::min(b.min.x, p.x);
        b.min.y = std::min(b.min.y, p.y);
        b.max.x = std::max(b.max.x, p.x);
        b.max.y = std::max(b.max.y, p.y);
    }
    return b;
}

Poly2 translated(const Poly2& poly, const Vec2& offset) {
    Poly2 out = poly;
    for (auto& p : out) p = p + offset;
    return out;
}

bool point_in_convex(const Poly2& poly, const Vec2& p) {
    const size_t n = poly.size();
    if (n < 3) return false;
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        if (cross(b - a, p - a) < -1e-12) return false;
    }
    return true;
}

static Vec2 closest_on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 <= 0.0) return a;
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return a + ab * t;
}

Vec2 closest_point_in_convex(const Poly2& poly, const Vec2& p) {
    if (poly.empty()) return p;
    if (poly.size() >= 3 && point_in_convex(poly, p)) return p;
    Vec2 best = poly[0];
    double best_d2 = std::numeric_limits<double>::max();
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2 q = closest_on_segment(poly[i], poly[(i + 1) % n], p);
        const Vec2 d = q - p;
        const double d2 = dot(d, d);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = q;
        }
    }
    return best;
}

double distance_to_convex(const Poly2& poly, const Vec2& p) {
    const Vec2 q = closest_point_in_convex(poly, p);
    return norm(q - p);
}

static double segment_segment_distance(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1) {
    const auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) { return cross(q - p, r - p); };
    const double d1 = orient(a0, a1, b0), d2 = orient(a0, a1, b1);
    const double d3 = orient(b0, b1, a0), d4 = orient(b0, b1, a1);
    if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) return 0.0; // proper crossing
    double best = norm(closest_on_segment(a0, a1, b0) - b0);
    best = std::min(best, norm(closest_on_segment(a0, a1, b1) - b1));
    best = std::min(best, norm(closest_on_segment(b0, b1, a0) - a0));
    best = std::min(best, norm(closest_on_segment(b0, b1, a1) - a1));
    return best;
}

double square_to_convex_distance(const Vec2& square_min, const Vec2& square_max, const Poly2& poly) {
    if (poly.empty()) return std::numeric_limits<double>::max();
    const Poly2 square{{square_min.x, square_min.y},
                       {square_max.x, square_min.y},
                       {square_max.x, square_max.y},
                       {square_min.x, square_max.y}};
    // Containment either way means they intersect.
    if (point_in_convex(poly, square[0])) return 0.0;
    if (poly.size() >= 3 && point_in_convex(square, poly[0])) return 0.0;

    double best = std::numeric_limits<double>::max();
    const size_t n = poly.size();
    for (size_t i = 0; i < 4; ++i) {
        const Vec2& a0 = square[i];
        const Vec2& a1 = square[(i + 1) % 4];
        if (n == 1) {
            best = std::min(best, norm(closest_on_segment(a0, a1, poly[0]) - poly[0]));
            continue;
        }
        for (size_t j = 0; j < n; ++j) {
            best = std::min(best, segment_segment_distance(a0, a1, poly[j], poly[(j + 1) % n]));
            if (best == 0.0) return 0.0;
        }
    }
    return best;
}

bool convex_overlap(const Poly2& a, const Poly2& b) {
    if (a.size() < 3 || b.size() < 3) return false;
    const auto separated_by_edges_of = [](const Poly2& edges, const Poly2& other) {
        const size_t n = edges.size();
        for (size_t i = 0; i < n; ++i) {
            const Vec2 e = edges[(i + 1) % n] - edges[i];
            const Vec2 axis{-e.y, e.x}; // outward-ish normal, direction irrelevant
            double amin = std::numeric_limits<double>::max(), amax = std::numeric_limits<double>::lowest();
            double bmin = amin, bmax = amax;
            for (const auto& p : edges) {
                const double d = dot(axis, p);
                amin = std::min(amin, d);
                amax = std::max(amax, d);
            }
            for (const auto& p : other) {
                const double d = dot(axis, p);
                bmin = std::min(bmin, d);
                bmax = std::max(bmax, d);
            }
            if (amax <= bmin + 1e-12 || bmax <= amin + 1e-12) return true;
        }
        return false;
    };
    return !separated_by_edges_of(a, b) && !separated_by_edges_of(b, a);
}

} // namespace fyi
