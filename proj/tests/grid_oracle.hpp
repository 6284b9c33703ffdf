#pragma once

// Independent free-region oracle: exhaustive scan of every cell, ordered by
// (squared distance to focus, angle, iy, ix), with its own square/polygon
// distance predicate. Shares nothing with OccupancyGrid::find_free_region
// except the inputs.

#include <optional>

#include "fyi/occupancy.hpp"

namespace oracle {

inline double point_seg_dist(const fyi::Vec2& p, const fyi::Vec2& a, const fyi::Vec2& b) {
    const fyi::Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const fyi::Vec2 q = a + ab * t;
    return norm(q - p);
}

inline bool segs_cross(const fyi::Vec2& a, const fyi::Vec2& b, const fyi::Vec2& c,
                       const fyi::Vec2& d) {
    const auto orient = [](const fyi::Vec2& p, const fyi::Vec2& q, const fyi::Vec2& r) {
        return cross(q - p, r - p);
    };
    const double o1 = orient(a, b, c), o2 = orient(a, b, d);
    const double o3 = orient(c, d, a), o4 = orient(c, d, b);
    return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
}

inline bool point_in_poly(const fyi::Poly2& poly, const fyi::Vec2& p) {
    if (poly.size() < 3) return false;
    for (size_t i = 0; i < poly.size(); ++i) {
        const fyi::Vec2& a = poly[i];
        const fyi::Vec2& b = poly[(i + 1) % poly.size()];
        if (cross(b - a, p - a) < -1e-12) return false;
    }
    return true;
}

inline double square_poly_dist(const fyi::Vec2& lo, const fyi::Vec2& hi, const fyi::Poly2& poly) {
    const fyi::Poly2 square{{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}};
    for (const auto& v : poly)
        if (v.x >= lo.x && v.x <= hi.x && v.y >= lo.y && v.y <= hi.y) return 0.0;
    for (const auto& c : square)
        if (point_in_poly(poly, c)) return 0.0;
    for (size_t i = 0; i < 4; ++i)
        for (size_t j = 0; j < poly.size(); ++j)
            if (segs_cross(square[i], square[(i + 1) % 4], poly[j], poly[(j + 1) % poly.size()]))
                return 0.0;
    double best = 1e300;
    for (size_t i = 0; i < 4; ++i) {
        const fyi::Vec2& a = square[i];
        const fyi::Vec2& b = square[(i + 1) % 4];
        for (size_t j = 0; j < poly.size(); ++j) {
            const fyi::Vec2& c = poly[j];
            const fyi::Vec2& d = poly[(j + 1) % poly.size()];
            best = std::min(best, point_seg_dist(c, a, b));
            best = std::min(best, point_seg_dist(d, a, b));
            best = std::min(best, point_seg_dist(a, c, d));
            best = std::min(best, point_seg_dist(b, c, d));
        }
    }
    return best;
}

// The oracle re-reads occupancy through the public counts() view.
inline std::optional<fyi::Vec2> free_region(const fyi::OccupancyGrid& grid,
                                            const fyi::Poly2& footprint, double clearance,
                                            fyi::Vec2 focus) {
    struct Best {
        double dist2 = 1e300;
        double angle = 0;
        int iy = 0, ix = 0;
        bool set = false;
        fyi::Vec2 pos;
    } best;

    for (int iy = 0; iy < grid.ny(); ++iy) {
        for (int ix = 0; ix < grid.nx(); ++ix) {
            const fyi::Vec2 pos = grid.cell_center(ix, iy);
            const fyi::Poly2 placed = fyi::translated(footprint, pos);
            const fyi::Bounds2 b = fyi::poly_bounds(placed);
            if (b.min.x < grid.extent_min().x - 1e-9 || b.min.y < grid.extent_min().y - 1e-9 ||
                b.max.x > grid.extent_max().x + 1e-9 || b.max.y > grid.extent_max().y + 1e-9)
                continue;

            bool free = true;
            bool any = false;
            for (int cy = 0; cy < grid.ny() && free; ++cy) {
                for (int cx = 0; cx < grid.nx() && free; ++cx) {
                    const fyi::Vec2 lo{grid.extent_min().x + cx * grid.cell_size(),
                                       grid.extent_min().y + cy * grid.cell_size()};
                    const fyi::Vec2 hi{lo.x + grid.cell_size(), lo.y + grid.cell_size()};
                    if (square_poly_dist(lo, hi, placed) <= clearance) {
                        any = true;
                        if (grid.occupied(cx, cy)) free = false;
                    }
                }
            }
            if (!free || !any) continue;

            const double dx = pos.x - focus.x, dy = pos.y - focus.y;
            const double dist2 = dx * dx + dy * dy;
            const double angle = std::atan2(dy, dx);
            const bool wins =
                !best.set || dist2 < best.dist2 ||
                (dist2 == best.dist2 &&
                 (angle < best.angle ||
                  (angle == best.angle && (iy < best.iy || (iy == best.iy && ix < best.ix)))));
            if (wins) best = {dist2, angle, iy, ix, true, pos};
        }
    }
    if (!best.set) return std::nullopt;
    return best.pos;
}

} // namespace oracle
