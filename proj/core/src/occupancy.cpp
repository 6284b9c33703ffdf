#include "fyi/occupancy.hpp"

#include <algorithm>
#include <cmath>

namespace fyi {

OccupancyGrid::OccupancyGrid(Vec2 extent_min, Vec2 extent_max, double cell_size) {
    if (!(cell_size > 0.0)) raise(errc::config_error, "cell size must be positive");
    if (!(extent_max.x > extent_min.x && extent_max.y > extent_min.y))
        raise(errc::config_error, "grid extent must have positive area");
    min_ = extent_min;
    max_ = extent_max;
    cell_ = cell_size;
    // Round up, with a nudge so exact multiples do not gain a spurious cell.
    nx_ = static_cast<int>(std::ceil((max_.x - min_.x) / cell_ - 1e-9));
    ny_ = static_cast<int>(std::ceil((max_.y - min_.y) / cell_ - 1e-9));
    nx_ = std::max(nx_, 1);
    ny_ = std::max(ny_, 1);
    counts_.assign(static_cast<size_t>(nx_) * ny_, 0);
}

std::vector<int32_t> OccupancyGrid::cells_under(const Poly2& poly, double clearance) const {
    std::vector<int32_t> out;
    if (poly.empty()) return out;
    Bounds2 b = poly_bounds(poly);
    b.min.x -= clearance;
    b.min.y -= clearance;
    b.max.x += clearance;
    b.max.y += clearance;
    const int ix0 = std::max(0, static_cast<int>(std::floor((b.min.x - min_.x) / cell_)));
    const int iy0 = std::max(0, static_cast<int>(std::floor((b.min.y - min_.y) / cell_)));
    const int ix1 = std::min(nx_ - 1, static_cast<int>(std::floor((b.max.x - min_.x) / cell_)));
    const int iy1 = std::min(ny_ - 1, static_cast<int>(std::floor((b.max.y - min_.y) / cell_)));
    for (int iy = iy0; iy <= iy1; ++iy) {
        for (int ix = ix0; ix <= ix1; ++ix) {
            const Vec2 lo{min_.x + ix * cell_, min_.y + iy * cell_};
            const Vec2 hi{lo.x + cell_, lo.y + cell_};
            if (square_to_convex_distance(lo, hi, poly) <= clearance)
                out.push_back(static_cast<int32_t>(index(ix, iy)));
        }
    }
    return out;
}

bool OccupancyGrid::all_free(const std::vector<int32_t>& cells) const {
    for (const int32_t c : cells)
        if (counts_[static_cast<size_t>(c)] > 0) return false;
    return true;
}

void OccupancyGrid::mark(const std::vector<int32_t>& cells) {
    for (const int32_t c : cells) ++counts_[static_cast<size_t>(c)];
}

void OccupancyGrid::unmark(const std::vector<int32_t>& cells) {
    for (const int32_t c : cells) {
        auto& v = counts_[static_cast<size_t>(c)];
        if (v > 0) --v;
    }
}

void OccupancyGrid::block_outside(const Poly2& poly) {
    for (int iy = 0; iy < ny_; ++iy) {
        for (int ix = 0; ix < nx_; ++ix) {
            const Vec2 lo{min_.x + ix * cell_, min_.y + iy * cell_};
            const Vec2 hi{lo.x + cell_, lo.y + cell_};
            // A cell survives only when fully inside the polygon.
            const Poly2 corners{{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}};
            bool inside = poly.size() >= 3;
            for (const auto& c : corners)
                inside = inside && point_in_convex(poly, c);
            if (!inside) ++counts_[index(ix, iy)];
        }
    }
}

std::optional<Vec2> OccupancyGrid::find_free_region(const Poly2& footprint, double clearance) const {
    return find_free_region(footprint, clearance, extent_center());
}

std::optional<Vec2> OccupancyGrid::find_free_region(const Poly2& footprint, double clearance,
                                                    Vec2 focus) const {
    if (footprint.empty()) return std::nullopt;

    struct Candidate {
        double dist2;
        double angle;
        int iy, ix;
    };
    std::vector<Candidate> order;
    order.reserve(static_cast<size_t>(nx_) * ny_);
    for (int iy = 0; iy < ny_; ++iy) {
        for (int ix = 0; ix < nx_; ++ix) {
            const Vec2 c = cell_center(ix, iy);
            const double dx = c.x - focus.x, dy = c.y - focus.y;
            order.push_back({dx * dx + dy * dy, std::atan2(dy, dx), iy, ix});
        }
    }
    std::sort(order.begin(), order.end(), [](const Candidate& a, const Candidate& b) {
        if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
        if (a.angle != b.angle) return a.angle < b.angle;
        if (a.iy != b.iy) return a.iy < b.iy;
        return a.ix < b.ix;
    });

    // Summed-area table over occupancy: a candidate whose dilated bounding
    // box holds no occupied cell is accepted without the exact polygon test
    // (covered cells are a subset of the box cells, so the answer is the
    // same either way).
    std::vector<int32_t> sat(static_cast<size_t>(nx_ + 1) * (ny_ + 1), 0);
    for (int iy = 0; iy < ny_; ++iy)
        for (int ix = 0; ix < nx_; ++ix)
            sat[(iy + 1) * (nx_ + 1) + (ix + 1)] = (counts_[index(ix, iy)] > 0 ? 1 : 0) +
                                                   sat[iy * (nx_ + 1) + (ix + 1)] +
                                                   sat[(iy + 1) * (nx_ + 1) + ix] -
                                                   sat[iy * (nx_ + 1) + ix];
    const auto box_occupied = [&](int ix0, int iy0, int ix1, int iy1) {
        ix0 = std::max(ix0, 0);
        iy0 = std::max(iy0, 0);
        ix1 = std::min(ix1, nx_ - 1);
        iy1 = std::min(iy1, ny_ - 1);
        if (ix0 > ix1 || iy0 > iy1) return 0;
        return sat[(iy1 + 1) * (nx_ + 1) + (ix1 + 1)] - sat[iy0 * (nx_ + 1) + (ix1 + 1)] -
               sat[(iy1 + 1) * (nx_ + 1) + ix0] + sat[iy0 * (nx_ + 1) + ix0];
    };
    const Bounds2 shape = poly_bounds(footprint);

    // Largest axis-aligned square around the bounds center that provably
    // stays inside the polygon; cells wholly inside it are covered cells, so
    // one occupied cell there rejects the candidate without the exact test.
    const Vec2 shape_center{(shape.min.x + shape.max.x) * 0.5, (shape.min.y + shape.max.y) * 0.5};
    double edge_dist = 1e300;
    if (footprint.size() >= 3 && point_in_convex(footprint, shape_center)) {
        for (size_t i = 0; i < footprint.size(); ++i) {
            const Vec2& a = footprint[i];
            const Vec2& b = footprint[(i + 1) % footprint.size()];
            const Vec2 ab = b - a;
            const double len2 = dot(ab, ab);
            const double t = len2 > 0 ? std::clamp(dot(shape_center - a, ab) / len2, 0.0, 1.0) : 0.0;
            edge_dist = std::min(edge_dist, norm(a + ab * t - shape_center));
        }
    } else {
        edge_dist = 0.0;
    }
    const double inner_half = edge_dist / std::sqrt(2.0);

    for (const auto& cand : order) {
        const Vec2 pos = cell_center(cand.ix, cand.iy);
        // Reject anchors whose footprint leaves the extent.
        if (shape.min.x + pos.x < min_.x - 1e-9 || shape.min.y + pos.y < min_.y - 1e-9 ||
            shape.max.x + pos.x > max_.x + 1e-9 || shape.max.y + pos.y > max_.y + 1e-9)
            continue;
        // One extra cell of margin keeps the filter conservative when
        // footprint edges land exactly on cell boundaries.
        const int ix0 = static_cast<int>(std::floor((shape.min.x + pos.x - clearance - min_.x) / cell_)) - 1;
        const int iy0 = static_cast<int>(std::floor((shape.min.y + pos.y - clearance - min_.y) / cell_)) - 1;
        const int ix1 = static_cast<int>(std::floor((shape.max.x + pos.x + clearance - min_.x) / cell_)) + 1;
        const int iy1 = static_cast<int>(std::floor((shape.max.y + pos.y + clearance - min_.y) / cell_)) + 1;
        if (box_occupied(ix0, iy0, ix1, iy1) == 0) return pos;
        if (inner_half > cell_) {
            // Shrink by one cell so only provably-interior cells count.
            const int jx0 = static_cast<int>(
                std::ceil((shape_center.x + pos.x - inner_half - min_.x) / cell_)) + 1;
            const int jy0 = static_cast<int>(
                std::ceil((shape_center.y + pos.y - inner_half - min_.y) / cell_)) + 1;
            const int jx1 = static_cast<int>(
                std::floor((shape_center.x + pos.x + inner_half - min_.x) / cell_)) - 2;
            const int jy1 = static_cast<int>(
                std::floor((shape_center.y + pos.y + inner_half - min_.y) / cell_)) - 2;
            if (box_occupied(jx0, jy0, jx1, jy1) > 0) continue;
        }
        // Exact test, geometry only on occupied cells, first hit rejects.
        // Equivalent to all_free(cells_under(placed, clearance)): a
        // candidate fails exactly when some occupied cell is covered.
        const Poly2 placed = translated(footprint, pos);
        const int cx0 = std::max(0, ix0 + 1), cy0 = std::max(0, iy0 + 1);
        const int cx1 = std::min(nx_ - 1, ix1 - 1), cy1 = std::min(ny_ - 1, iy1 - 1);
        bool free = true;
        for (int iy = cy0; iy <= cy1 && free; ++iy) {
            for (int ix = cx0; ix <= cx1 && free; ++ix) {
                if (counts_[index(ix, iy)] == 0) continue;
                const Vec2 lo{min_.x + ix * cell_, min_.y + iy * cell_};
                const Vec2 hi{lo.x + cell_, lo.y + cell_};
                if (square_to_convex_distance(lo, hi, placed) <= clearance) free = false;
            }
        }
        if (free) return pos;
    }
    return std::nullopt;
}

} // namespace fyi
