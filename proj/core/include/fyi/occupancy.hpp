#pragma once

// Ground-plane occupancy raster. Cells hold reference counts so that marking
// and unmarking an instance always restores the prior state, even where
// footprints legitimately share cells; `occupied` exposes the boolean view.

#include <cstdint>
#include <optional>
#include <vector>

#include "fyi/polygon.hpp"

namespace fyi {

class OccupancyGrid {
  public:
    OccupancyGrid() = default;
    // Cell counts are ceil(extent / cell_size) per axis.
    OccupancyGrid(Vec2 extent_min, Vec2 extent_max, double cell_size);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double cell_size() const { return cell_; }
    Vec2 extent_min() const { return min_; }
    Vec2 extent_max() const { return max_; }
    Vec2 extent_center() const { return {(min_.x + max_.x) * 0.5, (min_.y + max_.y) * 0.5}; }

    bool occupied(int ix, int iy) const { return counts_[index(ix, iy)] > 0; }
    Vec2 cell_center(int ix, int iy) const {
        return {min_.x + (ix + 0.5) * cell_, min_.y + (iy + 0.5) * cell_};
    }
    bool contains(const Vec2& p) const {
        return p.x >= min_.x && p.x <= max_.x && p.y >= min_.y && p.y <= max_.y;
    }

    // Cells whose square touches the polygon dilated by `clearance`.
    // Conservative and exact: a cell is covered iff its closed square lies
    // within `clearance` of the polygon.
    std::vector<int32_t> cells_under(const Poly2& poly, double clearance) const;

    bool all_free(const std::vector<int32_t>& cells) const;
    void mark(const std::vector<int32_t>& cells);
    void unmark(const std::vector<int32_t>& cells);

    // Occupy every cell NOT covered by the polygon (no clearance). Used to
    // restrict a support grid to the actual surface region.
    void block_outside(const Poly2& poly);

    // Deterministic center-out scan: candidate cell centers ordered by
    // squared distance to `focus`, then angle, then (iy, ix); the first
    // candidate whose dilated footprint cells are all free wins. The
    // footprint polygon is relative to the returned anchor position.
    std::optional<Vec2> find_free_region(const Poly2& footprint, double clearance) const;
    std::optional<Vec2> find_free_region(const Poly2& footprint, double clearance, Vec2 focus) const;

    const std::vector<uint16_t>& counts() const { return counts_; }

  private:
    size_t index(int ix, int iy) const { return static_cast<size_t>(iy) * nx_ + ix; }

    Vec2 min_{}, max_{};
    double cell_ = 0.05;
    int nx_ = 0, ny_ = 0;
    std::vector<uint16_t> counts_;
};

} // namespace fyi
