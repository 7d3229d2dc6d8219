#pragma once

#include <cmath>
#include <optional>

#include "winnav/core/locality_map.hpp"
#include "winnav/core/types.hpp"

namespace winnav {

// Nearest-cell index of a world coordinate along one axis, with exact ties
// broken toward the lower index. Cell i spans [i*s, (i+1)*s).
inline int nearest_cell_index(double coord, double s) {
  double u = coord / s - 0.5;  // continuous index of cell centers
  return static_cast<int>(std::ceil(u - 0.5));
}

// World position under a local map cell for an agent at `pose`.
// Row 0 is ahead; columns grow to the agent's right.
inline Vec2 local_cell_world_point(const Pose& pose, int row, int col, int g, double s) {
  int h = (g - 1) / 2;
  double fwd = (h - row) * s;
  double right = (col - h) * s;
  Vec2 f = heading_dir(pose.heading);
  Vec2 r{f.y, -f.x};  // 90 degrees clockwise of forward
  return {pose.position.x + fwd * f.x + right * r.x,
          pose.position.y + fwd * f.y + right * r.y};
}

// Rigid-body transform of a local map cell into global grid indices.
// Quarter-turn headings are exact; 45 degree headings round to the nearest
// cell with ties toward the lower index. Returns nullopt when the image
// falls outside the grid (caller drops the cell).
inline std::optional<Cell> local_to_global(const Pose& pose, int row, int col, int g,
                                           const GlobalGrid& grid) {
  if (row < 0 || col < 0 || row >= g || col >= g) throw UsageError("local cell out of map");
  Vec2 p = local_cell_world_point(pose, row, col, g, grid.cell_size());
  Cell cell{nearest_cell_index(p.x - grid.origin().x, grid.cell_size()),
            nearest_cell_index(p.y - grid.origin().y, grid.cell_size())};
  if (!grid.in_bounds(cell.x, cell.y)) return std::nullopt;
  return cell;
}

// Inverse transform: local map cell under a global cell for the same pose.
// Exact inverse for quarter-turn headings; nearest-cell for 45 degree ones.
inline std::optional<Cell> global_to_local(const Pose& pose, Cell global_cell, int g,
                                           const GlobalGrid& grid) {
  Vec2 p = grid.cell_center(global_cell.x, global_cell.y);
  Vec2 d = p - pose.position;
  Vec2 f = heading_dir(pose.heading);
  Vec2 r{f.y, -f.x};
  double fwd = d.x * f.x + d.y * f.y;
  double right = d.x * r.x + d.y * r.y;
  int h = (g - 1) / 2;
  double s = grid.cell_size();
  // fwd = (h - row) * s  =>  row = h - fwd / s
  int row = static_cast<int>(std::ceil((h - fwd / s) - 0.5));
  int col = static_cast<int>(std::ceil((h + right / s) - 0.5));
  if (row < 0 || col < 0 || row >= g || col >= g) return std::nullopt;
  return Cell{col, row};  // x = col, y = row
}

// Confidence-weighted fusion of a locality map into the global grid.
// Per-cell observation weight is base_weight scaled by how much mass the
// map assigns to real categories (1 - p(unknown)); cells mapping outside
// the grid are skipped.
inline void fuse_into_global(GlobalGrid& grid, const LocalityMap& map, const Pose& pose,
                             double base_weight = 1.0) {
  int g = map.g();
  for (int r = 0; r < g; ++r) {
    for (int c = 0; c < g; ++c) {
      const double* dist = map.cell(r, c);
      double w = base_weight * (1.0 - dist[static_cast<int>(RoomType::kUnknown)]);
      if (w <= 0.0) continue;
      std::optional<Cell> cell = local_to_global(pose, r, c, g, grid);
      if (!cell) continue;
      grid.accumulate(cell->x, cell->y, dist, w);
    }
  }
}

}  // namespace winnav
