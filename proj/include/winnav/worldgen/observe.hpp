#pragma once

#include <array>

#include "winnav/core/types.hpp"

namespace winnav {

// What one panoramic sector reports: the first room type visible along the
// sector's central ray (own room unless the ray passes a doorway), the ray
// depth to the first blocking wall, whether any doorway was crossed, and
// the orientation encoding [cos th, sin th, cos phi, sin phi] relative to
// the agent heading (phi = 0 in a flat world).
struct SectorView {
  RoomType type = RoomType::kUnknown;
  double depth = 0.0;
  bool door = false;
  double door_depth = 0.0;  // distance to the first doorway crossed; 0 if none
  std::array<double, 4> orientation{1.0, 0.0, 1.0, 0.0};
};

struct PanoramicObservation {
  std::array<SectorView, kNumHeadings> sectors;
};

struct RayHit {
  double depth = 0.0;           // distance to the blocking boundary
  RoomType first_other = RoomType::kUnknown;  // kUnknown when no doorway crossed
  bool door = false;
  double door_depth = 0.0;      // distance at the first doorway crossing
  Cell last_cell;               // final cell the ray occupied
};

// Casts a ray from a point inside a room along an arbitrary direction.
// The ray crosses cell boundaries; a crossing is passable between cells of
// the same room or through a doorway. Exact corner hits resolve x-first.
RayHit cast_ray(const HouseLayout& house, Vec2 from, Vec2 dir);

// Line of sight between two points (every boundary along the ray passable).
bool line_of_sight(const HouseLayout& house, Vec2 from, Vec2 to);

// Panoramic observation at a pose: one SectorView per heading sector, with
// sector 0 aligned to the agent's heading. Errors if the pose is not on a
// navigable (room) cell.
PanoramicObservation observe(const HouseLayout& house, const Pose& pose);

}  // namespace winnav
