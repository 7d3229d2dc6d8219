#include "winnav/worldgen/observe.hpp"

#include <cmath>
#include <limits>

namespace winnav {

namespace {

constexpr double kDirEps = 1e-12;
constexpr double kCornerEps = 1e-12;

struct Walker {
  const HouseLayout& house;
  Vec2 from;
  Vec2 dir;
  Cell cur;
  std::int16_t start_room;
  int sx = 0, sy = 0;
  double t_max_x = std::numeric_limits<double>::infinity();
  double t_max_y = std::numeric_limits<double>::infinity();
  double t_delta_x = std::numeric_limits<double>::infinity();
  double t_delta_y = std::numeric_limits<double>::infinity();

  RayHit hit;
  bool blocked = false;

  Walker(const HouseLayout& h, Vec2 f, Vec2 d) : house(h), from(f), dir(d) {
    cur = house.cell_of(from);
    start_room = house.at(cur);
    if (start_room < 0) throw UsageError("ray origin is not inside a room");
    double s = house.cell_size;
    if (dir.x > kDirEps) sx = 1;
    else if (dir.x < -kDirEps) sx = -1;
    if (dir.y > kDirEps) sy = 1;
    else if (dir.y < -kDirEps) sy = -1;
    if (sx == 0 && sy == 0) throw UsageError("zero ray direction");
    if (sx != 0) {
      double boundary = (cur.x + (sx > 0 ? 1 : 0)) * s;
      t_max_x = (boundary - from.x) / dir.x;
      t_delta_x = s / std::fabs(dir.x);
    }
    if (sy != 0) {
      double boundary = (cur.y + (sy > 0 ? 1 : 0)) * s;
      t_max_y = (boundary - from.y) / dir.y;
      t_delta_y = s / std::fabs(dir.y);
    }
    hit.last_cell = cur;
  }

  // One boundary crossing; false when blocked (hit.depth set).
  bool cross(Cell next, double t) {
    std::int16_t target = house.at(next);
    if (target < 0 || !house.boundary_passable(cur, next)) {
      hit.depth = t;
      blocked = true;
      return false;
    }
    if (house.at(cur) != target && !hit.door) {  // first doorway on the ray
      hit.door = true;
      hit.door_depth = t;
    }
    cur = next;
    hit.last_cell = cur;
    if (target != start_room && hit.first_other == RoomType::kUnknown)
      hit.first_other = house.type_of_room(target);
    return true;
  }

  // Advances to the next crossing; false when blocked or past max_t.
  bool step(double max_t) {
    bool corner = sx != 0 && sy != 0 && std::fabs(t_max_x - t_max_y) < kCornerEps;
    if (corner) {
      double t = t_max_x;
      if (t > max_t) return false;
      if (!cross({cur.x + sx, cur.y}, t)) return false;
      if (!cross({cur.x, cur.y + sy}, t)) return false;
      t_max_x += t_delta_x;
      t_max_y += t_delta_y;
    } else if (t_max_x < t_max_y) {
      double t = t_max_x;
      if (t > max_t) return false;
      if (!cross({cur.x + sx, cur.y}, t)) return false;
      t_max_x += t_delta_x;
    } else {
      double t = t_max_y;
      if (t > max_t) return false;
      if (!cross({cur.x, cur.y + sy}, t)) return false;
      t_max_y += t_delta_y;
    }
    return true;
  }
};

}  // namespace

RayHit cast_ray(const HouseLayout& house, Vec2 from, Vec2 dir) {
  Walker w(house, from, dir);
  int limit = 4 * (house.width + house.height);
  for (int i = 0; i < limit; ++i) {
    if (!w.step(std::numeric_limits<double>::infinity())) break;
  }
  if (!w.blocked) throw DataError("ray escaped the house (missing wall ring)");
  return w.hit;
}

bool line_of_sight(const HouseLayout& house, Vec2 from, Vec2 to) {
  Vec2 d = to - from;
  double dist = d.norm();
  if (dist == 0.0) return true;
  Walker w(house, from, d);
  int limit = 4 * (house.width + house.height);
  // t is measured in units of |d| == dist, so the segment ends at t = 1.
  for (int i = 0; i < limit; ++i) {
    if (!w.step(1.0)) break;
  }
  return !w.blocked;
}

PanoramicObservation observe(const HouseLayout& house, const Pose& pose) {
  Cell at = house.cell_of(pose.position);
  if (house.at(at) < 0) throw UsageError("observe: pose is not on a navigable cell");
  PanoramicObservation obs;
  static const double kCos45[8] = {1.0, 0.7071067811865476, 0.0, -0.7071067811865476,
                                   -1.0, -0.7071067811865476, 0.0, 0.7071067811865476};
  static const double kSin45[8] = {0.0, 0.7071067811865476, 1.0, 0.7071067811865476,
                                   0.0, -0.7071067811865476, -1.0, -0.7071067811865476};
  for (int k = 0; k < kNumHeadings; ++k) {
    int abs_dir = (pose.heading + k) & 7;
    RayHit ray = cast_ray(house, pose.position, heading_dir(abs_dir));
    SectorView& sv = obs.sectors[static_cast<std::size_t>(k)];
    sv.type = ray.first_other == RoomType::kUnknown
                  ? house.type_of_room(house.at(at))
                  : ray.first_other;
    sv.depth = ray.depth;
    sv.door = ray.door;
    sv.door_depth = ray.door_depth;
    sv.orientation = {kCos45[k], kSin45[k], 1.0, 0.0};
  }
  return obs;
}

}  // namespace winnav
